use super::critical::{ell_jet, ell_value_slope};
use super::{critical_points, BoundaryCurve, CriticalPointReport, LambdaContext, Sign};
use crate::error::{Error, Result};
use crate::scalar::{frac, from_usize, lit, to_f64, Scalar};

/// Number of tabulation cells for each involution lift.
pub const TABLE_SIZE: usize = 4096;

/// Within this parameter distance of a critical point the involution is
/// evaluated from its local expansion instead of a root solve.
const TAYLOR_RADIUS: f64 = 1e-5;

/// Tabulated decreasing lift `G` of one involution `γ±`.
///
/// `G(s + 1) = G(s) - 1`, `G∘G = id` and `G` fixes the minimum of `ℓ±∘x`.
#[derive(Clone, Debug)]
pub struct Involution<T> {
    sign: Sign,
    s_min: T,
    s_max: T,
    /// Length of the arc from the minimum forward to the maximum.
    up_len: T,
    /// `ℓ'''/(3ℓ'')` at the minimum and maximum.
    curv: [T; 2],
    knots: Vec<T>,
    slopes: Vec<T>,
}

/// Chess billiard map `b = γ⁺∘γ⁻` of a λ-simple boundary.
#[derive(Clone, Debug)]
pub struct ChessBilliardMap<T> {
    curve: BoundaryCurve<T>,
    ctx: LambdaContext<T>,
    report: CriticalPointReport<T>,
    inv: [Involution<T>; 2],
    shift: T,
}

/// Which monotone arc of `ℓ±∘x` to use when inverting a level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcSide {
    /// From the minimum forward to the maximum (ℓ increasing).
    Rising,
    /// From the maximum forward to the minimum (ℓ decreasing).
    Falling,
}

impl<T: Scalar> ChessBilliardMap<T> {
    pub fn new(curve: &BoundaryCurve<T>, ctx: LambdaContext<T>) -> Result<Self> {
        let report = critical_points(curve, &ctx)?;
        if !report.is_simple {
            let counts = [report.points[0].len(), report.points[1].len()];
            return Err(Error::NotSimple {
                lambda: to_f64(ctx.lambda()),
                detail: format!("critical point counts (+, -) = {counts:?} or degenerate"),
            });
        }
        let inv = [Sign::Plus, Sign::Minus].map(|sign| Involution::build(curve, &ctx, &report, sign));
        let mut map = Self { curve: curve.clone(), ctx, report, inv, shift: T::zero() };
        let b0 = map.lift(T::zero());
        map.shift = -b0.floor();
        Ok(map)
    }

    pub fn curve(&self) -> &BoundaryCurve<T> {
        &self.curve
    }

    pub fn context(&self) -> &LambdaContext<T> {
        &self.ctx
    }

    pub fn lambda(&self) -> T {
        self.ctx.lambda()
    }

    pub fn report(&self) -> &CriticalPointReport<T> {
        &self.report
    }

    pub fn involution_table(&self, sign: Sign) -> &Involution<T> {
        &self.inv[sign.index()]
    }

    /// `γ±(s)` in `[0, 1)` from the interpolated table.
    pub fn involution(&self, sign: Sign, s: T) -> T {
        frac(self.inv[sign.index()].eval(s))
    }

    /// `γ±(s)` in `[0, 1)` by a direct root solve on the complementary arc.
    pub fn involution_exact(&self, sign: Sign, s: T) -> T {
        frac(self.inv[sign.index()].exact(&self.curve, &self.ctx, s))
    }

    /// Decreasing lift `G±(s)`.
    pub fn involution_lift(&self, sign: Sign, s: T) -> T {
        self.inv[sign.index()].eval(s)
    }

    pub fn involution_lift_exact(&self, sign: Sign, s: T) -> T {
        self.inv[sign.index()].exact(&self.curve, &self.ctx, s)
    }

    /// Increasing lift `𝐛(s)` with `𝐛(s + 1) = 𝐛(s) + 1` and `0 ≤ 𝐛(0) < 1`.
    pub fn lift(&self, s: T) -> T {
        let n = s.floor();
        let u = s - n;
        let y = self.inv[1].eval(u);
        self.inv[0].eval(y) + self.shift + n
    }

    pub fn lift_exact(&self, s: T) -> T {
        let n = s.floor();
        let u = s - n;
        let y = self.inv[1].exact(&self.curve, &self.ctx, u);
        self.inv[0].exact(&self.curve, &self.ctx, y) + self.shift + n
    }

    /// Inverse of [`lift`](Self::lift): `γ⁻∘γ⁺` with the matching shift.
    pub fn inverse_lift(&self, t: T) -> T {
        let n = t.floor();
        let u = t - n;
        let y = self.inv[0].eval(u - self.shift);
        self.inv[1].eval(y) + n
    }

    /// `b(s)` in `[0, 1)`.
    pub fn chess_billiard(&self, s: T) -> T {
        frac(self.lift(s))
    }

    pub fn chess_billiard_exact(&self, s: T) -> T {
        frac(self.lift_exact(s))
    }

    /// `ℓ±(x(s))`.
    pub fn ell_along(&self, sign: Sign, s: T) -> T {
        ell_value_slope(&self.curve, &self.ctx, sign, s).0
    }

    /// Range `[min, max]` of `ℓ±∘x`.
    pub fn ell_range(&self, sign: Sign) -> (T, T) {
        let (lo, hi) = self.report.min_max(sign).expect("simple map");
        (lo.value, hi.value)
    }

    /// Parameter on the chosen monotone arc where `ℓ±∘x` equals `value`
    /// (clamped to the attained range).
    pub fn arc_preimage(&self, sign: Sign, value: T, side: ArcSide) -> T {
        let inv = &self.inv[sign.index()];
        let (lo, hi) = match side {
            ArcSide::Rising => (T::zero(), inv.up_len),
            ArcSide::Falling => (inv.up_len, T::one()),
        };
        let tau = inv.solve_level(&self.curve, &self.ctx, value, lo, hi);
        frac(inv.s_min + tau)
    }
}

impl<T: Scalar> Involution<T> {
    fn build(
        curve: &BoundaryCurve<T>,
        ctx: &LambdaContext<T>,
        report: &CriticalPointReport<T>,
        sign: Sign,
    ) -> Self {
        let (lo, hi) = report.min_max(sign).expect("simple report has two critical points");
        let three = lit::<T>(3.0);
        let mut inv = Self {
            sign,
            s_min: lo.s,
            s_max: hi.s,
            up_len: frac(hi.s - lo.s),
            curv: [
                lo.third_derivative / (three * lo.second_derivative),
                hi.third_derivative / (three * hi.second_derivative),
            ],
            knots: Vec::new(),
            slopes: Vec::new(),
        };
        let n = TABLE_SIZE;
        let nf = from_usize::<T>(n);
        let mut knots = Vec::with_capacity(n + 1);
        let mut slopes = Vec::with_capacity(n + 1);
        for j in 0..n {
            let s = from_usize::<T>(j) / nf;
            knots.push(inv.exact(curve, ctx, s));
            slopes.push(inv.exact_slope(curve, ctx, s, knots[j]));
        }
        knots.push(knots[0] - T::one());
        slopes.push(slopes[0]);
        limit_slopes(&knots, &mut slopes, nf);
        inv.knots = knots;
        inv.slopes = slopes;
        inv
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Parameters of the minimum and maximum of `ℓ±∘x`.
    pub fn critical_parameters(&self) -> (T, T) {
        (self.s_min, self.s_max)
    }

    /// Knot values `G(j / TABLE_SIZE)`, `j = 0..=TABLE_SIZE`.
    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    /// Interpolated lift.
    pub fn eval(&self, s: T) -> T {
        let n = s.floor();
        let u = s - n;
        let nf = from_usize::<T>(TABLE_SIZE);
        let x = u * nf;
        let j = x.floor().to_usize().unwrap_or(0).min(TABLE_SIZE - 1);
        let t = x - from_usize::<T>(j);
        let h = T::one() / nf;
        let (y0, y1) = (self.knots[j], self.knots[j + 1]);
        let (m0, m1) = (self.slopes[j] * h, self.slopes[j + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1 - n
    }

    /// Lift evaluated by root solving.
    pub fn exact(&self, curve: &BoundaryCurve<T>, ctx: &LambdaContext<T>, s: T) -> T {
        let n = s.floor();
        let u = s - n;
        let (tau, m) = if u >= self.s_min {
            (u - self.s_min, T::zero())
        } else {
            (u - self.s_min + T::one(), T::one())
        };
        self.s_min + self.local(curve, ctx, tau) + m - n
    }

    /// `g(τ)` with `G(s_min + τ) = s_min + g(τ)` for `τ ∈ [0, 1)`.
    fn local(&self, curve: &BoundaryCurve<T>, ctx: &LambdaContext<T>, tau: T) -> T {
        let r = lit::<T>(TAYLOR_RADIUS);
        if tau == T::zero() {
            return T::zero();
        }
        if tau < r {
            return -tau - self.curv[0] * tau * tau;
        }
        if T::one() - tau < r {
            let x = tau - T::one();
            return -x - self.curv[0] * x * x - T::one();
        }
        let x = tau - self.up_len;
        if x.abs() < r {
            return self.up_len - T::one() - x - self.curv[1] * x * x;
        }
        let level = ell_value_slope(curve, ctx, self.sign, self.s_min + tau).0;
        let tau2 = if tau < self.up_len {
            self.solve_level(curve, ctx, level, self.up_len, T::one())
        } else {
            self.solve_level(curve, ctx, level, T::zero(), self.up_len)
        };
        tau2 - T::one()
    }

    fn exact_slope(&self, curve: &BoundaryCurve<T>, ctx: &LambdaContext<T>, s: T, g: T) -> T {
        let r = lit::<T>(TAYLOR_RADIUS);
        let two = lit::<T>(2.0);
        let near = |c: T| {
            let d = s - c;
            d - d.round()
        };
        let (xa, xb) = (near(self.s_min), near(self.s_max));
        if xa.abs() < r {
            return -T::one() - two * self.curv[0] * xa;
        }
        if xb.abs() < r {
            return -T::one() - two * self.curv[1] * xb;
        }
        let d0 = ell_jet(curve, ctx, self.sign, s)[1];
        let d1 = ell_jet(curve, ctx, self.sign, g)[1];
        d0 / d1
    }

    /// Solves `ℓ(x(s_min + τ)) = level` for `τ ∈ [lo, hi]`, a monotone stretch.
    fn solve_level(&self, curve: &BoundaryCurve<T>, ctx: &LambdaContext<T>, level: T, lo: T, hi: T) -> T {
        let f = |t: T| {
            let (v, d) = ell_value_slope(curve, ctx, self.sign, self.s_min + t);
            (v - level, d)
        };
        let (mut a, mut b) = (lo, hi);
        let (fa, _) = f(a);
        let (fb, _) = f(b);
        if fa == T::zero() {
            return a;
        }
        if fb == T::zero() {
            return b;
        }
        if (fa > T::zero()) == (fb > T::zero()) {
            // level outside the attained range: clamp to the nearer end
            return if fa.abs() < fb.abs() { a } else { b };
        }
        let a_pos = fa > T::zero();
        let mut t = (a + b) * lit::<T>(0.5);
        let half = lit::<T>(0.5);
        for _ in 0..200 {
            let (v, d) = f(t);
            if v == T::zero() {
                return t;
            }
            if (v > T::zero()) == a_pos {
                a = t;
            } else {
                b = t;
            }
            let newton = t - v / d;
            let next = if d != T::zero() && newton > a && newton < b {
                newton
            } else {
                (a + b) * half
            };
            let step = (next - t).abs();
            t = next;
            if step <= T::epsilon() * lit::<T>(4.0) || b - a <= T::epsilon() * lit::<T>(4.0) {
                break;
            }
        }
        t
    }
}

/// Fritsch–Carlson limiter keeping the Hermite interpolant monotone.
fn limit_slopes<T: Scalar>(knots: &[T], slopes: &mut [T], nf: T) {
    let n = knots.len() - 1;
    let three = lit::<T>(3.0);
    for j in 0..n {
        let delta = (knots[j + 1] - knots[j]) * nf;
        if delta == T::zero() {
            slopes[j] = T::zero();
            slopes[j + 1] = T::zero();
            continue;
        }
        let a = slopes[j] / delta;
        let b = slopes[j + 1] / delta;
        if a < T::zero() {
            slopes[j] = T::zero();
        }
        if b < T::zero() {
            slopes[j + 1] = T::zero();
        }
        let (a, b) = (a.max(T::zero()), b.max(T::zero()));
        let r2 = a * a + b * b;
        if r2 > lit::<T>(9.0) {
            let t = three / r2.sqrt();
            slopes[j] = t * a * delta;
            slopes[j + 1] = t * b * delta;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn disk(lambda: f64) -> ChessBilliardMap<f64> {
        ChessBilliardMap::new(&BoundaryCurve::circle(), LambdaContext::new(lambda).unwrap()).unwrap()
    }

    fn circ_dist(a: f64, b: f64) -> f64 {
        let d = a - b;
        (d - d.round()).abs()
    }

    #[test]
    fn disk_involutions_at_half() {
        let m = disk(0.5);
        let alpha = PI / 6.0;
        for exact in [false, true] {
            let f = |sign, s| if exact { m.involution_exact(sign, s) } else { m.involution(sign, s) };
            assert!(circ_dist(f(Sign::Plus, 0.0), 2.0 * alpha / TAU) < 1e-12);
            assert!(circ_dist(f(Sign::Minus, 0.0), -2.0 * alpha / TAU) < 1e-12);
            let crit = alpha / TAU;
            assert!(circ_dist(f(Sign::Plus, crit), crit) < 1e-12);
        }
        assert!(circ_dist(m.chess_billiard(0.0), 4.0 * alpha / TAU) < 1e-12);
    }

    #[test]
    fn disk_quarter_turn() {
        let m = disk(0.5f64.sqrt());
        for s in [0.0, 0.17, 0.5, 0.93] {
            assert!(circ_dist(m.chess_billiard(s), s + 0.5) < 1e-12);
        }
    }

    #[test]
    fn lift_normalization_and_inverse() {
        let m = disk(0.3);
        let b0 = m.lift(0.0);
        assert!((0.0..1.0).contains(&b0));
        for s in [-1.3, 0.0, 0.25, 0.8, 4.1] {
            assert!((m.inverse_lift(m.lift(s)) - s).abs() < 1e-10);
            assert!((m.lift(s + 1.0) - m.lift(s) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn nonsimple_curve_rejected() {
        let c = BoundaryCurve::new(
            vec![0.1, 0.85, 0.1, -0.15],
            vec![0.0; 4],
            vec![0.0; 4],
            vec![0.0, 1.15, 0.1, -0.15],
            1024,
        )
        .unwrap();
        assert!(matches!(
            ChessBilliardMap::new(&c, LambdaContext::new(0.3).unwrap()),
            Err(Error::NotSimple { .. })
        ));
    }
}
