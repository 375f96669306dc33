use super::{BoundaryCurve, LambdaContext, Sign};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Scalar};

/// Relative degeneracy threshold for `|d²(ℓ±∘x)/ds²|`.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;

const SUBSAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalPoint<T> {
    /// Parameter in `[0, 1)`.
    pub s: T,
    pub value: T,
    pub second_derivative: T,
    pub third_derivative: T,
}

#[derive(Clone, Debug)]
pub struct CriticalPointReport<T> {
    /// Critical points of `ℓ⁺∘x` and `ℓ⁻∘x`, sorted by parameter.
    pub points: [Vec<CriticalPoint<T>>; 2],
    pub is_simple: bool,
    /// Simple, but some second derivative is within 10× of the degeneracy tolerance.
    pub fragile: bool,
    /// Absolute degeneracy tolerance used (relative tolerance times the amplitude of ℓ±).
    pub tolerance: [T; 2],
    pub lambda: T,
}

impl<T: Scalar> CriticalPointReport<T> {
    pub fn for_sign(&self, sign: Sign) -> &[CriticalPoint<T>] {
        &self.points[sign.index()]
    }

    /// `(minimum, maximum)` of `ℓ±∘x` when the configuration is simple.
    pub fn min_max(&self, sign: Sign) -> Option<(CriticalPoint<T>, CriticalPoint<T>)> {
        let pts = self.for_sign(sign);
        if pts.len() != 2 {
            return None;
        }
        if pts[0].value <= pts[1].value {
            Some((pts[0], pts[1]))
        } else {
            Some((pts[1], pts[0]))
        }
    }
}

/// `ℓ±(x(s))` and its first three parameter derivatives.
pub(crate) fn ell_jet<T: Scalar>(
    curve: &BoundaryCurve<T>,
    ctx: &LambdaContext<T>,
    sign: Sign,
    s: T,
) -> [T; 4] {
    let g = ctx.gradient(sign);
    let j = curve.jet(s);
    [0, 1, 2, 3].map(|k| g[0] * j.x[k][0] + g[1] * j.x[k][1])
}

pub(crate) fn ell_value_slope<T: Scalar>(
    curve: &BoundaryCurve<T>,
    ctx: &LambdaContext<T>,
    sign: Sign,
    s: T,
) -> (T, T) {
    let j = ell_jet(curve, ctx, sign, s);
    (j[0], j[1])
}

/// Locates every critical point of `ℓ±∘x` on the curve's sample grid and
/// decides λ-simplicity.
pub fn critical_points<T: Scalar>(
    curve: &BoundaryCurve<T>,
    ctx: &LambdaContext<T>,
) -> Result<CriticalPointReport<T>> {
    let mut points: [Vec<CriticalPoint<T>>; 2] = [Vec::new(), Vec::new()];
    let mut tolerance = [T::zero(); 2];
    let mut is_simple = true;
    let mut fragile = false;
    for sign in Sign::both() {
        let (pts, tol) = roots_for_sign(curve, ctx, sign)?;
        let degenerate = pts
            .iter()
            .any(|p| !(p.second_derivative.abs() > tol));
        if pts.len() != 2 || degenerate {
            is_simple = false;
        }
        if pts
            .iter()
            .any(|p| p.second_derivative.abs() < lit::<T>(10.0) * tol)
        {
            fragile = true;
        }
        tolerance[sign.index()] = tol;
        points[sign.index()] = pts;
    }
    Ok(CriticalPointReport {
        points,
        is_simple,
        fragile: fragile && is_simple,
        tolerance,
        lambda: ctx.lambda(),
    })
}

fn roots_for_sign<T: Scalar>(
    curve: &BoundaryCurve<T>,
    ctx: &LambdaContext<T>,
    sign: Sign,
) -> Result<(Vec<CriticalPoint<T>>, T)> {
    let n = curve.resolution();
    let nf = from_usize::<T>(n);
    let samples: Vec<(T, T)> = (0..n)
        .map(|j| ell_value_slope(curve, ctx, sign, from_usize::<T>(j) / nf))
        .collect();
    let (lo, hi) = samples
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(a, b), &(v, _)| (a.min(v), b.max(v)));
    let tol = lit::<T>(DEGENERACY_TOLERANCE) * (hi - lo) * lit::<T>(0.5);
    let slope = |s: T| ell_value_slope(curve, ctx, sign, s).1;

    let mut roots = Vec::new();
    for j in 0..n {
        let a = samples[j].1;
        let b = samples[(j + 1) % n].1;
        let s0 = from_usize::<T>(j) / nf;
        let s1 = from_usize::<T>(j + 1) / nf;
        if a == T::zero() {
            roots.push(s0);
            continue;
        }
        if b == T::zero() || (a > T::zero()) == (b > T::zero()) {
            continue;
        }
        let mut changes = 0;
        let mut prev = a;
        for i in 1..=SUBSAMPLES {
            let s = s0 + (s1 - s0) * from_usize::<T>(i) / from_usize::<T>(SUBSAMPLES);
            let cur = if i == SUBSAMPLES { b } else { slope(s) };
            if cur != T::zero() && (cur > T::zero()) != (prev > T::zero()) {
                changes += 1;
            }
            if cur != T::zero() {
                prev = cur;
            }
        }
        if changes != 1 {
            return Err(Error::RefinementFailure(format!(
                "{changes} sign changes of the slope of l{} inside [{}, {}]",
                if sign == Sign::Plus { "+" } else { "-" },
                to_f64(s0),
                to_f64(s1)
            )));
        }
        roots.push(bisect(&slope, s0, s1, a));
    }
    let pts = roots
        .into_iter()
        .map(|s| {
            let s = if s >= T::one() { s - T::one() } else { s };
            let j = ell_jet(curve, ctx, sign, s);
            CriticalPoint { s, value: j[0], second_derivative: j[2], third_derivative: j[3] }
        })
        .collect();
    Ok((pts, tol))
}

/// Bisection to machine resolution on a bracket where `f(lo)` has sign of `f_lo`.
fn bisect<T: Scalar>(f: &impl Fn(T) -> T, mut lo: T, mut hi: T, f_lo: T) -> T {
    let pos = f_lo > T::zero();
    for _ in 0..200 {
        let mid = (lo + hi) * lit::<T>(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == T::zero() {
            return mid;
        }
        if (v > T::zero()) == pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * lit::<T>(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_critical_points_at_half() {
        let c = BoundaryCurve::<f64>::circle();
        let ctx = LambdaContext::new(0.5).unwrap();
        let r = critical_points(&c, &ctx).unwrap();
        assert!(r.is_simple && !r.fragile);
        let alpha = std::f64::consts::PI / 6.0;
        let mut s: Vec<f64> = r.for_sign(Sign::Plus).iter().map(|p| p.s).collect();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let tau = std::f64::consts::TAU;
        assert!((s[0] - alpha / tau).abs() < 1e-12);
        assert!((s[1] - (alpha + std::f64::consts::PI) / tau).abs() < 1e-12);
        for p in r.for_sign(Sign::Plus) {
            assert!(p.second_derivative.abs() > r.tolerance[0]);
        }
    }
}
