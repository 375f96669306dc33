use num_complex::Complex;
use rayon::prelude::*;

use super::rotation::{rotation_number, CircleMap, RotationOptions};
use crate::cohomology::FourierSeries;
use crate::error::{Error, Result};
use crate::scalar::{centered_frac, frac, from_i64, from_usize, lit, tau, to_f64, Scalar};

/// `s ↦ d·s + p(s)` with `p` periodic.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleFunction<T> {
    pub degree: i64,
    pub periodic: FourierSeries<T>,
}

impl<T: Scalar> CircleFunction<T> {
    pub fn identity() -> Self {
        Self { degree: 1, periodic: FourierSeries::zeros(0) }
    }

    pub fn eval(&self, s: T) -> T {
        from_i64::<T>(self.degree) * s + self.periodic.eval_real(s)
    }

    pub fn derivative(&self, s: T) -> T {
        let mut acc = from_i64::<T>(self.degree);
        let k_max = self.periodic.order() as i64;
        for k in 1..=k_max {
            let c = self.periodic.coefficient(k);
            let w = tau::<T>() * from_i64::<T>(k);
            let a = w * s;
            // d/ds 2 Re(c e^{iws}) = -2w Im(c e^{iws})
            acc -= lit::<T>(2.0) * w * (c.re * a.sin() + c.im * a.cos());
        }
        acc
    }

    /// Inverse of an increasing degree-one function.
    pub fn inverse(&self, theta: T) -> T {
        assert_eq!(self.degree, 1, "inverse needs a degree-one map");
        let c0 = self.periodic.mean();
        let mut amp = T::zero();
        for k in 1..=self.periodic.order() as i64 {
            amp += self.periodic.coefficient(k).norm() + self.periodic.coefficient(-k).norm();
        }
        let pad = amp + lit::<T>(1e-12);
        let (mut a, mut b) = (theta - c0 - pad, theta - c0 + pad);
        let mut s = theta - c0;
        for _ in 0..100 {
            let v = self.eval(s) - theta;
            if v == T::zero() {
                return s;
            }
            if v < T::zero() {
                a = s;
            } else {
                b = s;
            }
            let d = self.derivative(s);
            let newton = s - v / d;
            let next = if d > T::zero() && newton > a && newton < b { newton } else { (a + b) * lit::<T>(0.5) };
            let step = (next - s).abs();
            s = next;
            if step <= T::epsilon() * lit::<T>(4.0) * (T::one() + s.abs()) {
                break;
            }
        }
        s
    }

    /// Smallest derivative on a uniform grid of `n` points.
    pub fn min_derivative(&self, n: usize) -> T {
        (0..n)
            .map(|j| self.derivative(from_usize::<T>(j) / from_usize::<T>(n)))
            .fold(T::infinity(), T::min)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ConjugacyOptions<T> {
    pub orbit: usize,
    pub modes: usize,
    /// Reject the result when the residual exceeds this.
    pub tolerance: Option<T>,
    pub q_max: u64,
    pub verification_grid: usize,
    pub start: T,
}

impl<T: Scalar> Default for ConjugacyOptions<T> {
    fn default() -> Self {
        Self {
            orbit: 100_000,
            modes: 64,
            tolerance: None,
            q_max: 10_000,
            verification_grid: 1024,
            start: T::zero(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Conjugacy<T> {
    /// `ψ` with `ψ(𝐛(s)) = ψ(s) + r`.
    pub psi: CircleFunction<T>,
    /// Rotation number of the lift (not reduced mod 1).
    pub lift_rotation: T,
    /// Rotation number in `[0, 1)`.
    pub rotation: T,
    /// `max |ψ(𝐛(s)) - ψ(s) - r|` over the verification grid.
    pub residual: T,
    pub monotone: bool,
}

/// Conjugates an irrational circle map to the rotation by its rotation number.
///
/// The conjugacy is the distribution function of the invariant measure,
/// estimated from an orbit with smooth (exponentially tapered) weights and
/// truncated to `modes` Fourier modes.
pub fn conjugacy<T: Scalar, M: CircleMap<T> + ?Sized>(
    map: &M,
    opts: &ConjugacyOptions<T>,
) -> Result<Conjugacy<T>> {
    if opts.orbit < 10_000 {
        return Err(Error::InvalidArgument(format!("orbit length {} below 10^4", opts.orbit)));
    }
    let rot = rotation_number(
        map,
        &RotationOptions { iterations: opts.orbit, q_max: opts.q_max, lock_grid: 128, start: opts.start },
    );
    if let Some((p, q)) = rot.locked() {
        return Err(Error::RationalRotation { p, q });
    }
    let n = opts.orbit;
    let s0 = frac(opts.start);
    let mut xs = Vec::with_capacity(n);
    let mut steps = Vec::with_capacity(n);
    let mut y = s0;
    for _ in 0..n {
        xs.push(y - s0);
        let next = map.lift(y);
        steps.push(next - y);
        y = next - next.floor();
        if y < s0 {
            y += T::one();
        }
    }
    // keep orbit points in [s0, s0 + 1)
    for x in xs.iter_mut() {
        *x = frac(*x);
    }
    let weights = taper_weights::<T>(n);
    let lift_rotation = weights.iter().zip(&steps).fold(T::zero(), |a, (&w, &d)| a + w * d);
    let mean = weights.iter().zip(&xs).fold(T::zero(), |a, (&w, &x)| a + w * x);

    let k_max = opts.modes;
    let chunk = 4096;
    let zero = vec![Complex::new(T::zero(), T::zero()); k_max + 1];
    let moments = xs
        .par_chunks(chunk)
        .zip(weights.par_chunks(chunk))
        .map(|(xc, wc)| {
            let mut acc = zero.clone();
            for (&x, &w) in xc.iter().zip(wc) {
                let step = Complex::from_polar(T::one(), -tau::<T>() * x);
                let mut z = step;
                for (k, slot) in acc.iter_mut().enumerate().skip(1) {
                    if k % 32 == 0 {
                        z = Complex::from_polar(T::one(), -tau::<T>() * from_usize::<T>(k) * x);
                    }
                    *slot = *slot + z * w;
                    z = z * step;
                }
            }
            acc
        })
        .reduce(
            || zero.clone(),
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = *x + y;
                }
                a
            },
        );

    let mut periodic = FourierSeries::zeros(k_max);
    periodic.set(0, Complex::new(lit::<T>(0.5) - mean - s0, T::zero()));
    for k in 1..=k_max {
        let c = moments[k] / Complex::new(T::zero(), tau::<T>() * from_usize::<T>(k));
        // re-centre from σ = s - s0 to s
        let shift = Complex::from_polar(T::one(), -tau::<T>() * from_usize::<T>(k) * s0);
        let ck = c * shift;
        periodic.set(k as i64, ck);
        periodic.set(-(k as i64), ck.conj());
    }
    let psi = CircleFunction { degree: 1, periodic };
    let residual = conjugacy_residual(map, &psi, lift_rotation, opts.verification_grid);
    let monotone = psi.min_derivative(opts.verification_grid) > T::zero();
    if let Some(tol) = opts.tolerance {
        if residual > tol {
            return Err(Error::ConjugacyResidual { residual: to_f64(residual), tolerance: to_f64(tol) });
        }
        if !monotone {
            return Err(Error::ConjugacyNotMonotone);
        }
    }
    Ok(Conjugacy { psi, lift_rotation, rotation: frac(lift_rotation), residual, monotone })
}

/// `max_j |ψ(𝐛(s_j)) - ψ(s_j) - r|` (reduced mod 1) on `n` uniform points.
pub(crate) fn conjugacy_residual<T: Scalar, M: CircleMap<T> + ?Sized>(
    map: &M,
    psi: &CircleFunction<T>,
    r: T,
    n: usize,
) -> T {
    (0..n)
        .map(|j| {
            let s = from_usize::<T>(j) / from_usize::<T>(n);
            centered_frac(psi.eval(map.lift(s)) - psi.eval(s) - r).abs()
        })
        .fold(T::zero(), T::max)
}

/// Normalized weights `exp(-1/(t(1-t)))` on `t = (n+1)/(N+1)`.
fn taper_weights<T: Scalar>(n: usize) -> Vec<T> {
    let denom = from_usize::<T>(n + 1);
    let raw: Vec<T> = (0..n)
        .map(|i| {
            let t = from_usize::<T>(i + 1) / denom;
            (-T::one() / (t * (T::one() - t))).exp()
        })
        .collect();
    let total = raw.iter().fold(T::zero(), |a, &b| a + b);
    raw.into_iter().map(|w| w / total).collect()
}

#[cfg(test)]
mod tests {
    use super::super::rotation::{LiftFn, RigidRotation};
    use super::*;

    const GOLDEN: f64 = 0.6180339887498949;

    #[test]
    fn rigid_rotation_identity_conjugacy() {
        let c = conjugacy(&RigidRotation(GOLDEN), &ConjugacyOptions::default()).unwrap();
        assert!(c.residual <= 1e-10, "residual {}", c.residual);
        assert!((c.rotation - GOLDEN).abs() < 1e-12);
        for s in [0.1, 0.5, 0.9] {
            let d = c.psi.eval(s) - s - (c.psi.eval(0.0));
            assert!(d.abs() < 1e-8, "{d}");
        }
    }

    #[test]
    fn rational_rotation_rejected() {
        let r = conjugacy(&RigidRotation(0.25f64), &ConjugacyOptions::default());
        assert!(matches!(r, Err(Error::RationalRotation { p: 1, q: 4 })));
    }

    #[test]
    fn conjugated_rotation_recovered() {
        // f = h⁻¹ ∘ R ∘ h with h(s) = s + 0.05 sin 2πs
        let h = CircleFunction {
            degree: 1,
            periodic: FourierSeries::from_real(&[0.0, 0.0], &[0.0, 0.05]),
        };
        let f = LiftFn(move |s: f64| h.inverse(h.eval(s) + GOLDEN));
        let c = conjugacy(&f, &ConjugacyOptions { modes: 48, ..Default::default() }).unwrap();
        assert!(c.residual < 1e-9, "residual {}", c.residual);
        assert!(c.monotone);
        assert!((c.rotation - GOLDEN).abs() < 1e-12);
    }

    #[test]
    fn inverse_roundtrip() {
        let h = CircleFunction::<f64> {
            degree: 1,
            periodic: FourierSeries::from_real(&[0.3, 0.02], &[0.0, 0.1]),
        };
        for t in [-0.4, 0.0, 0.77, 3.2] {
            assert!((h.eval(h.inverse(t)) - t).abs() < 1e-14);
        }
        assert!(CircleFunction::<f64>::identity().eval(0.3) == 0.3);
    }
}
