use num_complex::Complex;

use super::series::FourierSeries;
use crate::error::{Error, Result};
use crate::linalg::linear_fit;
use crate::scalar::{from_i64, lit, to_f64, Scalar};

/// Divisors `|1 - e^{2πikα}|` below this are treated as resonant.
pub const RESONANCE_TOLERANCE: f64 = 1e-14;
/// Largest admissible `|ĝ(0)| / ‖g‖`.
pub const ZERO_MEAN_TOLERANCE: f64 = 1e-12;

/// `1 - e^{2πikα}`, computed from the reduced phase so it stays accurate when small.
pub fn divisor<T: Scalar>(k: i64, alpha: T) -> Complex<T> {
    let x = from_i64::<T>(k) * alpha;
    let f = x - x.round();
    let pf = T::PI() * f;
    let s = pf.sin();
    // 1 - cos 2πf - i sin 2πf = 2 sin²(πf) - 2i sin(πf) cos(πf)
    let two = T::one() + T::one();
    Complex::new(two * s * s, -two * s * pf.cos())
}

#[derive(Clone, Debug)]
pub struct CohomologicalSolution<T> {
    pub v: FourierSeries<T>,
    /// Sup of `v - v∘R_α - g` on a uniform grid of at least `4K + 4` points.
    pub residual: T,
    /// Smallest divisor magnitude used.
    pub min_divisor: T,
}

/// Solves `v(θ) - v(θ + α) = g(θ)` with `v̂(0) = mean`.
pub fn solve_cohomological<T: Scalar>(
    g: &FourierSeries<T>,
    alpha: T,
    mean: T,
) -> Result<CohomologicalSolution<T>> {
    let norm = g.l2_norm();
    let g0 = g.coefficient(0).norm();
    if g0 > lit::<T>(ZERO_MEAN_TOLERANCE) * norm {
        return Err(Error::NonZeroMean { mean: to_f64(g0), norm: to_f64(norm) });
    }
    let order = g.order();
    let mut v = FourierSeries::zeros(order);
    v.set(0, Complex::new(mean, T::zero()));
    let mut min_divisor = T::infinity();
    for k in 1..=order as i64 {
        for kk in [k, -k] {
            let d = divisor(kk, alpha);
            let m = d.norm();
            if m < lit::<T>(RESONANCE_TOLERANCE) {
                return Err(Error::ResonantDivisor { k: kk, divisor: to_f64(m) });
            }
            min_divisor = min_divisor.min(m);
            v.set(kk, g.coefficient(kk) / d);
        }
    }
    let residual = residual(&v, g, alpha);
    Ok(CohomologicalSolution { v, residual, min_divisor })
}

fn residual<T: Scalar>(v: &FourierSeries<T>, g: &FourierSeries<T>, alpha: T) -> T {
    let order = v.order().max(g.order());
    let n = (4 * order + 4).max(64).next_power_of_two();
    let diff = &(v - &v.rotated(alpha)) - g;
    diff.sample(n).into_iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

#[derive(Clone, Debug)]
pub struct SmallDivisorReport<T> {
    /// `(k, |1 - e^{2πikα}|)` for `1 ≤ k ≤ K`.
    pub divisors: Vec<(u64, T)>,
    /// Slope of `log(1/d_k)` against `log k` over the running-minimum records;
    /// infinite when some divisor vanishes.
    pub exponent: T,
    /// `min_k d_k k^{exponent}`, so that `d_k ≥ constant · k^{-exponent}` on the range.
    pub constant: T,
}

pub fn small_divisor_report<T: Scalar>(alpha: T, k_max: u64) -> SmallDivisorReport<T> {
    let divisors: Vec<(u64, T)> = (1..=k_max.max(1))
        .map(|k| (k, divisor(k as i64, alpha).norm()))
        .collect();
    if divisors.iter().any(|&(_, d)| d == T::zero()) {
        return SmallDivisorReport { divisors, exponent: T::infinity(), constant: T::zero() };
    }
    let mut best = T::infinity();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(k, d) in &divisors {
        if d < best {
            best = d;
            xs.push(lit::<T>(k as f64).ln());
            ys.push(-d.ln());
        }
    }
    let exponent = linear_fit(&xs, &ys).map(|(m, _)| m).unwrap_or_else(T::zero);
    let constant = divisors
        .iter()
        .map(|&(k, d)| d * lit::<T>(k as f64).powf(exponent))
        .fold(T::infinity(), T::min);
    SmallDivisorReport { divisors, exponent, constant }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 0.6180339887498949;

    #[test]
    fn zero_rhs_gives_constant() {
        let g = FourierSeries::<f64>::zeros(4);
        let sol = solve_cohomological(&g, GOLDEN, 3.0).unwrap();
        assert_eq!(sol.v.mean(), 3.0);
        assert!(sol.v.l2_norm() - 3.0 < 1e-15);
        assert!(sol.residual < 1e-15);
    }

    #[test]
    fn single_cosine_closed_form() {
        let g = FourierSeries::from_real(&[0.0, 1.0], &[0.0, 0.0]);
        let sol = solve_cohomological(&g, GOLDEN, 0.0).unwrap();
        for k in [1i64, -1] {
            let e = Complex::from_polar(1.0, std::f64::consts::TAU * k as f64 * GOLDEN);
            let expected = Complex::new(0.5, 0.0) / (Complex::new(1.0, 0.0) - e);
            assert!((sol.v.coefficient(k) - expected).norm() < 1e-15);
        }
        assert!(sol.residual <= 1e-12);
    }

    #[test]
    fn rational_resonance_rejected() {
        let g = FourierSeries::from_real(&[0.0, 0.0, 0.0, 1.0], &[0.0; 4]);
        match solve_cohomological(&g, 1.0 / 3.0, 0.0) {
            Err(Error::ResonantDivisor { k, .. }) => assert_eq!(k.abs(), 3),
            other => panic!("expected resonance, got {other:?}"),
        }
    }

    #[test]
    fn nonzero_mean_rejected() {
        let g = FourierSeries::from_real(&[0.1, 1.0], &[0.0, 0.0]);
        assert!(matches!(solve_cohomological(&g, GOLDEN, 0.0), Err(Error::NonZeroMean { .. })));
    }

    #[test]
    fn divisor_report_rational_and_golden() {
        let r = small_divisor_report(0.5f64, 2);
        assert_eq!(r.divisors[1].1, 0.0);
        assert!(r.exponent.is_infinite());
        let g = small_divisor_report(GOLDEN, 1000);
        assert!((g.exponent - 1.0).abs() < 0.1, "golden exponent {}", g.exponent);
        assert!(g.constant > 0.0);
    }
}
