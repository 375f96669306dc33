#![allow(dead_code)]

use std::f64::consts::TAU;

use internal_waves::FourierSeries;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub const GOLDEN: f64 = 0.618_033_988_749_894_9;
pub const SILVER: f64 = std::f64::consts::SQRT_2 - 1.0;

/// Real zero-mean series of order `k` with coefficients decaying like `|k|^-2`.
pub fn random_zero_mean<R: Rng>(rng: &mut R, k: usize) -> FourierSeries {
    let mut cos = vec![0.0; k + 1];
    let mut sin = vec![0.0; k + 1];
    for j in 1..=k {
        let scale = 1.0 / (j * j) as f64;
        cos[j] = rng.gen_range(-1.0..1.0) * scale;
        sin[j] = rng.gen_range(-1.0..1.0) * scale;
    }
    FourierSeries::from_real(&cos, &sin)
}

/// Solves `v - v(· + α) = g`, `v̂(0) = mean`, by collocation at `2K + 1` equispaced points.
/// The constant column is replaced by the mean constraint.
pub fn collocation_solve(g: &FourierSeries, alpha: f64, mean: f64) -> Vec<Complex64> {
    let k = g.order() as i64;
    let n = (2 * k + 1) as usize;
    let mut a = DMatrix::<Complex64>::zeros(n + 1, n);
    let mut b = DVector::<Complex64>::zeros(n + 1);
    for j in 0..n {
        let theta = j as f64 / n as f64;
        for (col, m) in (-k..=k).enumerate() {
            let e = |x: f64| Complex64::from_polar(1.0, TAU * m as f64 * x);
            a[(j, col)] = e(theta) - e(theta + alpha);
        }
        b[j] = Complex64::new(g.eval_real(theta), 0.0);
    }
    a[(n, k as usize)] = Complex64::new(1.0, 0.0);
    b[n] = Complex64::new(mean, 0.0);
    // the constant column is zero in the first n rows, so the square system is row-augmented
    let normal = a.adjoint() * &a;
    let rhs = a.adjoint() * b;
    normal.lu().solve(&rhs).expect("collocation system is nonsingular").iter().copied().collect()
}
