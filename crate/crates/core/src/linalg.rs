//! Small dense solvers. Matrices are row-major `Vec<T>` of size `n * n`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `A x = b` for symmetric positive definite `A` by Cholesky.
pub fn cholesky_solve<T: Scalar>(a: &[T], b: &[T], n: usize) -> Result<Vec<T>> {
    let l = cholesky(a, n)?;
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    Ok(y)
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky<T: Scalar>(a: &[T], n: usize) -> Result<Vec<T>> {
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > T::zero()) {
                    return Err(Error::SingularMatrix);
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solves a general square system by Gaussian elimination with partial pivoting.
pub fn lu_solve<T: Scalar>(a: &[T], b: &[T], n: usize) -> Result<Vec<T>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                m[i * n + col]
                    .abs()
                    .partial_cmp(&m[j * n + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if m[pivot * n + col] == T::zero() || !m[pivot * n + col].is_finite() {
            return Err(Error::SingularMatrix);
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
            }
            x.swap(pivot, col);
        }
        let d = m[col * n + col];
        for i in col + 1..n {
            let factor = m[i * n + col] / d;
            if factor == T::zero() {
                continue;
            }
            for k in col..n {
                let v = m[col * n + k];
                m[i * n + k] -= factor * v;
            }
            let v = x[col];
            x[i] -= factor * v;
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= m[i * n + k] * x[k];
        }
        x[i] = s / m[i * n + i];
    }
    Ok(x)
}

/// Quadratic form `xᵀ A x`.
pub fn quadratic_form<T: Scalar>(a: &[T], x: &[T]) -> T {
    let n = x.len();
    let mut s = T::zero();
    for i in 0..n {
        let mut row = T::zero();
        for j in 0..n {
            row += a[i * n + j] * x[j];
        }
        s += x[i] * row;
    }
    s
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit<T: Scalar>(x: &[T], y: &[T]) -> Option<(T, T)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nn = T::from_usize(n)?;
    let mx = x.iter().fold(T::zero(), |a, &b| a + b) / nn;
    let my = y.iter().fold(T::zero(), |a, &b| a + b) / nn;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for i in 0..n {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if sxx == T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (
        nodes.into_iter().map(crate::scalar::lit).collect(),
        weights.into_iter().map(crate::scalar::lit).collect(),
    )
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_interval<T: Scalar>(n: usize, a: T, b: T) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre::<T>(n);
    let half = (b - a) / (T::one() + T::one());
    let mid = (a + b) / (T::one() + T::one());
    (
        x.into_iter().map(|t| mid + half * t).collect(),
        w.into_iter().map(|t| t * half).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre::<f64>(10);
        for deg in 0..20 {
            let q: f64 = x.iter().zip(&w).map(|(&x, &w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}: {q} vs {exact}");
        }
    }

    #[test]
    fn solvers_agree_on_spd_system() {
        let a = [4.0f64, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let b = [1.0f64, 2.0, 3.0];
        let x1 = cholesky_solve(&a, &b, 3).unwrap();
        let x2 = lu_solve(&a, &b, 3).unwrap();
        for i in 0..3 {
            assert!((x1[i] - x2[i]).abs() < 1e-14);
            let r: f64 = (0..3).map(|j| a[i * 3 + j] * x1[j]).sum::<f64>() - b[i];
            assert!(r.abs() < 1e-14);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        assert!(cholesky(&[1.0, 2.0, 2.0, 1.0], 2).is_err());
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|x| 3.0 * x - 1.0).collect();
        let (m, c) = linear_fit(&x, &y).unwrap();
        assert!((m - 3.0).abs() < 1e-14 && (c + 1.0).abs() < 1e-14);
    }
}
