use num_rational::Ratio;

use super::disk::{disk_lambda, disk_rotation_number};
use super::modes::{invert2, EigenMode, ModeShape, SpectralKey};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Affine reduction of `P(λ)` on `AD + v` to `c·P(σ)` on the unit disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipseMap<T> {
    /// Angle of the rotation `R`, so `R = [[cos, -sin], [sin, cos]]`.
    pub rotation_angle: T,
    pub rotation: [[T; 2]; 2],
    pub sigma: T,
    pub c: T,
}

/// Computes `R(λ)`, `σ(λ)` and `c(λ)` for the ellipse `A·D + v`.
///
/// Any nondegenerate `A` is accepted; `v` does not enter the coefficients.
pub fn map_ellipse<T: Scalar>(a: [[T; 2]; 2], _v: [T; 2], lambda: T) -> Result<EllipseMap<T>> {
    if !(lambda > T::zero() && lambda < T::one()) {
        return Err(Error::LambdaOutOfRange(crate::scalar::to_f64(lambda)));
    }
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if !(det.abs() > T::epsilon() * (a[0][0].abs() + a[0][1].abs() + a[1][0].abs() + a[1][1].abs()).powi(2)) {
        return Err(Error::SingularMatrix);
    }
    let ai = invert2(&a);
    let l2 = lambda * lambda;
    let m = [-l2, T::one() - l2];
    // B₀ = A⁻¹ M A⁻ᵀ
    let mut b = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            b[i][j] = ai[i][0] * m[0] * ai[j][0] + ai[i][1] * m[1] * ai[j][1];
        }
    }
    let (p, q, r) = (b[0][0], (b[0][1] + b[1][0]) / lit(2.0), b[1][1]);
    let mean = (p + r) / lit(2.0);
    let rad = (((p - r) / lit(2.0)).powi(2) + q * q).sqrt();
    let (mu1, mu2) = (mean - rad, mean + rad);
    assert!(mu1 < T::zero() && mu2 > T::zero(), "B₀ must have signature (1, 1)");
    // eigenvector of μ₁ at angle θ; its row form is a rotation by -θ
    let mut theta = (lit::<T>(2.0) * q).atan2(p - r) / lit(2.0) + T::FRAC_PI_2();
    if theta > T::FRAC_PI_2() {
        theta -= T::PI();
    }
    let angle = -theta;
    let (s, c) = angle.sin_cos();
    let cc = mu2 - mu1;
    Ok(EllipseMap { rotation_angle: angle, rotation: [[c, -s], [s, c]], sigma: (-mu1 / cc).sqrt(), c: cc })
}

/// Disk eigenmodes transported to the ellipse `A·D + v`.
#[derive(Clone, Copy, Debug)]
pub struct EllipseTransport<T> {
    pub a: [[T; 2]; 2],
    pub v: [T; 2],
}

impl<T: Scalar> EllipseTransport<T> {
    pub fn new(a: [[T; 2]; 2], v: [T; 2]) -> Result<Self> {
        map_ellipse(a, v, lit(0.5))?;
        Ok(Self { a, v })
    }

    pub fn map(&self, lambda: T) -> Result<EllipseMap<T>> {
        map_ellipse(self.a, self.v, lambda)
    }

    pub fn sigma(&self, lambda: T) -> T {
        self.map(lambda).map(|m| m.sigma).unwrap_or_else(|_| lambda)
    }

    /// `λ` with `σ(λ) = target`, by bisection on the increasing map `σ`.
    pub fn sigma_inverse(&self, target: T) -> T {
        let (mut lo, mut hi) = (T::zero(), T::one());
        for _ in 0..200 {
            let mid = (lo + hi) / lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sigma(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) / lit(2.0)
    }

    /// Rotation number of the ellipse at `λ`, `r_disk(σ(λ))`.
    pub fn rotation_number(&self, lambda: T) -> Result<T> {
        Ok(disk_rotation_number(self.map(lambda)?.sigma))
    }

    /// `x ↦ J(x - v)` with `J = R A⁻¹` for the frequency `λ`.
    pub fn jacobian(&self, lambda: T) -> Result<[[T; 2]; 2]> {
        let r = self.map(lambda)?.rotation;
        let ai = invert2(&self.a);
        Ok([
            [r[0][0] * ai[0][0] + r[0][1] * ai[1][0], r[0][0] * ai[0][1] + r[0][1] * ai[1][1]],
            [r[1][0] * ai[0][0] + r[1][1] * ai[1][0], r[1][0] * ai[0][1] + r[1][1] * ai[1][1]],
        ])
    }

    /// The transported mode `u_{k,N}(J(x - v))` with eigenvalue `λ*²`, `σ(λ*) = λ_{k,N}`.
    pub fn mode(&self, k: u32, n: u32) -> Result<EigenMode<T>> {
        if k == 0 || k >= n {
            return Err(Error::InvalidArgument(format!("disk mode index ({k}, {n}) out of range")));
        }
        let lambda = self.sigma_inverse(disk_lambda(k, n));
        let jac = self.jacobian(lambda)?;
        let det = self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0];
        Ok(EigenMode {
            shape: ModeShape::Transported { k, n, jac, shift: self.v, det_abs: det.abs() },
            eigenvalue: lambda * lambda,
            key: SpectralKey::Ellipse(Ratio::new(k as u64, n as u64)),
            delta_scale: T::one(),
            h10_norm_sq: None,
        })
    }

    /// All transported modes with `2 ≤ N ≤ n_max`.
    pub fn modes(&self, n_max: u32) -> Result<Vec<EigenMode<T>>> {
        let mut out = Vec::new();
        for n in 2..=n_max {
            for k in 1..n {
                out.push(self.mode(k, n)?);
            }
        }
        Ok(out)
    }
}

/// Transported disk modes on `A·D + v` with `2 ≤ N ≤ n_max`.
pub fn transported_disk_modes<T: Scalar>(a: [[T; 2]; 2], v: [T; 2], n_max: u32) -> Result<Vec<EigenMode<T>>> {
    EllipseTransport::new(a, v)?.modes(n_max)
}
