use num_rational::Ratio;

use super::modes::{EigenMode, ModeShape, SpectralKey};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Rotation number of the unit square, `λ / (√(1-λ²) + λ)`.
pub fn square_rotation_number<T: Scalar>(lambda: T) -> T {
    lambda / ((T::one() - lambda * lambda).sqrt() + lambda)
}

/// Inverse of [`square_rotation_number`]: `r / √(r² + (1-r)²)`.
pub fn square_rotation_to_lambda<T: Scalar>(r: T) -> T {
    let s = T::one() - r;
    r / (r * r + s * s).sqrt()
}

/// Rotation number of `[0, a] × [0, b]`, obtained from the square by diagonal scaling.
pub fn rectangle_rotation_number<T: Scalar>(lambda: T, width: T, height: T) -> T {
    let p = lambda / width;
    let q = (T::one() - lambda * lambda).sqrt() / height;
    p / (p + q)
}

/// The sine mode `(k₁, k₂)` on the unit square.
pub fn square_mode<T: Scalar>(k1: u32, k2: u32) -> EigenMode<T> {
    let k2sq = (k1 as u64).pow(2) + (k2 as u64).pow(2);
    let ksq = lit::<T>(k2sq as f64);
    let d = T::PI() * T::PI() * ksq;
    EigenMode {
        shape: ModeShape::Square { k1, k2 },
        eigenvalue: lit::<T>((k2 as f64).powi(2)) / ksq,
        key: SpectralKey::Square(Ratio::new((k2 as u64).pow(2), k2sq)),
        delta_scale: d,
        h10_norm_sq: Some(d / lit::<T>(4.0)),
    }
}

/// All sine modes with `1 ≤ k₁, k₂ ≤ k_max`, ordered by `k₁` then `k₂`.
pub fn square_modes<T: Scalar>(k_max: u32) -> Vec<EigenMode<T>> {
    (1..=k_max).flat_map(|k1| (1..=k_max).map(move |k2| square_mode(k1, k2))).collect()
}

/// Sine modes on `[0, a] × [0, b]` with `1 ≤ k₁, k₂ ≤ k_max`.
pub fn rectangle_modes<T: Scalar>(k_max: u32, width: T, height: T) -> Result<Vec<EigenMode<T>>> {
    if !(width > T::zero() && height > T::zero() && width.is_finite() && height.is_finite()) {
        return Err(Error::InvalidArgument("rectangle sides must be positive".into()));
    }
    let mut out = Vec::with_capacity((k_max * k_max) as usize);
    for k1 in 1..=k_max {
        for k2 in 1..=k_max {
            let p = lit::<T>(k1 as f64) / width;
            let q = lit::<T>(k2 as f64) / height;
            let d = T::PI() * T::PI() * (p * p + q * q);
            let k2sq = (k1 as u64).pow(2) + (k2 as u64).pow(2);
            out.push(EigenMode {
                shape: ModeShape::Rectangle { k1, k2, width, height },
                eigenvalue: q * q / (p * p + q * q),
                key: SpectralKey::Rectangle(Ratio::new((k2 as u64).pow(2), k2sq)),
                delta_scale: d,
                h10_norm_sq: Some(d * width * height / lit::<T>(4.0)),
            });
        }
    }
    Ok(out)
}
