use num_rational::Ratio;

use super::modes::{EigenMode, ModeShape, SpectralKey};
use crate::scalar::{lit, Scalar};

/// `T_n(x)`, `T_n'(x)` and `T_n''(x)` by the three-term recurrence.
pub fn chebyshev<T: Scalar>(n: u32, x: T) -> (T, T, T) {
    let two = lit::<T>(2.0);
    let (mut t0, mut d0, mut dd0) = (T::one(), T::zero(), T::zero());
    if n == 0 {
        return (t0, d0, dd0);
    }
    let (mut t1, mut d1, mut dd1) = (x, T::one(), T::zero());
    for _ in 1..n {
        let t2 = two * x * t1 - t0;
        let d2 = two * t1 + two * x * d1 - d0;
        let dd2 = two * two * d1 + two * x * dd1 - dd0;
        (t0, d0, dd0) = (t1, d1, dd1);
        (t1, d1, dd1) = (t2, d2, dd2);
    }
    (t1, d1, dd1)
}

/// Rotation number of the unit-disk chess billiard, `1 - (2/π) arccos λ`.
pub fn disk_rotation_number<T: Scalar>(lambda: T) -> T {
    T::one() - lambda.acos() * lit::<T>(2.0) / T::PI()
}

/// Inverse of [`disk_rotation_number`]: `sin(πr/2)`.
pub fn disk_rotation_to_lambda<T: Scalar>(r: T) -> T {
    (T::FRAC_PI_2() * r).sin()
}

/// `λ_{k,N}`, the frequency whose disk rotation number is `k/N`.
pub fn disk_lambda<T: Scalar>(k: u32, n: u32) -> T {
    disk_rotation_to_lambda(lit::<T>(k as f64) / lit::<T>(n as f64))
}

/// All modes `u_{k,N}` with `2 ≤ N ≤ n_max`, `1 ≤ k ≤ N - 1`, ordered by `N` then `k`.
pub fn disk_modes<T: Scalar>(n_max: u32) -> Vec<EigenMode<T>> {
    let mut out = Vec::new();
    for n in 2..=n_max {
        for k in 1..n {
            let lambda: T = disk_lambda(k, n);
            out.push(EigenMode {
                shape: ModeShape::Disk { k, n },
                eigenvalue: lambda * lambda,
                key: SpectralKey::Disk(Ratio::new(k as u64, n as u64)),
                delta_scale: T::one(),
                h10_norm_sq: None,
            });
        }
    }
    out
}
