//! Boundary curves, the characteristic functions `ℓ±`, critical points and the
//! chess billiard map.

mod billiard;
mod critical;
mod curve;

pub use billiard::{ArcSide, ChessBilliardMap, Involution, TABLE_SIZE};
pub use critical::{critical_points, CriticalPoint, CriticalPointReport, DEGENERACY_TOLERANCE};
pub use curve::{polygon_contains, BoundaryCurve, CurveJet, MIN_RESOLUTION};

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Scalar};

/// Which characteristic family: `ℓ⁺` or `ℓ⁻`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Scalar>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn both() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }

    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

/// A frequency `λ ∈ (0, 1)` together with `1/λ` and `1/√(1-λ²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaContext<T> {
    lambda: T,
    inv_lambda: T,
    inv_cos: T,
}

impl<T: Scalar> LambdaContext<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda < T::one()) {
            return Err(Error::LambdaOutOfRange(to_f64(lambda)));
        }
        let c = (T::one() - lambda * lambda).sqrt();
        Ok(Self { lambda, inv_lambda: T::one() / lambda, inv_cos: T::one() / c })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn inv_lambda(&self) -> T {
        self.inv_lambda
    }

    /// `1/√(1-λ²)`
    pub fn inv_cos(&self) -> T {
        self.inv_cos
    }

    /// Linear coefficients `(a₁, a₂)` with `ℓ(x) = a₁x₁ + a₂x₂`.
    pub fn gradient(&self, sign: Sign) -> [T; 2] {
        [sign.value::<T>() * self.inv_lambda, self.inv_cos]
    }
}

/// `ℓ±(x, λ) = ±x₁/λ + x₂/√(1-λ²)`.
pub fn ell<T: Scalar>(x: [T; 2], ctx: &LambdaContext<T>, sign: Sign) -> T {
    let g = ctx.gradient(sign);
    g[0] * x[0] + g[1] * x[1]
}
