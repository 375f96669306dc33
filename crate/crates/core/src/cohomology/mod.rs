//! Fourier series on the circle ℝ/ℤ and the cohomological equation
//! `v(θ) - v(θ + α) = g(θ)`.

mod series;
mod solve;

pub use series::FourierSeries;
pub use solve::{
    divisor, small_divisor_report, solve_cohomological, CohomologicalSolution,
    SmallDivisorReport, RESONANCE_TOLERANCE, ZERO_MEAN_TOLERANCE,
};
