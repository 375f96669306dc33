//! Stationary right inverse and forced time evolution.

mod chebyshev;
mod evolve;
mod right_inverse;

pub use chebyshev::Chebyshev2;
pub use evolve::{
    energy_h10, evolve_modal, evolve_square, growth_diagnostics, log_times, mode_response, uniform_times,
    EvolutionTrace, EvolveOptions, GrowthDiagnostics, GROWTH_SLOPE, RESONANCE_GAP,
};
pub use right_inverse::{right_inverse, RightInverse, RightInverseOptions, RightInverseReport};
