//! Numerical laboratory for internal waves in two-dimensional domains.
//!
//! The crate is generic over the floating-point type through [`Scalar`];
//! `f64` aliases for the main types live at the crate root.

pub mod cohomology;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod solver;
pub mod spectra;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type BoundaryCurve = geometry::BoundaryCurve<f64>;
pub type LambdaContext = geometry::LambdaContext<f64>;
pub type ChessBilliardMap = geometry::ChessBilliardMap<f64>;
pub type CriticalPointReport = geometry::CriticalPointReport<f64>;
pub type FourierSeries = cohomology::FourierSeries<f64>;
pub type RotationNumberEstimate = dynamics::RotationNumberEstimate<f64>;
pub type CircleFunction = dynamics::CircleFunction<f64>;
pub type GridFunction = grid::GridFunction<f64>;
pub type EigenMode = spectra::EigenMode<f64>;
pub type ModeSet = spectra::ModeSet<f64>;
pub type SpectralMeasureHistogram = spectra::SpectralMeasureHistogram<f64>;
pub type EvolutionTrace = solver::EvolutionTrace<f64>;
pub type RightInverse = solver::RightInverse<f64>;
pub use dynamics::ContinuedFraction;
