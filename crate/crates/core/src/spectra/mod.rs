//! Explicit eigenpairs of the zeroth-order operator on the square, rectangles,
//! the disk and ellipses, and the spectral measures they carry.

mod disk;
mod ellipse;
mod measure;
mod modes;
mod square;

pub use disk::{chebyshev, disk_lambda, disk_modes, disk_rotation_number, disk_rotation_to_lambda};
pub use ellipse::{map_ellipse, transported_disk_modes, EllipseMap, EllipseTransport};
pub use measure::{
    project, spectral_measure, Atom, EpsilonSweep, Forcing, Projection, ProjectionOptions,
    SpectralMeasureHistogram,
};
pub use modes::{EigenMode, ModeGroup, ModeSet, ModeShape, SpectralKey};
pub use square::{
    rectangle_modes, rectangle_rotation_number, square_mode, square_modes, square_rotation_number,
    square_rotation_to_lambda,
};
