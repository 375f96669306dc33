//! Rotation numbers, rational plateau detection, continued fractions and
//! numerical conjugacy of circle maps to rigid rotations.

mod conjugacy;
mod contfrac;
mod rotation;

pub use conjugacy::{conjugacy, CircleFunction, Conjugacy, ConjugacyOptions};
pub use contfrac::{
    continued_fraction, continued_fraction_exact, ContinuedFraction, LIOUVILLE_EXPONENT,
    LIOUVILLE_MIN_DENOMINATOR, MAX_FLOAT_DEPTH,
};
pub use rotation::{
    find_lambda_for_rotation, find_lambda_for_rotation_on_curve, rotation_curve, rotation_number,
    CircleMap, LambdaSearch, LiftFn, RigidRotation, RotationCurvePoint, RotationMethod,
    RotationNumberEstimate, RotationOptions, LOCK_TOLERANCE,
};
