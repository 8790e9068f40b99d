//! Error type shared by every module of the crate.

use alloc::string::String;
use core::fmt;

/// Errors raised by geometry, oracle, subproblem and solver code.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector had a different ambient dimension than expected.
    DimensionMismatch { expected: usize, actual: usize },
    /// A point failed the unit-norm membership check.
    PointNotOnManifold { deviation: f64 },
    /// A tangent vector failed the orthogonality check at its base point.
    VectorNotTangent { deviation: f64 },
    /// Two tangent vectors (or a vector and a point) disagree on the base point.
    BaseMismatch,
    /// The requested operation is undefined at the cut locus (antipodal points).
    CutLocus,
    /// A direction was requested from a (numerically) zero vector.
    ZeroVector,
    /// A parameter violated its documented range.
    InvalidParameter { name: &'static str, message: String },
    /// An objective oracle failed; carries the objective index.
    Oracle { index: usize, message: String },
    /// The min-norm subproblem did not reach its duality-gap tolerance.
    MinNormStalled { residual: f64 },
    /// The bisection for a new subgradient stopped without a usable element.
    SubgradientSearchStalled { objective: usize, bisections: usize },
    /// The descent-direction procedure hit its inner iteration cap.
    DirectionSearchStalled { rounds: usize, last_norm: f64 },
    /// The working bundle stopped growing while objectives still lack decrease.
    BundleStalled { round: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::PointNotOnManifold { deviation } => {
                write!(f, "point is off the unit sphere by {deviation:e}")
            }
            Error::VectorNotTangent { deviation } => {
                write!(f, "vector is not tangent at its base point (<x,v> = {deviation:e})")
            }
            Error::BaseMismatch => write!(f, "tangent vectors have different base points"),
            Error::CutLocus => write!(f, "operation undefined between antipodal points"),
            Error::ZeroVector => write!(f, "cannot normalize a zero vector"),
            Error::InvalidParameter { name, message } => {
                write!(f, "invalid parameter `{name}`: {message}")
            }
            Error::Oracle { index, message } => {
                write!(f, "objective {index} oracle failed: {message}")
            }
            Error::MinNormStalled { residual } => {
                write!(f, "min-norm solver stalled with duality gap {residual:e}")
            }
            Error::SubgradientSearchStalled { objective, bisections } => write!(
                f,
                "subgradient bisection for objective {objective} stalled after {bisections} steps"
            ),
            Error::DirectionSearchStalled { rounds, last_norm } => write!(
                f,
                "descent-direction search hit its cap after {rounds} rounds (last norm {last_norm:e})"
            ),
            Error::BundleStalled { round } => {
                write!(f, "bundle stopped growing in round {round}")
            }
        }
    }
}

impl core::error::Error for Error {}
