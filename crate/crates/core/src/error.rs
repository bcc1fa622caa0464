use core::fmt;

/// Errors raised by the model and identification routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("time is not strictly increasing at sample {index}")]
    NonMonotoneTime { index: usize },
    #[error("displacement decreases at sample {index}")]
    DecreasingDisplacement { index: usize },
    #[error("segmentation failed: {0}")]
    Segmentation(SegmentationFailure),
    #[error("normal force is not positive at sample {index} of the slide window")]
    InvalidNormalForce { index: usize },
    #[error("stiffness probe has zero displacement")]
    ZeroDisplacement,
    #[error("probe group (pressure {pressure} Pa, offset {offset} m) has no {missing} probe")]
    IncompleteGroup {
        pressure: f64,
        offset: f64,
        missing: crate::stiffness::Direction,
    },
    #[error("duplicate stiffness map key (pressure {pressure} Pa, offset {offset} m)")]
    DuplicateKey { pressure: f64, offset: f64 },
    #[error("stiffness map rows do not form a rectangular pressure x offset grid")]
    NotRectangular,
    #[error("query (pressure {pressure} Pa, offset {offset} m) lies outside the map grid; extrapolation refused")]
    OutOfHull { pressure: f64, offset: f64 },
    #[error("stiffness map is empty")]
    EmptyMap,
}

/// Why a force trace could not be split into stick and slide phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentationFailure {
    /// Not enough samples to fit three phases.
    TooShort,
    /// The trace never shows an elastic loading ramp.
    NoStickPhase,
    /// The trace never settles into steady sliding.
    NoSlidePhase,
}

impl fmt::Display for SegmentationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SegmentationFailure::TooShort => "trace too short to establish stick and slide phases",
            SegmentationFailure::NoStickPhase => "no stick (elastic loading) phase found",
            SegmentationFailure::NoSlidePhase => "no steady sliding phase found",
        })
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
