use thiserror::Error;

/// Errors reported by the kernel.
///
/// Precondition violations are always reported as errors, never folded into a
/// `false` verdict.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("invalid rational: {0}")]
    BadRational(String),
    #[error("invalid interval: {0}")]
    BadInterval(String),
    #[error("invalid region: {0}")]
    BadRegion(String),
    #[error("ambient space is not locally compact")]
    NotLocallyCompact,
    #[error("region is not contained in the ambient space")]
    NotInAmbient,
    #[error("region is not open in the ambient space")]
    NotOpen,
    #[error("region is not compact")]
    NotCompact,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("regions are not disjoint")]
    NotDisjoint,
    #[error("point lies outside the function domain")]
    OutsideDomain,
    #[error("expected a positive value for {0}")]
    NotPositive(&'static str),
    #[error("function spaces differ")]
    SpaceMismatch,
    #[error("tensor shapes differ")]
    ShapeMismatch,
    #[error("left support is not contained in the right support")]
    SupportNotContained,
    #[error("witness requires compact containment")]
    NotCompactlyContained,
    #[error("invalid piecewise-linear data: {0}")]
    BadFunction(String),
    #[error("invalid poset: {0}")]
    BadPoset(String),
    #[error("element id out of range")]
    BadElement,
    #[error("comparison against a zero element")]
    ZeroElement,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
