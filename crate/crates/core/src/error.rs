use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in this crate.
///
/// `Parse` is the only variant caused by malformed text; every other variant
/// is a domain error (a precondition of the mathematics failed).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid tau: Im(tau) must be positive, got {0}")]
    InvalidTau(f64),
    #[error("point at infinity exists only on the sphere")]
    InfinityOffSphere,
    #[error("diagonal singularity")]
    DiagonalSingularity,
    #[error("degree must be zero")]
    NonzeroDegree,
    #[error("genus-0 curve has trivial Jacobian")]
    TrivialJacobian,
    #[error("mismatched contexts")]
    MismatchedContext,
    #[error("marks must be affine points")]
    MarkAtInfinity,
    #[error("marks not distinct")]
    DuplicateMarks,
    #[error("mark index {index} out of range (curve has {count} marks)")]
    MarkOutOfRange { index: usize, count: usize },
    #[error("non-integral coefficient off marked set")]
    NonIntegralOffMarks,
    #[error("degree integrality violated")]
    DegreeNotIntegral,
    #[error("coefficient overflow")]
    Overflow,
    #[error("all-zero coefficients")]
    ZeroExpansion,
    #[error("divisors not disjoint")]
    NotDisjoint,
    #[error("divisor has non-integral coefficients")]
    NonIntegralDivisor,
    #[error("support outside marked set")]
    SupportOffMarks,
    #[error("not an elliptic function: {0}")]
    NotElliptic(String),
    #[error("leading constant must be nonzero")]
    ZeroConstant,
    #[error("momentum component {0} out of range 1..=13")]
    ComponentOutOfRange(usize),
    #[error("momentum count {momenta} does not match mark count {marks}")]
    MomentumCount { momenta: usize, marks: usize },
    #[error("momentum conservation violated (residual {0:e})")]
    ConservationViolated(f64),
    #[error("mass-shell condition violated at momentum {index} (residual {residual:e})")]
    MassShellViolated { index: usize, residual: f64 },
    #[error("marks do not fit in one fundamental domain")]
    MarksSpanPeriod,
}
