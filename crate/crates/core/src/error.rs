use core::fmt;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Boundary angles violate `0 < theta_f < theta_i < pi`.
    InvalidBoundary { theta_i: f64, theta_f: f64 },
    /// A scalar argument is outside its domain.
    InvalidArgument { name: &'static str, value: f64 },
    /// Rotation axis is not a unit vector.
    NonUnitAxis { norm: f64 },
    /// Pulse sequence is structurally invalid.
    InvalidSequence(&'static str),
    /// The closed-form `a_y` is only tabulated for `m <= 3`.
    UnsupportedOffCount(usize),
    /// `A = B = 0`: the optimality condition places no constraint on `tau2`.
    Unconstrained,
    /// `A = 0`, `B != 0`: the only solutions are `tau2 = 0` or `2 pi`.
    DegenerateBranch { b: f64 },
    /// No off-pulse count up to `m_max` produced a root.
    NoSolution { v: f64, m_max: usize },
    /// A solver result violated the rescaled-time lower bound.
    BoundViolation { t_rescaled: f64 },
    /// Field angle left the open interval `(0, pi)`.
    AngleOutOfRange { theta: f64 },
    /// Adaptive integrator step collapsed.
    StepUnderflow { t: f64, h: f64 },
    /// Adaptive integrator exceeded its step budget.
    TooManySteps { t: f64 },
    /// Geometric construction inputs are inconsistent.
    InconsistentGeometry(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidBoundary { theta_i, theta_f } => write!(
                f,
                "invalid boundary angles: need 0 < theta_f < theta_i < pi, got theta_i={theta_i}, theta_f={theta_f}"
            ),
            Error::InvalidArgument { name, value } => {
                write!(f, "argument `{name}` out of domain: {value}")
            }
            Error::NonUnitAxis { norm } => write!(f, "rotation axis is not unit length (|n| = {norm})"),
            Error::InvalidSequence(msg) => write!(f, "invalid pulse sequence: {msg}"),
            Error::UnsupportedOffCount(m) => {
                write!(f, "closed-form a_y is available for m = 1, 2, 3 only (got m = {m})")
            }
            Error::Unconstrained => write!(f, "optimality condition is vacuous (A = B = 0)"),
            Error::DegenerateBranch { b } => {
                write!(f, "degenerate branch: A = 0 with B = {b}, no interior switch")
            }
            Error::NoSolution { v, m_max } => {
                write!(f, "no pulse sequence found for v = {v} with m <= {m_max}")
            }
            Error::BoundViolation { t_rescaled } => {
                write!(f, "internal error: rescaled duration {t_rescaled} is below pi")
            }
            Error::AngleOutOfRange { theta } => {
                write!(f, "field angle {theta} left the interval (0, pi)")
            }
            Error::StepUnderflow { t, h } => {
                write!(f, "integrator step underflow at t = {t} (h = {h})")
            }
            Error::TooManySteps { t } => write!(f, "integrator step budget exhausted at t = {t}"),
            Error::InconsistentGeometry(msg) => write!(f, "inconsistent geometry: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
