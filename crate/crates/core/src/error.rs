use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("`{name}` must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("`{name}` must lie in the open interval (0, 1), got {value}")]
    OutageOutOfRange { name: &'static str, value: f64 },

    #[error("path-loss exponent must exceed 2 for a finite interference field, got {0}")]
    AlphaTooSmall(f64),

    #[error("closed form is only available for alpha = 4, got {0}")]
    AlphaUnsupported(f64),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("reception target {target} is never reached; supremum over the horizon is {supremum}")]
    TargetUnreachable { target: f64, supremum: f64 },

    #[error("avoidance-gain denominator is not positive")]
    ArgOutOfDomain,

    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    #[error("trajectory ends at t = {end} but t = {requested} was requested")]
    TrajectoryTooShort { end: f64, requested: f64 },

    #[error("t = {t} is outside the trajectory span [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("conservation drift persisted after {0} step halvings")]
    StepTooLarge(u32),

    #[error("only {0} secondary users were drawn; need at least 2")]
    DegenerateDraw(usize),

    #[error("config: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonPositive { .. }
            | Error::OutageOutOfRange { .. }
            | Error::AlphaTooSmall(_)
            | Error::Config(_)
            | Error::InvalidArgument(_)
            | Error::Io(_) => 2,
            Error::AlphaUnsupported(_)
            | Error::Infeasible(_)
            | Error::TargetUnreachable { .. }
            | Error::DegenerateDraw(_) => 3,
            Error::ArgOutOfDomain
            | Error::QuadratureFailure(_)
            | Error::TrajectoryTooShort { .. }
            | Error::OutOfRange { .. }
            | Error::StepTooLarge(_) => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
