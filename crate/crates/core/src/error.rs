use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested mean curvature lies outside the range where a rotational
    /// CMC sphere exists.
    #[error("no rotational CMC sphere with H = {h} in {space}: requires {threshold}")]
    NoSuchSphere {
        space: &'static str,
        h: f64,
        threshold: &'static str,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The spectrum could not certify the second eigenvalue with the modes computed.
    #[error(
        "cannot certify lambda2 with m_max = {m_max}: lowest eigenvalue of mode {} is {lowest:.3e} (tolerance {tolerance:.3e}); increase m_max",
        m_max + 1
    )]
    Certification {
        m_max: u32,
        lowest: f64,
        tolerance: f64,
    },

    #[error("stability hypothesis ({hypothesis}) violated: {details}")]
    HypothesisViolation {
        hypothesis: &'static str,
        details: String,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::NoSuchSphere { .. } => 2,
            Error::Numerical(_)
            | Error::Certification { .. }
            | Error::HypothesisViolation { .. }
            | Error::Internal(_) => 3,
        }
    }
}
