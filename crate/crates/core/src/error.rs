use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("point lies within tolerance of a face-region boundary; resample")]
    BoundaryCase,
    #[error("degenerate law: {0}")]
    DegenerateLaw(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("sampler tuning failed: acceptance rate {acceptance:.3} outside [0.1, 0.9]; {guidance}")]
    Tuning { acceptance: f64, guidance: String },
    #[error("ill-conditioned design (condition number {condition:e}); choose different radii")]
    Conditioning { condition: f64 },
    #[error("importance sampling proposal too poor: effective sample fraction {fraction:e}")]
    ProposalQuality { fraction: f64 },
    #[error("only {hits} draws fell in the distance band; increase n or the band cap")]
    BandWidth { hits: usize },
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("Hessian is singular: {0}")]
    SingularHessian(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
