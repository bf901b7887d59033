use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("assumption violated ({assumption}): {detail}")]
    AssumptionViolation {
        assumption: &'static str,
        detail: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "no convergence after {iterations} iterations \
         (stationarity {stationarity:e}, complementarity {complementarity:e}, feasibility {feasibility:e})"
    )]
    NoConvergence {
        iterations: usize,
        stationarity: f64,
        complementarity: f64,
        feasibility: f64,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("no equilibrium certificate: {0}")]
    NoEquilibriumCertificate(String),

    #[error("bound inapplicable: {0}")]
    BoundInapplicable(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn at_iteration(iteration: usize) -> impl FnOnce(Error) -> Error {
        move |source| Error::AtIteration {
            iteration,
            source: Box::new(source),
        }
    }

    /// Strips [`Error::AtIteration`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtIteration { source, .. } => source.root(),
            other => other,
        }
    }
}
