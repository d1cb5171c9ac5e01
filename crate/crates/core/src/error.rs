use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computed quantity is not physical (e.g. a negative population).
    #[error("numerical validity error: {0}")]
    NumericalValidity(String),

    /// The request needs more memory or time than the desk-scale limits allow.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A matrix violates one of the density-operator invariants.
    #[error("not a density operator: {0}")]
    NonPhysical(String),

    #[error("expectation table is missing operator {operator}")]
    IncompleteTable { operator: String },

    #[error("sample is not biseparable: {0}")]
    NotBiseparable(String),

    #[error("off-diagonal bound violated: {0}")]
    LemmaViolation(String),

    /// A biseparable sample was detected as genuinely multipartite entangled.
    #[error("biseparable bound violated: value {value:e} (counterexample in report)")]
    BoundViolation {
        value: f64,
        counterexample: Box<crate::bisep::Counterexample>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
