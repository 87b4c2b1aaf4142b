use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("scenario is not simple: context {context} has {size} measurements")]
    NonSimpleScenario { context: usize, size: usize },
    #[error("measurement `{0}` is not dichotomic")]
    NonDichotomic(String),
    #[error("scenario is not an n-cycle: {0}")]
    NotCycle(String),
    #[error("scenario does not have the required shape: {0}")]
    WrongScenarioShape(String),
    #[error("subset is not contained in context {0}")]
    SubsetNotInContext(usize),
    #[error("behavior violates nondisturbance between contexts {0} and {1}")]
    NotNondisturbing(usize, usize),
    #[error("possibilistic behavior violates nondisturbance between contexts {0} and {1}")]
    NotPossibilisticallyNd(usize, usize),
    #[error("enumeration of {required} global assignments exceeds the cap of {cap}")]
    EnumerationCapExceeded { required: u128, cap: u128 },
    #[error("invalid quantum model: {0}")]
    InvalidModel(String),
    #[error("negative probability {value:e} in context {context}")]
    NegativeProbability { context: usize, value: f64 },
    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),
    #[error("linear program: {0}")]
    Lp(String),
    #[error("{0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
