use thiserror::Error;

pub use crate::syntax::ParseError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("unsupported modality in {0}: closure is defined for E, S and C only")]
    UnsupportedModality(String),
}

/// Errors raised while building, reading or querying models.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model has no states")]
    NoStates,
    #[error("duplicate identifier {0:?}")]
    Duplicate(String),
    #[error("undeclared state {0:?}")]
    UndeclaredState(String),
    #[error("undeclared agent {0:?}")]
    UndeclaredAgent(String),
    #[error("undeclared name {0:?}")]
    UndeclaredName(String),
    #[error("undeclared proposition {0:?}")]
    UndeclaredProp(String),
    #[error("unknown relation closure {0:?}")]
    UnknownClosure(String),
    #[error("neighborhood of {state:?} for {name:?} does not contain it")]
    NotReflexive { state: String, name: String },
    #[error("{0}")]
    Unsupported(String),
    #[error("budget exceeded: {what} needs {needed}, cap is {cap}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },
    #[error("invalid model JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum DecisionError {
    #[error("formula outside the decidable fragment (D and B are not supported): {0}")]
    UnsupportedFragment(String),
    #[error("budget exceeded: {what} needs {needed}, cap is {cap}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },
    #[error("no model: the verdict is not sat")]
    NotSat,
    #[error(transparent)]
    Model(#[from] ModelError),
}
