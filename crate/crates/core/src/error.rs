use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument refers to something outside the object's domain
    /// (unknown element, action/type mismatch, malformed distribution).
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data failed validation.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// An exhaustive computation would exceed its configured budget.
    #[error("budget exceeded: {what} needs {required} but the budget is {budget}{}", hint.as_ref().map(|h| format!(" ({h})")).unwrap_or_default())]
    Budget {
        what: String,
        required: u128,
        budget: u128,
        hint: Option<String>,
    },

    #[error("linear program {kind}: {message}")]
    Lp {
        kind: LpFailure,
        message: String,
        /// Plain-text export of the offending program.
        dump: Option<String>,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpFailure {
    Infeasible,
    Unbounded,
    Numerical,
}

impl std::fmt::Display for LpFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LpFailure::Infeasible => "infeasible",
            LpFailure::Unbounded => "unbounded",
            LpFailure::Numerical => "numerical failure",
        })
    }
}

impl Error {
    pub(crate) fn budget(what: impl Into<String>, required: u128, budget: u128) -> Self {
        Error::Budget {
            what: what.into(),
            required,
            budget,
            hint: None,
        }
    }

    pub(crate) fn with_hint(self, hint: impl Into<String>) -> Self {
        match self {
            Error::Budget {
                what,
                required,
                budget,
                ..
            } => Error::Budget {
                what,
                required,
                budget,
                hint: Some(hint.into()),
            },
            other => other,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
