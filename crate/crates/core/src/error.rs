use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate parameter t = {t}: the specialized map drops degree (R_f(t) = 0)")]
    DegenerateParameter { t: String },

    #[error("degenerate family {0}: the resultant polynomial vanishes identically")]
    DegenerateFamily(String),

    #[error("invalid family definition: {0}")]
    InvalidFamily(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("no denominator lemma registered for family `{0}`")]
    NoDenominatorLemma(String),

    #[error("resource limit exceeded{}: {detail}", .t.as_ref().map(|t| format!(" at t = {t}")).unwrap_or_default())]
    ResourceLimit { t: Option<String>, detail: String },

    #[error("cannot factor {0} by trial division up to the sieve limit")]
    FactorizationLimit(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
