use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A kernel, coefficient or configuration parameter is outside its legal range.
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("moment of order {order} does not exist: {integral} diverges")]
    MomentDoesNotExist { order: f64, integral: String },

    #[error("derivative order {0} exceeds the supported maximum of {max}", max = crate::symbol::MAX_DERIVATIVE_ORDER)]
    DerivativeOrderTooHigh(usize),

    #[error("regime {regime} inapplicable: {reason}")]
    RegimeInapplicable { regime: String, reason: String },

    #[error("kappa out of range [{lo},{hi}]: got {kappa}")]
    KappaOutOfRange { kappa: f64, lo: f64, hi: f64 },

    #[error("kappa {kappa} outside guaranteed range: needs kappa < {index} ({which})")]
    OutsideGuaranteedRange {
        kappa: f64,
        index: f64,
        which: &'static str,
    },

    #[error("unsupported moment function: {0}")]
    UnsupportedFunction(String),

    #[error("growth hypothesis fails: {0}")]
    GrowthHypothesis(String),

    #[error("path {path} aborted at step {step}: {reason}")]
    PathAborted { path: u64, step: usize, reason: String },

    #[error("check refused: {0}")]
    Refused(String),

    #[error("curve flagged non-convergent (standard error grows under path doubling)")]
    NonConvergent,

    #[error("insufficient grid: {0}")]
    InsufficientGrid(String),

    #[error("spec schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::ParameterDomain(msg.into())
    }
}
