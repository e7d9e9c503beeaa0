use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("solver did not converge: {0}")]
    SolverFailure(String),

    #[error("zig-zag instability: transverse mode {mode} has squared angular frequency {omega_sq:.4e} rad^2/s^2")]
    Instability { mode: usize, omega_sq: f64 },

    #[error("search failed: {0}")]
    SearchFailure(String),

    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("invalid mode pair ({m}, {n}): a beam splitter needs two distinct modes")]
    InvalidPair { m: usize, n: usize },

    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeOutOfRange { index: usize, n_modes: usize },

    #[error("Fock sector with {modes} modes and {phonons} phonons has {size} states (limit {limit})")]
    Capacity {
        modes: usize,
        phonons: usize,
        size: u128,
        limit: usize,
    },

    #[error("matrix is not unitary: max |U^dag U - I| = {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("resonance: vanishing detuning between mode {mode} and the tone driving mode {tone}")]
    Resonance { mode: usize, tone: usize },

    #[error("beam splitter #{index} has no physical parameters")]
    IncompleteSpec { index: usize },

    #[error("pattern {pattern} is ambiguous for N = {phonons}: candidates {candidates:?}")]
    AmbiguousPattern {
        pattern: String,
        phonons: usize,
        candidates: Vec<Vec<u32>>,
    },

    #[error("pattern {pattern} is incompatible with N = {phonons} conserved phonons")]
    LostPhonon { pattern: String, phonons: usize },

    #[error("confusion matrix of mode {mode} is singular (p(bright|dark) + p(dark|bright) >= 1)")]
    SingularConfusion { mode: usize },

    #[error("population {leakage:.3e} reached the Fock cutoff (limit {limit:.1e})")]
    Truncation { leakage: f64, limit: f64 },

    #[error("step size underflow at t = {t:.6e} s")]
    Stiffness { t: f64 },

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error("ill-conditioned superoperator: cond(L^dag L) = {cond:.3e}; add settings or ancilla modes")]
    IllConditioned { cond: f64 },

    #[error("degenerate template: L^dag L is singular at every start")]
    DegenerateTemplate,

    #[error("matrix logarithm failed: {0}")]
    BranchAmbiguity(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by malformed input text rather than physics or validation.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}
