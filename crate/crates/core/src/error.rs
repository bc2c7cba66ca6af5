use thiserror::Error;

/// Errors produced by the models in this crate.
///
/// Variants split into two families: input validation (a parameter is out of
/// its physical domain) and numerical failures (the discretisation or a
/// decomposition cannot deliver a trustworthy answer). [`Error::is_numerical`]
/// tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("measured duration {measured} ps is below the transform limit {limit} ps")]
    Infeasible { measured: f64, limit: f64 },

    #[error("singular phase-matching configuration: {0}")]
    SingularConfiguration(String),

    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),

    #[error("amplitude is truncated at the grid boundary: edge/max modulus ratio {ratio:.3e} exceeds {limit:.0e}")]
    Truncation { ratio: f64, limit: f64 },

    #[error("non-finite amplitude at (idler {row}, signal {col})")]
    NonFinite { row: usize, col: usize },

    #[error("grids differ: {0}")]
    GridMismatch(String),

    #[error("no interference dip: g2 = {g2} must exceed 1 and S = {s} must be positive")]
    NoDip { g2: f64, s: f64 },

    #[error("decomposition failed on a {rows}x{cols} grid (dOmega_i = {step_i}, dOmega_s = {step_s}): {reason}")]
    Decomposition {
        rows: usize,
        cols: usize,
        step_i: f64,
        step_s: f64,
        reason: &'static str,
    },

    #[error("malformed JSA dump at line {line}: {reason}")]
    Dump { line: usize, reason: String },
}

impl Error {
    /// True for failures of the discretisation or linear algebra rather than
    /// of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Truncation { .. }
                | Error::NonFinite { .. }
                | Error::Decomposition { .. }
                | Error::GridTooNarrow(_)
        )
    }

    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(name, value, "must be finite and positive"))
    }
}
