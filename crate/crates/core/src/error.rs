use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlmError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// An oracle returned a non-finite value or otherwise failed.
    #[error("oracle failure in {context}: {detail}")]
    Oracle { context: &'static str, detail: String },

    /// The problem does not fit the requested AL variant (e.g. a nonconvex
    /// term handed to the Moreau-smoothed assembler).
    #[error("variant mismatch: {0}")]
    VariantMismatch(String),

    /// A required oracle or structural property is missing.
    #[error("missing capability: {0}")]
    Capability(String),
}

pub type Result<T> = std::result::Result<T, AlmError>;

pub(crate) fn check_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(AlmError::DimMismatch {
            context,
            expected,
            got,
        });
    }
    Ok(())
}

pub(crate) fn check_finite_slice(context: &'static str, v: &[f64]) -> Result<()> {
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(AlmError::Oracle {
            context,
            detail: format!("non-finite entry {} at index {i}", v[i]),
        });
    }
    Ok(())
}

pub(crate) fn check_finite_value(context: &'static str, v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(AlmError::Oracle {
            context,
            detail: format!("non-finite value {v}"),
        });
    }
    Ok(v)
}
