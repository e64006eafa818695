use alloc::string::String;

use crate::polyalg::Parity;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "source term must contain only {parity} powers of x for this boundary kind, \
         found monomial x^{x_power} t^{t_power}"
    )]
    ParityViolation {
        parity: Parity,
        x_power: usize,
        t_power: usize,
    },

    #[error("coefficient system is singular at row {row} (pivot {pivot:e})")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("{0}")]
    Unsupported(&'static str),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, alloc::format!("must be a positive finite number, got {value}")))
    }
}
