use thiserror::Error;

/// Validation failures for parameters and configurations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid `{field}` = {value}: {reason}")]
    InvalidValue {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("saturation bounds must satisfy low < high (got [{low}, {high}])")]
    InvalidBounds { low: f64, high: f64 },
    #[error("duration {duration} is not an integer multiple of dt {dt}")]
    FractionalSteps { duration: f64, dt: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(
    ok: bool,
    field: &'static str,
    value: f64,
    reason: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidValue {
            field,
            value,
            reason,
        })
    }
}
