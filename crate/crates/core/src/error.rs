use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Bessel order {order} is outside the supported range |order| <= {max}")]
    UnsupportedOrder { order: i64, max: u32 },

    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    #[error("Green function singularity: point separation {distance:e} m is below {limit:e} m")]
    Singularity { distance: f64, limit: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("degenerate field: {0}")]
    DegenerateField(String),

    #[error(
        "coupling matrix needs ~{required_bytes} bytes, budget is {budget_bytes}; \
         try a grid spacing of at least {suggested_spacing:.4} m"
    )]
    Resource {
        required_bytes: u64,
        budget_bytes: u64,
        suggested_spacing: f64,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::NumericalDomain(msg.into())
    }
}
