use thiserror::Error;

/// Errors raised by the arithmetic, analytic and family layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("inadmissible twist d={d}: {reason}")]
    Inadmissible { d: i64, reason: String },

    #[error("coefficient table too short: need n_max >= {required}, have {available}")]
    TableTooShort { required: usize, available: usize },

    #[error("integer overflow while computing a_{n}")]
    Overflow { n: usize },

    #[error(
        "cannot decide the Fricke eigenvalue (residual +1: {res_plus:.3e}, residual -1: {res_minus:.3e}); \
         enlarge n_max"
    )]
    AmbiguousEta { res_plus: f64, res_minus: f64 },

    #[error("derivative conversion disagrees with the series oracle at m={m}: {formula} vs {oracle}")]
    ConversionMismatch { m: usize, formula: f64, oracle: f64 },

    #[error("cache file: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
