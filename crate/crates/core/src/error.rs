use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bundle {bundle:#b} references an item outside the universe of {items} items")]
    UniverseMismatch { bundle: u32, items: usize },

    #[error("item universe of {0} items is not supported (1..={max} allowed)", max = crate::bundle::MAX_ITEMS)]
    UnsupportedItemCount(usize),

    #[error("invalid valuation: {0}")]
    InvalidValuation(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("enumeration too large: {count} profiles exceeds the cap of {cap}; use sampling instead")]
    EnumerationTooLarge { count: u128, cap: u128 },

    #[error("allocation search too large: {count} assignments exceeds the cap of {cap}")]
    AllocationTooLarge { count: u128, cap: u128 },

    #[error("LP over {items} items needs 2^{items} rows; construction is capped at {cap} items")]
    LpTooLarge { items: usize, cap: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid price vector: {0}")]
    InvalidPrices(String),

    #[error("invalid dual certificate: {0}")]
    InvalidCertificate(String),

    #[error("LP solve did not reach an optimum (status {0:?})")]
    NotOptimal(crate::lp::LpStatus),

    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
