use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` = {value} is outside [{min}, {max}]")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("index {index} out of range for {what} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("invalid subsystem partition: {0}")]
    InvalidPartition(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("projection weight {weight:.3e} is too small to normalize")]
    DegenerateProjection { weight: f64 },

    #[error("distillation kept weight {probability:.3e}; nothing survives post-selection")]
    DistillationImpossible { probability: f64 },

    #[error("matrix is not X-shaped (off-pattern leakage {leakage:.3e})")]
    NotXShaped { leakage: f64 },

    #[error("no sign change of the certifying quantity on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("missing measurement setting `{0}`")]
    MissingSetting(String),

    #[error("unknown optical mode `{0}`")]
    UnknownMode(String),

    #[error("invalid measurement setting: {0}")]
    InvalidSetting(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value,
            min: 0.0,
            max: 1.0,
        })
    }
}
