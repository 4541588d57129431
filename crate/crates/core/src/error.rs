use thiserror::Error;

use crate::model::ParamError;
use crate::numerics::NumericsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Param(#[from] ParamError),

    #[error(transparent)]
    Numerics(#[from] NumericsError),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("simulation window too large: {expected_points:.3e} expected points per trial")]
    WindowTooLarge { expected_points: f64 },

    #[error("objective is not monotone in density near {density}")]
    NotMonotone { density: f64 },
}

impl Error {
    /// True for failures of a numerical kernel, as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerics(_) | Error::NotMonotone { .. })
    }
}
