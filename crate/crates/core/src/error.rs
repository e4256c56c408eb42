use thiserror::Error;

use crate::orbit::Sector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grids of the two operands differ")]
    GridMismatch,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid dimensional constants: {0}")]
    InvalidConstants(String),
    #[error("invalid orbit label: {0}")]
    InvalidLabel(String),
    #[error("degenerate orbit: {0}")]
    Degenerate(String),
    #[error("sector mismatch: transform needs {expected:?}, label is {found:?}")]
    SectorMismatch { expected: Sector, found: Sector },
    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),
    #[error("singular kernel: {0}")]
    Singular(String),
    #[error("shift {shift} on axis {axis} is not a multiple of the step {step}")]
    ShiftOffGrid { axis: usize, shift: f64, step: f64 },
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("grid too large: {0}")]
    GridTooLarge(String),
    #[error("field does not vanish at the grid boundary (edge {edge:.3e}, peak {peak:.3e})")]
    TailNotNegligible { edge: f64, peak: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Errors coming from label, sector or parameter validation.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::InvalidConstants(_)
                | Error::InvalidLabel(_)
                | Error::Degenerate(_)
                | Error::SectorMismatch { .. }
                | Error::DegenerateParams(_)
                | Error::Singular(_)
        )
    }

    /// Errors raised by resolution, extent or size guards.
    pub fn is_grid_guard(&self) -> bool {
        matches!(
            self,
            Error::ShiftOffGrid { .. }
                | Error::GridTooCoarse(_)
                | Error::GridTooLarge(_)
                | Error::TailNotNegligible { .. }
        )
    }
}
