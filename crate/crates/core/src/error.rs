//! Error type shared across the library and the command-line front end.

use crate::gait::Phase;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file: syntax error, unknown key, or a field value
    /// that violates a model invariant. Always carries the file line.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// A programmatically supplied value violates a documented invariant.
    #[error("invalid {field}: {message}")]
    Invalid { field: &'static str, message: String },

    /// Actuation voltage outside the drivable range.
    #[error("voltage {v_kv} kV outside [0, {v_max_kv}] kV")]
    VoltageOutOfRange { v_kv: f64, v_max_kv: f64 },

    /// A half-cycle step was applied to a state in the wrong phase.
    #[error("step requires phase {expected:?} but state is {found:?}")]
    PhaseOrder { expected: Phase, found: Phase },

    /// Feet coincide; the body axis is undefined.
    #[error("degenerate state at cycle {cycle}: feet coincide")]
    DegenerateState { cycle: u64 },

    /// Ridge snapping was requested for a point outside the tile.
    #[error("point ({x}, {y}) lies outside tile {tile_id}")]
    OutsideTile { tile_id: u32, x: f64, y: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Error::Invalid {
            field,
            message: message.into(),
        }
    }

    /// True for errors caused by user-supplied files or values, as opposed
    /// to internal failures. Drives the process exit code.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
