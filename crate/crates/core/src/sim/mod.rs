//! Good-machine simulation and GIF-PO coverage recording.

mod db;
mod engine;
mod stimulus;

pub use db::{percent, CoverageDb, Summary};
pub use engine::{
    cover_cycle, is_exhaustive, observability, observability_dual, observability_in, run_coverage, run_coverage_frames,
    run_coverage_reference, CoverageOptions, Packed,
};
pub use stimulus::{Frame, Stimulus};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("stimulus line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("stimulus column `{0}` is neither an input port nor a register")]
    UnknownColumn(String),
    #[error("stimulus does not drive input port `{0}`")]
    MissingInput(String),
    #[error("cycle {cycle}: no value for input `{column}`")]
    MissingValue { cycle: usize, column: String },
    #[error("cycle {cycle}: value for `{column}` exceeds the port width")]
    ValueTooWide { cycle: usize, column: String },
}
