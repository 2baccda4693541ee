//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while loading panels, classifying pairs or
/// condensing networks.
///
/// Variants are grouped into three broad classes (see [`Error::class`]):
/// input parsing, contract violations and graph degeneracy. The CLI maps
/// each class to a distinct process exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// A cell of the input file could not be parsed. Row and column are
    /// 1-based and count the header row.
    #[error("parse error at row {row}, column {col}: {message}")]
    Parse {
        row: usize,
        col: usize,
        message: String,
    },

    /// Structural problem with the input panel (duplicate entity, empty
    /// file, ragged rows, ...).
    #[error("schema error: {0}")]
    Schema(String),

    /// The period labels are not contiguous.
    #[error("period gap: {missing} is missing between {before} and {after}")]
    PeriodGap {
        missing: i64,
        before: i64,
        after: i64,
    },

    /// A requested analysis window does not fit inside the panel.
    #[error("window ({start}, {end}) outside available range ({have_start}, {have_end})")]
    WindowOutOfRange {
        start: i64,
        end: i64,
        have_start: i64,
        have_end: i64,
    },

    /// Two series that must have equal length do not.
    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// The cumulative Manhattan distance of a pair stays at (numerical)
    /// zero for all but fewer than three points, so no power law can be
    /// fitted. Signals near-identical series.
    #[error("degenerate pair: fewer than 3 usable log-log points")]
    DegenerateSeries,

    /// A series is constant over the window, so the Pearson coefficient
    /// is undefined.
    #[error("zero variance in {which} series")]
    ZeroVariance { which: &'static str },

    /// A precondition of an operation was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Every pair of the matrix was degenerate; no graph can be built.
    #[error("empty graph: all pairs are degenerate")]
    EmptyGraph,

    /// The graph splits into the listed components where a connected one
    /// was required.
    #[error("disconnected graph: components {0:?}")]
    Disconnected(Vec<Vec<String>>),
}

/// Coarse error classes used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input data.
    Parse,
    /// Violated operation contract.
    Contract,
    /// Degenerate or disconnected graph.
    Graph,
}

impl Error {
    /// The coarse class of this error.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. } | Error::Schema(_) | Error::PeriodGap { .. } => ErrorClass::Parse,
            Error::WindowOutOfRange { .. }
            | Error::LengthMismatch { .. }
            | Error::DegenerateSeries
            | Error::ZeroVariance { .. }
            | Error::Contract(_) => ErrorClass::Contract,
            Error::EmptyGraph | Error::Disconnected(_) => ErrorClass::Graph,
        }
    }
}
