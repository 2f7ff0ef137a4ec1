use thiserror::Error;

use crate::pointset::PointSet;
use crate::space::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} points requested; at most 64 are supported")]
    TooManyPoints(usize),

    #[error("set {set} uses labels outside 1..={n}")]
    OutOfRange { set: PointSet, n: usize },

    #[error("not a topology: {0}")]
    NotATopology(ValidationReport),

    #[error("covering table is inconsistent at point {0}")]
    BadCover(usize),

    #[error("set {0} is not open")]
    NotOpen(PointSet),

    #[error("point {point} cannot be identified with point {n}")]
    BadIdentification { point: usize, n: usize },

    #[error("quotient families need spaces with at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("set {0} violates the precondition (must exclude n and be a proper subset of 1..n-1)")]
    BadCharacterizationSet(PointSet),

    #[error("quotient family expects {expected} spaces on {points} points, found {found}")]
    FamilyShape {
        expected: usize,
        points: usize,
        found: usize,
    },

    #[error("unsupported point count {n} (supported range {min}..={max})")]
    UnsupportedSize { n: usize, min: usize, max: usize },

    #[error("{0} is not a vertex of the clan digraph")]
    UnknownVertex(PointSet),

    #[error("new open {k}-set counts range over {min}..={max}; they may differ by at most 2")]
    InconsistentCounts { k: usize, min: usize, max: usize },

    #[error("a quotient space has fewer open {k}-sets than the known systems predict")]
    MissingOldSets { k: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
