use thiserror::Error;

use crate::instance::ParseError;

/// Errors raised by graph construction, tree queries, solvers and oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("leaf {label} is outside 1..={n}")]
    LeafOutOfRange { label: u32, n: usize },

    #[error("pair ({0}, {0}) has no least common ancestor below distinct leaves")]
    SameLeaf(u32),

    #[error("tree has {found} leaves but the graph has {expected} points")]
    LeafCountMismatch { expected: usize, found: usize },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("orientation has {found} bits but the tree has {expected} internal nodes")]
    OrientationMismatch { expected: usize, found: usize },

    #[error("invalid bisection: {0}")]
    InvalidBisection(String),

    #[error("bisection operations require an even number of points, got n = {0}")]
    OddN(usize),

    #[error("n = {n} exceeds the cap of {cap} for {what}")]
    AboveCap { n: usize, cap: usize, what: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
