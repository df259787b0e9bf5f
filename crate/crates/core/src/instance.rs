//! Revenue instances: a set of points `1..=n` and nonnegative similarity
//! edges between them, plus generators and the edge-list file format.
//!
//! The edge-list format is
//!
//! ```text
//! # comment lines start with '#'
//! n m
//! i j w
//! ...
//! ```
//!
//! with exactly `m` edge lines, single-space separated fields and `w` a
//! nonnegative decimal. Absent pairs and zero-weight pairs are equivalent;
//! zero-weight edges are accepted on input and dropped from the graph.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::weight::{Weight, WeightParseError};

/// A similarity edge with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub i: u32,
    pub j: u32,
    pub w: Weight,
}

impl Edge {
    pub fn new(i: u32, j: u32, w: Weight) -> Self {
        Edge { i, j, w }
    }
}

/// `n` points with weighted similarity edges.
///
/// Edges are normalized (`i < j`), unique, strictly positive and sorted by
/// `(i, j)`. The value is immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl SimilarityGraph {
    /// Builds a graph, normalizing endpoint order and dropping zero weights.
    ///
    /// Self-loops, out-of-range endpoints, negative weights and duplicate
    /// pairs are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32, Weight)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("a graph needs at least one point".into()));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (a, b, w) in edges {
            let (i, j) = (a.min(b), a.max(b));
            check_edge(n, i, j, w).map_err(Error::InvalidGraph)?;
            if !seen.insert((i, j)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({i}, {j})")));
            }
            if !w.is_zero() {
                out.push(Edge::new(i, j, w));
            }
        }
        out.sort_by_key(|e| (e.i, e.j));
        Ok(SimilarityGraph { n, edges: out })
    }

    /// A graph with no edges.
    pub fn empty(n: usize) -> Result<Self> {
        SimilarityGraph::new(n, [])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Dense symmetric weight matrix indexed by `label - 1`.
    pub fn weight_matrix(&self) -> Vec<Vec<Weight>> {
        let mut m = vec![vec![Weight::ZERO; self.n]; self.n];
        for e in &self.edges {
            let (a, b) = (e.i as usize - 1, e.j as usize - 1);
            m[a][b] = e.w;
            m[b][a] = e.w;
        }
        m
    }

    /// Multiplies every weight by `k`.
    pub fn scaled(&self, k: i64) -> Result<Self> {
        SimilarityGraph::new(self.n, self.edges.iter().map(|e| (e.i, e.j, e.w.times(k))))
    }

    /// Adds an isolated point `n + 1`.
    pub fn padded(&self) -> Self {
        SimilarityGraph { n: self.n + 1, edges: self.edges.clone() }
    }
}

fn check_edge(n: usize, i: u32, j: u32, w: Weight) -> std::result::Result<(), String> {
    if i == j {
        return Err(format!("self-loop at {i}"));
    }
    if i == 0 || j as usize > n {
        return Err(format!("endpoint out of 1..={n} in ({i}, {j})"));
    }
    if w.is_negative() {
        return Err(format!("negative weight {w} on ({i}, {j})"));
    }
    Ok(())
}

/// Total similarity weight `sum_e w_e`.
pub fn total_weight(g: &SimilarityGraph) -> Weight {
    g.edges.iter().map(|e| e.w).sum()
}

/// What went wrong on a given line of an edge-list file.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing header line `n m`")]
    MissingHeader,
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("endpoint {label} outside 1..={n}")]
    EndpointOutOfRange { label: u32, n: usize },
    #[error("self-loop at {0}")]
    SelfLoop(u32),
    #[error("negative weight {0}")]
    NegativeWeight(Weight),
    #[error("bad weight: {0}")]
    BadWeight(WeightParseError),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
    #[error("header declares {declared} edges but {found} were given")]
    EdgeCountMismatch { declared: usize, found: usize },
}

/// A parse failure with its 1-based line number.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

/// Parses the edge-list format described in the module docs.
pub fn parse_graph(text: &str) -> Result<SimilarityGraph, ParseError> {
    let err = |line: usize, kind| ParseError { line, kind };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());

    let (header_line, header) = lines.next().ok_or(err(1, ParseErrorKind::MissingHeader))?;
    let fields: Vec<&str> = header.split(' ').collect();
    let (n, m) = match fields.as_slice() {
        [n, m] => match (n.parse::<usize>(), m.parse::<usize>()) {
            (Ok(n), Ok(m)) if n >= 1 => (n, m),
            _ => {
                return Err(err(
                    header_line,
                    ParseErrorKind::Malformed(format!("expected `n m` with n >= 1, got `{header}`")),
                ))
            }
        },
        _ => {
            return Err(err(
                header_line,
                ParseErrorKind::Malformed(format!("expected `n m`, got `{header}`")),
            ))
        }
    };

    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(m);
    let mut count = 0usize;
    let mut last_line = header_line;
    for (line, text) in lines {
        last_line = line;
        count += 1;
        if count > m {
            continue;
        }
        let fields: Vec<&str> = text.split(' ').collect();
        let [a, b, w] = fields.as_slice() else {
            return Err(err(
                line,
                ParseErrorKind::Malformed(format!("expected `i j w`, got `{text}`")),
            ));
        };
        let endpoint = |s: &str| {
            s.parse::<u32>().map_err(|_| {
                err(line, ParseErrorKind::Malformed(format!("bad endpoint `{s}`")))
            })
        };
        let (a, b) = (endpoint(a)?, endpoint(b)?);
        for label in [a, b] {
            if label == 0 || label as usize > n {
                return Err(err(line, ParseErrorKind::EndpointOutOfRange { label, n }));
            }
        }
        if a == b {
            return Err(err(line, ParseErrorKind::SelfLoop(a)));
        }
        let w: Weight = w.parse().map_err(|e| err(line, ParseErrorKind::BadWeight(e)))?;
        if w.is_negative() {
            return Err(err(line, ParseErrorKind::NegativeWeight(w)));
        }
        let (i, j) = (a.min(b), a.max(b));
        if !seen.insert((i, j)) {
            return Err(err(line, ParseErrorKind::DuplicateEdge(i, j)));
        }
        edges.push((i, j, w));
    }
    if count != m {
        return Err(err(last_line, ParseErrorKind::EdgeCountMismatch { declared: m, found: count }));
    }
    Ok(SimilarityGraph::new(n, edges).expect("edges validated while parsing"))
}

/// Writes the edge-list format, edges sorted by `(i, j)`.
pub fn serialize_graph(g: &SimilarityGraph) -> String {
    let mut out = format!("{} {}\n", g.n, g.edges.len());
    for e in &g.edges {
        writeln!(out, "{} {} {}", e.i, e.j, e.w).unwrap();
    }
    out
}

/// The perfect matching `{(2k-1, 2k, 1)}` on `n` points.
pub fn gen_matching(n: usize) -> Result<SimilarityGraph> {
    if n % 2 == 1 {
        return Err(Error::OddN(n));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("matching needs n >= 2".into()));
    }
    SimilarityGraph::new(n, (1..=n as u32 / 2).map(|k| (2 * k - 1, 2 * k, Weight::from_int(1))))
}

/// G(n, p)-style instance: each pair independently with probability
/// `density`, integer weight uniform on `1..=max_weight`.
///
/// Pairs are visited in `(i, j)` lexicographic order from a ChaCha8 stream,
/// so the result depends only on the arguments.
pub fn gen_random(n: usize, density: f64, max_weight: u32, seed: u64) -> Result<SimilarityGraph> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidArgument(format!("density {density} not in [0, 1]")));
    }
    if max_weight == 0 {
        return Err(Error::InvalidArgument("max weight must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 1..=n as u32 {
        for j in i + 1..=n as u32 {
            if rng.gen_bool(density) {
                let w = rng.gen_range(1..=max_weight);
                edges.push((i, j, Weight::from_int(w as i64)));
            }
        }
    }
    SimilarityGraph::new(n, edges)
}
