//! Planar leaf orderings of a binary tree.
//!
//! Drawing a tree with its root on top, its leaves on a horizontal line and
//! no crossing edges places the leaves in some order. Every such drawing is
//! obtained from the left-to-right drawing by swapping the two children of
//! some set of internal nodes; an [`Orientation`] records that set and
//! [`leaf_ordering`] reads off the resulting positions.
//!
//! For an edge `e = {i, j}` the position distance `y_e = |pi(i) - pi(j)|`
//! never exceeds `|T_e|`, and under independent fair swaps its mean is
//! exactly `|T_e| / 2`. [`conditional_expectation_ordering`] turns that mean
//! into a deterministic orientation with
//! `sum_e w_e y_e <= sum_e w_e |T_e| / 2`.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hctree::{HcTree, NodeId};
use crate::instance::SimilarityGraph;
use crate::mub::Bisection;
use crate::weight::Weight;

/// One bit per internal node, in the tree's breadth-first internal-node
/// order; `true` means the node's children are swapped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orientation(Vec<bool>);

impl Orientation {
    pub fn new(bits: Vec<bool>) -> Self {
        Orientation(bits)
    }

    /// Every node keeps its left child first.
    pub fn original(t: &HcTree) -> Self {
        Orientation(vec![false; t.internal_nodes().len()])
    }

    /// The `index`-th of the `2^len` orientations; bit `k` of `index` is
    /// the bit of the `k`-th internal node.
    pub fn from_index(index: u64, len: usize) -> Self {
        Orientation((0..len).map(|k| index >> k & 1 == 1).collect())
    }

    /// Parses a string of `0`/`1` bits.
    pub fn from_bits(bits: &str) -> Result<Self> {
        bits.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidArgument(format!("bad orientation bit {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Orientation)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check(&self, t: &HcTree) -> Result<()> {
        let expected = t.internal_nodes().len();
        if self.0.len() != expected {
            return Err(Error::OrientationMismatch { expected, found: self.0.len() });
        }
        Ok(())
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A bijection from leaf labels to positions `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LeafOrdering {
    position: Vec<u32>,
}

impl LeafOrdering {
    pub fn n(&self) -> usize {
        self.position.len()
    }

    /// `pi(label)`.
    pub fn position(&self, label: u32) -> Result<u32> {
        if label == 0 || label as usize > self.n() {
            return Err(Error::LeafOutOfRange { label, n: self.n() });
        }
        Ok(self.position[label as usize - 1])
    }

    /// Labels sorted by position.
    pub fn labels_in_order(&self) -> Vec<u32> {
        let mut out = vec![0; self.n()];
        for (k, &p) in self.position.iter().enumerate() {
            out[p as usize - 1] = k as u32 + 1;
        }
        out
    }
}

/// Positions of the leaves after applying the swaps in `o`.
pub fn leaf_ordering(t: &HcTree, o: &Orientation) -> Result<LeafOrdering> {
    o.check(t)?;
    let mut position = vec![0u32; t.n()];
    let mut next = 1u32;
    let mut stack = vec![t.root()];
    while let Some(v) = stack.pop() {
        match t.children(v) {
            None => {
                position[t.label(v).unwrap() as usize - 1] = next;
                next += 1;
            }
            Some((l, r)) => {
                let swapped = o.0[t.internal_index(v).unwrap()];
                let (first, second) = if swapped { (r, l) } else { (l, r) };
                stack.push(second);
                stack.push(first);
            }
        }
    }
    Ok(LeafOrdering { position })
}

/// Independent fair coin per internal node.
pub fn sample_orientation(t: &HcTree, seed: u64) -> Orientation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_orientation_with(t, &mut rng)
}

pub fn sample_orientation_with(t: &HcTree, rng: &mut impl Rng) -> Orientation {
    Orientation((0..t.internal_nodes().len()).map(|_| rng.gen_bool(0.5)).collect())
}

/// `y_e = |pi(i) - pi(j)|`.
pub fn ordering_distance(pi: &LeafOrdering, i: u32, j: u32) -> Result<u32> {
    if i == j {
        return Err(Error::SameLeaf(i));
    }
    Ok(pi.position(i)?.abs_diff(pi.position(j)?))
}

/// `Y_pi = sum_e w_e y_e`.
pub fn weighted_ordering_cost(g: &SimilarityGraph, pi: &LeafOrdering) -> Result<Weight> {
    if g.n() != pi.n() {
        return Err(Error::LeafCountMismatch { expected: g.n(), found: pi.n() });
    }
    g.edges()
        .iter()
        .map(|e| Ok(e.w.times(ordering_distance(pi, e.i, e.j)? as i64)))
        .sum()
}

/// `sum_e w_e |T_e|`, i.e. twice the mean of `Y_pi` over all orientations.
pub fn doubled_ordering_bound(g: &SimilarityGraph, t: &HcTree) -> Result<Weight> {
    crate::hctree::dasgupta_cost(g, t)
}

/// Twice the expectation of `Y_pi` when the internal nodes with a decided
/// bit are fixed and all others are fair coins.
///
/// `partial` is indexed like an [`Orientation`]. For an edge whose
/// least-common-ancestor bit is undecided the conditional mean of `y_e` is
/// `|T_e| / 2` whatever else is fixed. Otherwise, with `A` the child block
/// placed first (holding endpoint `a`) and `B` the other one (holding `b`),
/// `y_e = |A| + off(b) - off(a)`, where a leaf's offset inside its block is
/// the total size of the sibling subtrees placed before it on the way down.
/// Undecided nodes contribute half the sibling size, so doubled values are
/// integers.
pub fn doubled_expected_ordering_cost(
    g: &SimilarityGraph,
    t: &HcTree,
    partial: &[Option<bool>],
) -> Result<Weight> {
    if g.n() != t.n() {
        return Err(Error::LeafCountMismatch { expected: g.n(), found: t.n() });
    }
    let expected = t.internal_nodes().len();
    if partial.len() != expected {
        return Err(Error::OrientationMismatch { expected, found: partial.len() });
    }
    let bit = |v: NodeId| partial[t.internal_index(v).unwrap()];

    // twice the expected offset of `leaf` inside the block rooted at the
    // child of `top`; also returns that child
    let doubled_offset = |leaf: NodeId, top: NodeId| -> (i64, NodeId) {
        let mut total = 0i64;
        let mut c = leaf;
        loop {
            let p = t.parent(c).unwrap();
            if p == top {
                return (total, c);
            }
            let (l, r) = t.children(p).unwrap();
            let sibling = if c == l { r } else { l };
            let size = t.leaf_count(sibling) as i64;
            total += match bit(p) {
                None => size,
                Some(swapped) if (c == r) != swapped => 2 * size,
                Some(_) => 0,
            };
            c = p;
        }
    };

    let mut sum = Weight::ZERO;
    for e in g.edges() {
        let (li, lj) = (t.leaf_node(e.i)?, t.leaf_node(e.j)?);
        let top = t.lca(li, lj);
        let doubled_y = match bit(top) {
            None => t.leaf_count(top) as i64,
            Some(swapped) => {
                let (oi, ci) = doubled_offset(li, top);
                let (oj, cj) = doubled_offset(lj, top);
                let (left, _) = t.children(top).unwrap();
                let i_first = (ci == left) != swapped;
                if i_first {
                    2 * t.leaf_count(ci) as i64 + oj - oi
                } else {
                    2 * t.leaf_count(cj) as i64 + oi - oj
                }
            }
        };
        sum += e.w.times(doubled_y);
    }
    Ok(sum)
}

/// Derandomized orientation by the method of conditional expectations.
///
/// Internal nodes are fixed in breadth-first order; each takes the bit with
/// the smaller conditional expectation of `Y_pi` (ties keep the original
/// order). The conditional expectation never increases, so the result
/// satisfies `2 * Y_pi <= sum_e w_e |T_e|`.
pub fn conditional_expectation_ordering(g: &SimilarityGraph, t: &HcTree) -> Result<Orientation> {
    let k = t.internal_nodes().len();
    let mut partial: Vec<Option<bool>> = vec![None; k];
    for r in 0..k {
        partial[r] = Some(false);
        let keep = doubled_expected_ordering_cost(g, t, &partial)?;
        partial[r] = Some(true);
        let swap = doubled_expected_ordering_cost(g, t, &partial)?;
        partial[r] = Some(swap < keep);
    }
    Ok(Orientation(partial.into_iter().map(Option::unwrap).collect()))
}

/// The window bisection of an ordering: positions `x..x + n/2 - 1` on side
/// `false`, everything else on side `true`. `x` ranges over `1..=n/2`.
pub fn window_bisection(pi: &LeafOrdering, x: usize) -> Result<Bisection> {
    let n = pi.n();
    if n % 2 == 1 {
        return Err(Error::OddN(n));
    }
    if x == 0 || x > n / 2 {
        return Err(Error::InvalidArgument(format!("window start {x} outside 1..={}", n / 2)));
    }
    let window = x as u32..(x + n / 2) as u32;
    Bisection::new(pi.position.iter().map(|p| !window.contains(p)).collect())
}
