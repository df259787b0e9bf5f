//! Binary hierarchical-clustering trees and the two objectives defined on
//! them.
//!
//! For a tree `T` over leaves `1..=n` and an edge `e = {i, j}`, `|T_e|` is
//! the number of leaves below the least common ancestor of `i` and `j`.
//! The revenue of `T` is `sum_e w_e (n - |T_e|)` and its Dasgupta cost is
//! `sum_e w_e |T_e|`; the two always add up to `n * sum_e w_e`.

use std::fmt;

use crate::error::{Error, Result};
use crate::instance::SimilarityGraph;
use crate::mub::Bisection;
use crate::weight::Weight;

/// Index of a node inside an [`HcTree`].
pub type NodeId = usize;

/// A tree described recursively; used to build and take apart [`HcTree`]s.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Leaf(u32),
    Join(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn leaf(label: u32) -> Shape {
        Shape::Leaf(label)
    }

    pub fn join(left: Shape, right: Shape) -> Shape {
        Shape::Join(Box::new(left), Box::new(right))
    }

    /// Left-deep comb `((((a, b), c), d), ...)` over `labels`.
    pub fn comb(labels: &[u32]) -> Option<Shape> {
        let (first, rest) = labels.split_first()?;
        Some(rest.iter().fold(Shape::leaf(*first), |acc, &l| Shape::join(acc, Shape::leaf(l))))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Shape::Leaf(_) => 1,
            Shape::Join(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum NodeKind {
    Leaf(u32),
    Internal { left: NodeId, right: NodeId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    kind: NodeKind,
    parent: Option<NodeId>,
    size: usize,
    depth: usize,
}

/// A rooted binary tree whose leaves are labelled by a permutation of
/// `1..=n`. Every internal node has a left and a right child and caches its
/// leaf count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HcTree {
    nodes: Vec<Node>,
    root: NodeId,
    leaf_of: Vec<NodeId>,
    internal_bfs: Vec<NodeId>,
    internal_rank: Vec<Option<usize>>,
}

impl HcTree {
    /// Builds a tree from a shape whose leaves must be exactly `1..=n`.
    pub fn from_shape(shape: &Shape) -> Result<HcTree> {
        let n = shape.leaf_count();
        let mut nodes = Vec::with_capacity(2 * n - 1);
        let mut leaf_of = vec![usize::MAX; n];
        let root = build(shape, None, 0, n, &mut nodes, &mut leaf_of)?;
        if let Some(missing) = leaf_of.iter().position(|&id| id == usize::MAX) {
            return Err(Error::InvalidTree(format!("leaf {} is missing", missing + 1)));
        }

        let mut internal_bfs = Vec::with_capacity(n.saturating_sub(1));
        let mut internal_rank = vec![None; nodes.len()];
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(id) = queue.pop_front() {
            if let NodeKind::Internal { left, right } = nodes[id].kind {
                internal_rank[id] = Some(internal_bfs.len());
                internal_bfs.push(id);
                queue.push_back(left);
                queue.push_back(right);
            }
        }
        Ok(HcTree { nodes, root, leaf_of, internal_bfs, internal_rank })
    }

    /// Parses Newick text with integer leaf labels, e.g. `((1,2),(3,4));`.
    pub fn from_newick(text: &str) -> Result<HcTree> {
        HcTree::from_shape(&parse_newick(text)?)
    }

    /// The recursive description of this tree.
    pub fn shape(&self) -> Shape {
        self.shape_at(self.root)
    }

    fn shape_at(&self, id: NodeId) -> Shape {
        match self.nodes[id].kind {
            NodeKind::Leaf(l) => Shape::leaf(l),
            NodeKind::Internal { left, right } => {
                Shape::join(self.shape_at(left), self.shape_at(right))
            }
        }
    }

    pub fn n(&self) -> usize {
        self.leaf_of.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// `(left, right)` for an internal node, `None` for a leaf.
    pub fn children(&self, id: NodeId) -> Option<(NodeId, NodeId)> {
        match self.nodes[id].kind {
            NodeKind::Internal { left, right } => Some((left, right)),
            NodeKind::Leaf(_) => None,
        }
    }

    pub fn label(&self, id: NodeId) -> Option<u32> {
        match self.nodes[id].kind {
            NodeKind::Leaf(l) => Some(l),
            NodeKind::Internal { .. } => None,
        }
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.nodes[id].depth
    }

    /// Number of leaves in the subtree rooted at `id`.
    pub fn leaf_count(&self, id: NodeId) -> usize {
        self.nodes[id].size
    }

    /// Node holding leaf `label`.
    pub fn leaf_node(&self, label: u32) -> Result<NodeId> {
        self.check_label(label)?;
        Ok(self.leaf_of[label as usize - 1])
    }

    /// Internal nodes in breadth-first order from the root (left before
    /// right). Orientations index their bits by this order.
    pub fn internal_nodes(&self) -> &[NodeId] {
        &self.internal_bfs
    }

    /// Breadth-first rank of an internal node.
    pub fn internal_index(&self, id: NodeId) -> Option<usize> {
        self.internal_rank[id]
    }

    /// Leaf labels under `id`, left to right.
    pub fn leaves_under(&self, id: NodeId) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.nodes[id].size);
        let mut stack = vec![id];
        while let Some(v) = stack.pop() {
            match self.nodes[v].kind {
                NodeKind::Leaf(l) => out.push(l),
                NodeKind::Internal { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        out
    }

    /// Least common ancestor of two nodes.
    pub fn lca(&self, mut a: NodeId, mut b: NodeId) -> NodeId {
        while self.nodes[a].depth > self.nodes[b].depth {
            a = self.nodes[a].parent.unwrap();
        }
        while self.nodes[b].depth > self.nodes[a].depth {
            b = self.nodes[b].parent.unwrap();
        }
        while a != b {
            a = self.nodes[a].parent.unwrap();
            b = self.nodes[b].parent.unwrap();
        }
        a
    }

    /// `|T_ij|`: leaves under the least common ancestor of leaves `i != j`.
    pub fn subtree_size_at_lca(&self, i: u32, j: u32) -> Result<usize> {
        self.check_label(i)?;
        self.check_label(j)?;
        if i == j {
            return Err(Error::SameLeaf(i));
        }
        let l = self.lca(self.leaf_of[i as usize - 1], self.leaf_of[j as usize - 1]);
        Ok(self.nodes[l].size)
    }

    pub fn height(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Newick text, children emitted left then right: `((1,2),(3,4));`.
    pub fn to_newick(&self) -> String {
        format!("{};", self.shape())
    }

    fn check_label(&self, label: u32) -> Result<()> {
        if label == 0 || label as usize > self.n() {
            return Err(Error::LeafOutOfRange { label, n: self.n() });
        }
        Ok(())
    }
}

fn build(
    shape: &Shape,
    parent: Option<NodeId>,
    depth: usize,
    n: usize,
    nodes: &mut Vec<Node>,
    leaf_of: &mut [NodeId],
) -> Result<NodeId> {
    let id = nodes.len();
    match shape {
        Shape::Leaf(l) => {
            let l = *l;
            if l == 0 || l as usize > n {
                return Err(Error::InvalidTree(format!("leaf label {l} outside 1..={n}")));
            }
            if leaf_of[l as usize - 1] != usize::MAX {
                return Err(Error::InvalidTree(format!("leaf label {l} appears twice")));
            }
            leaf_of[l as usize - 1] = id;
            nodes.push(Node { kind: NodeKind::Leaf(l), parent, size: 1, depth });
        }
        Shape::Join(a, b) => {
            nodes.push(Node {
                kind: NodeKind::Internal { left: usize::MAX, right: usize::MAX },
                parent,
                size: 0,
                depth,
            });
            let left = build(a, Some(id), depth + 1, n, nodes, leaf_of)?;
            let right = build(b, Some(id), depth + 1, n, nodes, leaf_of)?;
            nodes[id].kind = NodeKind::Internal { left, right };
            nodes[id].size = nodes[left].size + nodes[right].size;
        }
    }
    Ok(id)
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Leaf(l) => write!(f, "{l}"),
            Shape::Join(a, b) => write!(f, "({a},{b})"),
        }
    }
}

impl fmt::Display for HcTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_newick())
    }
}

/// Parses a binary Newick string into a [`Shape`] (no branch lengths).
pub fn parse_newick(text: &str) -> Result<Shape> {
    let bytes: Vec<u8> = text.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
    let mut pos = 0;
    let shape = parse_subtree(&bytes, &mut pos)?;
    if bytes.get(pos) != Some(&b';') {
        return Err(Error::InvalidTree("Newick tree must end with ';'".into()));
    }
    if pos + 1 != bytes.len() {
        return Err(Error::InvalidTree("trailing text after ';'".into()));
    }
    Ok(shape)
}

fn parse_subtree(bytes: &[u8], pos: &mut usize) -> Result<Shape> {
    let bad = |msg: &str, at: usize| Error::InvalidTree(format!("{msg} at byte {at}"));
    match bytes.get(*pos) {
        Some(b'(') => {
            *pos += 1;
            let left = parse_subtree(bytes, pos)?;
            if bytes.get(*pos) != Some(&b',') {
                return Err(bad("expected ','", *pos));
            }
            *pos += 1;
            let right = parse_subtree(bytes, pos)?;
            match bytes.get(*pos) {
                Some(b')') => {
                    *pos += 1;
                    Ok(Shape::join(left, right))
                }
                Some(b',') => Err(bad("non-binary node", *pos)),
                _ => Err(bad("expected ')'", *pos)),
            }
        }
        Some(c) if c.is_ascii_digit() => {
            let start = *pos;
            while bytes.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                *pos += 1;
            }
            let label = std::str::from_utf8(&bytes[start..*pos])
                .unwrap()
                .parse::<u32>()
                .map_err(|_| bad("leaf label too large", start))?;
            Ok(Shape::Leaf(label))
        }
        _ => Err(bad("expected '(' or a leaf label", *pos)),
    }
}

/// Anything that can answer `|T_ij|` queries over leaves `1..=n`.
pub trait Hierarchy {
    fn leaf_total(&self) -> usize;
    fn lca_size(&self, i: u32, j: u32) -> Result<usize>;
}

impl Hierarchy for HcTree {
    fn leaf_total(&self) -> usize {
        self.n()
    }

    fn lca_size(&self, i: u32, j: u32) -> Result<usize> {
        self.subtree_size_at_lca(i, j)
    }
}

fn check_sizes(g: &SimilarityGraph, t: &impl Hierarchy) -> Result<()> {
    if g.n() != t.leaf_total() {
        return Err(Error::LeafCountMismatch { expected: g.n(), found: t.leaf_total() });
    }
    Ok(())
}

/// `R_T(e) = w_e (n - |T_e|)` for each edge of `g`, in edge order.
pub fn revenue_per_edge(g: &SimilarityGraph, t: &impl Hierarchy) -> Result<Vec<Weight>> {
    check_sizes(g, t)?;
    let n = g.n() as i64;
    g.edges()
        .iter()
        .map(|e| Ok(e.w.times(n - t.lca_size(e.i, e.j)? as i64)))
        .collect()
}

/// Revenue `sum_e w_e (n - |T_e|)`.
pub fn revenue(g: &SimilarityGraph, t: &impl Hierarchy) -> Result<Weight> {
    Ok(revenue_per_edge(g, t)?.into_iter().sum())
}

/// Dasgupta cost `sum_e w_e |T_e|`.
pub fn dasgupta_cost(g: &SimilarityGraph, t: &impl Hierarchy) -> Result<Weight> {
    check_sizes(g, t)?;
    g.edges()
        .iter()
        .map(|e| Ok(e.w.times(t.lca_size(e.i, e.j)? as i64)))
        .sum()
}

/// Depth-two tree of a bisection: the root has two star children, one per
/// side. Star nodes are not binary, so intra-side pairs have `|T_e|` equal
/// to the side size, and an edge cut by the bisection has `|T_e| = n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisectionTree {
    n: usize,
    side_of: Vec<bool>,
    sides: [Vec<u32>; 2],
}

/// The two-level tree whose root splits `b`'s sides.
pub fn bisection_tree(b: &Bisection, n: usize) -> Result<BisectionTree> {
    if b.n() != n {
        return Err(Error::InvalidBisection(format!(
            "bisection covers {} points, expected {n}",
            b.n()
        )));
    }
    let side_of: Vec<bool> = (1..=n as u32).map(|l| b.side(l)).collect();
    let sides = [b.members(false), b.members(true)];
    if sides.iter().any(|s| s.is_empty()) {
        return Err(Error::InvalidBisection("both sides must be nonempty".into()));
    }
    Ok(BisectionTree { n, side_of, sides })
}

impl BisectionTree {
    pub fn sides(&self) -> (&[u32], &[u32]) {
        (&self.sides[0], &self.sides[1])
    }

    /// Newick with star children, e.g. `((1,2,3),(4,5,6));`.
    pub fn to_newick(&self) -> String {
        let star = |s: &[u32]| {
            if s.len() == 1 {
                s[0].to_string()
            } else {
                let inner: Vec<String> = s.iter().map(u32::to_string).collect();
                format!("({})", inner.join(","))
            }
        };
        format!("({},{});", star(&self.sides[0]), star(&self.sides[1]))
    }

    /// A binary refinement: each star replaced by a left-deep comb. Its
    /// revenue is at least the revenue of the star tree.
    pub fn to_binary(&self) -> HcTree {
        let shape = Shape::join(
            Shape::comb(&self.sides[0]).unwrap(),
            Shape::comb(&self.sides[1]).unwrap(),
        );
        HcTree::from_shape(&shape).expect("sides partition 1..=n")
    }
}

impl Hierarchy for BisectionTree {
    fn leaf_total(&self) -> usize {
        self.n
    }

    fn lca_size(&self, i: u32, j: u32) -> Result<usize> {
        for l in [i, j] {
            if l == 0 || l as usize > self.n {
                return Err(Error::LeafOutOfRange { label: l, n: self.n });
            }
        }
        if i == j {
            return Err(Error::SameLeaf(i));
        }
        let (si, sj) = (self.side_of[i as usize - 1], self.side_of[j as usize - 1]);
        Ok(if si == sj { self.sides[si as usize].len() } else { self.n })
    }
}
