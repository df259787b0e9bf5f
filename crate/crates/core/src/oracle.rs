//! Brute-force ground truth.
//!
//! [`opt_tree_bruteforce`] enumerates every rooted binary tree on leaves
//! `1..=n` by inserting leaf `k + 1` into each of the `2k - 1` edges of every
//! tree on `k` leaves (counting the edge above the root). Each labelled tree
//! is produced exactly once, `(2n - 3)!!` in total, which
//! [`enumerate_tree_count`] lets callers confirm before trusting the
//! optimum. [`opt_tree_subset_dp`] reaches the same optimum by dynamic
//! programming over subsets and serves as a second route for larger `n`.

use rayon::prelude::*;

use crate::algos::{random_tree, trial_seeds};
use crate::error::{Error, Result};
use crate::hctree::{bisection_tree, revenue, revenue_per_edge, HcTree, Shape};
use crate::instance::SimilarityGraph;
use crate::mub::Bisection;
use crate::weight::Weight;

/// Largest `n` accepted by [`opt_tree_bruteforce`].
pub const BRUTEFORCE_CAP: usize = 10;
/// Largest `n` accepted by [`enumerate_tree_count`].
pub const COUNT_CAP: usize = 12;
/// Largest `n` accepted by [`opt_tree_subset_dp`].
pub const SUBSET_DP_CAP: usize = 16;
/// Largest `n` accepted by [`best_bisection_bruteforce`].
pub const BISECTION_BRUTEFORCE_CAP: usize = 20;

/// A certified optimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult<W> {
    /// Optimal objective value.
    pub optimum: Weight,
    /// One structure attaining it.
    pub witness: W,
    /// Number of candidate structures examined.
    pub searched: u64,
}

/// `(2n - 3)!!`, the number of rooted binary trees on `n` labelled leaves.
pub fn tree_count_formula(n: usize) -> u64 {
    (1..n as u64).map(|k| 2 * k - 1).product()
}

const NONE: usize = usize::MAX;

/// Tree under construction: leaves are nodes `0..n` (label `k + 1`),
/// internal nodes are `n..2n-1`, added in insertion order.
#[derive(Clone)]
struct Arena {
    n: usize,
    parent: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
    mask: Vec<u32>,
    root: usize,
    leaves: usize,
}

impl Arena {
    fn new(n: usize) -> Self {
        let mut a = Arena {
            n,
            parent: vec![NONE; 2 * n],
            left: vec![NONE; 2 * n],
            right: vec![NONE; 2 * n],
            mask: vec![0; 2 * n],
            root: 0,
            leaves: 1,
        };
        for k in 0..n {
            a.mask[k] = 1 << k;
        }
        a
    }

    fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.leaves).chain(self.n..self.n + self.leaves - 1)
    }

    fn internal(&self) -> std::ops::Range<usize> {
        self.n..self.n + self.leaves - 1
    }

    /// Inserts the next leaf on the edge above `u`.
    fn insert(&mut self, u: usize) {
        let leaf = self.leaves;
        let p = self.n + self.leaves - 1;
        let up = self.parent[u];
        self.parent[p] = up;
        if up == NONE {
            self.root = p;
        } else if self.left[up] == u {
            self.left[up] = p;
        } else {
            self.right[up] = p;
        }
        self.left[p] = u;
        self.right[p] = leaf;
        self.parent[u] = p;
        self.parent[leaf] = p;
        self.mask[p] = self.mask[u] | 1 << leaf;
        let mut a = up;
        while a != NONE {
            self.mask[a] |= 1 << leaf;
            a = self.parent[a];
        }
        self.leaves += 1;
    }

    fn undo(&mut self, u: usize) {
        self.leaves -= 1;
        let leaf = self.leaves;
        let p = self.n + self.leaves - 1;
        let up = self.parent[p];
        let mut a = up;
        while a != NONE {
            self.mask[a] &= !(1 << leaf);
            a = self.parent[a];
        }
        if up == NONE {
            self.root = u;
        } else if self.left[up] == p {
            self.left[up] = u;
        } else {
            self.right[up] = u;
        }
        self.parent[u] = up;
        self.parent[leaf] = NONE;
        self.parent[p] = NONE;
    }

    fn shape(&self, v: usize) -> Shape {
        if v < self.n {
            Shape::leaf(v as u32 + 1)
        } else {
            Shape::join(self.shape(self.left[v]), self.shape(self.right[v]))
        }
    }
}

/// Depth-first enumeration of all completions of `arena` to `n` leaves.
fn enumerate(arena: &mut Arena, visit: &mut impl FnMut(&Arena)) {
    if arena.leaves == arena.n {
        visit(arena);
        return;
    }
    let candidates: Vec<usize> = arena.nodes().collect();
    for u in candidates {
        arena.insert(u);
        enumerate(arena, visit);
        arena.undo(u);
    }
}

/// All partial trees with `depth` leaves, in canonical insertion order.
fn prefixes(n: usize, depth: usize) -> Vec<Arena> {
    fn rec(arena: &mut Arena, depth: usize, out: &mut Vec<Arena>) {
        if arena.leaves == depth {
            out.push(arena.clone());
            return;
        }
        let candidates: Vec<usize> = arena.nodes().collect();
        for u in candidates {
            arena.insert(u);
            rec(arena, depth, out);
            arena.undo(u);
        }
    }
    let mut out = Vec::new();
    rec(&mut Arena::new(n), depth, &mut out);
    out
}

/// Number of trees the enumerator visits for `n` leaves.
pub fn enumerate_tree_count(n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one leaf".into()));
    }
    if n > COUNT_CAP {
        return Err(Error::AboveCap { n, cap: COUNT_CAP, what: "tree enumeration count" });
    }
    Ok(prefixes(n, n.min(5))
        .into_par_iter()
        .map(|mut arena| {
            let mut count = 0u64;
            enumerate(&mut arena, &mut |_| count += 1);
            count
        })
        .sum())
}

/// `inner[mask]`: total weight of edges with both endpoints in `mask`.
fn inner_weights(g: &SimilarityGraph) -> Vec<Weight> {
    let n = g.n();
    let mut inner = vec![Weight::ZERO; 1 << n];
    let mut rows = vec![Vec::new(); n];
    for e in g.edges() {
        rows[e.j as usize - 1].push((e.i as usize - 1, e.w));
    }
    for mask in 1usize..1 << n {
        let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
        let rest = mask & !(1 << top);
        let add: Weight = rows[top].iter().filter(|(i, _)| rest >> i & 1 == 1).map(|(_, w)| *w).sum();
        inner[mask] = inner[rest] + add;
    }
    inner
}

/// Optimal revenue tree by exhaustive enumeration (`n <= 10`).
///
/// The witness is the first optimal tree in canonical insertion order.
pub fn opt_tree_bruteforce(g: &SimilarityGraph) -> Result<OracleResult<HcTree>> {
    let n = g.n();
    if n > BRUTEFORCE_CAP {
        return Err(Error::AboveCap { n, cap: BRUTEFORCE_CAP, what: "brute-force optimal tree" });
    }
    let inner = inner_weights(g);
    let nn = n as i64;
    let value = |a: &Arena| -> Weight {
        a.internal()
            .map(|v| {
                let (m, l, r) = (a.mask[v], a.mask[a.left[v]], a.mask[a.right[v]]);
                let cross = inner[m as usize] - inner[l as usize] - inner[r as usize];
                cross.times(nn - m.count_ones() as i64)
            })
            .sum()
    };

    let parts: Vec<(Weight, Shape, u64)> = prefixes(n, n.min(5))
        .into_par_iter()
        .map(|mut arena| {
            let mut best: Option<(Weight, Shape)> = None;
            let mut count = 0u64;
            enumerate(&mut arena, &mut |a| {
                count += 1;
                let v = value(a);
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, a.shape(a.root)));
                }
            });
            let (v, s) = best.unwrap();
            (v, s, count)
        })
        .collect();

    let searched = parts.iter().map(|p| p.2).sum();
    let (optimum, shape, _) = parts
        .into_iter()
        .reduce(|best, next| if next.0 > best.0 { next } else { best })
        .unwrap();
    let witness = HcTree::from_shape(&shape)?;
    debug_assert_eq!(revenue(g, &witness)?, optimum);
    Ok(OracleResult { optimum, witness, searched })
}

/// Optimal revenue tree by dynamic programming over subsets (`n <= 16`).
///
/// `best(S) = max over splits S = A + B of best(A) + best(B)
/// + (n - |S|) w(A, B)`, with `A` holding the smallest label of `S`.
pub fn opt_tree_subset_dp(g: &SimilarityGraph) -> Result<OracleResult<HcTree>> {
    let n = g.n();
    if n > SUBSET_DP_CAP {
        return Err(Error::AboveCap { n, cap: SUBSET_DP_CAP, what: "subset DP optimal tree" });
    }
    let inner = inner_weights(g);
    let full = (1usize << n) - 1;
    let mut best = vec![Weight::ZERO; 1 << n];
    let mut split = vec![0usize; 1 << n];
    let mut searched = 0u64;
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let scale = n as i64 - mask.count_ones() as i64;
        let mut choice: Option<(Weight, usize)> = None;
        // A = low | sub for every proper submask `sub` of `rest`
        let mut sub = rest;
        loop {
            sub = sub.wrapping_sub(1) & rest;
            let a = low | sub;
            let b = mask ^ a;
            searched += 1;
            let v = best[a] + best[b] + (inner[mask] - inner[a] - inner[b]).times(scale);
            if choice.is_none_or(|(c, _)| v > c) {
                choice = Some((v, a));
            }
            if sub == 0 {
                break;
            }
        }
        let (v, a) = choice.unwrap();
        best[mask] = v;
        split[mask] = a;
    }
    fn build(mask: usize, split: &[usize]) -> Shape {
        if mask.count_ones() == 1 {
            return Shape::leaf(mask.trailing_zeros() + 1);
        }
        let a = split[mask];
        Shape::join(build(a, split), build(mask ^ a, split))
    }
    let witness = HcTree::from_shape(&build(full, &split))?;
    Ok(OracleResult { optimum: best[full], witness, searched })
}

/// Best bisection by scoring every balanced side assignment through the
/// depth-two tree's `|T_e|` values (`n <= 20`, even).
pub fn best_bisection_bruteforce(g: &SimilarityGraph) -> Result<OracleResult<Bisection>> {
    let n = g.n();
    if n % 2 == 1 {
        return Err(Error::OddN(n));
    }
    if n > BISECTION_BRUTEFORCE_CAP {
        return Err(Error::AboveCap { n, cap: BISECTION_BRUTEFORCE_CAP, what: "bisection brute force" });
    }
    let mut best: Option<(Weight, Bisection)> = None;
    let mut searched = 0;
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != n / 2 {
            continue;
        }
        searched += 1;
        let b = Bisection::new((0..n).map(|i| mask >> i & 1 == 1).collect())?;
        let v = revenue(g, &bisection_tree(&b, n)?)?;
        if best.as_ref().is_none_or(|(x, _)| v > *x) {
            best = Some((v, b));
        }
    }
    let (optimum, witness) = best.unwrap();
    Ok(OracleResult { optimum, witness, searched })
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    /// Standard error of the mean; zero for a single sample.
    pub std_err: f64,
}

impl MeanEstimate {
    pub fn from_samples(values: &[f64]) -> MeanEstimate {
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        if values.len() < 2 {
            return MeanEstimate { mean, std_err: 0.0 };
        }
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
        MeanEstimate { mean, std_err: (var / k).sqrt() }
    }
}

/// Monte Carlo revenue of the random halving tree.
#[derive(Clone, Debug, PartialEq)]
pub struct RandEstimate {
    /// One estimate per edge of the graph, in edge order.
    pub per_edge: Vec<MeanEstimate>,
    pub total: MeanEstimate,
    pub trials: usize,
}

/// Averages per-edge and total revenue of [`random_tree`] over `trials`
/// draws whose seeds come from [`trial_seeds`]`(seed, trials)`.
pub fn rand_revenue_estimate(g: &SimilarityGraph, trials: usize, seed: u64) -> Result<RandEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let samples: Vec<Vec<Weight>> = trial_seeds(seed, trials)
        .into_par_iter()
        .map(|s| revenue_per_edge(g, &random_tree(g.n(), s)?))
        .collect::<Result<_>>()?;
    let per_edge = (0..g.edges().len())
        .map(|k| {
            let v: Vec<f64> = samples.iter().map(|s| s[k].to_f64()).collect();
            MeanEstimate::from_samples(&v)
        })
        .collect();
    let totals: Vec<f64> =
        samples.iter().map(|s| s.iter().sum::<Weight>().to_f64()).collect();
    Ok(RandEstimate { per_edge, total: MeanEstimate::from_samples(&totals), trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algos::{average_linkage, bisect_then_random, MubSolver};
    use crate::instance::{gen_matching, gen_random};
    use crate::mub::{bisection_revenue, mub_exact};

    fn w(v: i64) -> Weight {
        Weight::from_int(v)
    }

    fn double_factorial(mut k: u64) -> u64 {
        let mut p = 1;
        while k > 1 {
            p *= k;
            k -= 2;
        }
        p
    }

    #[test]
    fn counts_match_double_factorial() {
        assert_eq!(enumerate_tree_count(1).unwrap(), 1);
        assert_eq!(enumerate_tree_count(2).unwrap(), 1);
        assert_eq!(enumerate_tree_count(3).unwrap(), 3);
        assert_eq!(enumerate_tree_count(4).unwrap(), 15);
        assert_eq!(enumerate_tree_count(6).unwrap(), 945);
        for n in 2..=8 {
            assert_eq!(enumerate_tree_count(n).unwrap(), double_factorial(2 * n as u64 - 3));
            assert_eq!(tree_count_formula(n), double_factorial(2 * n as u64 - 3));
        }
        assert!(enumerate_tree_count(13).is_err());
    }

    #[test]
    fn enumeration_visits_distinct_trees() {
        for n in 1..=6 {
            let mut seen = std::collections::HashSet::new();
            let mut arena = Arena::new(n);
            enumerate(&mut arena, &mut |a| {
                assert!(seen.insert(a.shape(a.root).to_string()));
            });
            assert_eq!(seen.len() as u64, enumerate_tree_count(n).unwrap());
        }
    }

    #[test]
    fn bruteforce_examples() {
        let r = opt_tree_bruteforce(&gen_matching(6).unwrap()).unwrap();
        assert_eq!(r.optimum, w(12));
        assert_eq!(r.searched, 945);

        let g = SimilarityGraph::new(4, [(1, 2, w(3)), (1, 3, w(2)), (1, 4, w(1))]).unwrap();
        let r = opt_tree_bruteforce(&g).unwrap();
        assert_eq!(r.optimum, w(8));
        assert_eq!(r.searched, 15);
        assert_eq!(revenue(&g, &r.witness).unwrap(), w(8));
        // the only trees earning 8 put 1,2 together first, then 3
        assert_eq!(r.witness.subtree_size_at_lca(1, 2).unwrap(), 2);
        assert_eq!(r.witness.subtree_size_at_lca(1, 3).unwrap(), 3);

        let g = SimilarityGraph::new(2, [(1, 2, w(5))]).unwrap();
        assert_eq!(opt_tree_bruteforce(&g).unwrap().optimum, w(0));
        assert_eq!(opt_tree_bruteforce(&SimilarityGraph::empty(1).unwrap()).unwrap().optimum, w(0));
        assert!(opt_tree_bruteforce(&SimilarityGraph::empty(11).unwrap()).is_err());
    }

    #[test]
    fn matching_optimum_closed_form() {
        for n in [4usize, 6, 8] {
            let r = opt_tree_bruteforce(&gen_matching(n).unwrap()).unwrap();
            assert_eq!(r.optimum, w((n * (n - 2) / 2) as i64));
        }
    }

    #[test]
    fn subset_dp_agrees_with_enumeration() {
        for seed in 0..60u64 {
            let n = 1 + seed as usize % 8;
            let g = gen_random(n, 0.6, 9, seed).unwrap();
            let brute = opt_tree_bruteforce(&g).unwrap();
            let dp = opt_tree_subset_dp(&g).unwrap();
            assert_eq!(brute.optimum, dp.optimum, "seed {seed}");
            assert_eq!(revenue(&g, &brute.witness).unwrap(), brute.optimum);
            assert_eq!(revenue(&g, &dp.witness).unwrap(), dp.optimum);
        }
    }

    #[test]
    fn oracle_dominates_algorithms() {
        for seed in 0..30u64 {
            let n = [4, 6, 8][seed as usize % 3];
            let g = gen_random(n, 0.5, 6, seed).unwrap();
            let opt = opt_tree_bruteforce(&g).unwrap().optimum;
            assert!(revenue(&g, &average_linkage(&g)).unwrap() <= opt);
            for s in 0..5 {
                assert!(revenue(&g, &random_tree(n, s).unwrap()).unwrap() <= opt);
                for solver in [MubSolver::Exact, MubSolver::Local, MubSolver::Random] {
                    let t = bisect_then_random(&g, solver, s).unwrap();
                    assert!(revenue(&g, &t).unwrap() <= opt);
                }
            }
        }
    }

    #[test]
    fn restricted_optimum_matches_exact_mub() {
        for seed in 0..30u64 {
            let n = [2, 4, 6, 8, 10][seed as usize % 5];
            let g = gen_random(n, 0.5, 9, seed).unwrap();
            let brute = best_bisection_bruteforce(&g).unwrap();
            let exact = mub_exact(&g).unwrap();
            assert_eq!(brute.optimum, bisection_revenue(&g, &exact).unwrap());
            assert_eq!(brute.optimum, exact.uncut_weight(&g).unwrap().times(n as i64 / 2));
        }
    }

    #[test]
    fn rand_estimates() {
        let g = gen_matching(4).unwrap();
        let est = rand_revenue_estimate(&g, 10_000, 1).unwrap();
        for e in &est.per_edge {
            assert!((e.mean - 2.0 / 3.0).abs() <= 3.0 * e.std_err, "{e:?}");
        }
        let zero = rand_revenue_estimate(&SimilarityGraph::empty(5).unwrap(), 50, 1).unwrap();
        assert_eq!(zero.total.mean, 0.0);
        assert!(zero.per_edge.is_empty());

        let g = gen_random(7, 0.5, 5, 3).unwrap();
        let a = rand_revenue_estimate(&g, 300, 9).unwrap();
        let b = rand_revenue_estimate(&g.scaled(2).unwrap(), 300, 9).unwrap();
        assert_eq!(b.total.mean, 2.0 * a.total.mean);
        for (x, y) in a.per_edge.iter().zip(&b.per_edge) {
            assert_eq!(y.mean, 2.0 * x.mean);
        }
        assert!(rand_revenue_estimate(&g, 0, 9).is_err());
    }
}
