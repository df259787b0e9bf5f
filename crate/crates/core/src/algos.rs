//! Tree-building algorithms for the revenue objective.
//!
//! * [`random_tree`]: split every cluster into uniformly random halves.
//! * [`average_linkage`]: greedy agglomeration by average similarity.
//! * [`bisect_then_random`]: a max-uncut bisection as the first cut, then
//!   random halving inside each side. With an exact first cut this earns at
//!   least `2/3` of the optimum (`2p/3` with a `p`-approximate first cut).
//! * [`extract_half_revenue_bisection`]: given any binary tree, a bisection
//!   with at least half of that tree's revenue, found deterministically.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hctree::{HcTree, Shape};
use crate::instance::SimilarityGraph;
use crate::mub::{self, bisection_revenue, Bisection};
use crate::ordering::{conditional_expectation_ordering, leaf_ordering, window_bisection};
use crate::weight::Weight;

/// Which max-uncut bisection routine makes the first cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MubSolver {
    /// Exhaustive search, optimal (`p = 1`).
    Exact,
    /// Seeded swap local search; stands in for an approximation algorithm
    /// with `p >= 0.8776` but carries no such guarantee itself.
    Local,
    /// Uniformly random bisection; baseline only.
    Random,
}

impl MubSolver {
    /// Approximation ratio `p` attributed to the solver in reports.
    pub fn nominal_ratio(self) -> Option<f64> {
        match self {
            MubSolver::Exact => Some(1.0),
            MubSolver::Local => Some(0.8776),
            MubSolver::Random => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MubSolver::Exact => "exact",
            MubSolver::Local => "local",
            MubSolver::Random => "random",
        }
    }

    /// Runs the solver; `seed` is ignored by the exact solver.
    pub fn solve(self, g: &SimilarityGraph, seed: u64) -> Result<Bisection> {
        match self {
            MubSolver::Exact => mub::mub_exact(g),
            MubSolver::Local => mub::mub_local_search(g, seed),
            MubSolver::Random => mub::mub_random(g, seed),
        }
    }
}

impl fmt::Display for MubSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MubSolver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MubSolver::Exact),
            "local" => Ok(MubSolver::Local),
            "random" => Ok(MubSolver::Random),
            _ => Err(Error::InvalidArgument(format!("unknown solver `{s}`"))),
        }
    }
}

/// The tree-building algorithms exposed to harnesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Rand,
    AverageLinkage,
    BisectRandom,
    Opt,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rand => "rand",
            Algorithm::AverageLinkage => "avglink",
            Algorithm::BisectRandom => "bisect-random",
            Algorithm::Opt => "opt",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Algorithm::Rand | Algorithm::BisectRandom)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rand" => Ok(Algorithm::Rand),
            "avglink" => Ok(Algorithm::AverageLinkage),
            "bisect-random" => Ok(Algorithm::BisectRandom),
            "opt" => Ok(Algorithm::Opt),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm `{s}`"))),
        }
    }
}

/// A validated run configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgorithmConfig {
    pub algorithm: Algorithm,
    pub solver: Option<MubSolver>,
    pub seed: Option<u64>,
    pub trials: usize,
}

impl AlgorithmConfig {
    pub fn new(
        algorithm: Algorithm,
        solver: Option<MubSolver>,
        seed: Option<u64>,
        trials: usize,
    ) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidArgument("trial count must be at least 1".into()));
        }
        if algorithm.is_randomized() && seed.is_none() {
            return Err(Error::InvalidArgument(format!("{algorithm} needs a seed")));
        }
        let solver = match (algorithm, solver) {
            (Algorithm::BisectRandom, None) => Some(MubSolver::Exact),
            (Algorithm::BisectRandom, s) => s,
            (_, Some(s)) => {
                return Err(Error::InvalidArgument(format!(
                    "solver {s} only applies to bisect-random"
                )))
            }
            (_, None) => None,
        };
        Ok(AlgorithmConfig { algorithm, solver, seed, trials })
    }

    /// Independent per-trial seeds derived from the master seed, so results
    /// do not depend on how trials are scheduled.
    pub fn trial_seeds(&self) -> Vec<u64> {
        trial_seeds(self.seed.unwrap_or(0), self.trials)
    }
}

/// `count` seeds drawn from a ChaCha8 stream keyed by `master`.
pub fn trial_seeds(master: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..count).map(|_| rng.next_u64()).collect()
}

/// Random halving tree over `1..=n`.
pub fn random_tree(n: usize, seed: u64) -> Result<HcTree> {
    if n == 0 {
        return Err(Error::InvalidArgument("random tree needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<u32> = (1..=n as u32).collect();
    HcTree::from_shape(&random_shape(labels, &mut rng))
}

/// Recursively shuffles `labels` and splits them into the first
/// `ceil(m/2)` and the last `floor(m/2)`.
pub fn random_shape(mut labels: Vec<u32>, rng: &mut impl RngCore) -> Shape {
    if labels.len() == 1 {
        return Shape::leaf(labels[0]);
    }
    labels.shuffle(rng);
    let right = labels.split_off(labels.len() - labels.len() / 2);
    let left = random_shape(labels, rng);
    let right = random_shape(right, rng);
    Shape::join(left, right)
}

/// Average-linkage agglomeration.
///
/// Repeatedly merges the two clusters `A`, `B` maximizing
/// `w(A, B) / (|A| |B|)`. Ties go to the pair with the smallest
/// `(min A, min B)`; the cluster with the smaller minimum becomes the left
/// child.
pub fn average_linkage(g: &SimilarityGraph) -> HcTree {
    let n = g.n();
    // clusters: (min label, size, shape); cross[a][b]: total weight between
    let mut clusters: Vec<Option<(u32, usize, Shape)>> =
        (1..=n as u32).map(|l| Some((l, 1, Shape::leaf(l)))).collect();
    let mut cross = g.weight_matrix();

    for _ in 1..n {
        let mut best: Option<(usize, usize)> = None;
        for a in 0..n {
            let Some((min_a, size_a, _)) = &clusters[a] else { continue };
            for b in 0..n {
                let Some((min_b, size_b, _)) = &clusters[b] else { continue };
                if min_a >= min_b {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((x, y)) => {
                        let (min_x, size_x, _) = clusters[x].as_ref().unwrap();
                        let (min_y, size_y, _) = clusters[y].as_ref().unwrap();
                        // compare cross[a][b] / (sa sb) with cross[x][y] / (sx sy)
                        let lhs = cross[a][b].times((size_x * size_y) as i64);
                        let rhs = cross[x][y].times((size_a * size_b) as i64);
                        lhs > rhs || (lhs == rhs && (min_a, min_b) < (min_x, min_y))
                    }
                };
                if better {
                    best = Some((a, b));
                }
            }
        }
        let (a, b) = best.expect("at least two clusters remain");
        let (min_a, size_a, shape_a) = clusters[a].take().unwrap();
        let (_, size_b, shape_b) = clusters[b].take().unwrap();
        let merged: Vec<Weight> = (0..n).map(|c| cross[a][c] + cross[b][c]).collect();
        for (c, m) in merged.into_iter().enumerate() {
            cross[a][c] = m;
            cross[c][a] = m;
        }
        cross[a][a] = Weight::ZERO;
        clusters[a] = Some((min_a, size_a + size_b, Shape::join(shape_a, shape_b)));
    }
    let root = clusters.into_iter().flatten().next().unwrap().2;
    HcTree::from_shape(&root).expect("merges cover every label once")
}

/// The first cut from `solver`, then random halving inside each side.
pub fn bisect_then_random(g: &SimilarityGraph, solver: MubSolver, seed: u64) -> Result<HcTree> {
    if g.n() % 2 == 1 {
        return Err(Error::OddN(g.n()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = solver.solve(g, rng.next_u64())?;
    Ok(complete_bisection(&b, &mut rng))
}

/// Completes a bisection into a binary tree by random halving of each side.
pub fn complete_bisection(b: &Bisection, rng: &mut impl RngCore) -> HcTree {
    let left = random_shape(b.members(false), rng);
    let right = random_shape(b.members(true), rng);
    HcTree::from_shape(&Shape::join(left, right)).expect("sides partition 1..=n")
}

/// A derandomized bisection earning at least half of `t`'s revenue.
///
/// Orders the leaves of `t` by [`conditional_expectation_ordering`], then
/// tries every window of `n/2` consecutive positions starting at
/// `1..=n/2` and keeps the best (earliest on ties).
pub fn extract_half_revenue_bisection(g: &SimilarityGraph, t: &HcTree) -> Result<Bisection> {
    Ok(extract_with_ordering(g, t)?.bisection)
}

/// Extraction result with its intermediate ordering, for inspection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub orientation: crate::ordering::Orientation,
    pub ordering: crate::ordering::LeafOrdering,
    pub window_start: usize,
    pub bisection: Bisection,
    pub revenue: Weight,
}

pub fn extract_with_ordering(g: &SimilarityGraph, t: &HcTree) -> Result<Extraction> {
    let n = g.n();
    if n % 2 == 1 {
        return Err(Error::OddN(n));
    }
    if t.n() != n {
        return Err(Error::LeafCountMismatch { expected: n, found: t.n() });
    }
    let orientation = conditional_expectation_ordering(g, t)?;
    let ordering = leaf_ordering(t, &orientation)?;
    let mut best: Option<(Weight, usize, Bisection)> = None;
    for x in 1..=n / 2 {
        let b = window_bisection(&ordering, x)?;
        let r = bisection_revenue(g, &b)?;
        if best.as_ref().is_none_or(|(v, _, _)| r > *v) {
            best = Some((r, x, b));
        }
    }
    let (revenue, window_start, bisection) = best.unwrap();
    Ok(Extraction { orientation, ordering, window_start, bisection, revenue })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hctree::revenue;
    use crate::instance::{gen_matching, gen_random};

    fn w(v: i64) -> Weight {
        Weight::from_int(v)
    }

    fn star3() -> SimilarityGraph {
        SimilarityGraph::new(4, [(1, 2, w(3)), (1, 3, w(2)), (1, 4, w(1))]).unwrap()
    }

    #[test]
    fn random_tree_basics() {
        assert_eq!(random_tree(2, 9).unwrap().to_newick().len(), "(1,2);".len());
        assert_eq!(random_tree(1, 9).unwrap().n(), 1);
        assert_eq!(random_tree(13, 4).unwrap(), random_tree(13, 4).unwrap());
        assert!(random_tree(0, 1).is_err());
        // balanced halving keeps the height at ceil(log2 n)
        assert_eq!(random_tree(16, 3).unwrap().height(), 4);
        assert_eq!(random_tree(9, 3).unwrap().height(), 4);
    }

    #[test]
    fn random_tree_pairs_matched_leaves_a_third_of_the_time() {
        let g = gen_matching(4).unwrap();
        let trials = 10_000u64;
        let mut sibling = 0usize;
        let mut total = 0.0;
        for seed in 0..trials {
            let t = random_tree(4, seed).unwrap();
            if t.subtree_size_at_lca(1, 2).unwrap() == 2 {
                sibling += 1;
            }
            total += revenue(&g, &t).unwrap().to_f64();
        }
        let p = 1.0 / 3.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((sibling as f64 / trials as f64 - p).abs() <= 3.0 * sigma);
        // per-edge revenue: 2 with probability 1/3, else 0
        let per_edge = total / 2.0 / trials as f64;
        let sd = (4.0 * p - 4.0 / 9.0).sqrt() / (2.0 * trials as f64).sqrt();
        assert!((per_edge - 2.0 / 3.0).abs() <= 3.0 * sd * 2f64.sqrt(), "{per_edge}");
    }

    #[test]
    fn average_linkage_examples() {
        let t = average_linkage(&gen_matching(4).unwrap());
        assert_eq!(t.to_newick(), "((1,2),(3,4));");
        assert_eq!(revenue(&gen_matching(4).unwrap(), &t).unwrap(), w(4));

        let t = average_linkage(&star3());
        assert_eq!(t.to_newick(), "(((1,2),3),4);");
        assert_eq!(revenue(&star3(), &t).unwrap(), w(8));

        let t = average_linkage(&SimilarityGraph::empty(3).unwrap());
        assert_eq!(t.to_newick(), "((1,2),3);");
        assert_eq!(average_linkage(&SimilarityGraph::empty(1).unwrap()).to_newick(), "1;");
    }

    #[test]
    fn average_linkage_uses_averages_not_totals() {
        // {1,2} (w 4) vs 3: w(1,3)+w(2,3) = 3 -> average 1.5
        // 4-5 pair weight 2 beats it after {1,2} forms
        let g = SimilarityGraph::new(
            5,
            [(1, 2, w(4)), (1, 3, w(2)), (2, 3, w(1)), (4, 5, w(2))],
        )
        .unwrap();
        let t = average_linkage(&g);
        assert_eq!(t.to_newick(), "(((1,2),3),(4,5));");
    }

    #[test]
    fn bisect_then_random_examples() {
        let g = gen_matching(4).unwrap();
        for seed in 0..20 {
            let t = bisect_then_random(&g, MubSolver::Exact, seed).unwrap();
            let mut left = t.leaves_under(t.children(t.root()).unwrap().0);
            left.sort();
            assert_eq!(left, vec![1, 2]);
            assert_eq!(revenue(&g, &t).unwrap(), w(4));
        }
        assert_eq!(
            bisect_then_random(&g, MubSolver::Local, 3).unwrap(),
            bisect_then_random(&g, MubSolver::Local, 3).unwrap()
        );
        assert_eq!(
            bisect_then_random(&SimilarityGraph::empty(5).unwrap(), MubSolver::Exact, 0),
            Err(Error::OddN(5))
        );
        let empty = SimilarityGraph::empty(6).unwrap();
        let t = bisect_then_random(&empty, MubSolver::Random, 1).unwrap();
        assert_eq!(revenue(&empty, &t).unwrap(), w(0));
    }

    #[test]
    fn bisect_then_random_mean_on_matching6() {
        // each side of 3 holds one matched pair, which ends up as siblings
        // with probability 1/3: per edge 3 + 1/3, so the mean is exactly 20/3
        let g = gen_matching(6).unwrap();
        let trials = 1000;
        let values: Vec<f64> = trial_seeds(5, trials)
            .into_iter()
            .map(|s| revenue(&g, &bisect_then_random(&g, MubSolver::Exact, s).unwrap()).unwrap().to_f64())
            .collect();
        let mean = values.iter().sum::<f64>() / trials as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        assert!(mean >= 20.0 / 3.0 - 3.0 * se, "{mean}");
        assert!(mean <= 20.0 / 3.0 + 3.0 * se, "{mean}");
    }

    #[test]
    fn extraction_examples() {
        let g = gen_matching(4).unwrap();
        let t = HcTree::from_newick("((1,2),(3,4));").unwrap();
        let b = extract_half_revenue_bisection(&g, &t).unwrap();
        assert_eq!(bisection_revenue(&g, &b).unwrap(), w(4));

        let t = HcTree::from_newick("(((1,2),3),4);").unwrap();
        let ex = extract_with_ordering(&star3(), &t).unwrap();
        assert!(ex.revenue.times(2) >= revenue(&star3(), &t).unwrap());
        assert_eq!(ex.revenue, bisection_revenue(&star3(), &ex.bisection).unwrap());
        assert_eq!(ex.revenue, w(6));
        assert_eq!(ex.bisection.members(false), vec![1, 2]);

        assert_eq!(
            extract_half_revenue_bisection(&gen_matching(6).unwrap(), &t),
            Err(Error::LeafCountMismatch { expected: 6, found: 4 })
        );
    }

    #[test]
    fn extraction_keeps_half_on_random_corpus() {
        for seed in 0..100u64 {
            let n = [2, 4, 6, 8, 10, 12, 16, 20][seed as usize % 8];
            let g = gen_random(n, 0.5, 9, seed).unwrap();
            let t = random_tree(n, seed + 1).unwrap();
            let b = extract_half_revenue_bisection(&g, &t).unwrap();
            assert!(bisection_revenue(&g, &b).unwrap().times(2) >= revenue(&g, &t).unwrap());
        }
    }

    #[test]
    fn config_validation() {
        assert!(AlgorithmConfig::new(Algorithm::Rand, None, Some(1), 0).is_err());
        assert!(AlgorithmConfig::new(Algorithm::Rand, None, None, 1).is_err());
        assert!(AlgorithmConfig::new(Algorithm::AverageLinkage, Some(MubSolver::Exact), None, 1).is_err());
        let c = AlgorithmConfig::new(Algorithm::BisectRandom, None, Some(3), 4).unwrap();
        assert_eq!(c.solver, Some(MubSolver::Exact));
        assert_eq!(c.trial_seeds(), trial_seeds(3, 4));
        assert_eq!(c.trial_seeds().len(), 4);
        assert_eq!("bisect-random".parse::<Algorithm>().unwrap(), Algorithm::BisectRandom);
        assert!("dp".parse::<Algorithm>().is_err());
        assert_eq!("local".parse::<MubSolver>().unwrap().nominal_ratio(), Some(0.8776));
    }
}
