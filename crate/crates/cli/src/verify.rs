//! Theorem suites behind `hcrev verify`. Every suite runs on a corpus
//! derived from one master seed and counts passed checks per property.

use std::fmt;
use std::str::FromStr;

use hcrevenue::algos::{bisect_then_random, extract_with_ordering, trial_seeds, MubSolver};
use hcrevenue::hctree::{dasgupta_cost, revenue, HcTree, Shape};
use hcrevenue::instance::{gen_matching, gen_random, total_weight, SimilarityGraph};
use hcrevenue::mub::{bisection_revenue, mub_exact};
use hcrevenue::oracle::{opt_tree_subset_dp, MeanEstimate, SUBSET_DP_CAP};
use hcrevenue::ordering::{
    leaf_ordering, ordering_distance, sample_orientation_with, weighted_ordering_cost,
    window_bisection, Orientation,
};
use hcrevenue::Weight;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

/// Threshold for the end-to-end ratio suite.
pub const ALG_RATIO_FLOOR: f64 = 0.585;
/// Orientation enumeration is exhaustive, so tree size is bounded.
pub const ORIENTATION_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    LemmaYExpectation,
    CutProbability,
    HalfBisection,
    Extraction,
    Complementarity,
    Tightness,
    AlgRatio,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::LemmaYExpectation,
        Suite::CutProbability,
        Suite::HalfBisection,
        Suite::Extraction,
        Suite::Complementarity,
        Suite::Tightness,
        Suite::AlgRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LemmaYExpectation => "lemma-y-expectation",
            Suite::CutProbability => "cut-probability",
            Suite::HalfBisection => "half-bisection",
            Suite::Extraction => "extraction",
            Suite::Complementarity => "complementarity",
            Suite::Tightness => "tightness",
            Suite::AlgRatio => "alg-ratio",
        }
    }

    /// Default `(n_max, instances, trials)`.
    fn defaults(self) -> (usize, usize, usize) {
        match self {
            Suite::LemmaYExpectation => (8, 50, 1),
            Suite::CutProbability => (12, 100, 1),
            Suite::HalfBisection => (8, 200, 1),
            Suite::Extraction => (10, 100, 20),
            Suite::Complementarity => (16, 100, 10),
            Suite::Tightness => (20, 1, 1),
            Suite::AlgRatio => (10, 30, 2000),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            CliError::usage(format!("unknown suite `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub n_max: Option<usize>,
    pub instances: Option<usize>,
    pub trials: Option<usize>,
    pub solver: MubSolver,
    pub seed: u64,
}

/// Pass count for one property.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: usize,
    pub total: usize,
}

impl Check {
    fn new(name: impl Into<String>) -> Self {
        Check { name: name.into(), passed: 0, total: 0 }
    }

    fn record(&mut self, ok: bool) {
        self.total += 1;
        self.passed += ok as usize;
    }

    fn merge(&mut self, other: &Check) {
        self.passed += other.passed;
        self.total += other.total;
    }

    pub fn violations(&self) -> usize {
        self.total - self.passed
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
    /// Extra measurements printed after the counts.
    pub notes: Vec<String>,
}

impl Report {
    pub fn violations(&self) -> usize {
        self.checks.iter().map(Check::violations).sum()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{}: {}: {}/{} pass", self.suite, c.name, c.passed, c.total)?;
        }
        for note in &self.notes {
            writeln!(f, "{}: {note}", self.suite)?;
        }
        let v = self.violations();
        write!(f, "{}: {} ({v} violation{})", self.suite, if v == 0 { "PASS" } else { "FAIL" }, if v == 1 { "" } else { "s" })
    }
}

/// Random instance with its own density and weight range.
fn corpus_graph(n: usize, seed: u64) -> SimilarityGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density = rng.gen_range(0.2..=0.9);
    let max_weight = rng.gen_range(1..=20);
    gen_random(n, density, max_weight, rng.gen()).expect("valid generator arguments")
}

/// Random binary tree whose split sizes are uniform, so lopsided shapes
/// such as combs show up alongside balanced ones.
fn corpus_tree(n: usize, rng: &mut ChaCha8Rng) -> HcTree {
    fn build(labels: &[u32], rng: &mut ChaCha8Rng) -> Shape {
        if labels.len() == 1 {
            return Shape::leaf(labels[0]);
        }
        let k = rng.gen_range(1..labels.len());
        Shape::join(build(&labels[..k], rng), build(&labels[k..], rng))
    }
    let mut labels: Vec<u32> = (1..=n as u32).collect();
    labels.shuffle(rng);
    HcTree::from_shape(&build(&labels, rng)).expect("labels are 1..=n")
}

/// Even sizes from `lo` to `n_max`.
fn even_sizes(lo: usize, n_max: usize) -> CliResult<Vec<usize>> {
    let sizes: Vec<usize> = (lo..=n_max).filter(|n| n % 2 == 0).collect();
    if sizes.is_empty() {
        return Err(CliError::usage(format!("--n-max must be at least {lo}")));
    }
    Ok(sizes)
}

fn check_cap(n_max: usize, cap: usize, what: &str) -> CliResult<()> {
    if n_max > cap {
        return Err(CliError::usage(format!("--n-max {n_max} exceeds the {what} cap of {cap}")));
    }
    Ok(())
}

/// Runs `per_instance` over the seeded corpus in parallel and sums checks.
fn fan_out<F>(seed: u64, instances: usize, names: &[&str], per_instance: F) -> CliResult<Vec<Check>>
where
    F: Fn(usize, u64, &mut [Check]) -> CliResult<()> + Sync,
{
    let parts: Vec<Vec<Check>> = trial_seeds(seed, instances)
        .into_par_iter()
        .enumerate()
        .map(|(k, s)| {
            let mut checks: Vec<Check> = names.iter().map(|n| Check::new(*n)).collect();
            per_instance(k, s, &mut checks)?;
            Ok(checks)
        })
        .collect::<CliResult<_>>()?;
    let mut total: Vec<Check> = names.iter().map(|n| Check::new(*n)).collect();
    for part in &parts {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    Ok(total)
}

pub fn cmd_verify(opts: &VerifyOptions) -> CliResult<Report> {
    let (n_max, instances, trials) = opts.suite.defaults();
    let n_max = opts.n_max.unwrap_or(n_max);
    let instances = opts.instances.unwrap_or(instances);
    let trials = opts.trials.unwrap_or(trials);
    if trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let seed = opts.seed;
    let mut notes = Vec::new();
    let checks = match opts.suite {
        Suite::Complementarity => {
            if n_max < 2 {
                return Err(CliError::usage("--n-max must be at least 2"));
            }
            fan_out(seed, instances, &["R(T) + C(T) = n W"], |k, s, c| {
                let n = 2 + k % (n_max - 1);
                let g = corpus_graph(n, s);
                let expected = total_weight(&g).times(n as i64);
                let mut rng = ChaCha8Rng::seed_from_u64(s ^ 1);
                for _ in 0..trials {
                    let t = corpus_tree(n, &mut rng);
                    c[0].record(revenue(&g, &t)? + dasgupta_cost(&g, &t)? == expected);
                }
                Ok(())
            })?
        }
        Suite::LemmaYExpectation => {
            check_cap(n_max, ORIENTATION_CAP, "orientation enumeration")?;
            let sizes = even_sizes(4, n_max)?;
            let names = ["2 sum_o y_e = |T_e| 2^(n-1)", "2 sum_o pi(k) = (n+1) 2^(n-1)"];
            fan_out(seed, instances * sizes.len(), &names, |k, s, c| {
                let n = sizes[k % sizes.len()];
                let t = corpus_tree(n, &mut ChaCha8Rng::seed_from_u64(s));
                let bits = t.internal_nodes().len();
                let orderings = (0..1u64 << bits)
                    .map(|idx| leaf_ordering(&t, &Orientation::from_index(idx, bits)))
                    .collect::<Result<Vec<_>, _>>()?;
                for i in 1..=n as u32 {
                    let mut positions = 0u64;
                    for pi in &orderings {
                        positions += pi.position(i)? as u64;
                    }
                    c[1].record(2 * positions == (n as u64 + 1) << bits);
                    for j in i + 1..=n as u32 {
                        let mut sum = 0u64;
                        for pi in &orderings {
                            sum += ordering_distance(pi, i, j)? as u64;
                        }
                        let size = t.subtree_size_at_lca(i, j)? as u64;
                        c[0].record(2 * sum == size << bits);
                    }
                }
                Ok(())
            })?
        }
        Suite::CutProbability => {
            let sizes = even_sizes(4, n_max)?;
            let names = ["windows cutting e = y_e (y_e < n/2)", "mean window revenue >= w (n - 2y)/2"];
            fan_out(seed, instances, &names, |k, s, c| {
                let n = sizes[k % sizes.len()];
                let g = corpus_graph(n, s);
                let mut rng = ChaCha8Rng::seed_from_u64(s ^ 1);
                let t = corpus_tree(n, &mut rng);
                let pi = leaf_ordering(&t, &sample_orientation_with(&t, &mut rng))?;
                let half = n / 2;
                let windows = (1..=half).map(|x| window_bisection(&pi, x)).collect::<Result<Vec<_>, _>>()?;
                for e in g.edges() {
                    let y = ordering_distance(&pi, e.i, e.j)? as i64;
                    let cuts = windows.iter().filter(|b| b.side(e.i) != b.side(e.j)).count() as i64;
                    if y < half as i64 {
                        c[0].record(cuts == y);
                    }
                    let sum = e.w.times((half as i64 - cuts) * half as i64);
                    c[1].record(sum.times(2) >= e.w.times(half as i64 * (n as i64 - 2 * y)));
                }
                Ok(())
            })?
        }
        Suite::HalfBisection => {
            check_cap(n_max, SUBSET_DP_CAP, "oracle")?;
            let sizes = even_sizes(4, n_max)?;
            fan_out(seed, instances, &["2 (n/2) uncut(MUB) >= OPT"], |k, s, c| {
                let g = corpus_graph(sizes[k % sizes.len()], s);
                let opt = opt_tree_subset_dp(&g)?.optimum;
                let x = bisection_revenue(&g, &mub_exact(&g)?)?;
                c[0].record(x.times(2) >= opt);
                Ok(())
            })?
        }
        Suite::Extraction => {
            let sizes = even_sizes(4, n_max)?;
            let names = ["R(extracted) >= R(T)/2", "2 Y_pi <= sum w |T_e|"];
            fan_out(seed, instances, &names, |k, s, c| {
                let n = sizes[k % sizes.len()];
                let g = corpus_graph(n, s);
                let mut rng = ChaCha8Rng::seed_from_u64(s ^ 1);
                for _ in 0..trials {
                    let t = corpus_tree(n, &mut rng);
                    let ex = extract_with_ordering(&g, &t)?;
                    c[0].record(bisection_revenue(&g, &ex.bisection)?.times(2) >= revenue(&g, &t)?);
                    c[1].record(weighted_ordering_cost(&g, &ex.ordering)?.times(2) <= dasgupta_cost(&g, &t)?);
                }
                Ok(())
            })?
        }
        Suite::Tightness => tightness(n_max, &mut notes)?,
        Suite::AlgRatio => {
            check_cap(n_max, SUBSET_DP_CAP, "oracle")?;
            if n_max % 2 == 1 {
                return Err(CliError::usage("alg-ratio runs at n = --n-max, which must be even"));
            }
            let name = format!("mean R(ALG)/OPT - 3 se >= {ALG_RATIO_FLOOR}");
            let lowest = std::sync::Mutex::new(f64::INFINITY);
            let checks = fan_out(seed, instances, &[name.as_str()], |_, s, c| {
                let g = corpus_graph(n_max, s);
                let opt = opt_tree_subset_dp(&g)?.optimum;
                let ratios = trial_seeds(s ^ 1, trials)
                    .into_iter()
                    .map(|t| {
                        let tree = bisect_then_random(&g, opts.solver, t)?;
                        Ok(revenue(&g, &tree)?.ratio(opt).unwrap_or(1.0))
                    })
                    .collect::<CliResult<Vec<f64>>>()?;
                let est = MeanEstimate::from_samples(&ratios);
                let lower = est.mean - 3.0 * est.std_err;
                let mut l = lowest.lock().unwrap();
                *l = l.min(lower);
                c[0].record(lower >= ALG_RATIO_FLOOR);
                Ok(())
            })?;
            let lowest = lowest.into_inner().unwrap();
            if lowest.is_finite() {
                notes.push(format!("solver {}, n = {n_max}, lowest mean - 3 se = {lowest:.4}", opts.solver));
            }
            checks
        }
    };
    Ok(Report { suite: opts.suite, checks, notes })
}

/// Matchings at every multiple of 4 from 8 to `n_max`.
fn tightness(n_max: usize, notes: &mut Vec<String>) -> CliResult<Vec<Check>> {
    check_cap(n_max, hcrevenue::mub::EXACT_CAP, "exact bisection")?;
    let sizes: Vec<usize> = (8..=n_max).step_by(4).collect();
    if sizes.is_empty() {
        return Err(CliError::usage("--n-max must be at least 8"));
    }
    let mut c: Vec<Check> = [
        "best uncut weight u(n) = n/2",
        "best bisection / OPT = n / (2(n-2))",
        "OPT = (n/2)(n-2) by oracle",
        "ratio strictly decreasing and above 1/2",
    ]
    .into_iter()
    .map(Check::new)
    .collect();
    let mut previous: Option<(Weight, Weight)> = None;
    for n in sizes {
        let g = gen_matching(n)?;
        let b = mub_exact(&g)?;
        let u = b.uncut_weight(&g)?;
        c[0].record(u == Weight::from_int(n as i64 / 2));
        let best = bisection_revenue(&g, &b)?;
        let opt = Weight::from_int((n / 2 * (n - 2)) as i64);
        c[1].record(best.times(2 * (n as i64 - 2)) == opt.times(n as i64));
        if n <= SUBSET_DP_CAP {
            c[2].record(opt_tree_subset_dp(&g)?.optimum == opt);
        }
        // best/opt < prev_best/prev_opt, cross-multiplied
        let decreasing = previous.is_none_or(|(pb, po)| {
            best.nanos() * po.nanos() < pb.nanos() * opt.nanos()
        });
        c[3].record(decreasing && best.times(2) > opt);
        notes.push(format!("n = {n}: {best}/{opt} = {:.4}", best.ratio(opt).unwrap_or(0.0)));
        previous = Some((best, opt));
    }
    Ok(c)
}
