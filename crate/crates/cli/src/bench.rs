use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use hcrevenue::algos::{average_linkage, bisect_then_random, random_tree, trial_seeds, Algorithm, MubSolver};
use hcrevenue::hctree::revenue;
use hcrevenue::instance::{gen_matching, gen_random, SimilarityGraph};
use hcrevenue::mub::{bisection_revenue, mub_exact};
use hcrevenue::oracle::BRUTEFORCE_CAP;
use hcrevenue::{Error, Weight};
use rayon::prelude::*;

use crate::commands::{oracle_optimum, write_bytes, InstanceType, DEFAULT_DENSITY, DEFAULT_MAX_WEIGHT};
use crate::error::{CliError, CliResult};

pub const BENCH_HEADER: [&str; 9] =
    ["corpus", "n", "algo", "solver", "instances", "trials", "mean_ratio", "min_ratio", "opt_source"];

/// A benchmark row: a tree algorithm, or the best bisection read as a
/// two-level tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchAlgo {
    Tree(Algorithm),
    Bisection,
}

impl BenchAlgo {
    pub const DEFAULT: [BenchAlgo; 4] = [
        BenchAlgo::Tree(Algorithm::Rand),
        BenchAlgo::Tree(Algorithm::AverageLinkage),
        BenchAlgo::Tree(Algorithm::BisectRandom),
        BenchAlgo::Bisection,
    ];

    fn randomized(self) -> bool {
        matches!(self, BenchAlgo::Tree(a) if a.is_randomized())
    }
}

impl fmt::Display for BenchAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchAlgo::Tree(a) => f.write_str(a.name()),
            BenchAlgo::Bisection => f.write_str("bisection"),
        }
    }
}

impl FromStr for BenchAlgo {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        if s == "bisection" {
            return Ok(BenchAlgo::Bisection);
        }
        s.parse::<Algorithm>().map(BenchAlgo::Tree).map_err(|e| CliError::usage(e.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub kind: InstanceType,
    pub sizes: Vec<usize>,
    /// Random instances per size; matchings have one instance per size.
    pub instances: usize,
    pub algos: Vec<BenchAlgo>,
    pub solver: MubSolver,
    pub trials: usize,
    pub seed: u64,
    pub density: f64,
    pub max_weight: u32,
    pub out: Option<PathBuf>,
}

impl BenchOptions {
    pub fn new(kind: InstanceType, sizes: Vec<usize>) -> Self {
        BenchOptions {
            kind,
            sizes,
            instances: 20,
            algos: BenchAlgo::DEFAULT.to_vec(),
            solver: MubSolver::Exact,
            trials: 100,
            seed: 0,
            density: DEFAULT_DENSITY,
            max_weight: DEFAULT_MAX_WEIGHT,
            out: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub corpus: &'static str,
    pub n: usize,
    pub algo: BenchAlgo,
    pub solver: Option<MubSolver>,
    pub instances: usize,
    pub trials: usize,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    /// `oracle` for enumerated optima, `analytic` for the matching closed form.
    pub opt_source: &'static str,
}

struct Instance {
    graph: SimilarityGraph,
    opt: Weight,
    seed: u64,
}

/// `(n/2)(n-2)`: every matched pair can at best split off at the bottom.
fn matching_optimum(n: usize) -> Weight {
    Weight::from_int((n / 2 * (n - 2)) as i64)
}

fn corpus(opts: &BenchOptions, n: usize) -> CliResult<(Vec<Instance>, &'static str)> {
    match opts.kind {
        InstanceType::Matching => {
            if opts.instances == 0 {
                return Ok((Vec::new(), "oracle"));
            }
            let graph = gen_matching(n)?;
            let (opt, source) = if n <= BRUTEFORCE_CAP {
                (oracle_optimum(&graph)?.0, "oracle")
            } else {
                (matching_optimum(n), "analytic")
            };
            Ok((vec![Instance { graph, opt, seed: opts.seed }], source))
        }
        InstanceType::Gnp => {
            if n > BRUTEFORCE_CAP && opts.instances > 0 {
                return Err(Error::AboveCap { n, cap: BRUTEFORCE_CAP, what: "oracle" }.into());
            }
            let seeds = trial_seeds(opts.seed.wrapping_add(n as u64), opts.instances);
            let list = seeds
                .into_par_iter()
                .map(|s| {
                    let graph = gen_random(n, opts.density, opts.max_weight, s)?;
                    let opt = oracle_optimum(&graph)?.0;
                    Ok(Instance { graph, opt, seed: s })
                })
                .collect::<CliResult<_>>()?;
            Ok((list, "oracle"))
        }
    }
}

fn algo_revenue(g: &SimilarityGraph, algo: BenchAlgo, solver: MubSolver, seed: u64) -> CliResult<Weight> {
    Ok(match algo {
        BenchAlgo::Bisection => bisection_revenue(g, &mub_exact(g)?)?,
        BenchAlgo::Tree(Algorithm::Rand) => revenue(g, &random_tree(g.n(), seed)?)?,
        BenchAlgo::Tree(Algorithm::AverageLinkage) => revenue(g, &average_linkage(g))?,
        BenchAlgo::Tree(Algorithm::BisectRandom) => revenue(g, &bisect_then_random(g, solver, seed)?)?,
        BenchAlgo::Tree(Algorithm::Opt) => oracle_optimum(g)?.0,
    })
}

/// One row per `(size, algorithm)`, in the order given.
pub fn bench_rows(opts: &BenchOptions) -> CliResult<Vec<BenchRow>> {
    if opts.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let mut rows = Vec::new();
    for &n in &opts.sizes {
        let (instances, source) = corpus(opts, n)?;
        if instances.is_empty() {
            continue;
        }
        for &algo in &opts.algos {
            let trials = if algo.randomized() { opts.trials } else { 1 };
            let ratios: Vec<f64> = instances
                .par_iter()
                .map(|inst| {
                    trial_seeds(inst.seed ^ 1, trials)
                        .into_iter()
                        .map(|s| {
                            let r = algo_revenue(&inst.graph, algo, opts.solver, s)?;
                            Ok(r.ratio(inst.opt).unwrap_or(1.0))
                        })
                        .collect::<CliResult<Vec<f64>>>()
                })
                .collect::<CliResult<Vec<_>>>()?
                .concat();
            rows.push(BenchRow {
                corpus: opts.kind.name(),
                n,
                algo,
                solver: matches!(algo, BenchAlgo::Tree(Algorithm::BisectRandom)).then_some(opts.solver),
                instances: instances.len(),
                trials,
                mean_ratio: ratios.iter().sum::<f64>() / ratios.len() as f64,
                min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
                opt_source: source,
            });
        }
    }
    Ok(rows)
}

pub fn write_bench<W: std::io::Write>(out: W, rows: &[BenchRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BENCH_HEADER)?;
    for r in rows {
        w.write_record([
            r.corpus.to_string(),
            r.n.to_string(),
            r.algo.to_string(),
            r.solver.map(|s| s.name().to_string()).unwrap_or_default(),
            r.instances.to_string(),
            r.trials.to_string(),
            format!("{:.6}", r.mean_ratio),
            format!("{:.6}", r.min_ratio),
            r.opt_source.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn cmd_bench(opts: &BenchOptions) -> CliResult<String> {
    let rows = bench_rows(opts)?;
    let mut buf = Vec::new();
    write_bench(&mut buf, &rows)?;
    write_bytes(opts.out.as_deref(), &buf)?;
    Ok(format!("{} row(s)", rows.len()))
}
