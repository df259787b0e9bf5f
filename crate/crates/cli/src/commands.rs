use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use hcrevenue::algos::{
    average_linkage, bisect_then_random, random_tree, Algorithm, AlgorithmConfig, MubSolver,
};
use hcrevenue::hctree::{revenue, HcTree};
use hcrevenue::instance::{gen_matching, gen_random, parse_graph, serialize_graph, total_weight, SimilarityGraph};
use hcrevenue::oracle::{opt_tree_subset_dp, MeanEstimate, BRUTEFORCE_CAP};
use hcrevenue::{Error, Weight};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::record::{write_records, ExperimentRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceType {
    /// `n/2` disjoint unit edges.
    Matching,
    /// Each pair joined independently with integer weight in `1..=max`.
    Gnp,
}

impl FromStr for InstanceType {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "matching" => Ok(InstanceType::Matching),
            "gnp" => Ok(InstanceType::Gnp),
            _ => Err(CliError::usage(format!("unknown instance type `{s}` (expected matching or gnp)"))),
        }
    }
}

impl InstanceType {
    pub fn name(self) -> &'static str {
        match self {
            InstanceType::Matching => "matching",
            InstanceType::Gnp => "gnp",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenOptions {
    pub kind: InstanceType,
    pub n: usize,
    pub density: Option<f64>,
    pub max_weight: Option<u32>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_DENSITY: f64 = 0.5;
pub const DEFAULT_MAX_WEIGHT: u32 = 10;

/// Builds the instance described by `opts`; random-graph flags are rejected
/// for matchings.
pub fn generate(opts: &GenOptions) -> CliResult<SimilarityGraph> {
    match opts.kind {
        InstanceType::Matching => {
            if opts.density.is_some() || opts.max_weight.is_some() || opts.seed.is_some() {
                return Err(CliError::usage(
                    "--density, --max-weight and --seed do not apply to --type matching",
                ));
            }
            Ok(gen_matching(opts.n)?)
        }
        InstanceType::Gnp => Ok(gen_random(
            opts.n,
            opts.density.unwrap_or(DEFAULT_DENSITY),
            opts.max_weight.unwrap_or(DEFAULT_MAX_WEIGHT),
            opts.seed.unwrap_or(0),
        )?),
    }
}

/// Writes the instance file and returns a one-line summary.
pub fn cmd_gen(opts: &GenOptions) -> CliResult<String> {
    let g = generate(opts)?;
    write_text(opts.out.as_deref(), &serialize_graph(&g))?;
    Ok(format!(
        "{} instance: n={} edges={} total weight={}",
        opts.kind.name(),
        g.n(),
        g.edges().len(),
        total_weight(&g)
    ))
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub input: PathBuf,
    pub algo: Algorithm,
    pub solver: Option<MubSolver>,
    pub seed: u64,
    pub trials: usize,
    pub oracle: bool,
    pub out_tree: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub pad_odd: bool,
    /// When false the `ms` column is written as zero, so output is
    /// byte-identical across runs.
    pub timing: bool,
}

pub struct RunOutcome {
    pub records: Vec<ExperimentRecord>,
    /// Highest-revenue tree; earliest trial on ties.
    pub best: HcTree,
}

pub fn load_graph(path: &Path, pad_odd: bool) -> CliResult<SimilarityGraph> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    let g = parse_graph(&text).map_err(|source| CliError::Parse { path: path.into(), source })?;
    Ok(if pad_odd && g.n() % 2 == 1 { g.padded() } else { g })
}

/// Exact optimum through the subset DP, refused above the oracle cap.
pub fn oracle_optimum(g: &SimilarityGraph) -> CliResult<(Weight, HcTree)> {
    if g.n() > BRUTEFORCE_CAP {
        return Err(Error::AboveCap { n: g.n(), cap: BRUTEFORCE_CAP, what: "oracle" }.into());
    }
    let r = opt_tree_subset_dp(g)?;
    Ok((r.optimum, r.witness))
}

fn build_tree(g: &SimilarityGraph, algo: Algorithm, solver: Option<MubSolver>, seed: u64) -> CliResult<HcTree> {
    Ok(match algo {
        Algorithm::Rand => random_tree(g.n(), seed)?,
        Algorithm::AverageLinkage => average_linkage(g),
        Algorithm::BisectRandom => bisect_then_random(g, solver.unwrap_or(MubSolver::Exact), seed)?,
        Algorithm::Opt => oracle_optimum(g)?.1,
    })
}

/// Runs every trial of `opts.algo` on `g`. Randomized algorithms produce one
/// record per trial seed; deterministic ones a single record.
pub fn run_trials(g: &SimilarityGraph, instance: &str, opts: &RunOptions) -> CliResult<RunOutcome> {
    let randomized = opts.algo.is_randomized();
    let config = AlgorithmConfig::new(
        opts.algo,
        opts.solver,
        randomized.then_some(opts.seed),
        if randomized { opts.trials } else { 1 },
    )?;
    if opts.algo == Algorithm::BisectRandom && g.n() % 2 == 1 {
        return Err(Error::OddN(g.n()).into());
    }
    let opt = if opts.oracle { Some(oracle_optimum(g)?.0) } else { None };
    let seeds: Vec<Option<u64>> = if randomized {
        config.trial_seeds().into_iter().map(Some).collect()
    } else {
        vec![None]
    };
    let runs: Vec<(ExperimentRecord, HcTree)> = seeds
        .into_par_iter()
        .map(|seed| {
            let start = Instant::now();
            let tree = build_tree(g, config.algorithm, config.solver, seed.unwrap_or(0))?;
            let rev = revenue(g, &tree)?;
            let ms = if opts.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
            let record = ExperimentRecord {
                instance: instance.to_string(),
                n: g.n(),
                algo: config.algorithm,
                solver: config.solver,
                seed,
                revenue: rev,
                opt,
                ms,
            };
            Ok((record, tree))
        })
        .collect::<CliResult<_>>()?;
    let best = runs
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.0.revenue.cmp(&b.0.revenue).then(j.cmp(i)))
        .map(|(_, r)| r.1.clone())
        .expect("at least one trial");
    Ok(RunOutcome { records: runs.into_iter().map(|r| r.0).collect(), best })
}

/// Human-readable summary of a finished run.
pub fn summarize(records: &[ExperimentRecord]) -> String {
    let first = &records[0];
    let revenues: Vec<f64> = records.iter().map(|r| r.revenue.to_f64()).collect();
    let est = MeanEstimate::from_samples(&revenues);
    let mut line = format!(
        "{} on {} (n={}): {} trial(s), mean revenue {:.4} (se {:.4})",
        first.algo,
        first.instance,
        first.n,
        records.len(),
        est.mean,
        est.std_err
    );
    if let Some(opt) = first.opt {
        let ratios: Vec<f64> = records.iter().filter_map(ExperimentRecord::ratio).collect();
        let r = MeanEstimate::from_samples(&ratios);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        line.push_str(&format!(", opt {opt}, mean ratio {:.4} (se {:.4}), min ratio {min:.4}", r.mean, r.std_err));
    }
    line
}

pub fn cmd_run(opts: &RunOptions) -> CliResult<String> {
    let g = load_graph(&opts.input, opts.pad_odd)?;
    let instance = opts
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into());
    let outcome = run_trials(&g, &instance, opts)?;
    if let Some(path) = &opts.out_tree {
        write_text(Some(path), &format!("{}\n", outcome.best.to_newick()))?;
    }
    let mut buf = Vec::new();
    write_records(&mut buf, &outcome.records)?;
    write_bytes(opts.out.as_deref(), &buf)?;
    Ok(summarize(&outcome.records))
}

pub(crate) fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    write_bytes(path, text.as_bytes())
}

pub(crate) fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::Write { path: p.into(), source }),
        None => io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|source| CliError::Write { path: "<stdout>".into(), source }),
    }
}
