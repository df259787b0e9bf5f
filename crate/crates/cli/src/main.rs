use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hcrevenue::algos::{Algorithm, MubSolver};
use hcrevenue_cli::bench::{cmd_bench, BenchAlgo, BenchOptions};
use hcrevenue_cli::commands::{cmd_gen, cmd_run, GenOptions, InstanceType, RunOptions};
use hcrevenue_cli::verify::{cmd_verify, Suite, VerifyOptions};
use hcrevenue_cli::CliResult;

/// Hierarchical clustering under the revenue objective: generate instances,
/// run algorithms, check the approximation theorems.
#[derive(Parser)]
#[command(name = "hcrev", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a similarity graph in edge-list format.
    Gen(GenArgs),
    /// Run an algorithm on an instance file; one CSV row per trial.
    Run(RunArgs),
    /// Run a theorem suite on a seeded corpus.
    Verify(VerifyArgs),
    /// Ratio table of several algorithms against the optimum.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// matching or gnp
    #[arg(long = "type", value_parser = parse::<InstanceType>)]
    kind: InstanceType,
    #[arg(long)]
    n: usize,
    /// Edge probability (gnp only, default 0.5).
    #[arg(long)]
    density: Option<f64>,
    /// Weights are drawn from 1..=max (gnp only, default 10).
    #[arg(long)]
    max_weight: Option<u32>,
    /// gnp only, default 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Instance file in edge-list format.
    input: PathBuf,
    /// rand, avglink, bisect-random or opt
    #[arg(long, value_parser = parse::<Algorithm>)]
    algo: Algorithm,
    /// First-cut solver for bisect-random: exact (default), local or random.
    #[arg(long, value_parser = parse::<MubSolver>)]
    solver: Option<MubSolver>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trials for randomized algorithms.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Attach the exact optimum and ratio (n <= 10).
    #[arg(long)]
    oracle: bool,
    /// Write the best trial's tree in Newick format.
    #[arg(long)]
    out_tree: Option<PathBuf>,
    /// CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add an isolated point when n is odd.
    #[arg(long)]
    pad_odd: bool,
    /// Write 0 in the ms column so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_parser = parse::<Suite>)]
    suite: Suite,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    instances: Option<usize>,
    /// Trees per instance, or Monte Carlo trials for alg-ratio.
    #[arg(long)]
    trials: Option<usize>,
    /// First-cut solver for alg-ratio.
    #[arg(long, value_parser = parse::<MubSolver>, default_value = "exact")]
    solver: MubSolver,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// matching or gnp
    #[arg(long = "type", value_parser = parse::<InstanceType>, default_value = "gnp")]
    kind: InstanceType,
    /// Comma-separated sizes; overrides --n-max.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Use every even size from 4 up to this bound.
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    /// Random instances per size.
    #[arg(long, default_value_t = 20)]
    instances: usize,
    /// Comma-separated rows: rand, avglink, bisect-random, bisection, opt.
    #[arg(long, value_delimiter = ',', value_parser = parse::<BenchAlgo>)]
    algo: Vec<BenchAlgo>,
    #[arg(long, value_parser = parse::<MubSolver>, default_value = "exact")]
    solver: MubSolver,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 10)]
    max_weight: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

fn execute(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::Gen(a) => {
            let summary = cmd_gen(&GenOptions {
                kind: a.kind,
                n: a.n,
                density: a.density,
                max_weight: a.max_weight,
                seed: a.seed,
                out: a.out,
            })?;
            eprintln!("{summary}");
        }
        Command::Run(a) => {
            let summary = cmd_run(&RunOptions {
                input: a.input,
                algo: a.algo,
                solver: a.solver,
                seed: a.seed,
                trials: a.trials,
                oracle: a.oracle,
                out_tree: a.out_tree,
                out: a.out,
                pad_odd: a.pad_odd,
                timing: !a.no_timing,
            })?;
            eprintln!("{summary}");
        }
        Command::Verify(a) => {
            let report = cmd_verify(&VerifyOptions {
                suite: a.suite,
                n_max: a.n_max,
                instances: a.instances,
                trials: a.trials,
                solver: a.solver,
                seed: a.seed,
            })?;
            println!("{report}");
            if report.violations() > 0 {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Bench(a) => {
            let sizes = if a.n.is_empty() {
                (4..=a.n_max).filter(|n| n % 2 == 0).collect()
            } else {
                a.n
            };
            let mut opts = BenchOptions::new(a.kind, sizes);
            opts.instances = a.instances;
            if !a.algo.is_empty() {
                opts.algos = a.algo;
            }
            opts.solver = a.solver;
            opts.trials = a.trials;
            opts.seed = a.seed;
            opts.density = a.density;
            opts.max_weight = a.max_weight;
            opts.out = a.out;
            eprintln!("{}", cmd_bench(&opts)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
