//! Argument surface and error-to-exit-code mapping.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rlip_core::model::DistanceKind;

#[derive(Parser)]
#[command(
    name = "rlip",
    about = "Bi-objective reliable location-inventory solver",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a synthetic instance and write it as CSV
    Generate(GenerateArgs),
    /// Run one solver and write its Pareto archive and metrics
    Solve(SolveArgs),
    /// Run both solvers over a (q, facility-count) grid with matched seeds
    Compare(CompareArgs),
    /// Tune NSGA-II parameters with response-surface methodology
    Tune(TuneArgs),
    /// Exact Pareto fronts by exhaustive enumeration (tiny instances only)
    Oracle(OracleArgs),
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `n_customers,n_sites`, got `{s}`"))?;
    let n: usize = a.trim().parse().map_err(|e| format!("bad customer count: {e}"))?;
    let m: usize = b.trim().parse().map_err(|e| format!("bad site count: {e}"))?;
    if n == 0 || m == 0 {
        return Err("customer and site counts must be at least 1".into());
    }
    Ok((n, m))
}

fn parse_distance(s: &str) -> Result<DistanceKind, String> {
    DistanceKind::parse(s)
        .ok_or_else(|| format!("unknown distance kind `{s}` (squared_euclidean|euclidean)"))
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|part| part.trim().parse::<usize>().map_err(|e| e.to_string()))
        .collect()
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|part| part.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect()
}

/// Where the problem data comes from: a CSV file or the generator.
#[derive(Args)]
pub struct InputArgs {
    /// Path to an instance CSV
    #[arg(long, value_name = "PATH", conflicts_with = "generate")]
    pub instance: Option<PathBuf>,
    /// Generate an instance of this size instead
    #[arg(long, value_name = "N_CUSTOMERS,N_SITES", value_parser = parse_pair)]
    pub generate: Option<(usize, usize)>,
    /// Master seed for generation and solver randomness
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Facility failure probability (overrides the instance file)
    #[arg(long)]
    pub q: Option<f64>,
    /// Assignment levels R (overrides the instance file)
    #[arg(long = "R", value_name = "R")]
    pub r_levels: Option<usize>,
    /// Transport cost kind
    #[arg(long, value_parser = parse_distance)]
    pub distance: Option<DistanceKind>,
}

#[derive(Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Output directory
    #[arg(long, default_value = "rlip-out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Which solver to run
    #[arg(long, value_parser = ["nsga2", "moss"])]
    pub algo: String,
    /// NSGA-II population size
    #[arg(long, default_value_t = 60)]
    pub pop: usize,
    /// Crossover rate
    #[arg(long, default_value_t = 0.7)]
    pub pc: f64,
    /// Mutation rate
    #[arg(long, default_value_t = 0.5)]
    pub pm: f64,
    /// Iteration budget (defaults: 60 for nsga2, 10 outer loops for moss)
    #[arg(long)]
    pub iters: Option<usize>,
    /// MOSS reference-set size B (population is 6B)
    #[arg(long, default_value_t = 10)]
    pub refset: usize,
    /// Open exactly P facilities
    #[arg(long = "P", value_name = "P")]
    pub facility_count: Option<usize>,
    /// Worker threads (0 = all cores); results are identical at any count
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, default_value = "rlip-out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Facility-count grid
    #[arg(long, value_parser = parse_usize_list, default_value = "5,7,9,11,13")]
    pub p_list: std::vec::Vec<usize>,
    /// Failure-probability grid
    #[arg(long, value_parser = parse_f64_list, default_value = "0.1,0.2,0.3,0.4,0.5")]
    pub q_list: std::vec::Vec<f64>,
    /// Matched-seed repetitions per grid cell
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, default_value_t = 60)]
    pub pop: usize,
    #[arg(long, default_value_t = 0.7)]
    pub pc: f64,
    #[arg(long, default_value_t = 0.5)]
    pub pm: f64,
    /// Iterations for both algorithms
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    #[arg(long, default_value_t = 10)]
    pub refset: usize,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, default_value = "rlip-out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Scalar response to minimize
    #[arg(long, default_value = "diversity", value_parser = ["diversity", "obj1", "spacing"])]
    pub response: String,
    /// Algorithm runs averaged per design point
    #[arg(long, default_value_t = 10)]
    pub replicates: usize,
    /// Center replicates per factorial design (5 gives the classic 13 runs)
    #[arg(long, default_value_t = 5)]
    pub center_reps: usize,
    /// Curvature test threshold as a multiple of the center standard error
    #[arg(long, default_value_t = 2.0)]
    pub curvature_mult: f64,
    /// Steepest-descent step in coded units
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    #[arg(long, default_value_t = 10)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 5)]
    pub max_moves: usize,
    /// NSGA-II iterations per tuning run
    #[arg(long, default_value_t = 60)]
    pub iters: usize,
    /// Initial population-size levels
    #[arg(long, value_parser = parse_f64_list, default_value = "30,50")]
    pub pop_range: std::vec::Vec<f64>,
    /// Initial crossover-rate levels
    #[arg(long, value_parser = parse_f64_list, default_value = "0.60,0.70")]
    pub pc_range: std::vec::Vec<f64>,
    /// Initial mutation-rate levels
    #[arg(long, value_parser = parse_f64_list, default_value = "0.15,0.25")]
    pub pm_range: std::vec::Vec<f64>,
    #[arg(long = "P", value_name = "P")]
    pub facility_count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, default_value = "rlip-out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// full: every assignment; reachable: every decodable genotype
    #[arg(long, default_value = "full", value_parser = ["full", "reachable"])]
    pub mode: String,
    #[arg(long = "P", value_name = "P")]
    pub facility_count: Option<usize>,
    /// Node budget for the full enumeration
    #[arg(long)]
    pub max_nodes: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, default_value = "rlip-out")]
    pub out: PathBuf,
}

/// Failure classes mapped to exit codes: usage errors exit 2, guard-rail
/// and size refusals exit 3, everything else 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Size(String),
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Size(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Size(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<rlip_core::CsvError> for CliError {
    fn from(e: rlip_core::CsvError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<rlip_core::InstanceError> for CliError {
    fn from(e: rlip_core::InstanceError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<rlip_core::SolveError> for CliError {
    fn from(e: rlip_core::SolveError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<rlip_core::OracleError> for CliError {
    fn from(e: rlip_core::OracleError) -> Self {
        CliError::Size(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("io error: {e}"))
    }
}

impl From<rlip_core::rsm::RsmError> for CliError {
    fn from(e: rlip_core::rsm::RsmError) -> Self {
        match e {
            rlip_core::rsm::RsmError::Solve(inner) => CliError::Usage(inner.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

