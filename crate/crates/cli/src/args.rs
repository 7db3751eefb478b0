//! Command-line surface.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "sbm-ising",
    version,
    about = "Parameter estimation and clustering on sparse two-community SBMs \
             via the Ising log partition function"
)]
pub struct Cli {
    /// Base RNG seed; all streams derive from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (also SBM_ISING_THREADS); default: all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// TOML file supplying defaults for the subcommand's parameters;
    /// explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Print the full JSON envelope to stdout.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample an SBM(d, lambda, r, n) graph to an edge-list file.
    Generate(GenerateArgs),
    /// Sample the coupled interpolation graphs G-tilde, G'0, G'1.
    Interpolate(InterpolateArgs),
    /// Estimate (d, lambda) from a graph by cycle counting.
    Estimate(EstimateArgs),
    /// Free-energy density (1/n) Z(beta, G), exact or by integration.
    FreeEnergy(FreeEnergyArgs),
    /// Monte-Carlo free-energy curve over a grid of ratios r.
    BuildCurve(BuildCurveArgs),
    /// Invert a free-energy curve at an observed graph to estimate r.
    EstimateR(EstimateRArgs),
    /// Cluster a graph by sampling the Ising measure at beta = 1/sqrt(d-hat).
    Cluster(ClusterArgs),
    /// Sweep (d, lambda, r, beta) grids and check closed forms against the
    /// grid-minimization oracle.
    VerifyTheory(VerifyTheoryArgs),
    /// Paired estimate of (1/n) E[Z(beta, G'0) - Z(beta, G'1)].
    InterpolationCheck(InterpolationCheckArgs),
    /// Run the acceptance suite with pinned seeds.
    Acceptance(AcceptanceArgs),
    /// Brute-force reference oracles.
    #[command(subcommand)]
    Dev(DevCommand),
}

impl Command {
    /// Name of the subcommand's table in a --config file.
    pub fn config_key(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Interpolate(_) => "interpolate",
            Command::Estimate(_) => "estimate",
            Command::FreeEnergy(_) => "free-energy",
            Command::BuildCurve(_) => "build-curve",
            Command::EstimateR(_) => "estimate-r",
            Command::Cluster(_) => "cluster",
            Command::VerifyTheory(_) => "verify-theory",
            Command::InterpolationCheck(_) => "interpolation-check",
            Command::Acceptance(_) => "acceptance",
            Command::Dev(_) => "dev",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub r: f64,
    /// Edge-list output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional ground-truth label sidecar output.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct InterpolateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub r: f64,
    /// Interpolation step.
    #[arg(long)]
    pub delta: f64,
    /// Writes <prefix>_gtilde.txt, <prefix>_g0prime.txt, <prefix>_g1prime.txt
    /// plus label sidecars.
    #[arg(long)]
    pub out_prefix: String,
    /// Optional JSON envelope output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EstimateArgs {
    /// Edge-list input.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Cycle length (odd identifies the sign of lambda).
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeMethodArg {
    Exact,
    Ti,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FreeEnergyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Inverse temperature, or "auto" for 1/sqrt(d-hat).
    #[arg(long, default_value = "auto")]
    pub beta: String,
    #[arg(long, value_enum, default_value_t = FeMethodArg::Ti)]
    pub method: FeMethodArg,
    /// Integration grid points.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    /// Sweeps per grid point.
    #[arg(long, default_value_t = 200)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 100)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 8)]
    pub chains: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BuildCurveArgs {
    #[arg(long)]
    pub d: f64,
    #[arg(long)]
    pub lambda: f64,
    /// Inverse temperature, or "auto" for 1/sqrt(d).
    #[arg(long, default_value = "auto")]
    pub beta: String,
    #[arg(long)]
    pub n: usize,
    /// Ratio grid: "start:end:step" or a comma list, e.g. "1.0:2.0:0.2".
    #[arg(long)]
    pub r_grid: String,
    /// Independent graphs per grid point.
    #[arg(long, default_value_t = 20)]
    pub graphs: usize,
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    #[arg(long, default_value_t = 200)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 100)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 8)]
    pub chains: usize,
    /// Curve CSV output path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EstimateRArgs {
    /// Observed graph (edge list).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Curve CSV produced by build-curve.
    #[arg(long)]
    pub curve: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ClusterArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Ground-truth labels for overlap evaluation.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    pub sweeps: usize,
    /// Inverse temperature, or "auto" for 1/sqrt(d-hat).
    #[arg(long, default_value = "auto")]
    pub beta: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the estimated labels tau here (label-file format).
    #[arg(long)]
    pub out_labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyTheoryArgs {
    #[arg(long, default_value = "100,10000")]
    pub d_grid: String,
    #[arg(long, default_value = "0.05,0.5")]
    pub beta_grid: String,
    #[arg(long, default_value = "1,1.5,2,4,8")]
    pub r_grid: String,
    #[arg(long, default_value = "-0.1,-0.5,-0.9")]
    pub lambda_grid: String,
    #[arg(long, default_value_t = 2001)]
    pub grid_resolution: usize,
    /// Closed-form vs oracle tolerance; exceeding it fails the run.
    #[arg(long, default_value_t = 1e-5)]
    pub tolerance: f64,
    /// Report CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct InterpolationCheckArgs {
    #[arg(long)]
    pub d: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 0.09)]
    pub delta: f64,
    #[arg(long)]
    pub n: usize,
    /// Inverse temperature, or "auto" for 1/sqrt(d).
    #[arg(long, default_value = "auto")]
    pub beta: String,
    /// Interpolation bundles (paired TI runs share the base graph).
    #[arg(long, default_value_t = 12)]
    pub pairs: usize,
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    #[arg(long, default_value_t = 120)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 60)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AcceptanceArgs {
    /// Comma-separated criterion ids to run (default: all).
    #[arg(long)]
    pub only: Option<String>,
    /// JSON summary output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DevCommand {
    /// Count k-cycles by brute-force walk enumeration.
    BruteCycles {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Log partition function by direct 2^n summation.
    BruteZ {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid minimization of the variational objective.
    GridMin {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 2001)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}
