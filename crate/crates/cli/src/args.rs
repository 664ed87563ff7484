//! Command-line definitions. The parsed [`Cli`] doubles as the experiment
//! configuration embedded in every output file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[command(name = "rbfk", version, about = "Low-rank structure of RBF kernel matrices")]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Globals {
    /// Base seed; repeat t uses seed + t.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Independent draws to aggregate (rank-sweep, spectrum).
    #[arg(long, global = true, default_value_t = 5)]
    pub repeats: usize,
    /// Directory for output files; standard output when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for kernel assembly and factor evaluation.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Allow point counts above 4000.
    #[arg(long, global = true)]
    pub unsafe_n: bool,
    /// Memory cap for dense matrices, in MiB.
    #[arg(long, global = true, default_value_t = 2048)]
    pub memory_cap_mb: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Cheb,
    Ft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Uniform,
    Endpoint,
    Halton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Svd,
    Nystrom,
    Randsvd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorFormat {
    Csv,
    Bin,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ProfileArgs {
    /// gaussian or cauchy.
    #[arg(long, default_value = "gaussian")]
    pub profile: String,
    /// Shape parameter h in f(u / h^2).
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    /// Domain diameter D (all pairwise distances are at most D).
    #[arg(long = "D", default_value_t = 1.0)]
    pub diameter: f64,
    /// Explicit Bernstein ellipse parameter; with --c replaces the automatic search.
    #[arg(long, requires = "c")]
    pub rho_sq: Option<f64>,
    #[arg(long, requires = "rho_sq")]
    pub c: Option<f64>,
    /// Finite smoothness index; with --vq selects the algebraic bound.
    #[arg(long, requires = "vq", conflicts_with = "rho_sq")]
    pub q: Option<usize>,
    #[arg(long, requires = "q")]
    pub vq: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DataArgs {
    #[arg(long, default_value = "gaussian")]
    pub family: String,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long = "N", default_value_t = 1000)]
    pub n_points: usize,
    #[arg(long, value_enum, default_value_t = SchemeKind::Endpoint)]
    pub scheme: SchemeKind,
    /// Endpoint mass p for the endpoint scheme.
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub halton_offset: u64,
    /// complete, partial or none.
    #[arg(long, default_value = "complete")]
    pub scenario: String,
    /// sqrt-d, max-dist or fixed (with --h).
    #[arg(long, default_value = "sqrt-d")]
    pub bandwidth: String,
    #[arg(long)]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Build a separable expansion and report its rank and error bound.
    Factorize(FactorizeArgs),
    /// Tabulate deterministic and probabilistic error bounds.
    Bounds(BoundsArgs),
    /// Numerical rank over dimensions, schemes and tolerances.
    RankSweep(RankSweepArgs),
    /// Singular values, numerical ranks and ratio spikes of one kernel matrix.
    Spectrum(SpectrumArgs),
    /// Reconstruction error against rank for SVD, Nystrom and randomized SVD.
    Reconstruct(ReconstructArgs),
    /// Generate a point cloud.
    Sample(SampleArgs),
    /// Re-run the experiment recorded in an output file's metadata.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FactorizeArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, value_enum, default_value_t = Construction::Cheb)]
    pub construction: Construction,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Chebyshev order.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Fourier order.
    #[arg(long, default_value_t = 1)]
    pub mf: usize,
    /// Taylor order.
    #[arg(long, default_value_t = 9)]
    pub mt: usize,
    /// Build Fourier-Taylor plans with 9 M_f > M_t (no bound attached).
    #[arg(long)]
    pub allow_heuristic: bool,
    /// Source and target region radii (default D/2 each).
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long)]
    pub dy: Option<f64>,
    /// Distance between the source and target centers.
    #[arg(long, default_value_t = 0.0)]
    pub gap: f64,
    #[arg(long, default_value_t = 7)]
    pub window_order: usize,
    /// Drop Chebyshev terms whose magnitude bound is below this tolerance.
    #[arg(long)]
    pub prune_tol: Option<f64>,
    /// Sample this many source and target points to measure the error.
    #[arg(long, default_value_t = 0)]
    pub points: usize,
    /// Also write the factor matrices G and H (needs --out and --points).
    #[arg(long)]
    pub write_factors: bool,
    #[arg(long, value_enum, default_value_t = FactorFormat::Csv)]
    pub factor_format: FactorFormat,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 8, 12])]
    pub n_list: Vec<usize>,
    /// Fourier-Taylor orders as MF:MT pairs.
    #[arg(long, value_delimiter = ',', default_values_t = vec!["1:9".to_string(), "2:18".to_string()])]
    pub ft: Vec<String>,
    /// Concentration width for the probabilistic column.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 7)]
    pub window_order: usize,
    /// Print the worked arithmetic examples instead of a table.
    #[arg(long)]
    pub worked: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RankSweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 6, 8, 10, 12])]
    pub d_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e-1, 1e-2, 1e-3])]
    pub tols: Vec<f64>,
    /// fro, two or max.
    #[arg(long, value_delimiter = ',', default_values_t = vec!["max".to_string()])]
    pub norms: Vec<String>,
    #[arg(long, value_delimiter = ',', value_enum, default_values_t = vec![SchemeKind::Endpoint])]
    pub schemes: Vec<SchemeKind>,
    #[arg(long, default_value_t = 0.2)]
    pub p: f64,
    /// Pick the endpoint mass per d from the grid 0.05..0.5 by the largest
    /// mean rank at the first tolerance and norm.
    #[arg(long)]
    pub grid_search_p: bool,
    #[arg(long, default_value_t = 0)]
    pub halton_offset: u64,
    #[arg(long, default_value = "complete")]
    pub scenario: String,
    #[arg(long = "N", default_value_t = 1000)]
    pub n_points: usize,
    #[arg(long, default_value = "gaussian")]
    pub family: String,
    #[arg(long, default_value = "sqrt-d")]
    pub bandwidth: String,
    #[arg(long)]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Read the matrix from a CSV or .bin file instead of sampling points.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e-1, 1e-2, 1e-3])]
    pub tols: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec!["fro".to_string(), "two".to_string(), "max".to_string()])]
    pub norms: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![4.0, 2.0])]
    pub thresholds: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Ranks to evaluate; defaults to 1..=max-rank.
    #[arg(long, value_delimiter = ',')]
    pub ranks: Vec<usize>,
    #[arg(long, default_value_t = 60)]
    pub max_rank: usize,
    #[arg(long, value_delimiter = ',', value_enum, default_values_t = vec![MethodKind::Svd, MethodKind::Nystrom])]
    pub methods: Vec<MethodKind>,
    #[arg(long, default_value_t = 30)]
    pub oversample: usize,
    /// Nystrom errors are averaged over this many column draws.
    #[arg(long, default_value_t = 5)]
    pub nystrom_repeats: usize,
    #[arg(long, default_value_t = 2)]
    pub power_iters: usize,
    /// Error-drop factor reported in the summary.
    #[arg(long, default_value_t = 3.0)]
    pub drop_factor: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long = "N", default_value_t = 1000)]
    pub n_points: usize,
    #[arg(long, value_enum, default_value_t = SchemeKind::Uniform)]
    pub scheme: SchemeKind,
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub halton_offset: u64,
    /// Box side [lo, hi] on every axis.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hi: f64,
    /// Emit source and target clouds of an overlap scenario instead of one box.
    #[arg(long)]
    pub scenario: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// An output file written by rbfk.
    pub file: PathBuf,
}
