use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mlbound::bounds::BoundVariant;
use mlbound::numerics::{SnrConvention, ThetaPolicy};

#[derive(Debug, Parser)]
#[command(name = "mlbound", version, about = "ML decoding error bounds for binary linear codes over BPSK-AWGN")]
pub struct Cli {
    /// Worker threads; overrides the config file.
    #[arg(long, global = true, env = "MLBOUND_WORKERS")]
    pub workers: Option<usize>,

    /// Flat `key = value` file supplying defaults for unset flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a weight spectrum or IOWE and write it in spectrum format.
    Spectrum(SpectrumArgs),
    /// Evaluate a bound over an SNR grid and emit a CSV curve.
    Bound(BoundArgs),
    /// Monte Carlo ML and list decoding with the all-zero codeword.
    Simulate(SimulateArgs),
    /// Merge curves and simulation points on a common grid.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).multiple(false))]
pub struct SpectrumArgs {
    /// Enumerate the code of this generator file (writes an IOWE).
    #[arg(long, value_name = "GEN", group = "source")]
    pub enumerate: Option<PathBuf>,

    /// Enumerate the dual code given by this generator file and apply the
    /// MacWilliams transform (writes a weight spectrum).
    #[arg(long, value_name = "GEN", group = "source")]
    pub macwilliams: Option<PathBuf>,

    /// Average spectrum of the random linear [N, K] ensemble.
    #[arg(long, num_args = 2, value_names = ["N", "K"], group = "source")]
    pub ensemble: Option<Vec<usize>>,

    /// Keep only weights up to D.
    #[arg(long, value_name = "D")]
    pub truncate: Option<usize>,

    /// Write the weight spectrum even when an IOWE is available.
    #[arg(long)]
    pub weight_only: bool,

    /// Largest message length enumerated.
    #[arg(long)]
    pub max_k: Option<usize>,

    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,

    /// Spectrum file (weight or IOWE).
    #[arg(long, value_name = "FILE")]
    pub spectrum: Option<PathBuf>,

    /// Generator file to enumerate.
    #[arg(long, value_name = "GEN")]
    pub enumerate: Option<PathBuf>,

    /// Random linear [N, K] ensemble.
    #[arg(long, num_args = 2, value_names = ["N", "K"])]
    pub ensemble: Option<Vec<usize>>,

    #[arg(long, allow_hyphen_values = true)]
    pub snr_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_stop: Option<f64>,
    #[arg(long)]
    pub snr_step: Option<f64>,

    #[arg(long, value_enum)]
    pub snr_convention: Option<ConventionArg>,

    #[arg(long, value_enum)]
    pub theta_policy: Option<ThetaArg>,

    /// Fix d* instead of optimizing it.
    #[arg(long)]
    pub dstar: Option<usize>,

    /// Precomputed base-bound values (`snr_db d_star value`) for `gfbt`.
    #[arg(long, value_name = "FILE")]
    pub base_bound: Option<PathBuf>,

    /// Truncate the weight spectrum at D before evaluating.
    #[arg(long, value_name = "D")]
    pub truncate: Option<usize>,

    #[arg(long)]
    pub max_k: Option<usize>,

    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Generator file of the simulated code.
    #[arg(long, value_name = "GEN")]
    pub code: Option<PathBuf>,

    /// Single grid point; overrides the start/stop/step grid.
    #[arg(long, allow_hyphen_values = true)]
    pub snr: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_stop: Option<f64>,
    #[arg(long)]
    pub snr_step: Option<f64>,

    #[arg(long, value_enum)]
    pub snr_convention: Option<ConventionArg>,

    #[arg(long)]
    pub trials: Option<u64>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// List-decoding radius; defaults to the word bound's optimal d*.
    #[arg(long)]
    pub dstar: Option<usize>,

    #[arg(long)]
    pub max_k: Option<usize>,

    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,

    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Curve produced by `bound`, as LABEL=FILE.
    #[arg(long, value_name = "LABEL=FILE", required = true)]
    pub curve: Vec<String>,

    /// JSON report produced by `simulate`, as LABEL=FILE.
    #[arg(long, value_name = "LABEL=FILE")]
    pub sim: Vec<String>,

    /// Which simulated rate to tabulate.
    #[arg(long, value_enum, default_value = "word")]
    pub sim_metric: MetricArg,

    /// Declared relation `A<=B` between two labels, checked on every row.
    #[arg(long, value_name = "A<=B")]
    pub dominance: Vec<String>,

    /// Exit with status 4 when any row violates a declared relation.
    #[arg(long)]
    pub strict: bool,

    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Union,
    TruncatedUnion,
    Pairwise,
    Triplet,
    Word,
    Bit,
    Gfbt,
}

impl From<VariantArg> for BoundVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Union => BoundVariant::Union,
            VariantArg::TruncatedUnion => BoundVariant::TruncatedUnion,
            VariantArg::Pairwise => BoundVariant::PairwiseImproved,
            VariantArg::Triplet => BoundVariant::TripletImproved,
            VariantArg::Word => BoundVariant::UnifiedWord,
            VariantArg::Bit => BoundVariant::UnifiedBit,
            VariantArg::Gfbt => BoundVariant::GfbtCombined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    EbN0,
    EsN0,
    Sigma,
}

impl From<ConventionArg> for SnrConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::EbN0 => SnrConvention::EbN0,
            ConventionArg::EsN0 => SnrConvention::EsN0,
            ConventionArg::Sigma => SnrConvention::SigmaDirect,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThetaArg {
    RightAngle,
    Tight,
}

impl From<ThetaArg> for ThetaPolicy {
    fn from(t: ThetaArg) -> Self {
        match t {
            ThetaArg::RightAngle => ThetaPolicy::RightAngle,
            ThetaArg::Tight => ThetaPolicy::Tight,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Word,
    Bit,
}

pub fn convention_name(c: SnrConvention) -> &'static str {
    match c {
        SnrConvention::EbN0 => "eb-n0",
        SnrConvention::EsN0 => "es-n0",
        SnrConvention::SigmaDirect => "sigma",
    }
}

pub fn theta_name(t: ThetaPolicy) -> &'static str {
    match t {
        ThetaPolicy::RightAngle => "right-angle",
        ThetaPolicy::Tight => "tight",
    }
}
