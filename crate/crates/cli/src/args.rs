use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "gracecode", version, about = "Simulate and bound low-density majority and generator-matrix codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Monte Carlo BP decoding over a sweep of channel parameters.
    Simulate(SimulateArgs),
    /// Posterior histogram at a single channel parameter.
    Histogram(HistogramArgs),
    /// Density-evolution traces.
    Devo(DevoArgs),
    /// Converse lower-bound curves.
    Converse(ConverseArgs),
    /// Per-degree E-polynomial coefficients.
    Efun(EfunArgs),
    /// Degree-profile optimization against density evolution.
    Optimize(OptimizeArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnsembleArgs {
    /// Profile file (`KIND arity weight` lines) or builtin: ldmc3, ldmc5, ldgm:D, repetition:RHO.
    #[arg(long)]
    pub ensemble: String,
    /// Number of source bits.
    #[arg(long)]
    pub k: usize,
    /// Code rate; implied by repetition builtins.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub systematic: bool,
    /// Check-regular variable degrees.
    #[arg(long)]
    pub regular: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    #[default]
    Bec,
    Bsc,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, value_enum, default_value_t)]
    pub channel: ChannelKind,
    /// Capacity-to-rate ratios `a:b:step`.
    #[arg(long, conflicts_with = "eps_grid", required_unless_present = "eps_grid")]
    pub alpha_grid: Option<String>,
    /// Channel parameters `a:b:step` (erasure or crossover probability).
    #[arg(long)]
    pub eps_grid: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub bp_iters: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HistogramArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, value_enum, default_value_t)]
    pub channel: ChannelKind,
    #[arg(long, conflicts_with = "eps", required_unless_present = "eps")]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[arg(long, default_value_t = 10)]
    pub bp_iters: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurrogateKind {
    Bec,
    Bsc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantityKind {
    Error,
    Chi2Soft,
    CapacitySoft,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DevoArgs {
    /// Profile file or builtin, as for `simulate`.
    #[arg(long)]
    pub ensemble: String,
    /// Required for systematic ensembles.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub systematic: bool,
    #[arg(long)]
    pub alpha_grid: String,
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    #[arg(long, value_enum, default_value_t = SurrogateKind::Bec)]
    pub surrogate: SurrogateKind,
    #[arg(long, value_enum, default_value_t = QuantityKind::Error)]
    pub quantity: QuantityKind,
    /// Starting value; defaults to 0 (erasure), 1/2 (BSC) or alpha*R (systematic).
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long, default_value_t = 14)]
    pub dmax: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Shannon,
    Linear1,
    Linear2,
    General2,
    Area,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisKind {
    Eps,
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AreaKind {
    LinearSystematic,
    Systematic,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConverseArgs {
    #[arg(long, value_enum)]
    pub bound: BoundKind,
    #[arg(long)]
    pub rate: f64,
    #[arg(long, value_enum, default_value_t = AxisKind::Eps)]
    pub axis: AxisKind,
    /// Points `a:b:step` on the chosen axis.
    #[arg(long)]
    pub grid: String,
    #[arg(long)]
    pub anchor_eps: Option<f64>,
    #[arg(long)]
    pub anchor_delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = AreaKind::LinearSystematic)]
    pub area_mode: AreaKind,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayoffKind {
    Error,
    Entropy,
    Chi2,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EfunArgs {
    /// ldmc3-bec, ldmc5-bec or maj-bec:M.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 10)]
    pub dmax: usize,
    #[arg(long, value_enum, default_value_t = PayoffKind::Error)]
    pub payoff: PayoffKind,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OptimizeArgs {
    /// Comma-separated check kinds, e.g. `XOR:1,MAJ:3`.
    #[arg(long)]
    pub components: String,
    /// Comma-separated capacity-to-rate ratios.
    #[arg(long)]
    pub targets: String,
    /// Density-evolution steps; omit with --fixed-point.
    #[arg(long, conflicts_with = "fixed_point", required_unless_present = "fixed_point")]
    pub iters: Option<usize>,
    #[arg(long)]
    pub fixed_point: bool,
    #[arg(long, default_value_t = 14)]
    pub dmax: usize,
    #[arg(long, default_value_t = 8)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Profile output; a log of every start goes next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Write to this path instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
