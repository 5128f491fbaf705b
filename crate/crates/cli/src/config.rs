//! Run configuration shared by the command line and `run --config` files.
//!
//! Every subcommand's arguments double as the JSON form of that command, so a
//! manifest written next to an output can be fed back to `run --config`.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use paulispec::{Center, Group};

/// Version of the JSON config layout; bumped on incompatible changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    /// Worker threads; outputs do not depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Output directory; defaults to `$PAULISPEC_OUT_DIR`, then `.`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub task: Task,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Task {
    Spectrum(SpectrumArgs),
    Entropy(EntropyArgs),
    Sample(SampleArgs),
    Circuit(CircuitArgs),
    Hamiltonian(HamiltonianArgs),
    Sps(SpsArgs),
    DisorderScan(DisorderScanArgs),
    ReferenceCurve(ReferenceCurveArgs),
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Spectrum(_) => "spectrum",
            Task::Entropy(_) => "entropy",
            Task::Sample(_) => "sample",
            Task::Circuit(_) => "circuit",
            Task::Hamiltonian(_) => "hamiltonian",
            Task::Sps(_) => "sps",
            Task::DisorderScan(_) => "disorder-scan",
            Task::ReferenceCurve(_) => "reference-curve",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    HaarUnitary,
    HaarOrthogonal,
    CircuitUnitary,
    CircuitOrthogonal,
    Stabilizer,
    /// The product state `|Θ⟩^{⊗N}` of maximal single-qubit magic.
    Theta,
    /// Subspace phase state over `2^k` basis states.
    Sps,
    /// Ising-chain eigenstate nearest the mean energy.
    Eigenstate,
    /// State vector in the binary format of `StateVector::write_binary`.
    File,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GroupArg {
    Unitary,
    Orthogonal,
}

impl From<GroupArg> for Group {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::Unitary => Group::Unitary,
            GroupArg::Orthogonal => Group::Orthogonal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CenterArg {
    MeanEnergy,
    Midpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CurveModel {
    /// Exact Haar law.
    Haar,
    /// Gaussian typicality law.
    Typical,
}

/// Mid-spectrum selection shared by the Hamiltonian commands.
pub fn center(arg: CenterArg, energy: Option<f64>) -> Center {
    match (energy, arg) {
        (Some(e), _) => Center::Energy(e),
        (None, CenterArg::MeanEnergy) => Center::MeanEnergy,
        (None, CenterArg::Midpoint) => Center::Midpoint,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema, Args)]
#[serde(deny_unknown_fields)]
pub struct SourceArgs {
    #[arg(long = "source", value_enum)]
    #[serde(rename = "source")]
    pub kind: SourceKind,
    /// Number of qubits.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub seed: u64,
    /// Brick-wall depth for circuit sources (default N).
    #[arg(long)]
    #[serde(default)]
    pub depth: Option<usize>,
    /// log₂ of the subset size for `sps` (default N/2).
    #[arg(long)]
    #[serde(default)]
    pub k: Option<usize>,
    /// Input file for `file`.
    #[arg(long)]
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// Break time reversal in the `eigenstate` chain.
    #[arg(long)]
    #[serde(default)]
    pub tri_breaking: bool,
    /// Disorder strength of the `eigenstate` chain.
    #[arg(long = "W", default_value_t = 0.0)]
    #[serde(rename = "W", default)]
    pub disorder: f64,
}

impl SourceArgs {
    pub fn resolve(&mut self) {
        match self.kind {
            SourceKind::CircuitUnitary | SourceKind::CircuitOrthogonal => {
                self.depth.get_or_insert(self.n);
            }
            SourceKind::Sps => {
                self.k.get_or_insert(self.n / 2);
            }
            _ => {}
        }
    }
}

fn default_bins() -> usize {
    101
}

fn default_lo() -> f64 {
    -1.0
}

fn default_hi() -> f64 {
    1.0
}

fn default_qs() -> Vec<f64> {
    vec![2.0]
}

fn default_realizations() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema, Args)]
#[serde(deny_unknown_fields)]
pub struct BinningArgs {
    #[arg(long, default_value_t = default_bins())]
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[arg(long, default_value_t = default_lo(), allow_hyphen_values = true)]
    #[serde(default = "default_lo")]
    pub lo: f64,
    #[arg(long, default_value_t = default_hi(), allow_hyphen_values = true)]
    #[serde(default = "default_hi")]
    pub hi: f64,
    /// Bin symmetry zeros with the regular part instead of as a point mass.
    #[arg(long)]
    #[serde(default)]
    pub keep_zeros: bool,
}

impl BinningArgs {
    pub fn options(&self) -> paulispec::HistogramOptions {
        paulispec::HistogramOptions { bins: self.bins, lo: self.lo, hi: self.hi, separate_zeros: !self.keep_zeros }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema, Args)]
#[serde(deny_unknown_fields)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    #[serde(default = "BinningArgs::standard")]
    pub binning: BinningArgs,
}

impl BinningArgs {
    fn standard() -> Self {
        Self { bins: default_bins(), lo: default_lo(), hi: default_hi(), keep_zeros: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema, Args)]
#[serde(deny_unknown_fields)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Rényi orders, comma separated.
    #[arg(long = "q", value_delimiter = ',', default_values_t = default_qs())]
    #[serde(rename = "q", default = "default_qs")]
    pub qs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema, Args)]
#[serde(deny_unknown_fields)]
pub struct SampleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long = "q", value_delimiter = ',', default_values_t = default_qs())]
    #[serde(rename = "q", default = "default_qs")]
    pub qs: Vec<f64>,
    /// Recorded steps per chain.
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    /// Discarded steps per chain (default 10·N²).
    #[arg(long)]
    #[serde(default)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "one")]
    pub chains: usize,
    /// Walk seed; chain `i` uses `chain_seed ⊕ i`.
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub chain_seed: u64,
    /// Also write the first chain as `chain.csv`.
    #[arg(long)]
    #[serde(default)]
    pub dump_chain: bool,
    /// Also write the reweighted spectrum estimate as `spectrum.csv`.
    #[arg(long)]
    #[serde(default)]
    pub histogram: bool,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema, Args)]
#[serde(deny_unknown_fields)]
pub struct CircuitArgs {
    #[arg(long)]
    pub n: usize,
    /// Brick-wall depth (default N).
    #[arg(long)]
    #[serde(default)]
    pub depth: Option<usize>,
    #[arg(long, value_enum, default_value = "unitary")]
    pub group: GroupArg,
    #[arg(long, default_value_t = default_realizations())]
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[arg(long = "q", value_delimiter = ',', default_values_t = default_qs())]
    #[serde(rename = "q", default = "default_qs")]
    pub qs: Vec<f64>,
    /// Realization `r` uses seed `seed ⊕ r`.
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema, Args)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    #[serde(default)]
    pub tri_breaking: bool,
    #[arg(long = "W", default_value_t = 0.0)]
    #[serde(rename = "W", default)]
    pub disorder: f64,
    /// Disorder seed.
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub seed: u64,
    /// Retained eigenstates (default min(d/10, 1000)).
    #[arg(long)]
    #[serde(default)]
    pub n_ev: Option<usize>,
    #[arg(long, value_enum, default_value = "mean-energy")]
    pub center: CenterArg,
    /// Explicit target energy; overrides `center`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub energy: Option<f64>,
    #[arg(long = "q", value_delimiter = ',', default_values_t = default_qs())]
    #[serde(rename = "q", default = "default_qs")]
    pub qs: Vec<f64>,
    /// Local operator for ETH statistics, e.g. "X1 X2".
    #[arg(long)]
    #[serde(default)]
    pub eth_pattern: Option<String>,
    /// Directory for the eigenstate cache.
    #[arg(long)]
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema, Args)]
#[serde(deny_unknown_fields)]
pub struct SpsArgs {
    #[arg(long)]
    pub n: usize,
    /// log₂ of the subset size (default N/2).
    #[arg(long)]
    #[serde(default)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = default_realizations())]
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[arg(long = "q", value_delimiter = ',', default_values_t = default_qs())]
    #[serde(rename = "q", default = "default_qs")]
    pub qs: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub seed: u64,
}

fn default_scan_realizations() -> usize {
    10
}

fn default_n_ev() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema, Args)]
#[serde(deny_unknown_fields)]
pub struct DisorderScanArgs {
    #[arg(long)]
    pub n: usize,
    /// Disorder strengths, comma separated.
    #[arg(long = "W", value_delimiter = ',', required = true)]
    #[serde(rename = "W")]
    pub ws: Vec<f64>,
    #[arg(long = "q", value_delimiter = ',', default_values_t = default_qs())]
    #[serde(rename = "q", default = "default_qs")]
    pub qs: Vec<f64>,
    #[arg(long, default_value_t = default_scan_realizations())]
    #[serde(default = "default_scan_realizations")]
    pub realizations: usize,
    #[arg(long, default_value_t = default_n_ev())]
    #[serde(default = "default_n_ev")]
    pub n_ev: usize,
    #[arg(long)]
    #[serde(default)]
    pub tri_breaking: bool,
    #[arg(long, value_enum, default_value = "mean-energy")]
    pub center: CenterArg,
    /// Realization `r` uses disorder seed `seed ⊕ r`.
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema, Args)]
#[serde(deny_unknown_fields)]
pub struct ReferenceCurveArgs {
    #[arg(long, value_enum)]
    pub group: GroupArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "haar")]
    pub model: CurveModel,
    #[command(flatten)]
    #[serde(default = "BinningArgs::standard")]
    pub binning: BinningArgs,
}

impl RunConfig {
    /// Fill in defaults that depend on other fields so the manifest records
    /// the values actually used.
    pub fn resolve(&mut self) {
        match &mut self.task {
            Task::Spectrum(a) => a.source.resolve(),
            Task::Entropy(a) => a.source.resolve(),
            Task::Sample(a) => {
                a.source.resolve();
                a.burn_in.get_or_insert(10 * a.source.n * a.source.n);
            }
            Task::Circuit(a) => {
                a.depth.get_or_insert(a.n);
            }
            Task::Sps(a) => {
                a.k.get_or_insert(a.n / 2);
            }
            Task::Hamiltonian(a) => {
                if a.n <= 62 {
                    let d = 1usize << a.n;
                    a.n_ev.get_or_insert((d / 10).clamp(1, 1000));
                }
            }
            Task::DisorderScan(_) | Task::ReferenceCurve(_) => {}
        }
    }
}

/// JSON schema of [`RunConfig`].
pub fn schema() -> schemars::schema::RootSchema {
    let mut root = schemars::schema_for!(RunConfig);
    root.schema.metadata().title = Some(format!("paulispec run config v{SCHEMA_VERSION}"));
    root
}
