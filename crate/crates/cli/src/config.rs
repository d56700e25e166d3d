//! Flag and config-file handling. Every flag is optional on the command line;
//! a value given there wins over the `[command]` table of `--config`, which
//! wins over the built-in default.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use dsn_cluster::keying::SUPPORTED_KEY_BITS;
use serde::Deserialize;

/// A bad parameter, reported with the flag that carries it.
#[derive(Debug)]
pub struct UsageError {
    pub flag: &'static str,
    pub msg: String,
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid value for --{}: {}", self.flag, self.msg)
    }
}

impl std::error::Error for UsageError {}

fn bad(flag: &'static str, msg: impl Into<String>) -> UsageError {
    UsageError { flag, msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlacementArg {
    Clustered,
    Uniform,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub generate: Option<GenerateArgs>,
    pub form: Option<FormArgs>,
    pub sweep: Option<SweepArgs>,
    pub analyze: Option<AnalyzeArgs>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| anyhow::anyhow!("bad config {}: {e}", path.display()))
    }
}

/// Generates `merge` (flags first, then config) for an all-`Option` struct.
macro_rules! mergeable {
    ($ty:ident { $($field:ident),* $(,)? }) => {
        impl $ty {
            pub fn merge(self, file: Option<Self>) -> Self {
                let file = file.unwrap_or_default();
                Self { $($field: self.$field.or(file.$field)),* }
            }
        }
    };
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Common {
    /// RNG seed [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, created if missing [default: out]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

mergeable!(Common { seed, out_dir });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldArgs {
    /// Field width [default: 500]
    #[arg(long)]
    pub width: Option<f64>,
    /// Field height [default: 500]
    #[arg(long)]
    pub height: Option<f64>,
    /// Target average degree used to size the radius [default: 6]
    #[arg(long)]
    pub avg_degree: Option<f64>,
}

mergeable!(FieldArgs { width, height, avg_degree });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    /// Number of sensors [default: 100]
    #[arg(long)]
    pub n: Option<usize>,
    /// Transmission radius; overrides --avg-degree
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    /// Number of sensors; ignored with --graph-dir [default: 100]
    #[arg(long)]
    pub n: Option<usize>,
    /// Ordinary sensors per group [default: 9]
    #[arg(long)]
    pub eta: Option<usize>,
    /// Key length in bits: 64, 128 or 256 [default: 128]
    #[arg(long)]
    pub k: Option<u32>,
    /// How groups are scattered [default: clustered]
    #[arg(long, value_enum)]
    pub placement: Option<PlacementArg>,
    /// Clustered spread as a fraction of the radius [default: 1]
    #[arg(long)]
    pub rho: Option<f64>,
    /// Read nodes.csv and edges.csv from here instead of placing sensors
    #[arg(long)]
    pub graph_dir: Option<PathBuf>,
    /// Transmission radius; required with --graph-dir
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    /// Smallest network size [default: 20]
    #[arg(long)]
    pub n_min: Option<usize>,
    /// Largest network size [default: 200]
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Network size step [default: 20]
    #[arg(long)]
    pub n_step: Option<usize>,
}

mergeable!(SweepRange { n_min, n_max, n_step });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCommon {
    /// Ordinary sensors per group [default: 9]
    #[arg(long)]
    pub eta: Option<usize>,
    /// Key length in bits: 64, 128 or 256 [default: 128]
    #[arg(long)]
    pub k: Option<u32>,
    /// How groups are scattered [default: clustered]
    #[arg(long, value_enum)]
    pub placement: Option<PlacementArg>,
    /// Clustered spread as a fraction of the radius [default: 1]
    #[arg(long)]
    pub rho: Option<f64>,
    /// Seeds per network size; run s uses seed --seed + s [default: 30]
    #[arg(long)]
    pub seeds: Option<usize>,
}

mergeable!(SweepCommon { eta, k, placement, rho, seeds });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub range: SweepRange,
    #[command(flatten)]
    #[serde(flatten)]
    pub sweep: SweepCommon,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub sweep: SweepCommon,
    /// Connectivity probabilities for the degree curves [default: 0.9,0.99,0.999,0.9999]
    #[arg(long, value_delimiter = ',')]
    pub p_c: Option<Vec<f64>>,
    /// Largest cluster count on the degree curves [default: 1000]
    #[arg(long)]
    pub curve_n_max: Option<usize>,
    /// Largest group size parameter on the storage curve [default: 20]
    #[arg(long)]
    pub eta_max: Option<usize>,
    /// Key lengths on the storage curve [default: 64,128,256]
    #[arg(long, value_delimiter = ',')]
    pub k_values: Option<Vec<u32>>,
}

// Resolved, validated parameter sets.

pub struct Output {
    pub seed: u64,
    pub out_dir: PathBuf,
}

pub struct Field {
    pub width: f64,
    pub height: f64,
    pub avg_degree: f64,
}

pub struct Generate {
    pub out: Output,
    pub field: Field,
    pub n: usize,
    pub radius: Option<f64>,
}

pub struct Form {
    pub out: Output,
    pub field: Field,
    pub n: usize,
    pub eta: usize,
    pub k: u32,
    pub placement: PlacementArg,
    pub rho: f64,
    pub graph_dir: Option<PathBuf>,
    pub radius: Option<f64>,
}

pub struct SweepSettings {
    pub eta: usize,
    pub k: u32,
    pub placement: PlacementArg,
    pub rho: f64,
    pub seeds: usize,
}

pub struct Sweep {
    pub out: Output,
    pub field: Field,
    pub n_values: Vec<usize>,
    pub sweep: SweepSettings,
}

pub struct Analyze {
    pub out: Output,
    pub sweep: SweepSettings,
    pub p_c: Vec<f64>,
    pub curve_n_max: usize,
    pub eta_max: usize,
    pub k_values: Vec<u32>,
}

fn positive(flag: &'static str, v: f64) -> Result<f64, UsageError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(bad(flag, format!("{v} is not a positive number")))
    }
}

fn key_bits(flag: &'static str, k: u32) -> Result<u32, UsageError> {
    if SUPPORTED_KEY_BITS.contains(&k) {
        Ok(k)
    } else {
        Err(bad(flag, format!("{k} is not one of {SUPPORTED_KEY_BITS:?}")))
    }
}

fn at_least(flag: &'static str, v: usize, min: usize) -> Result<usize, UsageError> {
    if v >= min {
        Ok(v)
    } else {
        Err(bad(flag, format!("{v} is below the minimum {min}")))
    }
}

impl Common {
    fn resolve(self) -> Output {
        Output {
            seed: self.seed.unwrap_or(42),
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
        }
    }
}

impl FieldArgs {
    fn resolve(self) -> Result<Field, UsageError> {
        Ok(Field {
            width: positive("width", self.width.unwrap_or(500.0))?,
            height: positive("height", self.height.unwrap_or(500.0))?,
            avg_degree: positive("avg-degree", self.avg_degree.unwrap_or(6.0))?,
        })
    }
}

impl SweepCommon {
    fn resolve(self) -> Result<SweepSettings, UsageError> {
        Ok(SweepSettings {
            eta: self.eta.unwrap_or(9),
            k: key_bits("k", self.k.unwrap_or(128))?,
            placement: self.placement.unwrap_or(PlacementArg::Clustered),
            rho: positive("rho", self.rho.unwrap_or(1.0))?,
            seeds: at_least("seeds", self.seeds.unwrap_or(30), 1)?,
        })
    }
}

impl GenerateArgs {
    pub fn resolve(self, file: &ConfigFile) -> Result<Generate, UsageError> {
        let f = file.generate.clone().unwrap_or_default();
        let radius = self.radius.or(f.radius).map(|r| positive("radius", r)).transpose()?;
        let min_n = if radius.is_some() { 1 } else { 2 };
        Ok(Generate {
            out: self.common.merge(Some(f.common)).resolve(),
            field: self.field.merge(Some(f.field)).resolve()?,
            n: at_least("n", self.n.or(f.n).unwrap_or(100), min_n)?,
            radius,
        })
    }
}

impl FormArgs {
    pub fn resolve(self, file: &ConfigFile) -> Result<Form, UsageError> {
        let f = file.form.clone().unwrap_or_default();
        let graph_dir = self.graph_dir.or(f.graph_dir);
        let radius = self.radius.or(f.radius).map(|r| positive("radius", r)).transpose()?;
        if graph_dir.is_some() && radius.is_none() {
            return Err(bad("radius", "required together with --graph-dir"));
        }
        let min_n = if radius.is_some() { 1 } else { 2 };
        Ok(Form {
            out: self.common.merge(Some(f.common)).resolve(),
            field: self.field.merge(Some(f.field)).resolve()?,
            n: at_least("n", self.n.or(f.n).unwrap_or(100), min_n)?,
            eta: self.eta.or(f.eta).unwrap_or(9),
            k: key_bits("k", self.k.or(f.k).unwrap_or(128))?,
            placement: self.placement.or(f.placement).unwrap_or(PlacementArg::Clustered),
            rho: positive("rho", self.rho.or(f.rho).unwrap_or(1.0))?,
            graph_dir,
            radius,
        })
    }
}

impl SweepArgs {
    pub fn resolve(self, file: &ConfigFile) -> Result<Sweep, UsageError> {
        let f = file.sweep.clone().unwrap_or_default();
        let range = self.range.merge(Some(f.range));
        let n_min = at_least("n-min", range.n_min.unwrap_or(20), 2)?;
        let n_max = at_least("n-max", range.n_max.unwrap_or(200), n_min)?;
        let n_step = at_least("n-step", range.n_step.unwrap_or(20), 1)?;
        Ok(Sweep {
            out: self.common.merge(Some(f.common)).resolve(),
            field: self.field.merge(Some(f.field)).resolve()?,
            n_values: (n_min..=n_max).step_by(n_step).collect(),
            sweep: self.sweep.merge(Some(f.sweep)).resolve()?,
        })
    }
}

impl AnalyzeArgs {
    pub fn resolve(self, file: &ConfigFile) -> Result<Analyze, UsageError> {
        let f = file.analyze.clone().unwrap_or_default();
        let p_c = self
            .p_c
            .or(f.p_c)
            .unwrap_or_else(|| vec![0.9, 0.99, 0.999, 0.9999]);
        if p_c.is_empty() {
            return Err(bad("p-c", "empty list"));
        }
        if let Some(p) = p_c.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(bad("p-c", format!("{p} is not strictly between 0 and 1")));
        }
        let k_values = self.k_values.or(f.k_values).unwrap_or_else(|| SUPPORTED_KEY_BITS.to_vec());
        if k_values.is_empty() {
            return Err(bad("k-values", "empty list"));
        }
        for &k in &k_values {
            key_bits("k-values", k)?;
        }
        Ok(Analyze {
            out: self.common.merge(Some(f.common)).resolve(),
            sweep: self.sweep.merge(Some(f.sweep)).resolve()?,
            p_c,
            curve_n_max: at_least("curve-n-max", self.curve_n_max.or(f.curve_n_max).unwrap_or(1000), 10)?,
            eta_max: at_least("eta-max", self.eta_max.or(f.eta_max).unwrap_or(20), 1)?,
            k_values,
        })
    }
}
