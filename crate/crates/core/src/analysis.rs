//! Closed-form results (ideal dominator count, key storage, random-graph
//! connectivity threshold) and the experiment sweeps behind the plots.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::domsets::{self, GreedyVariant};
use crate::keying::{self, build_plan, storage_gd_bits, storage_network_bits, storage_os_bits, KeyingError};
use crate::protocol::{self, check_soundness, deploy, Placement, ProtocolError, Soundness};
use crate::udg::{radius_for_expected_degree, UdgError, UnitDiskGraph};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("need at least 2 clusters, got {0}")]
    TooFewClusters(usize),
    #[error("connectivity probability must lie strictly between 0 and 1, got {0}")]
    ProbabilityOutOfRange(f64),
    #[error("sweep needs at least one node count and one seed")]
    EmptySweep,
    #[error(transparent)]
    Udg(#[from] UdgError),
    #[error(transparent)]
    Keying(#[from] KeyingError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// Dominator count when every group is full: `⌈n / (eta + 1)⌉`.
pub fn ideal_domset_size(n: usize, eta: usize) -> usize {
    n.div_ceil(eta + 1)
}

/// High-level view: `n_clusters` groups as nodes of `G(n, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectivityQuery {
    n_clusters: usize,
    p_c: f64,
}

impl ConnectivityQuery {
    pub fn new(n_clusters: usize, p_c: f64) -> Result<Self, AnalysisError> {
        if n_clusters < 2 {
            return Err(AnalysisError::TooFewClusters(n_clusters));
        }
        if !(p_c > 0.0 && p_c < 1.0) {
            return Err(AnalysisError::ProbabilityOutOfRange(p_c));
        }
        Ok(Self { n_clusters, p_c })
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn p_c(&self) -> f64 {
        self.p_c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    /// `(ln n − ln(−ln P_c)) / n`, unclamped.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]`.
    pub p: f64,
    pub in_range: bool,
}

/// Edge probability at which `G(n, p)` is connected with probability `p_c`.
pub fn threshold_p(n: usize, p_c: f64) -> Result<Threshold, AnalysisError> {
    let q = ConnectivityQuery::new(n, p_c)?;
    let n = q.n_clusters as f64;
    let raw = (n.ln() - (-q.p_c.ln()).ln()) / n;
    let in_range = (0.0..=1.0).contains(&raw);
    Ok(Threshold {
        raw,
        p: raw.clamp(0.0, 1.0),
        in_range,
    })
}

/// Expected inter-cluster degree of a dominator, `(n − 1) · p`, using the
/// unclamped threshold.
pub fn expected_gd_degree(n: usize, p_c: f64) -> Result<f64, AnalysisError> {
    Ok((n - 1) as f64 * threshold_p(n, p_c)?.raw)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectivityRow {
    pub n: usize,
    pub p_c: f64,
    pub p: f64,
    pub d: f64,
    pub in_range: bool,
}

pub fn connectivity_curves(n_values: &[usize], p_c_values: &[f64]) -> Result<Vec<ConnectivityRow>, AnalysisError> {
    let mut rows = Vec::with_capacity(n_values.len() * p_c_values.len());
    for &p_c in p_c_values {
        for &n in n_values {
            let t = threshold_p(n, p_c)?;
            rows.push(ConnectivityRow {
                n,
                p_c,
                p: t.raw,
                d: (n - 1) as f64 * t.raw,
                in_range: t.in_range,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StorageRow {
    pub n: usize,
    pub eta: usize,
    pub k: u32,
    pub groups: usize,
    pub distinct_keys: usize,
    pub gd_bits: u64,
    pub os_bits: u64,
    pub network_bits: u64,
}

/// Key counts and storage per `(n, eta)` at key length `k`. Non-divisible
/// `n` leaves one short group, which stores only the keys it has.
pub fn storage_curves(n_values: &[usize], eta_values: &[usize], k: u32) -> Vec<StorageRow> {
    let kb = u64::from(k);
    let mut rows = Vec::new();
    for &eta in eta_values {
        for &n in n_values {
            let groups = ideal_domset_size(n, eta);
            let beta = n - groups;
            let full = n / (eta + 1);
            let network_bits = if full == groups {
                storage_network_bits(groups as u64, beta as u64, eta, kb)
            } else {
                let short = n % (eta + 1) - 1;
                storage_network_bits(full as u64, 0, eta, kb)
                    + storage_gd_bits(short, kb)
                    + beta as u64 * storage_os_bits(kb)
            };
            rows.push(StorageRow {
                n,
                eta,
                k,
                groups,
                // one group key per GD plus one individual key per Os
                distinct_keys: groups + beta,
                gd_bits: storage_gd_bits(eta, kb),
                os_bits: storage_os_bits(kb),
                network_bits,
            });
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub avg_degree: f64,
    pub eta: usize,
    pub placement: Placement,
    pub seeds: usize,
    pub base_seed: u64,
    pub width: f64,
    pub height: f64,
    pub key_bits: u32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_values: (20..=200).step_by(20).collect(),
            avg_degree: 6.0,
            eta: 9,
            placement: Placement::Clustered { rho: DEFAULT_RHO_FRACTION },
            seeds: 30,
            base_seed: 1,
            width: 500.0,
            height: 500.0,
            key_bits: keying::DEFAULT_KEY_BITS,
        }
    }
}

/// Clustered placement in sweeps takes `rho` as a fraction of the radius.
pub const DEFAULT_RHO_FRACTION: f64 = 1.0;

/// One CSV record of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub seed: u64,
    pub n: usize,
    pub eta: usize,
    pub avg_degree_target: f64,
    pub placement: String,
    pub dominators_ours: usize,
    #[serde(rename = "dominators_greedy_I")]
    pub dominators_greedy_i: usize,
    #[serde(rename = "dominators_greedy_II")]
    pub dominators_greedy_ii: usize,
    pub wcds_valid: bool,
    pub distinct_keys: usize,
    pub gd_storage_bits: u64,
    pub network_storage_bits: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub row: ExperimentRow,
    pub soundness: Soundness,
    pub radius: f64,
}

/// One sweep cell. For clustered placement `rho` in the config is read as a
/// fraction of the transmission radius.
pub fn run_cell(cfg: &SweepConfig, n: usize, seed: u64) -> Result<CellOutcome, AnalysisError> {
    let radius = radius_for_expected_degree(n, cfg.width, cfg.height, cfg.avg_degree)?;
    let placement = match cfg.placement {
        Placement::Clustered { rho } => Placement::Clustered { rho: rho * radius },
        Placement::Uniform => Placement::Uniform,
    };
    let plan = build_plan(n, cfg.eta, cfg.key_bits, seed)?;
    let positions = deploy(&plan, placement, cfg.width, cfg.height, seed);
    let udg = UnitDiskGraph::from_positions(positions, radius)?;
    let net = protocol::run_formation(&udg, &plan, seed)?;
    let soundness = check_soundness(udg.graph(), net.cluster_map());
    let row = ExperimentRow {
        seed,
        n,
        eta: cfg.eta,
        avg_degree_target: cfg.avg_degree,
        placement: placement.label().to_string(),
        dominators_ours: net.dominator_set().len(),
        dominators_greedy_i: domsets::greedy_cds_baseline(udg.graph(), GreedyVariant::I).len(),
        dominators_greedy_ii: domsets::greedy_cds_baseline(udg.graph(), GreedyVariant::II).len(),
        wcds_valid: soundness.wcds,
        distinct_keys: plan.distinct_key_count(),
        gd_storage_bits: storage_gd_bits(cfg.eta, u64::from(cfg.key_bits)),
        network_storage_bits: plan.network_storage_bits(),
    };
    Ok(CellOutcome { row, soundness, radius })
}

/// Runs every `(n, seed)` cell in parallel; results come back sorted by `n`
/// then seed regardless of scheduling.
pub fn sweep_domset_sizes(cfg: &SweepConfig) -> Result<Vec<CellOutcome>, AnalysisError> {
    if cfg.n_values.is_empty() || cfg.seeds == 0 {
        return Err(AnalysisError::EmptySweep);
    }
    let cells: Vec<(usize, u64)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| (0..cfg.seeds as u64).map(move |s| (n, cfg.base_seed + s)))
        .collect();
    cells
        .par_iter()
        .map(|&(n, seed)| run_cell(cfg, n, seed))
        .collect()
}

/// Per-`n` means of the three dominator counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub n: usize,
    pub runs: usize,
    pub mean_ours: f64,
    pub mean_greedy_i: f64,
    pub mean_greedy_ii: f64,
    pub wcds_valid_fraction: f64,
}

pub fn summarize(rows: &[ExperimentRow]) -> Vec<SweepSummary> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let sel: Vec<&ExperimentRow> = rows.iter().filter(|r| r.n == n).collect();
            let mean = |f: &dyn Fn(&ExperimentRow) -> f64| sel.iter().map(|r| f(r)).sum::<f64>() / sel.len() as f64;
            SweepSummary {
                n,
                runs: sel.len(),
                mean_ours: mean(&|r| r.dominators_ours as f64),
                mean_greedy_i: mean(&|r| r.dominators_greedy_i as f64),
                mean_greedy_ii: mean(&|r| r.dominators_greedy_ii as f64),
                wcds_valid_fraction: mean(&|r| f64::from(u8::from(r.wcds_valid))),
            }
        })
        .collect()
}
