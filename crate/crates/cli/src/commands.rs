use std::fs::{self, File};
use std::path::Path;

use anyhow::{Context, Result};
use dsn_cluster::analysis::{
    connectivity_curves, ideal_domset_size, storage_curves, summarize, sweep_domset_sizes, CellOutcome,
    ExperimentRow, SweepConfig,
};
use dsn_cluster::export::{read_graph, write_cluster_map, write_graph, write_plan, write_rows, write_trace};
use dsn_cluster::keying::build_plan;
use dsn_cluster::protocol::{check_soundness, deploy, run_formation, OrphanResolution};
use dsn_cluster::udg::radius_for_expected_degree;
use dsn_cluster::{Placement, UnitDiskGraph};

use crate::config::{Analyze, Field, Form, Generate, PlacementArg, Sweep, SweepSettings};
use crate::plot::{self, Panel, Series};

/// Files are collected in memory and written only once everything succeeded.
struct Outputs(Vec<(&'static str, Vec<u8>)>);

impl Outputs {
    fn new() -> Self {
        Self(Vec::new())
    }

    fn add(&mut self, name: &'static str, bytes: Vec<u8>) {
        self.0.push((name, bytes));
    }

    fn write(self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for (name, bytes) in self.0 {
            let path = dir.join(name);
            fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
        }
        Ok(())
    }
}

fn radius(field: &Field, n: usize, given: Option<f64>) -> Result<f64> {
    match given {
        Some(r) => Ok(r),
        None => Ok(radius_for_expected_degree(n, field.width, field.height, field.avg_degree)?),
    }
}

fn graph_files(udg: &UnitDiskGraph, out: &mut Outputs) -> Result<()> {
    let (mut nodes, mut edges) = (Vec::new(), Vec::new());
    write_graph(udg, &mut nodes, &mut edges)?;
    out.add("nodes.csv", nodes);
    out.add("edges.csv", edges);
    Ok(())
}

pub fn generate(p: Generate) -> Result<()> {
    let r = radius(&p.field, p.n, p.radius)?;
    let udg = UnitDiskGraph::generate_uniform(p.n, p.field.width, p.field.height, r, p.out.seed)?;
    let mut out = Outputs::new();
    graph_files(&udg, &mut out)?;
    out.write(&p.out.out_dir)?;
    println!(
        "n={} edges={} avg_degree={:.3} connected={} radius={}",
        udg.n(),
        udg.graph().edge_count(),
        udg.average_degree(),
        udg.is_connected(),
        r
    );
    Ok(())
}

fn placement(kind: PlacementArg, rho: f64) -> Placement {
    match kind {
        PlacementArg::Clustered => Placement::Clustered { rho },
        PlacementArg::Uniform => Placement::Uniform,
    }
}

pub fn form(p: Form) -> Result<()> {
    let seed = p.out.seed;
    let (udg, plan) = match &p.graph_dir {
        Some(dir) => {
            let open = |name: &str| {
                let path = dir.join(name);
                File::open(&path).with_context(|| format!("cannot open {}", path.display()))
            };
            let udg = read_graph(open("nodes.csv")?, open("edges.csv")?, p.radius.expect("validated"))?;
            let plan = build_plan(udg.n(), p.eta, p.k, seed)?;
            (udg, plan)
        }
        None => {
            let r = radius(&p.field, p.n, p.radius)?;
            let plan = build_plan(p.n, p.eta, p.k, seed)?;
            let positions = deploy(&plan, placement(p.placement, p.rho * r), p.field.width, p.field.height, seed);
            (UnitDiskGraph::from_positions(positions, r)?, plan)
        }
    };
    let net = run_formation(&udg, &plan, seed)?;
    let cm = net.cluster_map();
    let sound = check_soundness(udg.graph(), cm);

    let mut out = Outputs::new();
    graph_files(&udg, &mut out)?;
    let mut buf = Vec::new();
    write_plan(&plan, &mut buf)?;
    out.add("plan.csv", buf);
    let mut buf = Vec::new();
    write_cluster_map(cm, &mut buf)?;
    out.add("cluster_map.csv", buf);
    let mut buf = Vec::new();
    write_trace(net.trace(), &mut buf)?;
    out.add("trace.csv", buf);
    out.write(&p.out.out_dir)?;

    println!(
        "dominators={} ideal={} wcds_valid={} sound={}",
        net.dominator_set().len(),
        ideal_domset_size(udg.n(), p.eta),
        sound.wcds,
        sound.holds()
    );
    println!(
        "orphans adopted={} promoted={} unreachable={}",
        cm.orphan_count(|r| matches!(r, OrphanResolution::Adopted(_))),
        cm.orphan_count(|r| *r == OrphanResolution::Promoted),
        cm.orphan_count(|r| *r == OrphanResolution::Unreachable)
    );
    println!("mediators={}", cm.mediators.len());
    Ok(())
}

fn sweep_config(s: &SweepSettings, field: &Field, n_values: Vec<usize>, base_seed: u64) -> SweepConfig {
    SweepConfig {
        n_values,
        avg_degree: field.avg_degree,
        eta: s.eta,
        placement: placement(s.placement, s.rho),
        seeds: s.seeds,
        base_seed,
        width: field.width,
        height: field.height,
        key_bits: s.k,
    }
}

fn rows(cells: &[CellOutcome]) -> Vec<ExperimentRow> {
    cells.iter().map(|c| c.row.clone()).collect()
}

fn csv<T: serde::Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    Ok(buf)
}

fn print_summary(label: &str, cells: &[CellOutcome]) {
    let unsound = cells.iter().filter(|c| !c.soundness.holds()).count();
    println!("{label}: {} runs, {unsound} unsound", cells.len());
    for s in summarize(&rows(cells)) {
        println!(
            "  n={:<4} ours={:7.2} greedy_I={:7.2} greedy_II={:7.2} wcds_valid={:.2}",
            s.n, s.mean_ours, s.mean_greedy_i, s.mean_greedy_ii, s.wcds_valid_fraction
        );
    }
}

pub fn sweep(p: Sweep) -> Result<()> {
    let cfg = sweep_config(&p.sweep, &p.field, p.n_values, p.out.seed);
    let cells = sweep_domset_sizes(&cfg)?;
    let rows = rows(&cells);
    let mut out = Outputs::new();
    out.add("sweep.csv", csv(&rows)?);
    out.add("sweep_summary.csv", csv(&summarize(&rows))?);
    out.write(&p.out.out_dir)?;
    print_summary(&format!("avg degree {}", cfg.avg_degree), &cells);
    Ok(())
}

fn domset_panel(title: String, rows: &[ExperimentRow]) -> Panel {
    let summary = summarize(rows);
    let series = |label: &str, f: fn(&dsn_cluster::analysis::SweepSummary) -> f64| Series {
        label: label.into(),
        points: summary.iter().map(|s| (s.n as f64, f(s))).collect(),
    };
    Panel {
        title,
        x_label: "number of vertices".into(),
        y_label: "size of dominating set".into(),
        series: vec![
            series("ours", |s| s.mean_ours),
            series("greedy I", |s| s.mean_greedy_i),
            series("greedy II", |s| s.mean_greedy_ii),
        ],
    }
}

pub fn analyze(p: Analyze) -> Result<()> {
    let s = &p.sweep;
    let mut out = Outputs::new();

    let keys = storage_curves(&(20..=200).step_by(20).collect::<Vec<_>>(), &[s.eta], s.k);
    out.add("fig9_keys.csv", csv(&keys)?);
    let fig9 = Panel {
        title: format!("distinct keys (eta = {}, k = {})", s.eta, s.k),
        x_label: "number of sensors".into(),
        y_label: "distinct keys".into(),
        series: vec![Series {
            label: "keys".into(),
            points: keys.iter().map(|r| (r.n as f64, r.distinct_keys as f64)).collect(),
        }],
    };

    let etas: Vec<usize> = (1..=p.eta_max).collect();
    let storage: Vec<_> = p.k_values.iter().flat_map(|&k| storage_curves(&[100], &etas, k)).collect();
    out.add("fig10_storage.csv", csv(&storage)?);
    let fig10 = Panel {
        title: "storage per group dominator".into(),
        x_label: "eta".into(),
        y_label: "bits".into(),
        series: p
            .k_values
            .iter()
            .map(|&k| Series {
                label: format!("k = {k}"),
                points: storage
                    .iter()
                    .filter(|r| r.k == k)
                    .map(|r| (r.eta as f64, r.gd_bits as f64))
                    .collect(),
            })
            .collect(),
    };

    let field = |avg_degree| Field {
        width: 500.0,
        height: 500.0,
        avg_degree,
    };
    let six = sweep_domset_sizes(&sweep_config(s, &field(6.0), (20..=200).step_by(20).collect(), p.out.seed))?;
    let twelve = sweep_domset_sizes(&sweep_config(s, &field(12.0), (40..=200).step_by(20).collect(), p.out.seed))?;
    let (six_rows, twelve_rows) = (rows(&six), rows(&twelve));
    let all: Vec<ExperimentRow> = six_rows.iter().chain(&twelve_rows).cloned().collect();
    out.add("fig11_domsets.csv", csv(&all)?);
    let fig11 = [
        domset_panel("average degree 6".into(), &six_rows),
        domset_panel("average degree 12".into(), &twelve_rows),
    ];

    let curve_n: Vec<usize> = (10..=p.curve_n_max).step_by(10).collect();
    let conn = connectivity_curves(&curve_n, &p.p_c)?;
    out.add("fig12_connectivity.csv", csv(&conn)?);
    let fig12 = Panel {
        title: "expected degree of a GD".into(),
        x_label: "number of clusters".into(),
        y_label: "d".into(),
        series: p
            .p_c
            .iter()
            .map(|&pc| Series {
                label: format!("P_c = {pc}"),
                points: conn
                    .iter()
                    .filter(|r| r.p_c == pc && r.in_range)
                    .map(|r| (r.n as f64, r.d))
                    .collect(),
            })
            .collect(),
    };

    out.add("fig9.svg", plot::render(&[fig9])?.into_bytes());
    out.add("fig10.svg", plot::render(&[fig10])?.into_bytes());
    out.add("fig11.svg", plot::render(&fig11)?.into_bytes());
    out.add("fig12.svg", plot::render(&[fig12])?.into_bytes());
    out.write(&p.out.out_dir)?;

    print_summary("avg degree 6", &six);
    print_summary("avg degree 12", &twelve);
    for r in conn.iter().filter(|r| r.n == 100) {
        println!("n=100 p_c={} p={:.8} d={:.6}", r.p_c, r.p, r.d);
    }
    Ok(())
}
