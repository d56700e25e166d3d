use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsn-cluster"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn field(line: &str, key: &str) -> String {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing in {line:?}"))
        .to_string()
}

#[test]
fn generate_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let first = ok(&["generate", "--n", "100", "--avg-degree", "6", "--seed", "42", "--out-dir", path(&a)]);
    ok(&["generate", "--n", "100", "--avg-degree", "6", "--seed", "42", "--out-dir", path(&b)]);
    for name in ["nodes.csv", "edges.csv"] {
        assert_eq!(read(&a, name), read(&b, name), "{name}");
    }
    let nodes = String::from_utf8(read(&a, "nodes.csv")).unwrap();
    assert!(nodes.starts_with("node_id,x,y\n0,"));
    assert_eq!(nodes.lines().count(), 101);
    assert!(!nodes.contains('\r'));
    assert_eq!(field(&first, "n"), "100");
}

#[test]
fn generate_degree_twelve_lands_in_band() {
    let tmp = TempDir::new().unwrap();
    let out = ok(&["generate", "--n", "100", "--avg-degree", "12", "--seed", "42", "--out-dir", path(tmp.path())]);
    let d: f64 = field(&out, "avg_degree").parse().unwrap();
    assert!((8.0..=13.0).contains(&d), "{d}");
}

#[test]
fn zero_nodes_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["generate", "--n", "0", "--seed", "1", "--out-dir", path(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--n"));
    assert!(!tmp.path().join("nodes.csv").exists());

    let out = run(&["sweep", "--k", "100", "--out-dir", path(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--k"));

    let out = run(&["form", "--graph-dir", path(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--radius"));

    let out = run(&["analyze", "--p-c", "0.5,1.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--p-c"));
}

#[test]
fn form_on_ideal_fixture() {
    let tmp = TempDir::new().unwrap();
    let g = tmp.path().join("graph");
    fs::create_dir(&g).unwrap();
    fs::write(g.join("nodes.csv"), "node_id,x,y\n0,0.0,0.0\n1,1.0,0.0\n2,0.0,1.0\n3,-1.0,0.0\n").unwrap();
    fs::write(g.join("edges.csv"), "src,dst\n0,1\n0,2\n0,3\n1,2\n2,3\n").unwrap();
    let out_dir = tmp.path().join("out");
    let out = ok(&[
        "form", "--graph-dir", path(&g), "--radius", "1.5", "--eta", "3", "--out-dir", path(&out_dir),
    ]);
    assert!(out.contains("dominators=1 ideal=1 wcds_valid=true sound=true"), "{out}");
    assert!(out.contains("orphans adopted=0 promoted=0 unreachable=0"), "{out}");
    let cm = String::from_utf8(read(&out_dir, "cluster_map.csv")).unwrap();
    assert_eq!(
        cm,
        "node_id,rank,dominator,is_mediator,orphan_resolution\n0,GD,0,false,\n1,Os,0,false,\n2,Os,0,false,\n3,Os,0,false,\n"
    );
    let trace = String::from_utf8(read(&out_dir, "trace.csv")).unwrap();
    assert!(trace.starts_with("round,sender,kind,key_fingerprint,receivers\n"));
    let plan = String::from_utf8(read(&out_dir, "plan.csv")).unwrap();
    assert!(plan.lines().nth(1).unwrap().starts_with("0,GD,0,"));
}

#[test]
fn form_edges_must_match_radius() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("nodes.csv"), "node_id,x,y\n0,0.0,0.0\n1,1.0,0.0\n").unwrap();
    fs::write(tmp.path().join("edges.csv"), "src,dst\n").unwrap();
    let out = run(&["form", "--graph-dir", path(tmp.path()), "--radius", "2", "--eta", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("edge list"));
}

#[test]
fn clustered_form_hits_the_ideal_count() {
    let tmp = TempDir::new().unwrap();
    let out = ok(&[
        "form", "--n", "100", "--eta", "9", "--rho", "0.25", "--seed", "7", "--out-dir", path(tmp.path()),
    ]);
    assert_eq!(field(out.lines().next().unwrap(), "dominators"), "10");
}

#[test]
fn sparse_uniform_orphans_match_cluster_map() {
    let tmp = TempDir::new().unwrap();
    let out = ok(&[
        "form", "--placement", "uniform", "--n", "100", "--avg-degree", "4", "--seed", "42", "--out-dir",
        path(tmp.path()),
    ]);
    let orphans = out.lines().nth(1).unwrap();
    let promoted: usize = field(orphans, "promoted").parse().unwrap();
    let unreachable: usize = field(orphans, "unreachable").parse().unwrap();
    assert!(promoted + unreachable > 0, "{out}");

    let cm = String::from_utf8(read(tmp.path(), "cluster_map.csv")).unwrap();
    let mut seen = (0, 0);
    for line in cm.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let (node, rank, dom, resolution) = (cols[0], cols[1], cols[2], cols[4]);
        match resolution {
            "UNREACHABLE" => {
                seen.1 += 1;
                assert_eq!(dom, "", "{line}");
            }
            "PROMOTED" => {
                seen.0 += 1;
                assert_eq!((rank, dom), ("GDos", node), "{line}");
            }
            r if r.starts_with("ADOPTED(") => assert_eq!(&r[8..r.len() - 1], dom, "{line}"),
            "" => assert!(!dom.is_empty(), "{line}"),
            other => panic!("unexpected resolution {other}"),
        }
    }
    assert_eq!(seen, (promoted, unreachable));
}

#[test]
fn sweep_is_byte_identical_and_config_yields_to_flags() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "[sweep]\nseeds = 3\nn_max = 40\nseed = 5\n").unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        ok(&["sweep", "--config", path(&cfg), "--seeds", "2", "--out-dir", path(dir)]);
    }
    assert_eq!(read(&a, "sweep.csv"), read(&b, "sweep.csv"));
    assert_eq!(read(&a, "sweep_summary.csv"), read(&b, "sweep_summary.csv"));
    let csv = String::from_utf8(read(&a, "sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some(
            "seed,n,eta,avg_degree_target,placement,dominators_ours,dominators_greedy_I,dominators_greedy_II,\
             wcds_valid,distinct_keys,gd_storage_bits,network_storage_bits"
        )
    );
    let seeds_n: Vec<(String, String)> = lines
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].to_string(), c[1].to_string())
        })
        .collect();
    let expect: Vec<(String, String)> = [("5", "20"), ("6", "20"), ("5", "40"), ("6", "40")]
        .iter()
        .map(|(s, n)| (s.to_string(), n.to_string()))
        .collect();
    assert_eq!(seeds_n, expect);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[sweep]\nsedes = 3\n").unwrap();
    let out = run(&["sweep", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sedes"));
}

#[test]
fn analyze_writes_all_figures() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        ok(&["analyze", "--seeds", "3", "--curve-n-max", "200", "--out-dir", path(dir)]);
    }
    for name in [
        "fig9_keys.csv",
        "fig10_storage.csv",
        "fig11_domsets.csv",
        "fig12_connectivity.csv",
        "fig9.svg",
        "fig10.svg",
        "fig11.svg",
        "fig12.svg",
    ] {
        assert_eq!(read(&a, name), read(&b, name), "{name}");
    }

    let conn = String::from_utf8(read(&a, "fig12_connectivity.csv")).unwrap();
    assert!(conn.starts_with("n,p_c,p,d,in_range\n"));
    let row = conn.lines().find(|l| l.starts_with("100,0.999,")).unwrap();
    let d: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((d - 11.397_301_003_946_69).abs() < 1e-9, "{row}");

    let keys = String::from_utf8(read(&a, "fig9_keys.csv")).unwrap();
    let mut lines = keys.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let (ni, ki) = (
        header.iter().position(|h| *h == "n").unwrap(),
        header.iter().position(|h| *h == "distinct_keys").unwrap(),
    );
    for l in lines {
        let c: Vec<&str> = l.split(',').collect();
        assert_eq!(c[ni], c[ki], "{l}");
    }

    let fig11 = String::from_utf8(read(&a, "fig11.svg")).unwrap();
    assert!(fig11.contains("average degree 6") && fig11.contains("average degree 12"));
    assert!(fig11.contains("greedy II"));
}
