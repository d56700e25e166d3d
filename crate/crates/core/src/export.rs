//! CSV import/export. Comma separated, `.` decimal point, LF line endings,
//! header row always present. No timestamps or other run-varying data.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::NodeId;
use crate::keying::DeploymentPlan;
use crate::protocol::{ClusterMap, TraceEvent};
use crate::udg::{Point, UdgError, UnitDiskGraph};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Udg(#[from] UdgError),
    #[error("node ids must be 0..n in order; found {found} at row {row}")]
    NodeOrder { row: usize, found: NodeId },
    #[error("edge list does not match the positions at radius {radius}")]
    EdgeMismatch { radius: f64 },
}

pub fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Writes any serializable rows with a header derived from field names.
pub fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<(), ExportError> {
    let mut out = csv_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeRow {
    node_id: NodeId,
    x: f64,
    y: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
struct EdgeRow {
    src: NodeId,
    dst: NodeId,
}

/// `node_id,x,y` and `src,dst` (each edge once, `src < dst`).
pub fn write_graph<N: Write, E: Write>(g: &UnitDiskGraph, nodes: N, edges: E) -> Result<(), ExportError> {
    let rows: Vec<NodeRow> = g
        .positions()
        .iter()
        .enumerate()
        .map(|(node_id, p)| NodeRow { node_id, x: p.x, y: p.y })
        .collect();
    write_rows(nodes, &rows)?;
    let rows: Vec<EdgeRow> = g.graph().edges().map(|(src, dst)| EdgeRow { src, dst }).collect();
    write_rows(edges, &rows)
}

/// Reads a graph back. The radius is not part of the files; the edge list is
/// checked against the one the positions imply.
pub fn read_graph<N: Read, E: Read>(nodes: N, edges: E, radius: f64) -> Result<UnitDiskGraph, ExportError> {
    let mut positions = Vec::new();
    for (row, rec) in csv::Reader::from_reader(nodes).deserialize::<NodeRow>().enumerate() {
        let rec = rec?;
        if rec.node_id != row {
            return Err(ExportError::NodeOrder { row, found: rec.node_id });
        }
        positions.push(Point::new(rec.x, rec.y));
    }
    let g = UnitDiskGraph::from_positions(positions, radius)?;
    let mut listed = csv::Reader::from_reader(edges)
        .deserialize::<EdgeRow>()
        .collect::<Result<Vec<_>, _>>()?;
    listed.sort();
    let derived: Vec<EdgeRow> = g.graph().edges().map(|(src, dst)| EdgeRow { src, dst }).collect();
    if listed != derived {
        return Err(ExportError::EdgeMismatch { radius });
    }
    Ok(g)
}

/// `node_id,rank,group_id,key_ids` with semicolon-joined key fingerprints.
/// Secrets never leave the process.
pub fn write_plan<W: Write>(plan: &DeploymentPlan, w: W) -> Result<(), ExportError> {
    let mut out = csv_writer(w);
    out.write_record(["node_id", "rank", "group_id", "key_ids"])?;
    for node in 0..plan.node_count() {
        let ids: Vec<String> = plan.keys_of(node).iter().map(|k| k.id().to_string()).collect();
        out.write_record([
            node.to_string(),
            plan.rank_of(node).map(|r| r.to_string()).unwrap_or_default(),
            plan.group_of(node).map(|g| g.to_string()).unwrap_or_default(),
            ids.join(";"),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `node_id,rank,dominator,is_mediator,orphan_resolution`.
pub fn write_cluster_map<W: Write>(cm: &ClusterMap, w: W) -> Result<(), ExportError> {
    let mut out = csv_writer(w);
    out.write_record(["node_id", "rank", "dominator", "is_mediator", "orphan_resolution"])?;
    for (&node, rank) in &cm.ranks {
        out.write_record([
            node.to_string(),
            rank.to_string(),
            cm.dominator_of.get(&node).map(|d| d.to_string()).unwrap_or_default(),
            cm.is_mediator(node).to_string(),
            cm.orphan_resolution(node).map(|r| r.to_string()).unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `round,sender,kind,key_fingerprint,receivers`; `sender` is the
/// transmitting party and receivers are semicolon-joined.
pub fn write_trace<W: Write>(trace: &[TraceEvent], w: W) -> Result<(), ExportError> {
    let mut out = csv_writer(w);
    out.write_record(["round", "sender", "kind", "key_fingerprint", "receivers"])?;
    for e in trace {
        let receivers: Vec<String> = e.receivers.iter().map(|r| r.to_string()).collect();
        out.write_record([
            e.round.to_string(),
            e.transmitter.to_string(),
            e.envelope.kind.to_string(),
            e.envelope.key_fingerprint.to_string(),
            receivers.join(";"),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keying::build_plan;
    use crate::protocol::run_formation;
    use proptest::prelude::*;

    #[test]
    fn graph_files_have_expected_layout() {
        let g = UnitDiskGraph::from_positions(
            vec![Point::new(0.0, 0.0), Point::new(1.5, 0.0), Point::new(0.0, 1.0)],
            1.0,
        )
        .unwrap();
        let (mut n, mut e) = (Vec::new(), Vec::new());
        write_graph(&g, &mut n, &mut e).unwrap();
        assert_eq!(String::from_utf8(n).unwrap(), "node_id,x,y\n0,0.0,0.0\n1,1.5,0.0\n2,0.0,1.0\n");
        assert_eq!(String::from_utf8(e).unwrap(), "src,dst\n0,2\n");
    }

    #[test]
    fn tampered_edges_rejected() {
        let g = UnitDiskGraph::generate_uniform(10, 10.0, 10.0, 4.0, 1).unwrap();
        let (mut n, mut e) = (Vec::new(), Vec::new());
        write_graph(&g, &mut n, &mut e).unwrap();
        assert!(matches!(
            read_graph(&n[..], &b"src,dst\n"[..], 4.0),
            Err(ExportError::EdgeMismatch { .. }) | Ok(_)
        ));
        assert!(matches!(
            read_graph(&n[..], &e[..], 0.5),
            Err(ExportError::EdgeMismatch { .. })
        ));
    }

    #[test]
    fn plan_export_hides_secrets() {
        let plan = build_plan(4, 3, 128, 7).unwrap();
        let mut buf = Vec::new();
        write_plan(&plan, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("node_id,rank,group_id,key_ids"));
        let gd = lines.next().unwrap();
        assert!(gd.starts_with("0,GD,0,"));
        assert_eq!(gd.split(',').nth(3).unwrap().split(';').count(), 4);
        let os = lines.next().unwrap();
        assert!(os.starts_with("1,Os,0,"));
        for g in plan.groups() {
            for k in g.dominator_keys() {
                let hex: String = k.secret().iter().map(|b| format!("{b:02x}")).collect();
                assert!(!text.contains(&hex));
            }
        }
    }

    #[test]
    fn cluster_map_and_trace_export() {
        let plan = build_plan(4, 1, 128, 2).unwrap();
        let g = UnitDiskGraph::from_positions(
            vec![Point::new(0.0, 0.0), Point::new(20.0, 0.0), Point::new(10.0, 0.0), Point::new(5.0, 0.0)],
            10.0,
        )
        .unwrap();
        let net = run_formation(&g, &plan, 2).unwrap();
        let mut buf = Vec::new();
        write_cluster_map(net.cluster_map(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "node_id,rank,dominator,is_mediator,orphan_resolution\n\
             0,GD,0,false,\n\
             1,Os,2,false,ADOPTED(2)\n\
             2,GD,2,false,\n\
             3,Os,2,true,\n"
        );
        let mut buf = Vec::new();
        write_trace(net.trace(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("round,sender,kind,key_fingerprint,receivers\n1,1,JOIN_REQ,"));
        assert!(text.contains(",ORP_ERR,"));
        assert!(text.lines().any(|l| l.starts_with("3,") && l.ends_with(",BS")));
    }

    proptest! {
        #[test]
        fn graph_round_trips(n in 1usize..60, seed in any::<u64>(), r in 5.0f64..80.0) {
            let g = UnitDiskGraph::generate_uniform(n, 300.0, 200.0, r, seed).unwrap();
            let (mut nb, mut eb) = (Vec::new(), Vec::new());
            write_graph(&g, &mut nb, &mut eb).unwrap();
            let back = read_graph(&nb[..], &eb[..], r).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
