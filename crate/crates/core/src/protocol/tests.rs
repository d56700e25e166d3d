use super::*;
use crate::keying::build_plan;
use crate::udg::Point;

fn udg(points: &[(f64, f64)], r: f64) -> UnitDiskGraph {
    UnitDiskGraph::from_positions(points.iter().map(|&(x, y)| Point::new(x, y)).collect(), r).unwrap()
}

#[test]
fn ideal_single_group() {
    let plan = build_plan(4, 3, 128, 1).unwrap();
    let g = udg(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)], 1.5);
    let net = run_formation(&g, &plan, 1).unwrap();
    let cm = net.cluster_map();
    assert_eq!(net.dominator_set(), VertexSet::from([0]));
    assert!(cm.orphan_events.is_empty());
    for s in 1..4 {
        assert_eq!(cm.dominator_of[&s], 0);
    }
    let sound = check_soundness(g.graph(), cm);
    assert!(sound.holds());
    assert!(sound.wcds);
}

#[test]
fn size_mismatch_rejected() {
    let plan = build_plan(3, 2, 128, 1).unwrap();
    let g = udg(&[(0.0, 0.0)], 1.0);
    assert_eq!(
        run_formation(&g, &plan, 0).unwrap_err(),
        ProtocolError::SizeMismatch { plan: 3, graph: 1 }
    );
}

/// Two groups {0,1} and {2,3}. Node 1 sits next to GD 2 but out of range of
/// its own GD 0, so it is adopted by 2. Node 3 is adjacent to both dominators
/// and becomes a mediator.
#[test]
fn orphan_adopted_by_neighbor_gd() {
    let plan = build_plan(4, 1, 128, 2).unwrap();
    let g = udg(&[(0.0, 0.0), (20.0, 0.0), (10.0, 0.0), (5.0, 0.0)], 10.0);
    let net = run_formation(&g, &plan, 2).unwrap();
    let cm = net.cluster_map();
    assert_eq!(
        cm.orphan_events,
        vec![OrphanEvent { node: 1, resolution: OrphanResolution::Adopted(2) }]
    );
    assert_eq!(cm.dominator_of[&1], 2);
    assert_eq!(net.group_of(1), Some(GroupId(1)));
    let ring: BTreeSet<_> = net.ring(1).unwrap().ids().collect();
    let expect: BTreeSet<_> = [net.individual_key_id(1).unwrap(), net.group_key_id(GroupId(1)).unwrap()].into();
    assert_eq!(ring, expect);
    assert_eq!(cm.mediators.get(&3), Some(&BTreeSet::from([0])));
    assert!(check_soundness(g.graph(), cm).holds());
}

/// Groups {0;1,2} and {3;4}. Node 2 hears GD 3 and is adopted; 1 and 4
/// hear nobody.
#[test]
fn isolated_orphans_are_unreachable() {
    let plan = build_plan(5, 2, 128, 3).unwrap();
    let g = udg(
        &[(0.0, 0.0), (100.0, 0.0), (50.0, 0.0), (40.0, 0.0), (300.0, 300.0)],
        10.0,
    );
    let net = run_formation(&g, &plan, 3).unwrap();
    let cm = net.cluster_map();
    assert_eq!(cm.orphan_resolution(2), Some(OrphanResolution::Adopted(3)));
    assert_eq!(cm.orphan_resolution(1), Some(OrphanResolution::Unreachable));
    assert_eq!(cm.orphan_resolution(4), Some(OrphanResolution::Unreachable));
    assert_eq!(net.status(1), Some(NodeStatus::Unreachable));
    assert!(!cm.dominator_of.contains_key(&1));
}

/// Path 0 - 2 - 1 in a single group. 1 hears only the Os 2 and must promote.
#[test]
fn orphan_without_gd_neighbor_is_promoted() {
    let plan = build_plan(3, 2, 128, 4).unwrap();
    let g = udg(&[(0.0, 0.0), (20.0, 0.0), (10.0, 0.0)], 10.0);
    let net = run_formation(&g, &plan, 4).unwrap();
    let cm = net.cluster_map();
    assert_eq!(cm.orphan_resolution(1), Some(OrphanResolution::Promoted));
    assert_eq!(cm.ranks[&1], Rank::GdOs);
    assert_eq!(cm.dominator_of[&1], 1);
    assert_eq!(net.dominator_set(), VertexSet::from([0, 1]));
    assert!(check_soundness(g.graph(), cm).holds());
    let gid = net.group_of(1).unwrap();
    assert_ne!(gid, GroupId(0));
    assert_eq!(net.vault().group_key(gid).map(|k| k.id()), net.group_key_id(gid));
}

/// Orphan 7 hears GD 0 (two confirmed members) and GD 3 (one); 3 adopts.
/// With equal loads the smaller id wins.
#[test]
fn adopter_is_least_loaded_then_smallest_id() {
    let plan = build_plan(8, 2, 128, 5).unwrap();
    let g = udg(
        &[
            (0.0, 0.0),
            (0.0, 5.0),
            (-5.0, 0.0),
            (15.0, 0.0),
            (15.0, 5.0),
            (200.0, 200.0),
            (400.0, 400.0),
            (7.5, -3.0),
        ],
        10.0,
    );
    let net = run_formation(&g, &plan, 5).unwrap();
    assert_eq!(net.cluster_map().orphan_resolution(7), Some(OrphanResolution::Adopted(3)));

    let plan = build_plan(6, 1, 128, 6).unwrap();
    let g = udg(
        &[(0.0, 0.0), (0.0, 4.0), (10.0, 0.0), (10.0, 4.0), (300.0, 0.0), (5.0, -3.0)],
        6.0,
    );
    let net = run_formation(&g, &plan, 6).unwrap();
    assert_eq!(net.cluster_map().orphan_resolution(5), Some(OrphanResolution::Adopted(0)));
}

#[test]
fn formation_is_deterministic() {
    let plan = build_plan(80, 7, 128, 9).unwrap();
    let pos = deploy(&plan, Placement::Uniform, 300.0, 300.0, 9);
    let g = UnitDiskGraph::from_positions(pos, 45.0).unwrap();
    let a = run_formation(&g, &plan, 9).unwrap();
    let b = run_formation(&g, &plan, 9).unwrap();
    assert_eq!(a.cluster_map(), b.cluster_map());
    assert_eq!(a.trace(), b.trace());
}

#[test]
fn uniform_placement_keeps_invariants() {
    for seed in 0..20 {
        let plan = build_plan(120, 5, 128, seed).unwrap();
        let pos = deploy(&plan, Placement::Uniform, 500.0, 500.0, seed);
        let g = UnitDiskGraph::from_positions(pos, 60.0).unwrap();
        let net = run_formation(&g, &plan, seed).unwrap();
        let s = check_soundness(g.graph(), net.cluster_map());
        assert!(s.holds(), "seed {seed}: {s:?}");
        for e in &net.cluster_map().orphan_events {
            let has = net.cluster_map().dominator_of.contains_key(&e.node);
            assert_eq!(has, e.resolution != OrphanResolution::Unreachable);
        }
        for v in 0..net.node_count() {
            for k in net.ring(v).unwrap().ids() {
                assert!(net.grants().contains(&(v, k)));
            }
        }
    }
}

#[test]
fn trace_rounds_follow_phases() {
    let plan = build_plan(4, 1, 128, 2).unwrap();
    let g = udg(&[(0.0, 0.0), (20.0, 0.0), (10.0, 0.0), (5.0, 0.0)], 10.0);
    let net = run_formation(&g, &plan, 2).unwrap();
    let kinds_in = |round: u32| -> BTreeSet<MessageKind> {
        net.trace().iter().filter(|e| e.round == round).map(|e| e.envelope.kind).collect()
    };
    assert_eq!(kinds_in(1), BTreeSet::from([MessageKind::JoinReq]));
    assert_eq!(kinds_in(2), BTreeSet::from([MessageKind::JoinAprv]));
    assert_eq!(kinds_in(3), BTreeSet::from([MessageKind::GdErr, MessageKind::OrpErr]));
    assert_eq!(kinds_in(4), BTreeSet::from([MessageKind::Adopt, MessageKind::KeyGrant]));
}
