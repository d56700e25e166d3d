//! Synchronous-round simulation of secure cluster formation.
//!
//! Round 1: every ordinary sensor broadcasts `JOIN_REQ` under its individual
//! key. Round 2: every dominator broadcasts `JOIN_APRV` under its group key,
//! listing the requests it could open. Round 3: sensors left without a
//! dominator flood `GD_ERR` toward the base station, and dominators that
//! overheard them send `ORP_ERR`. Round 4: the base station adopts each
//! orphan into a reporting neighbor group, promotes it to `GDos` if no
//! dominator is in range, or marks it unreachable if its flood never reached
//! the base station.
//!
//! The base station is reached only through dominators, so a flood gets there
//! iff it touches at least one dominator.

mod envelope;
mod membership;
mod placement;

pub mod adversary;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub use envelope::{CryptoError, Envelope, KeyRing, MessageKind, Party};
pub use membership::{Admission, Candidate, DenyReason, JoinOutcome, LeaveOutcome};
pub use placement::{deploy, Placement};

use crate::domsets::{self, VertexSet};
use crate::graph::{Graph, NodeId};
use crate::keying::{
    BaseStationVault, DeploymentPlan, GroupId, Key, KeyGenerator, KeyId, KeyingError, Rank,
};
use crate::udg::UnitDiskGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("plan covers {plan} nodes but the graph has {graph}")]
    SizeMismatch { plan: usize, graph: usize },
    #[error("no live group {0}")]
    UnknownGroup(GroupId),
    #[error("node {0} is not an active group member")]
    UnknownNode(NodeId),
    #[error("node {0} is a dominator; dominator departure is handled by revocation")]
    DominatorLeave(NodeId),
    #[error("node {0} is already an active member")]
    AlreadyMember(NodeId),
    #[error(transparent)]
    Keying(#[from] KeyingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeStatus {
    Active,
    Unreachable,
    Departed,
    Revoked,
    /// Provisioned by the base station but not yet deployed.
    Spare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrphanResolution {
    Adopted(NodeId),
    Promoted,
    Unreachable,
}

impl fmt::Display for OrphanResolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrphanResolution::Adopted(gd) => write!(f, "ADOPTED({gd})"),
            OrphanResolution::Promoted => f.write_str("PROMOTED"),
            OrphanResolution::Unreachable => f.write_str("UNREACHABLE"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrphanEvent {
    pub node: NodeId,
    pub resolution: OrphanResolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RekeyCause {
    Join(NodeId),
    Leave(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RekeyRecord {
    pub group: GroupId,
    pub old_key: KeyId,
    pub new_key: KeyId,
    pub cause: RekeyCause,
}

/// Outcome of formation plus later membership changes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClusterMap {
    pub ranks: BTreeMap<NodeId, Rank>,
    /// Dominator of every live node; dominators map to themselves.
    pub dominator_of: BTreeMap<NodeId, NodeId>,
    /// Dominated nodes bridging to foreign dominators, with those dominators.
    pub mediators: BTreeMap<NodeId, BTreeSet<NodeId>>,
    pub orphan_events: Vec<OrphanEvent>,
    pub rekey_log: Vec<RekeyRecord>,
}

impl ClusterMap {
    /// Live nodes ranked GD or GDos.
    pub fn dominator_set(&self) -> VertexSet {
        self.dominator_of
            .iter()
            .filter(|(n, d)| n == d)
            .map(|(&n, _)| n)
            .collect()
    }

    pub fn is_mediator(&self, node: NodeId) -> bool {
        self.mediators.contains_key(&node)
    }

    pub fn orphan_resolution(&self, node: NodeId) -> Option<OrphanResolution> {
        self.orphan_events
            .iter()
            .find(|e| e.node == node)
            .map(|e| e.resolution)
    }

    pub fn orphan_count(&self, pred: impl Fn(&OrphanResolution) -> bool) -> usize {
        self.orphan_events.iter().filter(|e| pred(&e.resolution)).count()
    }
}

/// One transmission: `transmitter` sends `envelope` to `receivers`. For flood
/// relays the transmitter differs from the envelope's originator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub round: u32,
    pub transmitter: Party,
    pub envelope: Envelope,
    pub receivers: Vec<Party>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditRecord {
    JoinDenied {
        node: NodeId,
        group: GroupId,
        reason: DenyReason,
    },
    LeaveUnknown(NodeId),
    LeaveByDominator(NodeId),
    GroupRevoked(GroupId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct NodeState {
    rank: Rank,
    status: NodeStatus,
    group: Option<GroupId>,
    individual_key: Option<KeyId>,
    group_key: Option<KeyId>,
    ring: KeyRing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct GroupState {
    dominator: NodeId,
    /// Subordinates currently attached to the dominator.
    roster: BTreeSet<NodeId>,
    /// Nodes whose individual key the dominator holds.
    access: BTreeSet<NodeId>,
    revoked: bool,
}

/// Live network state: node key rings, groups, base-station vault, cluster
/// map, message trace.
#[derive(Debug, Clone)]
pub struct Network {
    graph: Graph,
    nodes: Vec<NodeState>,
    groups: BTreeMap<GroupId, GroupState>,
    vault: BaseStationVault,
    revoked_keys: BTreeSet<KeyId>,
    keygen: KeyGenerator,
    nonce: u64,
    round: u32,
    cluster: ClusterMap,
    trace: Vec<TraceEvent>,
    grants: BTreeSet<(NodeId, KeyId)>,
    audit: Vec<AuditRecord>,
}

/// Runs formation on a deployed unit-disk graph.
pub fn run_formation(g: &UnitDiskGraph, plan: &DeploymentPlan, seed: u64) -> Result<Network, ProtocolError> {
    Network::form(g.graph(), plan, seed)
}

pub(crate) fn encode_ids(ids: &[NodeId]) -> Vec<u8> {
    ids.iter().flat_map(|&i| (i as u64).to_be_bytes()).collect()
}

pub(crate) fn decode_ids(bytes: &[u8]) -> Vec<NodeId> {
    bytes
        .chunks_exact(8)
        .map(|c| u64::from_be_bytes(c.try_into().expect("8-byte chunk")) as NodeId)
        .collect()
}

impl Network {
    pub fn form(graph: &Graph, plan: &DeploymentPlan, seed: u64) -> Result<Self, ProtocolError> {
        if plan.node_count() != graph.node_count() {
            return Err(ProtocolError::SizeMismatch {
                plan: plan.node_count(),
                graph: graph.node_count(),
            });
        }
        let mut keygen = KeyGenerator::new(plan.key_len_bits(), seed, "protocol/keys")?;
        let mut nodes = Vec::with_capacity(plan.node_count());
        let mut grants = BTreeSet::new();
        let mut cluster = ClusterMap::default();
        for g in plan.groups() {
            keygen.reserve(g.group_key.id())?;
            for k in g.individual_keys.values() {
                keygen.reserve(k.id())?;
            }
        }
        for node in 0..plan.node_count() {
            let rank = plan.rank_of(node).expect("plan covers every node");
            let group = plan.group_of(node);
            let record = plan.group(group.expect("grouped")).expect("group exists");
            let mut ring = KeyRing::new();
            for k in plan.keys_of(node) {
                grants.insert((node, k.id()));
                ring.insert(k.clone());
            }
            nodes.push(NodeState {
                rank,
                status: NodeStatus::Active,
                group,
                individual_key: record.individual_keys.get(&node).map(Key::id),
                group_key: Some(record.group_key.id()),
                ring,
            });
            cluster.ranks.insert(node, rank);
        }
        let groups = plan
            .groups()
            .iter()
            .map(|g| {
                cluster.dominator_of.insert(g.dominator, g.dominator);
                let state = GroupState {
                    dominator: g.dominator,
                    roster: BTreeSet::new(),
                    access: g.members.iter().copied().collect(),
                    revoked: false,
                };
                (g.id, state)
            })
            .collect();

        let mut net = Self {
            graph: graph.clone(),
            nodes,
            groups,
            vault: plan.vault(),
            revoked_keys: BTreeSet::new(),
            keygen,
            nonce: 0,
            round: 0,
            cluster,
            trace: Vec::new(),
            grants,
            audit: Vec::new(),
        };
        net.formation_rounds()?;
        Ok(net)
    }

    fn formation_rounds(&mut self) -> Result<(), ProtocolError> {
        let ordinary: Vec<NodeId> = (0..self.nodes.len())
            .filter(|&v| self.nodes[v].rank == Rank::Os)
            .collect();
        let dominators: Vec<NodeId> = (0..self.nodes.len())
            .filter(|&v| self.nodes[v].rank == Rank::Gd)
            .collect();

        // Round 1: join requests.
        self.round = 1;
        let mut approvals: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        let mut overheard: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for &s in &ordinary {
            let key = self.individual_key(s).clone();
            let receivers = self.graph.neighbors(s).to_vec();
            let env = self.emit(&key, Party::Node(s), MessageKind::JoinReq, &encode_ids(&[s]), &receivers);
            for r in receivers {
                if self.nodes[r].rank != Rank::Gd {
                    continue;
                }
                let gid = self.nodes[r].group.expect("dominator has a group");
                let opened = self.nodes[r].ring.open(&env).ok();
                if self.groups[&gid].access.contains(&s) && opened.as_deref() == Some(&encode_ids(&[s])[..]) {
                    approvals.entry(r).or_default().push(s);
                } else {
                    overheard.entry(r).or_default().insert(s);
                }
            }
        }

        // Round 2: approvals, also announcing each dominator's presence.
        self.round = 2;
        let mut foreign: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for &g in &dominators {
            let approved = approvals.remove(&g).unwrap_or_default();
            let key = self.group_key(g).clone();
            let receivers = self.graph.neighbors(g).to_vec();
            let env = self.emit(&key, Party::Node(g), MessageKind::JoinAprv, &encode_ids(&approved), &receivers);
            for r in receivers {
                if self.nodes[r].rank != Rank::Os {
                    continue;
                }
                match self.nodes[r].ring.open(&env) {
                    Ok(pt) if decode_ids(&pt).contains(&r) => {
                        self.cluster.dominator_of.insert(r, g);
                        let gid = self.nodes[g].group.expect("dominator has a group");
                        self.groups.get_mut(&gid).expect("live group").roster.insert(r);
                    }
                    Ok(_) => {}
                    Err(_) => {
                        foreign.entry(r).or_default().insert(g);
                    }
                }
            }
        }

        // Round 3: orphans flood GD_ERR; adjacent dominators report ORP_ERR.
        self.round = 3;
        let orphans: Vec<NodeId> = ordinary
            .iter()
            .copied()
            .filter(|s| !self.cluster.dominator_of.contains_key(s))
            .collect();
        let mut gd_err: BTreeMap<NodeId, Envelope> = BTreeMap::new();
        let mut orp_err: BTreeMap<NodeId, Vec<Envelope>> = BTreeMap::new();
        for &s in &orphans {
            let seen: Vec<NodeId> = foreign.get(&s).map(|f| f.iter().copied().collect()).unwrap_or_default();
            let key = self.individual_key(s).clone();
            let env = Envelope::seal(&key, Party::Node(s), MessageKind::GdErr, &encode_ids(&seen), self.next_nonce());
            if let Some(gateway) = self.flood(s, &env) {
                self.record(Party::Node(gateway), env.clone(), vec![Party::Bs]);
                gd_err.insert(s, env);
            }
            for &g in self.graph.neighbors(s).to_vec().iter() {
                if self.nodes[g].rank == Rank::Gd {
                    let key = self.group_key(g).clone();
                    let report = self.emit_to_bs(&key, Party::Node(g), MessageKind::OrpErr, &encode_ids(&[s]));
                    orp_err.entry(s).or_default().push(report);
                }
            }
        }

        // Round 4: base-station verdicts.
        self.round = 4;
        for &s in &orphans {
            let resolution = match gd_err.get(&s) {
                None => {
                    self.nodes[s].status = NodeStatus::Unreachable;
                    OrphanResolution::Unreachable
                }
                Some(env) => {
                    let claimed = self
                        .vault
                        .individual_key(s)
                        .and_then(|k| env.open_with(k).ok())
                        .is_some();
                    debug_assert!(claimed, "GD_ERR from a provisioned node always opens");
                    let reporters: Vec<NodeId> = orp_err
                        .get(&s)
                        .map(|reports| {
                            reports
                                .iter()
                                .filter_map(|r| self.bs_open(r).map(|pt| (r.sender, pt)))
                                .filter(|(_, pt)| decode_ids(pt) == [s])
                                .filter_map(|(sender, _)| match sender {
                                    Party::Node(g) => Some(g),
                                    Party::Bs => None,
                                })
                                .collect()
                        })
                        .unwrap_or_default();
                    match reporters
                        .iter()
                        .copied()
                        .min_by_key(|&g| (self.subordinate_count(g), g))
                    {
                        Some(adopter) => {
                            self.adopt(s, adopter);
                            OrphanResolution::Adopted(adopter)
                        }
                        None => {
                            self.promote(s)?;
                            OrphanResolution::Promoted
                        }
                    }
                }
            };
            self.cluster.orphan_events.push(OrphanEvent { node: s, resolution });
        }

        // Mediators: only nodes confirmed in some other group count.
        let mut bridges: Vec<(NodeId, NodeId)> = Vec::new();
        for (&g, heard) in &overheard {
            bridges.extend(heard.iter().map(|&s| (s, g)));
        }
        for (&s, doms) in &foreign {
            bridges.extend(doms.iter().map(|&g| (s, g)));
        }
        for (s, g) in bridges {
            let own = self.cluster.dominator_of.get(&s).copied();
            if matches!(own, Some(d) if d != g && d != s) && self.cluster.dominator_of.get(&g) == Some(&g) {
                self.cluster.mediators.entry(s).or_default().insert(g);
            }
        }
        Ok(())
    }

    /// Duplicate-suppressed BFS flood from `origin`. Every reached node relays
    /// once. Returns the first dominator reached, which forwards to the BS.
    fn flood(&mut self, origin: NodeId, env: &Envelope) -> Option<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        seen[origin] = true;
        let mut queue = VecDeque::from([origin]);
        let mut gateway = None;
        while let Some(u) = queue.pop_front() {
            if u != origin && gateway.is_none() && self.cluster.dominator_of.get(&u) == Some(&u) {
                gateway = Some(u);
            }
            let receivers: Vec<NodeId> = self.graph.neighbors(u).to_vec();
            self.record(
                Party::Node(u),
                env.clone(),
                receivers.iter().map(|&r| Party::Node(r)).collect(),
            );
            for r in receivers {
                if !seen[r] {
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
        gateway
    }

    fn adopt(&mut self, orphan: NodeId, adopter: NodeId) {
        let gid = self.nodes[adopter].group.expect("dominator has a group");
        let orphan_key = self.individual_key(orphan).clone();
        let adopter_group_key = self.group_key(adopter).clone();

        let mut payload = encode_ids(&[orphan]);
        payload.extend_from_slice(orphan_key.secret());
        let cmd = self.emit(&adopter_group_key, Party::Bs, MessageKind::Adopt, &payload, &[adopter]);
        let opened = self.nodes[adopter].ring.open(&cmd).expect("adopter holds its group key");
        let delivered = Key::from_secret(opened[8..].to_vec());
        self.grant(adopter, delivered);
        let group = self.groups.get_mut(&gid).expect("live group");
        group.access.insert(orphan);
        group.roster.insert(orphan);

        let grant = self.emit(
            &orphan_key,
            Party::Node(adopter),
            MessageKind::KeyGrant,
            adopter_group_key.secret(),
            &[orphan],
        );
        let opened = self.nodes[orphan].ring.open(&grant).expect("orphan holds its individual key");
        self.install_group_key(orphan, gid, Key::from_secret(opened));
        self.cluster.dominator_of.insert(orphan, adopter);
    }

    fn promote(&mut self, node: NodeId) -> Result<(), ProtocolError> {
        let gid = GroupId(self.groups.keys().next_back().map_or(0, |g| g.0 + 1));
        let fresh = self.keygen.generate()?;
        self.vault.group_keys.insert(gid, fresh.clone());
        let ik = self.individual_key(node).clone();
        let cmd = self.emit(&ik, Party::Bs, MessageKind::Promote, fresh.secret(), &[node]);
        let opened = self.nodes[node].ring.open(&cmd).expect("node holds its individual key");
        self.groups.insert(
            gid,
            GroupState {
                dominator: node,
                roster: BTreeSet::new(),
                access: BTreeSet::new(),
                revoked: false,
            },
        );
        self.install_group_key(node, gid, Key::from_secret(opened));
        self.nodes[node].rank = Rank::GdOs;
        self.cluster.ranks.insert(node, Rank::GdOs);
        self.cluster.dominator_of.insert(node, node);
        Ok(())
    }

    /// Replaces the node's group key (dropping the previous one) and moves it
    /// into `group`.
    fn install_group_key(&mut self, node: NodeId, group: GroupId, key: Key) {
        let st = &mut self.nodes[node];
        if let Some(old) = st.group_key.take() {
            st.ring.remove(old);
        }
        st.group_key = Some(key.id());
        st.group = Some(group);
        self.grant(node, key);
    }

    fn grant(&mut self, node: NodeId, key: Key) {
        self.grants.insert((node, key.id()));
        self.nodes[node].ring.insert(key);
    }

    fn next_nonce(&mut self) -> [u8; 12] {
        self.nonce += 1;
        let mut n = [0u8; 12];
        n[4..].copy_from_slice(&self.nonce.to_be_bytes());
        n
    }

    fn record(&mut self, transmitter: Party, envelope: Envelope, receivers: Vec<Party>) {
        self.trace.push(TraceEvent {
            round: self.round,
            transmitter,
            envelope,
            receivers,
        });
    }

    /// Seals and records one transmission. An empty receiver list means the
    /// base station.
    fn emit(&mut self, key: &Key, sender: Party, kind: MessageKind, payload: &[u8], to: &[NodeId]) -> Envelope {
        let env = Envelope::seal(key, sender, kind, payload, self.next_nonce());
        self.record(sender, env.clone(), to.iter().map(|&r| Party::Node(r)).collect());
        env
    }

    fn emit_to_bs(&mut self, key: &Key, sender: Party, kind: MessageKind, payload: &[u8]) -> Envelope {
        let env = Envelope::seal(key, sender, kind, payload, self.next_nonce());
        self.record(sender, env.clone(), vec![Party::Bs]);
        env
    }

    fn bs_open(&self, env: &Envelope) -> Option<Vec<u8>> {
        if self.revoked_keys.contains(&env.key_fingerprint) {
            return None;
        }
        self.vault
            .find(env.key_fingerprint)
            .and_then(|k| env.open_with(k).ok())
    }

    fn individual_key(&self, node: NodeId) -> &Key {
        let st = &self.nodes[node];
        st.ring
            .get(st.individual_key.expect("ordinary sensor has an individual key"))
            .expect("individual key held")
    }

    fn group_key(&self, node: NodeId) -> &Key {
        let st = &self.nodes[node];
        st.ring
            .get(st.group_key.expect("node has a group key"))
            .expect("group key held")
    }

    fn subordinate_count(&self, dominator: NodeId) -> usize {
        self.nodes[dominator]
            .group
            .and_then(|g| self.groups.get(&g))
            .map_or(0, |g| g.roster.len())
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn cluster_map(&self) -> &ClusterMap {
        &self.cluster
    }

    pub fn dominator_set(&self) -> VertexSet {
        self.cluster.dominator_set()
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn audit_log(&self) -> &[AuditRecord] {
        &self.audit
    }

    pub fn vault(&self) -> &BaseStationVault {
        &self.vault
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn ring(&self, node: NodeId) -> Option<&KeyRing> {
        self.nodes.get(node).map(|n| &n.ring)
    }

    pub fn status(&self, node: NodeId) -> Option<NodeStatus> {
        self.nodes.get(node).map(|n| n.status)
    }

    pub fn rank(&self, node: NodeId) -> Option<Rank> {
        self.nodes.get(node).map(|n| n.rank)
    }

    pub fn group_of(&self, node: NodeId) -> Option<GroupId> {
        self.nodes.get(node).and_then(|n| n.group)
    }

    pub fn individual_key_id(&self, node: NodeId) -> Option<KeyId> {
        self.nodes.get(node).and_then(|n| n.individual_key)
    }

    /// Current key of a live group.
    pub fn group_key_id(&self, group: GroupId) -> Option<KeyId> {
        let g = self.groups.get(&group).filter(|g| !g.revoked)?;
        self.nodes[g.dominator].group_key
    }

    pub fn group_dominator(&self, group: GroupId) -> Option<NodeId> {
        self.groups.get(&group).filter(|g| !g.revoked).map(|g| g.dominator)
    }

    /// Subordinates attached to a live group's dominator.
    pub fn group_roster(&self, group: GroupId) -> Option<Vec<NodeId>> {
        self.groups
            .get(&group)
            .filter(|g| !g.revoked)
            .map(|g| g.roster.iter().copied().collect())
    }

    pub fn live_groups(&self) -> Vec<GroupId> {
        self.groups
            .iter()
            .filter(|(_, g)| !g.revoked)
            .map(|(&id, _)| id)
            .collect()
    }

    /// Every (node, key) pair ever handed out by pre-distribution, the base
    /// station, or a dominator.
    pub fn grants(&self) -> &BTreeSet<(NodeId, KeyId)> {
        &self.grants
    }

    pub fn revoked_keys(&self) -> &BTreeSet<KeyId> {
        &self.revoked_keys
    }
}

/// Invariant check of a formation outcome against the proximity graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Soundness {
    /// Dominators dominate every live graph node.
    pub dominating: bool,
    /// Live nodes whose recorded dominator is neither themselves nor adjacent.
    pub detached: Vec<NodeId>,
    /// Mediators not adjacent to their own and every bridged dominator.
    pub bad_mediators: Vec<NodeId>,
    /// Whether the dominator set is a WCDS of the whole proximity graph.
    pub wcds: bool,
}

impl Soundness {
    pub fn holds(&self) -> bool {
        self.dominating && self.detached.is_empty() && self.bad_mediators.is_empty()
    }
}

pub fn check_soundness(graph: &Graph, cm: &ClusterMap) -> Soundness {
    let live: Vec<NodeId> = cm
        .dominator_of
        .keys()
        .copied()
        .filter(|&v| v < graph.node_count())
        .collect();
    let (sub, map) = graph.induced(&live);
    let doms: VertexSet = (0..map.len())
        .filter(|&i| cm.dominator_of.get(&map[i]) == Some(&map[i]))
        .collect();
    let dominating = domsets::is_dominating(&sub, &doms).unwrap_or(false);
    let detached = live
        .iter()
        .copied()
        .filter(|&v| {
            let d = cm.dominator_of[&v];
            d != v && (d >= graph.node_count() || !graph.has_edge(v, d))
        })
        .collect();
    let bad_mediators = cm
        .mediators
        .iter()
        .filter(|(&s, bridged)| {
            let Some(&own) = cm.dominator_of.get(&s) else {
                return true;
            };
            own == s
                || bridged.is_empty()
                || !graph.has_edge(s, own)
                || bridged.iter().any(|&g| {
                    g == own || !graph.has_edge(s, g) || cm.dominator_of.get(&g) != Some(&g)
                })
        })
        .map(|(&s, _)| s)
        .collect();
    let all: VertexSet = cm.dominator_set().iter().filter(|&v| v < graph.node_count()).collect();
    let wcds = domsets::is_wcds(graph, &all).unwrap_or(false);
    Soundness {
        dominating,
        detached,
        bad_mediators,
        wcds,
    }
}

#[cfg(test)]
mod tests;
