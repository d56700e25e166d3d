//! Membership changes after formation: joins (with base-station vetting of
//! unknown ids), leaves, and base-station revocation of a captured group.
//! Every join or leave rotates the group key.

use std::collections::BTreeSet;

use super::{
    decode_ids, encode_ids, AuditRecord, Envelope, MessageKind, Network, NodeState, NodeStatus, Party,
    ProtocolError, RekeyCause, RekeyRecord,
};
use crate::graph::NodeId;
use crate::keying::{GroupId, Key, KeyId, Rank};

/// A sensor asking to join: its claimed id and the key it encrypts with.
#[derive(Debug, Clone)]
pub struct Candidate {
    id: NodeId,
    key: Key,
}

impl Candidate {
    /// A candidate built outside the network, e.g. by an adversary.
    pub fn forged(id: NodeId, key: Key) -> Self {
        Self { id, key }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn key_id(&self) -> KeyId {
        self.key.id()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    /// The dominator already held the individual key.
    AccessList,
    /// The base station vouched for the id and supplied its key.
    BaseStation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenyReason {
    UnknownId,
    KeyMismatch,
    RevokedKey,
    AlreadyActive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinOutcome {
    Admitted { via: Admission, rekey: RekeyRecord },
    Denied(DenyReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeaveOutcome {
    pub rekey: RekeyRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Verdict {
    Admit(Admission),
    Deny(DenyReason),
}

impl Network {
    /// Base station provisions a spare sensor that has not been deployed. With
    /// `preload`, the target dominator receives its individual key offline, as
    /// for any pre-distributed sensor; otherwise only the base station knows it.
    pub fn provision_spare(&mut self, group: GroupId, preload: bool) -> Result<Candidate, ProtocolError> {
        let gd = self.group_dominator(group).ok_or(ProtocolError::UnknownGroup(group))?;
        let id = self.nodes.len();
        let key = self.keygen.generate()?;
        self.vault.individual_keys.insert(id, key.clone());
        self.nodes.push(NodeState {
            rank: Rank::Os,
            status: NodeStatus::Spare,
            group: None,
            individual_key: Some(key.id()),
            group_key: None,
            ring: Default::default(),
        });
        self.grant(id, key.clone());
        self.cluster.ranks.insert(id, Rank::Os);
        if preload {
            self.grant(gd, key.clone());
            self.groups.get_mut(&group).expect("live group").access.insert(id);
        }
        Ok(Candidate { id, key })
    }

    /// Decides a join request without changing any state.
    pub(crate) fn vet_join(&self, req: &Envelope, claimed: NodeId, group: GroupId) -> Result<Verdict, ProtocolError> {
        let gs = self
            .groups
            .get(&group)
            .filter(|g| !g.revoked)
            .ok_or(ProtocolError::UnknownGroup(group))?;
        let expected = encode_ids(&[claimed]);
        let active = self.nodes.get(claimed).is_some_and(|n| n.status == NodeStatus::Active);
        let opens = |pt: Result<Vec<u8>, _>| pt.is_ok_and(|p| p == expected);

        if gs.access.contains(&claimed) {
            let held = self.nodes[gs.dominator]
                .ring
                .get(self.vault.individual_key(claimed).map_or(KeyId(0), Key::id))
                .filter(|k| k.id() == req.key_fingerprint);
            if held.is_some_and(|k| opens(req.open_with(k))) {
                return Ok(if active {
                    Verdict::Deny(DenyReason::AlreadyActive)
                } else {
                    Verdict::Admit(Admission::AccessList)
                });
            }
        }
        Ok(match self.vault.individual_key(claimed) {
            None => Verdict::Deny(DenyReason::UnknownId),
            Some(k) if self.revoked_keys.contains(&k.id()) => Verdict::Deny(DenyReason::RevokedKey),
            Some(k) if !opens(req.open_with(k)) => Verdict::Deny(DenyReason::KeyMismatch),
            Some(_) if active => Verdict::Deny(DenyReason::AlreadyActive),
            Some(_) => Verdict::Admit(Admission::BaseStation),
        })
    }

    /// Runs the join exchange for `cand` toward `group`'s dominator.
    pub fn join_node(&mut self, cand: &Candidate, group: GroupId) -> Result<JoinOutcome, ProtocolError> {
        let gd = self.group_dominator(group).ok_or(ProtocolError::UnknownGroup(group))?;
        self.round += 1;
        let req = self.emit(&cand.key, Party::Node(cand.id), MessageKind::JoinReq, &encode_ids(&[cand.id]), &[gd]);
        let verdict = self.vet_join(&req, cand.id, group)?;

        if verdict != Verdict::Admit(Admission::AccessList) {
            let gk = self.group_key(gd).clone();
            self.emit_to_bs(&gk, Party::Node(gd), MessageKind::JoinFwd, &encode_ids(&[cand.id]));
        }
        let via = match verdict {
            Verdict::Deny(reason) => {
                self.audit.push(AuditRecord::JoinDenied {
                    node: cand.id,
                    group,
                    reason,
                });
                return Ok(JoinOutcome::Denied(reason));
            }
            Verdict::Admit(via) => via,
        };
        if via == Admission::BaseStation {
            let gk = self.group_key(gd).clone();
            let ik = self.vault.individual_key(cand.id).expect("vetted").clone();
            let auth = self.emit(&gk, Party::Bs, MessageKind::JoinAuth, ik.secret(), &[gd]);
            let opened = self.nodes[gd].ring.open(&auth).expect("dominator holds its group key");
            self.grant(gd, Key::from_secret(opened));
            self.groups.get_mut(&group).expect("live group").access.insert(cand.id);
        }

        let old = self.group_key(gd).clone();
        let fresh = self.keygen.generate()?;
        let to_new = self.emit(&cand.key, Party::Node(gd), MessageKind::RekeyToNew, fresh.secret(), &[cand.id]);
        let opened = self.nodes[cand.id].ring.open(&to_new).expect("newcomer holds its individual key");
        self.install_group_key(cand.id, group, Key::from_secret(opened));

        let members: Vec<NodeId> = self.groups[&group].roster.iter().copied().collect();
        if !members.is_empty() {
            let bcast = self.emit(&old, Party::Node(gd), MessageKind::RekeyBcast, fresh.secret(), &members);
            for m in members {
                let opened = self.nodes[m].ring.open(&bcast).expect("member holds the old group key");
                self.install_group_key(m, group, Key::from_secret(opened));
            }
        }
        let rekey = self.finish_rekey(group, gd, old.id(), fresh, RekeyCause::Join(cand.id));

        let st = &mut self.nodes[cand.id];
        st.status = NodeStatus::Active;
        st.rank = Rank::Os;
        self.groups.get_mut(&group).expect("live group").roster.insert(cand.id);
        self.cluster.dominator_of.insert(cand.id, gd);
        Ok(JoinOutcome::Admitted { via, rekey })
    }

    /// The member announces its departure; the dominator drops its individual
    /// key and unicasts a fresh group key to each remaining member under that
    /// member's individual key, so the leaver never sees it.
    pub fn leave_node(&mut self, node: NodeId) -> Result<LeaveOutcome, ProtocolError> {
        self.round += 1;
        let Some(st) = self.nodes.get(node).filter(|s| s.status == NodeStatus::Active) else {
            self.audit.push(AuditRecord::LeaveUnknown(node));
            return Err(ProtocolError::UnknownNode(node));
        };
        if matches!(st.rank, Rank::Gd | Rank::GdOs) {
            self.audit.push(AuditRecord::LeaveByDominator(node));
            return Err(ProtocolError::DominatorLeave(node));
        }
        let group = st.group.expect("active member has a group");
        let gd = self.groups[&group].dominator;

        let ik = self.individual_key(node).clone();
        let notice = self.emit(&ik, Party::Node(node), MessageKind::Leave, &encode_ids(&[node]), &[gd]);
        debug_assert!(self.nodes[gd].ring.open(&notice).is_ok());
        let gs = self.groups.get_mut(&group).expect("live group");
        gs.roster.remove(&node);
        gs.access.remove(&node);
        self.nodes[gd].ring.remove(ik.id());

        let old = self.group_key(gd).id();
        let fresh = self.keygen.generate()?;
        let remaining: Vec<NodeId> = self.groups[&group].roster.iter().copied().collect();
        for m in remaining {
            let mk = self.individual_key(m).clone();
            let env = self.emit(&mk, Party::Node(gd), MessageKind::RekeyUnicast, fresh.secret(), &[m]);
            let opened = self.nodes[gd].ring.open(&env).and_then(|_| self.nodes[m].ring.open(&env));
            let opened = opened.expect("member and dominator share the individual key");
            self.install_group_key(m, group, Key::from_secret(opened));
        }
        let rekey = self.finish_rekey(group, gd, old, fresh, RekeyCause::Leave(node));

        self.nodes[node].status = NodeStatus::Departed;
        self.cluster.dominator_of.remove(&node);
        self.cluster.mediators.remove(&node);
        Ok(LeaveOutcome { rekey })
    }

    fn finish_rekey(&mut self, group: GroupId, gd: NodeId, old: KeyId, fresh: Key, cause: RekeyCause) -> RekeyRecord {
        let new = fresh.id();
        self.install_group_key(gd, group, fresh.clone());
        self.vault.rotate_group_key(group, fresh);
        let record = RekeyRecord {
            group,
            old_key: old,
            new_key: new,
            cause,
        };
        self.cluster.rekey_log.push(record);
        record
    }

    /// Base-station response to a captured dominator: every key that dominator
    /// held is revoked, the nodes owning those keys are cut off, and the
    /// remaining dominators are told which ids to refuse. Returns the nodes
    /// cut off.
    pub fn revoke_group(&mut self, group: GroupId) -> Result<Vec<NodeId>, ProtocolError> {
        let gd = self.group_dominator(group).ok_or(ProtocolError::UnknownGroup(group))?;
        self.round += 1;
        let keys: BTreeSet<KeyId> = self.nodes[gd].ring.ids().collect();
        self.revoked_keys.extend(keys.iter().copied());
        if let Some(k) = self.vault.group_keys.remove(&group) {
            self.vault.retired.push(k);
        }

        let cut: Vec<NodeId> = (0..self.nodes.len())
            .filter(|&v| v == gd || self.nodes[v].individual_key.is_some_and(|k| keys.contains(&k)))
            .filter(|&v| matches!(self.nodes[v].status, NodeStatus::Active | NodeStatus::Spare | NodeStatus::Unreachable))
            .collect();
        for &v in &cut {
            self.nodes[v].status = NodeStatus::Revoked;
            self.cluster.dominator_of.remove(&v);
            self.cluster.mediators.remove(&v);
        }
        for gs in self.groups.values_mut() {
            for v in &cut {
                gs.roster.remove(v);
                gs.access.remove(v);
            }
        }
        self.groups.get_mut(&group).expect("live group").revoked = true;
        self.cluster.mediators.retain(|_, bridged| {
            bridged.remove(&gd);
            !bridged.is_empty()
        });

        for other in self.live_groups() {
            let od = self.groups[&other].dominator;
            let gk = self.group_key(od).clone();
            let notice = self.emit(&gk, Party::Bs, MessageKind::Revoke, &encode_ids(&cut), &[od]);
            let opened = self.nodes[od].ring.open(&notice).expect("dominator holds its group key");
            for v in decode_ids(&opened) {
                if let Some(k) = self.nodes[v].individual_key {
                    self.nodes[od].ring.remove(k);
                }
            }
        }
        self.audit.push(AuditRecord::GroupRevoked(group));
        Ok(cut)
    }

    /// Dominator broadcast to its group under the current group key.
    pub fn send_group_message(&mut self, group: GroupId, payload: &[u8]) -> Result<Envelope, ProtocolError> {
        let gd = self.group_dominator(group).ok_or(ProtocolError::UnknownGroup(group))?;
        let key = self.group_key(gd).clone();
        let roster: Vec<NodeId> = self.groups[&group].roster.iter().copied().collect();
        self.round += 1;
        Ok(self.emit(&key, Party::Node(gd), MessageKind::GroupMsg, payload, &roster))
    }

    /// Member report to its dominator under the member's individual key.
    pub fn send_member_message(&mut self, node: NodeId, payload: &[u8]) -> Result<Envelope, ProtocolError> {
        let st = self
            .nodes
            .get(node)
            .filter(|s| s.status == NodeStatus::Active && s.rank == Rank::Os)
            .ok_or(ProtocolError::UnknownNode(node))?;
        let group = st.group.expect("active member has a group");
        let gd = self.groups[&group].dominator;
        let key = self.individual_key(node).clone();
        self.round += 1;
        Ok(self.emit(&key, Party::Node(node), MessageKind::MemberMsg, payload, &[gd]))
    }
}
