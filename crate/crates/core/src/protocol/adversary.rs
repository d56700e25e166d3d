//! Adversary injection: an outsider with no valid keys, a captured ordinary
//! sensor, or a captured dominator tries to get admitted and to read fresh
//! traffic.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::membership::Verdict;
use super::{encode_ids, Envelope, KeyRing, MessageKind, Network, NodeStatus, Party, ProtocolError};
use crate::graph::NodeId;
use crate::keying::{GroupId, KeyGenerator, KeyId};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryMode {
    Outsider,
    CompromisedOs(NodeId),
    CompromisedGd(GroupId),
}

#[derive(Debug, Clone)]
pub struct AdversaryProfile {
    pub mode: AdversaryMode,
    keys: KeyRing,
}

impl AdversaryProfile {
    /// Outsider carrying `count` self-made keys, none of them known to the
    /// network.
    pub fn outsider(net: &Network, count: usize, seed: u64) -> Result<Self, ProtocolError> {
        let bits = net.keygen.bits();
        let mut gen = KeyGenerator::new(bits, seed, "adversary/outsider")?;
        let mut keys = KeyRing::new();
        while keys.len() < count {
            let k = gen.generate()?;
            if !net.vault.holds(k.id()) {
                keys.insert(k);
            }
        }
        Ok(Self {
            mode: AdversaryMode::Outsider,
            keys,
        })
    }

    /// Everything stored on a captured ordinary sensor.
    pub fn compromised_os(net: &Network, node: NodeId) -> Result<Self, ProtocolError> {
        let st = net
            .nodes
            .get(node)
            .filter(|s| s.status == NodeStatus::Active && s.group_key.is_some())
            .ok_or(ProtocolError::UnknownNode(node))?;
        Ok(Self {
            mode: AdversaryMode::CompromisedOs(node),
            keys: st.ring.clone(),
        })
    }

    /// Everything stored on a captured dominator.
    pub fn compromised_gd(net: &Network, group: GroupId) -> Result<Self, ProtocolError> {
        let gd = net.group_dominator(group).ok_or(ProtocolError::UnknownGroup(group))?;
        Ok(Self {
            mode: AdversaryMode::CompromisedGd(group),
            keys: net.nodes[gd].ring.clone(),
        })
    }

    pub fn held_keys(&self) -> BTreeSet<KeyId> {
        self.keys.ids().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DecryptedEnvelope {
    pub kind: MessageKind,
    pub group: GroupId,
    pub key: KeyId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttemptRecord {
    pub claimed_id: NodeId,
    pub target_group: GroupId,
    pub admitted: bool,
    /// Fresh envelopes of this attempt the adversary could open.
    pub decrypted: Vec<DecryptedEnvelope>,
    /// Fresh envelopes of this attempt it tried.
    pub observed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AttackReport {
    pub attempts: Vec<AttemptRecord>,
}

impl AttackReport {
    pub fn admissions(&self) -> usize {
        self.attempts.iter().filter(|a| a.admitted).count()
    }

    pub fn decryptions(&self) -> usize {
        self.attempts.iter().map(|a| a.decrypted.len()).sum()
    }

    pub fn observed(&self) -> usize {
        self.attempts.iter().map(|a| a.observed).sum()
    }

    pub fn decrypted_keys(&self) -> BTreeSet<KeyId> {
        self.attempts
            .iter()
            .flat_map(|a| a.decrypted.iter().map(|d| d.key))
            .collect()
    }
}

impl Network {
    /// Each attempt: forge a join request toward a random live group under a
    /// random held key, claiming an id other than the adversary's own, then
    /// observe one group broadcast and one member report from that group and
    /// try every held key on them. The network state is not modified.
    pub fn simulate_adversary(&self, profile: &AdversaryProfile, attempts: usize, seed: u64) -> AttackReport {
        let mut rng = seed::rng(seed, "adversary/attempts");
        let tag = (seed::derive(seed, "adversary/nonce") as u32).to_be_bytes();
        let mut counter = 0u64;
        let mut nonce = || {
            counter += 1;
            let mut n = [0u8; 12];
            n[..4].copy_from_slice(&tag);
            n[0] |= 0x80;
            n[4..].copy_from_slice(&counter.to_be_bytes());
            n
        };
        let held: Vec<_> = profile.keys.keys().collect();
        let groups = self.live_groups();
        let n = self.nodes.len();
        let own = match profile.mode {
            AdversaryMode::CompromisedOs(s) => Some(s),
            _ => None,
        };
        let mut report = AttackReport::default();
        if groups.is_empty() {
            return report;
        }
        for _ in 0..attempts {
            let target = *groups.choose(&mut rng).expect("nonempty");
            let claimed = loop {
                let id = if rng.gen_bool(0.5) { rng.gen_range(0..n) } else { n + rng.gen_range(0..n.max(1)) };
                if Some(id) != own {
                    break id;
                }
            };
            let admitted = held.choose(&mut rng).is_some_and(|key| {
                let req = Envelope::seal(key, Party::Node(claimed), MessageKind::JoinReq, &encode_ids(&[claimed]), nonce());
                matches!(self.vet_join(&req, claimed, target), Ok(Verdict::Admit(_)))
            });

            let gd = self.groups[&target].dominator;
            let mut fresh = vec![Envelope::seal(
                self.group_key(gd),
                Party::Node(gd),
                MessageKind::GroupMsg,
                b"group traffic",
                nonce(),
            )];
            let roster: Vec<NodeId> = self.groups[&target].roster.iter().copied().collect();
            if let Some(&m) = roster.choose(&mut rng) {
                fresh.push(Envelope::seal(
                    self.individual_key(m),
                    Party::Node(m),
                    MessageKind::MemberMsg,
                    b"member report",
                    nonce(),
                ));
            }
            let decrypted = fresh
                .iter()
                .filter_map(|env| {
                    profile.keys.open_any(env).map(|(key, _)| DecryptedEnvelope {
                        kind: env.kind,
                        group: target,
                        key,
                    })
                })
                .collect();
            report.attempts.push(AttemptRecord {
                claimed_id: claimed,
                target_group: target,
                admitted,
                decrypted,
                observed: fresh.len(),
            });
        }
        report
    }
}
