//! Offline rank assignment and key pre-distribution.
//!
//! Sensors are split into group dominators (GD) and ordinary sensors (Os).
//! Each group is one GD plus up to `eta` ordinary sensors. Every ordinary
//! sensor holds its group key and its own individual key; the GD holds the
//! group key and every member's individual key; the base station holds
//! everything.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::RngCore;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::NodeId;
use crate::seed;

pub const SUPPORTED_KEY_BITS: [u32; 3] = [64, 128, 256];
pub const DEFAULT_KEY_BITS: u32 = 128;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KeyingError {
    #[error("unsupported key length {0} bits (expected 64, 128 or 256)")]
    UnsupportedKeyLength(u32),
    #[error("plan needs at least one sensor")]
    NoSensors,
    #[error("key fingerprint collision on {0}")]
    FingerprintCollision(KeyId),
}

/// Public fingerprint of a key: the first eight bytes of SHA-256 over the
/// secret. Safe to export.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KeyId(pub u64);

impl fmt::Display for KeyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupId(pub usize);

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Symmetric key of `bits` length.
#[derive(Clone, PartialEq, Eq)]
pub struct Key {
    id: KeyId,
    bits: u32,
    secret: Vec<u8>,
}

impl Key {
    pub(crate) fn from_secret(secret: Vec<u8>) -> Self {
        let digest = Sha256::digest(&secret);
        let mut head = [0u8; 8];
        head.copy_from_slice(&digest[..8]);
        Self {
            id: KeyId(u64::from_be_bytes(head)),
            bits: (secret.len() * 8) as u32,
            secret,
        }
    }

    pub fn id(&self) -> KeyId {
        self.id
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn secret(&self) -> &[u8] {
        &self.secret
    }
}

impl fmt::Debug for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Key({}, {} bits)", self.id, self.bits)
    }
}

/// Seeded key source that refuses to hand out two keys with the same
/// fingerprint.
#[derive(Debug, Clone)]
pub struct KeyGenerator {
    rng: ChaCha20Rng,
    bits: u32,
    issued: HashSet<KeyId>,
}

impl KeyGenerator {
    pub fn new(bits: u32, seed: u64, stream: &str) -> Result<Self, KeyingError> {
        if !SUPPORTED_KEY_BITS.contains(&bits) {
            return Err(KeyingError::UnsupportedKeyLength(bits));
        }
        Ok(Self {
            rng: seed::rng(seed, stream),
            bits,
            issued: HashSet::new(),
        })
    }

    /// Marks an existing key as issued so it can never be produced again.
    pub fn reserve(&mut self, id: KeyId) -> Result<(), KeyingError> {
        if self.issued.insert(id) {
            Ok(())
        } else {
            Err(KeyingError::FingerprintCollision(id))
        }
    }

    pub fn generate(&mut self) -> Result<Key, KeyingError> {
        let mut secret = vec![0u8; (self.bits / 8) as usize];
        self.rng.fill_bytes(&mut secret);
        let key = Key::from_secret(secret);
        self.reserve(key.id)?;
        Ok(key)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    Gd,
    Os,
    /// Ordinary sensor promoted to dominator by the base station.
    GdOs,
    Bs,
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rank::Gd => "GD",
            Rank::Os => "Os",
            Rank::GdOs => "GDos",
            Rank::Bs => "BS",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRecord {
    pub id: GroupId,
    pub dominator: NodeId,
    pub members: Vec<NodeId>,
    pub group_key: Key,
    pub individual_keys: BTreeMap<NodeId, Key>,
}

impl GroupRecord {
    /// Keys the dominator carries: its group key and every member's
    /// individual key.
    pub fn dominator_keys(&self) -> Vec<&Key> {
        std::iter::once(&self.group_key)
            .chain(self.individual_keys.values())
            .collect()
    }

    pub fn member_keys(&self, member: NodeId) -> Option<[&Key; 2]> {
        self.individual_keys
            .get(&member)
            .map(|ik| [&self.group_key, ik])
    }
}

/// Offline partition of the sensor population into groups, with keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeploymentPlan {
    eta: usize,
    key_len_bits: u32,
    groups: Vec<GroupRecord>,
    group_of: Vec<GroupId>,
}

/// Base station key store: every individual key and the current key of every
/// group. Keys replaced by rekeying are kept in `retired`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BaseStationVault {
    pub individual_keys: BTreeMap<NodeId, Key>,
    pub group_keys: BTreeMap<GroupId, Key>,
    pub retired: Vec<Key>,
}

impl BaseStationVault {
    pub fn individual_key(&self, node: NodeId) -> Option<&Key> {
        self.individual_keys.get(&node)
    }

    pub fn group_key(&self, group: GroupId) -> Option<&Key> {
        self.group_keys.get(&group)
    }

    pub fn holds(&self, id: KeyId) -> bool {
        self.individual_keys.values().any(|k| k.id == id)
            || self.group_keys.values().any(|k| k.id == id)
            || self.retired.iter().any(|k| k.id == id)
    }

    /// Installs a new group key, retiring the previous one.
    pub fn rotate_group_key(&mut self, group: GroupId, key: Key) {
        if let Some(old) = self.group_keys.insert(group, key) {
            self.retired.push(old);
        }
    }

    pub fn find(&self, id: KeyId) -> Option<&Key> {
        self.individual_keys
            .values()
            .chain(self.group_keys.values())
            .chain(self.retired.iter())
            .find(|k| k.id == id)
    }
}

/// Builds `⌈n/(eta+1)⌉` groups over node ids `0..n`. Group `i` is led by the
/// lowest id in its block; the final group takes whatever remains and may be
/// a bare dominator.
pub fn build_plan(n: usize, eta: usize, key_len_bits: u32, seed: u64) -> Result<DeploymentPlan, KeyingError> {
    if n == 0 {
        return Err(KeyingError::NoSensors);
    }
    let mut keys = KeyGenerator::new(key_len_bits, seed, "keying/plan")?;
    let block = eta + 1;
    let mut groups = Vec::with_capacity(n.div_ceil(block));
    let mut group_of = Vec::with_capacity(n);
    for (gi, start) in (0..n).step_by(block).enumerate() {
        let end = (start + block).min(n);
        let id = GroupId(gi);
        let members: Vec<NodeId> = ((start + 1)..end).collect();
        let group_key = keys.generate()?;
        let mut individual_keys = BTreeMap::new();
        for &m in &members {
            individual_keys.insert(m, keys.generate()?);
        }
        group_of.extend(std::iter::repeat_n(id, end - start));
        groups.push(GroupRecord {
            id,
            dominator: start,
            members,
            group_key,
            individual_keys,
        });
    }
    Ok(DeploymentPlan {
        eta,
        key_len_bits,
        groups,
        group_of,
    })
}

impl DeploymentPlan {
    pub fn eta(&self) -> usize {
        self.eta
    }

    pub fn key_len_bits(&self) -> u32 {
        self.key_len_bits
    }

    pub fn groups(&self) -> &[GroupRecord] {
        &self.groups
    }

    pub fn group(&self, id: GroupId) -> Option<&GroupRecord> {
        self.groups.get(id.0)
    }

    pub fn node_count(&self) -> usize {
        self.group_of.len()
    }

    pub fn group_of(&self, node: NodeId) -> Option<GroupId> {
        self.group_of.get(node).copied()
    }

    pub fn rank_of(&self, node: NodeId) -> Option<Rank> {
        let g = self.group(self.group_of(node)?)?;
        Some(if g.dominator == node { Rank::Gd } else { Rank::Os })
    }

    /// α: number of group dominators.
    pub fn alpha(&self) -> usize {
        self.groups.len()
    }

    /// β: number of ordinary sensors.
    pub fn beta(&self) -> usize {
        self.node_count() - self.alpha()
    }

    /// Keys held by `node` right after pre-distribution.
    pub fn keys_of(&self, node: NodeId) -> Vec<&Key> {
        let Some(g) = self.group_of(node).and_then(|id| self.group(id)) else {
            return Vec::new();
        };
        if g.dominator == node {
            g.dominator_keys()
        } else {
            g.member_keys(node).map(Vec::from).unwrap_or_default()
        }
    }

    pub fn distinct_key_count(&self) -> usize {
        self.groups
            .iter()
            .map(|g| 1 + g.individual_keys.len())
            .sum()
    }

    pub fn vault(&self) -> BaseStationVault {
        let mut vault = BaseStationVault::default();
        for g in &self.groups {
            vault.group_keys.insert(g.id, g.group_key.clone());
            for (&m, k) in &g.individual_keys {
                vault.individual_keys.insert(m, k.clone());
            }
        }
        vault
    }

    /// Key storage summed over the actual group sizes (equals the
    /// `storage_network_bits` closed form when every group is full).
    pub fn network_storage_bits(&self) -> u64 {
        let k = u64::from(self.key_len_bits);
        let gd: u64 = self
            .groups
            .iter()
            .map(|g| storage_gd_bits(g.members.len(), k))
            .sum();
        gd + self.beta() as u64 * storage_os_bits(k)
    }
}

/// Bits a dominator stores: one group key plus `eta` individual keys.
pub fn storage_gd_bits(eta: usize, k: u64) -> u64 {
    (eta as u64 + 1) * k
}

/// Bits an ordinary sensor stores: its group key and its individual key.
pub fn storage_os_bits(k: u64) -> u64 {
    2 * k
}

/// Network-wide key storage for `alpha` dominators and `beta` ordinary
/// sensors: `k · (alpha·(eta+1) + 2·beta)`.
pub fn storage_network_bits(alpha: u64, beta: u64, eta: usize, k: u64) -> u64 {
    k * (alpha * (eta as u64 + 1) + 2 * beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn single_group_plan() {
        let plan = build_plan(10, 9, 128, 1).unwrap();
        assert_eq!(plan.groups().len(), 1);
        let g = &plan.groups()[0];
        assert_eq!(g.dominator, 0);
        assert_eq!(g.members.len(), 9);
        assert_eq!(plan.distinct_key_count(), 10);
        assert_eq!(plan.rank_of(0), Some(Rank::Gd));
        assert_eq!(plan.rank_of(5), Some(Rank::Os));
    }

    #[test]
    fn full_and_remainder_plans() {
        let plan = build_plan(100, 9, 128, 1).unwrap();
        assert_eq!(plan.alpha(), 10);
        assert_eq!(plan.beta(), 90);
        assert_eq!(plan.vault().individual_keys.len(), 90);
        assert_eq!(plan.vault().group_keys.len(), 10);

        let plan = build_plan(101, 9, 128, 1).unwrap();
        assert_eq!(plan.alpha(), 11);
        let last = plan.groups().last().unwrap();
        assert_eq!(last.dominator, 100);
        assert!(last.members.is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(build_plan(5, 2, 100, 0), Err(KeyingError::UnsupportedKeyLength(100)));
        assert_eq!(build_plan(0, 2, 128, 0), Err(KeyingError::NoSensors));
    }

    #[test]
    fn key_holdings_match_ranks() {
        let plan = build_plan(23, 4, 64, 9).unwrap();
        for g in plan.groups() {
            let gd: BTreeSet<_> = plan.keys_of(g.dominator).iter().map(|k| k.id()).collect();
            assert_eq!(gd.len(), 1 + g.members.len());
            for &m in &g.members {
                let held = plan.keys_of(m);
                assert_eq!(held.len(), 2);
                assert_eq!(held[0].id(), g.group_key.id());
                assert!(held.iter().all(|k| gd.contains(&k.id())));
                assert!(held.iter().all(|k| k.secret().len() == 8 && k.bits() == 64));
            }
        }
    }

    #[test]
    fn storage_examples() {
        assert_eq!(storage_gd_bits(0, 128), 128);
        assert_eq!(storage_gd_bits(5, 128), 768);
        assert_eq!(storage_gd_bits(10, 256), 2816);
        assert_eq!(storage_os_bits(64), 128);
        assert_eq!(storage_os_bits(128), 256);
        assert_eq!(storage_os_bits(256), 512);
        assert_eq!(storage_network_bits(10, 90, 9, 128), 35840);
        assert_eq!(storage_network_bits(1, 0, 0, 128), 128);
        assert_eq!(build_plan(100, 9, 128, 0).unwrap().network_storage_bits(), 35840);
    }

    #[test]
    fn plan_is_deterministic_per_seed() {
        assert_eq!(build_plan(40, 3, 128, 5).unwrap(), build_plan(40, 3, 128, 5).unwrap());
        assert_ne!(build_plan(40, 3, 128, 5).unwrap(), build_plan(40, 3, 128, 6).unwrap());
    }

    #[test]
    fn generator_rejects_reserved_fingerprint() {
        let mut g = KeyGenerator::new(128, 0, "t").unwrap();
        let k = g.generate().unwrap();
        assert_eq!(g.reserve(k.id()), Err(KeyingError::FingerprintCollision(k.id())));
    }

    proptest! {
        #[test]
        fn network_storage_decomposes(alpha in 0u64..10_000, beta in 0u64..100_000, eta in 0usize..500, ki in 0usize..3) {
            let k = u64::from(SUPPORTED_KEY_BITS[ki]);
            prop_assert_eq!(
                storage_network_bits(alpha, beta, eta, k),
                alpha * storage_gd_bits(eta, k) + beta * storage_os_bits(k)
            );
        }

        #[test]
        fn plan_partitions_nodes_with_unique_keys(n in 1usize..300, eta in 0usize..20, seed in any::<u64>()) {
            let plan = build_plan(n, eta, 128, seed).unwrap();
            prop_assert_eq!(plan.alpha(), n.div_ceil(eta + 1));
            let mut seen = BTreeSet::new();
            for g in plan.groups() {
                prop_assert!(g.members.len() <= eta);
                prop_assert!(seen.insert(g.dominator));
                for &m in &g.members { prop_assert!(seen.insert(m)); }
            }
            prop_assert_eq!(seen.len(), n);
            let ids: BTreeSet<_> = plan.groups().iter()
                .flat_map(|g| g.dominator_keys().into_iter().map(|k| k.id()))
                .collect();
            prop_assert_eq!(ids.len(), n);
            prop_assert_eq!(plan.distinct_key_count(), n);
        }
    }
}
