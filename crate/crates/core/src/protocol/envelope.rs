//! Sealed protocol messages and per-node key rings.
//!
//! Envelopes use ChaCha20-Poly1305 under a key derived from the sensor key
//! secret, so opening with the wrong key is always a detected failure. The
//! header (sender, kind, key fingerprint) travels in the clear and is bound
//! as associated data.

use std::collections::BTreeMap;
use std::fmt;

use chacha20poly1305::aead::{Aead, KeyInit, Payload};
use chacha20poly1305::{ChaCha20Poly1305, Nonce};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::NodeId;
use crate::keying::{Key, KeyId};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum CryptoError {
    #[error("no key with fingerprint {0}")]
    MissingKey(KeyId),
    #[error("authentication failed")]
    AuthFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Party {
    Node(NodeId),
    Bs,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Node(n) => write!(f, "{n}"),
            Party::Bs => f.write_str("BS"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MessageKind {
    JoinReq,
    JoinAprv,
    GdErr,
    OrpErr,
    /// BS → GD: take this orphan, here is its individual key.
    Adopt,
    /// BS → Os: you are now a dominator, here is your group key.
    Promote,
    /// GD → adopted orphan: the adopter's group key.
    KeyGrant,
    /// GD → BS: unknown node asked to join.
    JoinFwd,
    /// BS → GD: node is legitimate, here is its individual key.
    JoinAuth,
    RekeyToNew,
    RekeyBcast,
    RekeyUnicast,
    Leave,
    Revoke,
    GroupMsg,
    MemberMsg,
}

impl MessageKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MessageKind::JoinReq => "JOIN_REQ",
            MessageKind::JoinAprv => "JOIN_APRV",
            MessageKind::GdErr => "GD_ERR",
            MessageKind::OrpErr => "ORP_ERR",
            MessageKind::Adopt => "ADOPT",
            MessageKind::Promote => "PROMOTE",
            MessageKind::KeyGrant => "KEY_GRANT",
            MessageKind::JoinFwd => "JOIN_FWD",
            MessageKind::JoinAuth => "JOIN_AUTH",
            MessageKind::RekeyToNew => "REKEY_TO_NEW",
            MessageKind::RekeyBcast => "REKEY_BCAST",
            MessageKind::RekeyUnicast => "REKEY_UNICAST",
            MessageKind::Leave => "LEAVE",
            MessageKind::Revoke => "REVOKE",
            MessageKind::GroupMsg => "GROUP_MSG",
            MessageKind::MemberMsg => "MEMBER_MSG",
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub sender: Party,
    pub kind: MessageKind,
    pub key_fingerprint: KeyId,
    nonce: [u8; 12],
    ciphertext: Vec<u8>,
}

fn cipher_for(key: &Key) -> ChaCha20Poly1305 {
    let mut h = Sha256::new();
    h.update(b"dsn-cluster/envelope/v1");
    h.update(key.secret());
    ChaCha20Poly1305::new(&h.finalize())
}

fn header(sender: Party, kind: MessageKind, fp: KeyId) -> Vec<u8> {
    let mut aad = Vec::with_capacity(18);
    match sender {
        Party::Node(n) => {
            aad.push(0);
            aad.extend_from_slice(&(n as u64).to_be_bytes());
        }
        Party::Bs => aad.push(1),
    }
    aad.push(kind as u8);
    aad.extend_from_slice(&fp.0.to_be_bytes());
    aad
}

impl Envelope {
    /// Encrypts `payload` under `key`. `nonce` must never repeat for a key.
    pub fn seal(key: &Key, sender: Party, kind: MessageKind, payload: &[u8], nonce: [u8; 12]) -> Self {
        let aad = header(sender, kind, key.id());
        let ciphertext = cipher_for(key)
            .encrypt(Nonce::from_slice(&nonce), Payload { msg: payload, aad: &aad })
            .expect("chacha20poly1305 encryption is infallible for small payloads");
        Self {
            sender,
            kind,
            key_fingerprint: key.id(),
            nonce,
            ciphertext,
        }
    }

    /// Attempts decryption with a specific key.
    pub fn open_with(&self, key: &Key) -> Result<Vec<u8>, CryptoError> {
        let aad = header(self.sender, self.kind, self.key_fingerprint);
        cipher_for(key)
            .decrypt(
                Nonce::from_slice(&self.nonce),
                Payload {
                    msg: &self.ciphertext,
                    aad: &aad,
                },
            )
            .map_err(|_| CryptoError::AuthFailed)
    }
}

/// Keys held by one party, indexed by fingerprint.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyRing {
    keys: BTreeMap<KeyId, Key>,
}

impl KeyRing {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: Key) {
        self.keys.insert(key.id(), key);
    }

    pub fn remove(&mut self, id: KeyId) -> Option<Key> {
        self.keys.remove(&id)
    }

    pub fn contains(&self, id: KeyId) -> bool {
        self.keys.contains_key(&id)
    }

    pub fn get(&self, id: KeyId) -> Option<&Key> {
        self.keys.get(&id)
    }

    pub fn ids(&self) -> impl Iterator<Item = KeyId> + '_ {
        self.keys.keys().copied()
    }

    pub fn keys(&self) -> impl Iterator<Item = &Key> + '_ {
        self.keys.values()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Opens an envelope with the key its fingerprint names, if held.
    pub fn open(&self, env: &Envelope) -> Result<Vec<u8>, CryptoError> {
        let key = self
            .keys
            .get(&env.key_fingerprint)
            .ok_or(CryptoError::MissingKey(env.key_fingerprint))?;
        env.open_with(key)
    }

    /// Tries every held key regardless of the advertised fingerprint.
    pub fn open_any(&self, env: &Envelope) -> Option<(KeyId, Vec<u8>)> {
        self.keys
            .values()
            .find_map(|k| env.open_with(k).ok().map(|pt| (k.id(), pt)))
    }
}
