//! Secure clustering of distributed sensor networks.
//!
//! Sensors are placed on a plane and linked by a unit-disk proximity graph
//! ([`udg`]). Offline, they are ranked into group dominators and ordinary
//! sensors and pre-loaded with group and individual keys ([`keying`]). The
//! [`protocol`] module then simulates the secure cluster-formation exchange
//! (join requests, approvals, orphan reports, base-station adjudication) and
//! membership changes with rekeying. [`domsets`] verifies the resulting
//! dominator sets and provides exhaustive oracles and greedy CDS baselines,
//! and [`analysis`] evaluates the closed-form storage and connectivity
//! results and runs the experiment sweeps.

pub mod analysis;
pub mod domsets;
pub mod export;
pub mod graph;
pub mod keying;
pub mod protocol;
pub mod seed;
pub mod udg;

pub use domsets::{DomsetKind, VertexSet};
pub use graph::{Graph, NodeId};
pub use keying::{DeploymentPlan, GroupId, Key, KeyId};
pub use protocol::{ClusterMap, Network, Placement};
pub use udg::{Point, UnitDiskGraph};
