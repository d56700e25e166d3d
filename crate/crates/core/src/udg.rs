//! Sensor placement and the unit-disk proximity graph.
//!
//! Two sensors can hear each other's local broadcast iff their distance is at
//! most the shared transmission radius. The disk is closed: a neighbor at
//! exactly `radius` is linked.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::seed;

#[derive(Debug, Error, PartialEq)]
pub enum UdgError {
    #[error("node count must be at least {min}, got {got}")]
    TooFewNodes { min: usize, got: usize },
    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("node {node} out of range for a graph of {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
}

/// Position on the deployment plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

fn check_positive(what: &'static str, value: f64) -> Result<(), UdgError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(UdgError::NonPositive { what, value })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitDiskGraph {
    positions: Vec<Point>,
    radius: f64,
    graph: Graph,
}

impl UnitDiskGraph {
    /// Derives the proximity graph for fixed positions. O(n²), which is fine
    /// at sensor-network scales.
    pub fn from_positions(positions: Vec<Point>, radius: f64) -> Result<Self, UdgError> {
        check_positive("radius", radius)?;
        let n = positions.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if positions[i].distance(&positions[j]) <= radius {
                    edges.push((i, j));
                }
            }
        }
        Ok(Self {
            graph: Graph::from_edges(n, edges),
            positions,
            radius,
        })
    }

    /// `n` sensors placed i.i.d. uniformly over `[0,width] × [0,height]`.
    pub fn generate_uniform(
        n: usize,
        width: f64,
        height: f64,
        radius: f64,
        seed: u64,
    ) -> Result<Self, UdgError> {
        if n == 0 {
            return Err(UdgError::TooFewNodes { min: 1, got: 0 });
        }
        check_positive("width", width)?;
        check_positive("height", height)?;
        check_positive("radius", radius)?;
        let mut rng = seed::rng(seed, "udg/uniform");
        let positions = (0..n)
            .map(|_| Point::new(rng.gen_range(0.0..=width), rng.gen_range(0.0..=height)))
            .collect();
        Self::from_positions(positions, radius)
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn neighbors(&self, i: NodeId) -> Result<&[NodeId], UdgError> {
        if i >= self.n() {
            return Err(UdgError::NodeOutOfRange { node: i, n: self.n() });
        }
        Ok(self.graph.neighbors(i))
    }

    pub fn is_connected(&self) -> bool {
        self.graph.is_connected()
    }

    pub fn average_degree(&self) -> f64 {
        self.graph.average_degree()
    }
}

/// Radius giving `d_avg` expected neighbors per node when `n` nodes are spread
/// uniformly over a `width × height` field, ignoring boundary losses:
/// `r = sqrt(d_avg · width · height / (π · (n − 1)))`.
pub fn radius_for_expected_degree(
    n: usize,
    width: f64,
    height: f64,
    d_avg: f64,
) -> Result<f64, UdgError> {
    if n < 2 {
        return Err(UdgError::TooFewNodes { min: 2, got: n });
    }
    check_positive("width", width)?;
    check_positive("height", height)?;
    check_positive("average degree", d_avg)?;
    Ok((d_avg * width * height / (PI * (n - 1) as f64)).sqrt())
}
