//! Dominating-set variants: verifiers, an exhaustive minimum-set oracle for
//! small graphs, and two greedy connected-dominating-set baselines.
//!
//! The weakly connected variant uses the weakly induced subgraph of `S`:
//! vertex set `N[S]`, edge set every edge with at least one endpoint in `S`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::graph::{Graph, NodeId};

/// Largest graph the exhaustive oracle accepts.
pub const EXHAUSTIVE_MAX_NODES: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DomsetError {
    #[error("vertex {node} is not in a graph of {n} nodes")]
    InvalidNode { node: NodeId, n: usize },
    #[error("exhaustive search limited to {max} nodes, graph has {n}")]
    TooLarge { n: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomsetKind {
    Ds,
    Cds,
    Wcds,
}

impl fmt::Display for DomsetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomsetKind::Ds => "DS",
            DomsetKind::Cds => "CDS",
            DomsetKind::Wcds => "WCDS",
        })
    }
}

/// Which greedy CDS heuristic to run; see [`greedy_cds_baseline`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyVariant {
    I,
    II,
}

/// Set of vertices of some host graph, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct VertexSet(BTreeSet<NodeId>);

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.contains(&v)
    }

    pub fn insert(&mut self, v: NodeId) -> bool {
        self.0.insert(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<NodeId> {
        self.iter().collect()
    }

    fn validate(&self, g: &Graph) -> Result<(), DomsetError> {
        match self.0.iter().next_back() {
            Some(&v) if v >= g.node_count() => Err(DomsetError::InvalidNode {
                node: v,
                n: g.node_count(),
            }),
            _ => Ok(()),
        }
    }

    fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for v in self.iter() {
            m[v] = true;
        }
        m
    }
}

impl FromIterator<NodeId> for VertexSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[NodeId; N]> for VertexSet {
    fn from(v: [NodeId; N]) -> Self {
        v.into_iter().collect()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.iter().join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomsetReport {
    pub set_size: usize,
    pub is_dominating: bool,
    pub is_cds: bool,
    pub is_wcds: bool,
}

pub fn report(g: &Graph, s: &VertexSet) -> Result<DomsetReport, DomsetError> {
    Ok(DomsetReport {
        set_size: s.len(),
        is_dominating: is_dominating(g, s)?,
        is_cds: is_cds(g, s)?,
        is_wcds: is_wcds(g, s)?,
    })
}

pub fn is_dominating(g: &Graph, s: &VertexSet) -> Result<bool, DomsetError> {
    s.validate(g)?;
    let m = s.mask(g.node_count());
    Ok((0..g.node_count()).all(|v| m[v] || g.neighbors(v).iter().any(|&u| m[u])))
}

/// Dominating, and the subgraph induced by `s` alone is connected.
pub fn is_cds(g: &Graph, s: &VertexSet) -> Result<bool, DomsetError> {
    if !is_dominating(g, s)? {
        return Ok(false);
    }
    if s.is_empty() {
        return Ok(g.node_count() == 0);
    }
    let (sub, _) = g.induced(&s.to_vec());
    Ok(sub.is_connected())
}

/// Dominating, and the weakly induced subgraph is connected.
pub fn is_wcds(g: &Graph, s: &VertexSet) -> Result<bool, DomsetError> {
    if !is_dominating(g, s)? {
        return Ok(false);
    }
    let n = g.node_count();
    if n == 0 {
        return Ok(true);
    }
    // Dominating means N[S] = V, so the weak graph spans every vertex.
    let m = s.mask(n);
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if !seen[v] && (m[u] || m[v]) {
                seen[v] = true;
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    Ok(reached == n)
}

/// Closed neighborhood `{v} ∪ N(v)`.
pub fn star_of(g: &Graph, v: NodeId) -> Result<VertexSet, DomsetError> {
    if v >= g.node_count() {
        return Err(DomsetError::InvalidNode {
            node: v,
            n: g.node_count(),
        });
    }
    Ok(std::iter::once(v).chain(g.neighbors(v).iter().copied()).collect())
}

/// Minimum-cardinality set of the requested kind by subset enumeration in
/// increasing size; among minimum sets the lexicographically smallest member
/// sequence wins. `Ok(None)` when no such set exists (CDS/WCDS on a
/// disconnected graph).
pub fn min_set_exhaustive(g: &Graph, kind: DomsetKind) -> Result<Option<VertexSet>, DomsetError> {
    let n = g.node_count();
    if n > EXHAUSTIVE_MAX_NODES {
        return Err(DomsetError::TooLarge {
            n,
            max: EXHAUSTIVE_MAX_NODES,
        });
    }
    if n == 0 {
        return Ok(Some(VertexSet::new()));
    }
    if kind != DomsetKind::Ds && !g.is_connected() {
        return Ok(None);
    }
    let open: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let closed: Vec<u32> = open.iter().enumerate().map(|(v, m)| m | (1 << v)).collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };

    let accept = |set: u32| -> bool {
        let covered = bits(set).fold(0u32, |m, v| m | closed[v]);
        if covered != full {
            return false;
        }
        match kind {
            DomsetKind::Ds => true,
            DomsetKind::Cds => {
                let start = set.trailing_zeros() as usize;
                grow(1 << start, |u| open[u] & set) == set
            }
            DomsetKind::Wcds => {
                grow(1, |u| if set & (1 << u) != 0 { open[u] } else { open[u] & set }) == full
            }
        }
    };

    for size in 1..=n {
        for combo in (0..n).combinations(size) {
            let set = combo.iter().fold(0u32, |m, &v| m | (1 << v));
            if accept(set) {
                return Ok(Some(combo.into_iter().collect()));
            }
        }
    }
    Ok(None)
}

fn bits(mut m: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

/// Closure of `seed` under the step relation.
fn grow(seed: u32, step: impl Fn(usize) -> u32) -> u32 {
    let mut reach = seed;
    let mut frontier = seed;
    while frontier != 0 {
        let next = bits(frontier).fold(0u32, |m, u| m | step(u));
        frontier = next & !reach;
        reach |= next;
    }
    reach
}

/// Greedy connected dominating set, computed per connected component and
/// returned as the union.
///
/// * `I` grows a tree from the maximum-degree vertex, repeatedly adding the
///   already-covered vertex that covers the most uncovered vertices.
/// * `II` first builds a greedy dominating set (max uncovered coverage), then
///   joins its fragments: from the fragment holding the smallest id, a BFS
///   finds the nearest other fragment and the interior vertices of that
///   shortest path are added, until one fragment remains.
///
/// Ties always go to the smaller node id.
pub fn greedy_cds_baseline(g: &Graph, variant: GreedyVariant) -> VertexSet {
    let labels = g.components();
    let count = labels.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); count];
    for (v, &c) in labels.iter().enumerate() {
        members[c].push(v);
    }
    let mut out = VertexSet::new();
    for comp in members {
        let (sub, map) = g.induced(&comp);
        let local = match variant {
            GreedyVariant::I => greedy_tree_growth(&sub),
            GreedyVariant::II => greedy_ds_then_connect(&sub),
        };
        for v in local {
            out.insert(map[v]);
        }
    }
    out
}

fn uncovered_gain(g: &Graph, v: NodeId, covered: &[bool]) -> usize {
    usize::from(!covered[v]) + g.neighbors(v).iter().filter(|&&u| !covered[u]).count()
}

fn cover(g: &Graph, v: NodeId, covered: &mut [bool], remaining: &mut usize) {
    for u in std::iter::once(v).chain(g.neighbors(v).iter().copied()) {
        if !covered[u] {
            covered[u] = true;
            *remaining -= 1;
        }
    }
}

/// Picks the max-key candidate, ties to the smallest id.
fn argmax(candidates: impl Iterator<Item = NodeId>, key: impl Fn(NodeId) -> usize) -> Option<NodeId> {
    candidates.fold(None, |best: Option<(NodeId, usize)>, v| {
        let k = key(v);
        match best {
            Some((bv, bk)) if bk > k || (bk == k && bv < v) => Some((bv, bk)),
            _ => Some((v, k)),
        }
    })
    .map(|(v, _)| v)
}

fn greedy_tree_growth(g: &Graph) -> Vec<NodeId> {
    let n = g.node_count();
    let Some(start) = argmax(0..n, |v| g.degree(v)) else {
        return Vec::new();
    };
    let mut in_set = vec![false; n];
    let mut covered = vec![false; n];
    let mut remaining = n;
    in_set[start] = true;
    cover(g, start, &mut covered, &mut remaining);
    while remaining > 0 {
        let pick = argmax((0..n).filter(|&v| covered[v] && !in_set[v]), |v| {
            uncovered_gain(g, v, &covered)
        })
        .expect("connected component always has a frontier vertex");
        in_set[pick] = true;
        cover(g, pick, &mut covered, &mut remaining);
    }
    (0..n).filter(|&v| in_set[v]).collect()
}

fn greedy_ds_then_connect(g: &Graph) -> Vec<NodeId> {
    let n = g.node_count();
    let mut in_set = vec![false; n];
    let mut covered = vec![false; n];
    let mut remaining = n;
    while remaining > 0 {
        let pick = argmax((0..n).filter(|&v| !in_set[v]), |v| uncovered_gain(g, v, &covered))
            .expect("uncovered vertex implies a candidate");
        in_set[pick] = true;
        cover(g, pick, &mut covered, &mut remaining);
    }

    loop {
        let set: Vec<NodeId> = (0..n).filter(|&v| in_set[v]).collect();
        let (sub, map) = g.induced(&set);
        let frag = sub.components();
        if frag.iter().all(|&c| c == 0) {
            return set;
        }
        let mut in_first = vec![false; n];
        for (i, &c) in frag.iter().enumerate() {
            if c == 0 {
                in_first[map[i]] = true;
            }
        }
        // Multi-source BFS from the first fragment to the nearest other one.
        let mut parent = vec![usize::MAX; n];
        let mut seen = in_first.clone();
        let mut queue: VecDeque<NodeId> = (0..n).filter(|&v| in_first[v]).collect();
        let mut target = None;
        'bfs: while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                parent[v] = u;
                if in_set[v] {
                    target = Some(v);
                    break 'bfs;
                }
                queue.push_back(v);
            }
        }
        let mut v = parent[target.expect("fragments lie in one component")];
        while !in_first[v] {
            in_set[v] = true;
            v = parent[v];
        }
    }
}
