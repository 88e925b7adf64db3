//! Friendship graph: edge-list loading, synthetic generation, giant-component
//! extraction, and super-peer election.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::error::GraphError;
use crate::rng::{self, Stream};

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Regular,
    SuperPeer,
}

/// Fraction of nodes flagged as new joinees: the lowest-degree tenth of the
/// population, which flat-mode placement refuses to match with strangers.
pub const NEW_JOINEE_FRACTION: f64 = 0.10;

/// Undirected friendship graph. Immutable once constructed; adjacency lists
/// are sorted and symmetric, with no self-loops.
#[derive(Debug, Clone)]
pub struct SocialGraph {
    adj: Vec<Vec<NodeId>>,
    roles: Vec<Role>,
    new_joinee: Vec<bool>,
}

impl SocialGraph {
    /// Build from an undirected edge list over ids `0..n`. Duplicate edges
    /// and self-loops are dropped. New-joinee flags are derived here so every
    /// constructor agrees on them.
    fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> SocialGraph {
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            if seen.insert(key) {
                adj[u as usize].push(v);
                adj[v as usize].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut g = SocialGraph {
            adj,
            roles: vec![Role::Regular; n],
            new_joinee: vec![false; n],
        };
        g.mark_new_joinees();
        g
    }

    fn mark_new_joinees(&mut self) {
        let n = self.node_count();
        let count = (n as f64 * NEW_JOINEE_FRACTION).floor() as usize;
        let mut order: Vec<NodeId> = (0..n as NodeId).collect();
        order.sort_by_key(|&v| (self.degree(v), v));
        self.new_joinee = vec![false; n];
        for &v in order.iter().take(count) {
            self.new_joinee[v as usize] = true;
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v as usize].len()
    }

    pub fn role(&self, v: NodeId) -> Role {
        self.roles[v as usize]
    }

    pub fn is_super_peer(&self, v: NodeId) -> bool {
        self.roles[v as usize] == Role::SuperPeer
    }

    pub fn is_new_joinee(&self, v: NodeId) -> bool {
        self.new_joinee[v as usize]
    }

    pub fn are_friends(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Super-peer ids in ascending order.
    pub fn super_peers(&self) -> Vec<NodeId> {
        (0..self.node_count() as NodeId)
            .filter(|&v| self.is_super_peer(v))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    pub fn avg_degree(&self) -> f64 {
        2.0 * self.edge_count() as f64 / self.node_count() as f64
    }

    /// Edges as (u, v) pairs with u < v, ascending.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.node_count() as NodeId {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Induced subgraph of the largest connected component, ids recompacted
    /// in ascending order of the original ids. Roles carry over; new-joinee
    /// flags are rederived from the component's degrees. Idempotent on a
    /// connected graph.
    pub fn giant_component(&self) -> SocialGraph {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut queue = vec![start];
            comp[start] = id;
            let mut size = 0usize;
            while let Some(v) = queue.pop() {
                size += 1;
                for &w in &self.adj[v] {
                    if comp[w as usize] == usize::MAX {
                        comp[w as usize] = id;
                        queue.push(w as usize);
                    }
                }
            }
            sizes.push(size);
        }
        let best = sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap_or(0);

        let keep: Vec<NodeId> = (0..n)
            .filter(|&v| comp[v] == best)
            .map(|v| v as NodeId)
            .collect();
        let mut remap = vec![NodeId::MAX; n];
        for (new, &old) in keep.iter().enumerate() {
            remap[old as usize] = new as NodeId;
        }
        let mut edges = Vec::new();
        for &old in &keep {
            for &w in self.neighbors(old) {
                if old < w && comp[w as usize] == best {
                    edges.push((remap[old as usize], remap[w as usize]));
                }
            }
        }
        let mut g = SocialGraph::from_edges(keep.len(), &edges);
        for &old in &keep {
            g.roles[remap[old as usize] as usize] = self.roles[old as usize];
        }
        g
    }

    /// Flag the `max(5, ceil(fraction * n))` highest-degree nodes as
    /// super-peers, ties broken by lower id. Only the role mapping changes.
    pub fn elect_super_peers(&self, fraction: f64, _seed: u64) -> Result<SocialGraph, GraphError> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(GraphError::Param(format!(
                "super-peer fraction must be in (0, 1), got {fraction}"
            )));
        }
        let n = self.node_count();
        let count = ((fraction * n as f64).ceil() as usize).max(5);
        if count >= n {
            return Err(GraphError::Param(format!(
                "super-peer count {count} would cover the whole graph of {n} nodes"
            )));
        }
        let mut order: Vec<NodeId> = (0..n as NodeId).collect();
        order.sort_by(|&a, &b| self.degree(b).cmp(&self.degree(a)).then(a.cmp(&b)));
        let mut g = self.clone();
        g.roles = vec![Role::Regular; n];
        for &v in order.iter().take(count) {
            g.roles[v as usize] = Role::SuperPeer;
        }
        Ok(g)
    }
}

/// Parse a UTF-8 edge list: one "u v" pair per line, `#` comment lines and
/// blank lines ignored. Ids are compacted to `0..n-1` in ascending order of
/// the original ids.
pub fn load_edge_list(text: &str) -> Result<SocialGraph, GraphError> {
    let mut raw_edges: Vec<(u64, u64)> = Vec::new();
    let mut ids = BTreeSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Option<u64> { tok.and_then(|t| t.parse().ok()) };
        let (u, v) = match (parse(parts.next()), parse(parts.next()), parts.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => {
                return Err(GraphError::Parse {
                    line: idx + 1,
                    content: line.to_string(),
                })
            }
        };
        ids.insert(u);
        ids.insert(v);
        raw_edges.push((u, v));
    }
    if ids.is_empty() {
        return Err(GraphError::Empty);
    }
    let remap: BTreeMap<u64, NodeId> = ids
        .into_iter()
        .enumerate()
        .map(|(new, old)| (old, new as NodeId))
        .collect();
    let edges: Vec<(NodeId, NodeId)> = raw_edges
        .into_iter()
        .map(|(u, v)| (remap[&u], remap[&v]))
        .collect();
    Ok(SocialGraph::from_edges(remap.len(), &edges))
}

/// Shape of the synthetic generator: the arrival edge-count mix and the
/// additive attachment smoothing.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ArrivalTuning {
    /// Share of arrivals bringing a single edge (the long tail of sparsely
    /// connected users observed in co-authorship-style networks).
    pub one: f64,
    /// Share bringing two edges; the rest form a tempered high tail that
    /// restores the target mean.
    pub two: f64,
    /// Attachment weight is degree + smooth: zero is pure preferential
    /// attachment, larger values damp hub growth.
    pub smooth: u64,
}

pub(crate) const DEFAULT_TUNING: ArrivalTuning = ArrivalTuning {
    one: 0.62,
    two: 0.12,
    smooth: 8,
};

fn sample_arrival_edges<R: Rng>(rng: &mut R, mean: f64, tuning: &ArrivalTuning) -> usize {
    if mean <= 1.0 {
        return 1;
    }
    let (p1, p2) = (tuning.one, tuning.two);
    let tail_floor = p1 + 2.0 * p2 + 3.0 * (1.0 - p1 - p2);
    if mean < tail_floor {
        // Two-point {1, 2} mix keeps the exact mean when the tail would
        // need fewer than 3 edges.
        let q1 = 2.0 - mean;
        return if rng.random::<f64>() < q1 { 1 } else { 2 };
    }
    let u: f64 = rng.random();
    if u < p1 {
        1
    } else if u < p1 + p2 {
        2
    } else {
        let x = (mean - p1 - 2.0 * p2) / (1.0 - p1 - p2);
        let lo = x.floor();
        let frac = x - lo;
        lo as usize + usize::from(rng.random::<f64>() < frac)
    }
}

/// Generate a connected preferential-attachment graph with the given average
/// degree (within ±10%), deterministic per seed.
pub fn generate_synthetic(
    n: usize,
    target_avg_degree: f64,
    seed: u64,
) -> Result<SocialGraph, GraphError> {
    generate_with(n, target_avg_degree, seed, &DEFAULT_TUNING)
}

pub(crate) fn generate_with(
    n: usize,
    target_avg_degree: f64,
    seed: u64,
    tuning: &ArrivalTuning,
) -> Result<SocialGraph, GraphError> {
    if n < 10 {
        return Err(GraphError::Param(format!("need at least 10 nodes, got {n}")));
    }
    if target_avg_degree < 2.0 {
        return Err(GraphError::Param(format!(
            "average degree must be at least 2, got {target_avg_degree}"
        )));
    }
    if target_avg_degree > (n - 1) as f64 {
        return Err(GraphError::Param(format!(
            "average degree {target_avg_degree} unreachable with {n} nodes"
        )));
    }
    let mean_m = target_avg_degree / 2.0;
    let mut rng = rng::stream_rng(seed, Stream::GraphGen, 0);

    let mut edges: Vec<(NodeId, NodeId)> = vec![(0, 1)];
    // One entry per edge endpoint; uniform picks from it are degree-weighted.
    let mut endpoints: Vec<NodeId> = vec![0, 1];

    for i in 2..n {
        let m = sample_arrival_edges(&mut rng, mean_m, tuning).min(i);
        let mut targets: BTreeSet<NodeId> = BTreeSet::new();
        if m == i {
            targets.extend(0..i as NodeId);
        } else {
            let mut attempts = 0usize;
            while targets.len() < m {
                // Weight degree + smooth: the first `endpoints.len()`
                // outcomes are degree-proportional, the rest give each
                // existing node `smooth` uniform chances.
                let total = endpoints.len() as u64 + tuning.smooth * i as u64;
                let k = rng.random_range(0..total);
                let t = if (k as usize) < endpoints.len() {
                    endpoints[k as usize]
                } else {
                    ((k - endpoints.len() as u64) / tuning.smooth) as NodeId
                };
                targets.insert(t);
                attempts += 1;
                if attempts > 64 * m + 64 {
                    // Degenerate corner (tiny graphs): fall back to the
                    // lowest ids not yet chosen.
                    for v in 0..i as NodeId {
                        if targets.len() >= m {
                            break;
                        }
                        targets.insert(v);
                    }
                }
            }
        }
        for &t in &targets {
            edges.push((i as NodeId, t));
            endpoints.push(i as NodeId);
            endpoints.push(t);
        }
    }
    Ok(SocialGraph::from_edges(n, &edges))
}
