//! Storekeeper placement: friend acceptance, stranger pools, super-peer
//! fallback, reciprocal pairing for the flat scheme, and strategy
//! classification.
//!
//! Placement runs over week-one traces only and processes owners in
//! ascending id order, so capacity contention resolves deterministically.

use std::collections::BTreeSet;
use std::fmt;

use crate::graph::{NodeId, SocialGraph};
use crate::rng::{self, Stream};
use crate::slots::{SlotSet, TimeGrid};
use crate::trace::UptimeTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    SuperPeer,
    Flat,
}

/// The four storage strategy classes a node can end up in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Keepers among both neighbors and strangers.
    NeighborsAndStrangers,
    /// Keepers among neighbors only (also the owner-only degenerate case).
    NeighborsOnly,
    /// Keepers among strangers only.
    StrangersOnly,
    /// Stored solely at a super-peer.
    SuperPeerOnly,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::NeighborsAndStrangers,
        Strategy::NeighborsOnly,
        Strategy::StrangersOnly,
        Strategy::SuperPeerOnly,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Strategy::NeighborsAndStrangers => "S_nns",
            Strategy::NeighborsOnly => "S_nn",
            Strategy::StrangersOnly => "S_ns",
            Strategy::SuperPeerOnly => "S_nsp",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone)]
pub struct PlacementParameters {
    /// Probability (percent) that a friend accepts a neighbor's data.
    pub p_fd: f64,
    /// Percentage of non-super-peer nodes joining the stranger pool.
    pub p_sd: f64,
    /// Probability (percent) that a pool member accepts a stranger's request.
    pub p_as: f64,
    /// Coverage fraction at which a node stops recruiting keepers.
    pub theta: f64,
    pub max_friend_keepers: usize,
    /// Owners a single keeper will store for, friend and stranger agreements
    /// combined.
    pub keeper_capacity: usize,
    pub max_stranger_keepers: usize,
    pub mode: Mode,
}

impl Default for PlacementParameters {
    fn default() -> Self {
        PlacementParameters {
            p_fd: 50.0,
            p_sd: 50.0,
            p_as: 40.0,
            theta: 0.95,
            max_friend_keepers: 8,
            keeper_capacity: 8,
            max_stranger_keepers: 5,
            mode: Mode::SuperPeer,
        }
    }
}

/// Acceptance decisions, evaluated lazily from hashed per-id draws. The
/// uniform behind each decision is independent of the percentage, so runs
/// that share a seed differ only through the thresholds.
#[derive(Debug, Clone)]
pub struct AcceptanceTables {
    seed: u64,
    p_fd: f64,
    p_sd: f64,
    p_as: f64,
}

impl AcceptanceTables {
    /// Whether `friend` accepts storing `owner`'s data.
    pub fn friend_accepts(&self, owner: NodeId, friend: NodeId) -> bool {
        rng::percent_draw(
            self.seed,
            Stream::FriendAccept,
            owner as u64,
            friend as u64,
            self.p_fd,
        )
    }

    /// Raw pool-membership draw; super-peers are filtered out by the registry.
    pub fn joins_stranger_pool(&self, node: NodeId) -> bool {
        rng::percent_draw(self.seed, Stream::PoolMembership, node as u64, 0, self.p_sd)
    }

    /// Whether a pool member is willing to accept stranger requests.
    pub fn willing_to_accept(&self, node: NodeId) -> bool {
        rng::percent_draw(self.seed, Stream::PoolWilling, node as u64, 0, self.p_as)
    }
}

/// Sample the per-pair and per-node acceptance tables for a run.
pub fn sample_acceptances(params: &PlacementParameters, seed: u64) -> AcceptanceTables {
    AcceptanceTables {
        seed,
        p_fd: params.p_fd,
        p_sd: params.p_sd,
        p_as: params.p_as,
    }
}

/// What the super-peers collectively know: the user list, every node's
/// week-one uptime (the Time-Track pool), and the stranger pool.
#[derive(Debug, Clone)]
pub struct SuperPeerRegistry {
    pub super_peers: Vec<NodeId>,
    pub stranger_pool: Vec<NodeId>,
    /// Week-one uptime per node, indexed by id.
    pub tt_pool: Vec<SlotSet>,
    pub user_count: usize,
}

impl SuperPeerRegistry {
    pub fn build(
        g: &SocialGraph,
        accept: &AcceptanceTables,
        traces: &[UptimeTrace],
        grid: &TimeGrid,
    ) -> SuperPeerRegistry {
        let tt_pool: Vec<SlotSet> = traces.iter().map(|t| t.week1(grid)).collect();
        let stranger_pool: Vec<NodeId> = (0..g.node_count() as NodeId)
            .filter(|&v| !g.is_super_peer(v) && accept.joins_stranger_pool(v))
            .collect();
        SuperPeerRegistry {
            super_peers: g.super_peers(),
            stranger_pool,
            tt_pool,
            user_count: g.node_count(),
        }
    }

    pub fn in_stranger_pool(&self, node: NodeId) -> bool {
        self.stranger_pool.binary_search(&node).is_ok()
    }
}

/// A node's storekeeper set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StorekeeperSet {
    pub owner: NodeId,
    pub friend_keepers: Vec<NodeId>,
    pub stranger_keepers: Vec<NodeId>,
    pub super_peer_keeper: Option<NodeId>,
    pub strategy: Strategy,
}

impl StorekeeperSet {
    /// All replica holders other than the owner, ascending.
    pub fn keepers(&self) -> Vec<NodeId> {
        let mut all: Vec<NodeId> = self
            .friend_keepers
            .iter()
            .chain(self.stranger_keepers.iter())
            .chain(self.super_peer_keeper.iter())
            .copied()
            .collect();
        all.sort_unstable();
        all
    }
}

/// Classify a keeper set into its strategy class. A set holding only a
/// super-peer is super-peer-only; an entirely empty set degenerates to
/// neighbors-only (the owner keeps its own data).
pub fn classify_strategy(
    friend_keepers: &[NodeId],
    stranger_keepers: &[NodeId],
    super_peer: Option<NodeId>,
) -> Strategy {
    match (friend_keepers.is_empty(), stranger_keepers.is_empty()) {
        (false, false) => Strategy::NeighborsAndStrangers,
        (false, true) => Strategy::NeighborsOnly,
        (true, false) => Strategy::StrangersOnly,
        (true, true) if super_peer.is_some() => Strategy::SuperPeerOnly,
        (true, true) => Strategy::NeighborsOnly,
    }
}

/// Keeper agreements held per node. Friend and stranger agreements share
/// one budget; super-peer assignments are tracked separately and unbounded
/// (super-peers are assumed to have the space).
#[derive(Debug, Clone)]
pub struct KeeperLoads {
    pub keeper: Vec<u32>,
    pub super_peer: Vec<u32>,
}

impl KeeperLoads {
    pub fn new(n: usize) -> Self {
        KeeperLoads {
            keeper: vec![0; n],
            super_peer: vec![0; n],
        }
    }
}

fn coverage_reached(covered: usize, universe: usize, theta: f64) -> bool {
    covered as f64 >= theta * universe as f64 - 1e-9
}

/// Candidates grouped by identical uptime pattern. Selection cost scales
/// with the number of distinct patterns, not the pool size, which is what
/// keeps full-population placement fast.
pub struct PatternBuckets {
    buckets: Vec<(SlotSet, BTreeSet<NodeId>)>,
    bucket_of: std::collections::HashMap<NodeId, u32>,
}

impl PatternBuckets {
    pub fn build(members: impl Iterator<Item = NodeId>, bits: &[SlotSet]) -> PatternBuckets {
        let mut buckets: Vec<(SlotSet, BTreeSet<NodeId>)> = Vec::new();
        let mut index: std::collections::HashMap<SlotSet, usize> =
            std::collections::HashMap::new();
        let mut bucket_of = std::collections::HashMap::new();
        for id in members {
            let pattern = bits[id as usize];
            let slot = *index.entry(pattern).or_insert_with(|| {
                buckets.push((pattern, BTreeSet::new()));
                buckets.len() - 1
            });
            buckets[slot].1.insert(id);
            bucket_of.insert(id, slot as u32);
        }
        PatternBuckets { buckets, bucket_of }
    }

    pub fn remove(&mut self, id: NodeId) {
        if let Some(slot) = self.bucket_of.remove(&id) {
            self.buckets[slot as usize].1.remove(&id);
        }
    }

    /// Best candidate for the current uncovered set: maximal gain, ties to
    /// the lowest node id, skipping excluded nodes.
    fn best(
        &self,
        uncovered: &SlotSet,
        excluded: &dyn Fn(NodeId) -> bool,
    ) -> Option<(NodeId, SlotSet)> {
        let mut best: Option<(usize, NodeId, SlotSet)> = None;
        for (pattern, ids) in &self.buckets {
            if ids.is_empty() {
                continue;
            }
            let gain = pattern.intersection_count(uncovered);
            if gain == 0 {
                continue;
            }
            if let Some((g, id, _)) = &best {
                if gain < *g {
                    continue;
                }
                if gain == *g {
                    if let Some(&c) = ids.iter().find(|&&c| c < *id && !excluded(c)) {
                        best = Some((gain, c, *pattern));
                    }
                    continue;
                }
            }
            if let Some(&c) = ids.iter().find(|&&c| !excluded(c)) {
                best = Some((gain, c, *pattern));
            }
        }
        best.map(|(_, id, p)| (id, p))
    }
}

/// Greedy cover loop shared by friend and stranger selection.
fn greedy_select(
    covered: &mut SlotSet,
    pool: &mut PatternBuckets,
    max_picks: usize,
    theta: f64,
    excluded: impl Fn(NodeId) -> bool,
    mut on_pick: impl FnMut(NodeId, &mut PatternBuckets),
) -> Vec<NodeId> {
    let universe = covered.len();
    let mut picked: Vec<NodeId> = Vec::new();
    while picked.len() < max_picks && !coverage_reached(covered.count(), universe, theta) {
        // A picked candidate's whole pattern is covered afterwards, so its
        // bucket drops to zero gain and cannot be chosen again.
        let uncovered = covered.complement();
        let candidate = pool.best(&uncovered, &excluded);
        let Some((id, pattern)) = candidate else {
            break;
        };
        covered.union_with(&pattern);
        picked.push(id);
        on_pick(id, pool);
    }
    picked
}

/// Pick friend keepers for `owner` by greedy coverage of its week-one
/// offline slots, among accepting friends with spare capacity. `covered`
/// starts at the owner's own uptime and is extended in place.
pub fn friend_select(
    owner: NodeId,
    g: &SocialGraph,
    accept: &AcceptanceTables,
    registry: &SuperPeerRegistry,
    params: &PlacementParameters,
    loads: &KeeperLoads,
    covered: &mut SlotSet,
) -> Vec<NodeId> {
    let candidates = g.neighbors(owner).iter().copied().filter(|&f| {
        accept.friend_accepts(owner, f)
            && (loads.keeper[f as usize] as usize) < params.keeper_capacity
    });
    let mut pool = PatternBuckets::build(candidates, &registry.tt_pool);
    greedy_select(
        covered,
        &mut pool,
        params.max_friend_keepers,
        params.theta,
        |_| false,
        |_, _| {},
    )
}

/// Suggest stranger keepers from the shared pool: willing members with spare
/// capacity that are neither the owner nor its friends, greedy over week-one
/// coverage, capped at `max_stranger_keepers`. May return an empty set.
pub fn stranger_suggest(
    owner: NodeId,
    g: &SocialGraph,
    params: &PlacementParameters,
    loads: &mut KeeperLoads,
    pool: &mut PatternBuckets,
    covered: &mut SlotSet,
) -> Vec<NodeId> {
    let keeper_capacity = params.keeper_capacity;
    greedy_select(
        covered,
        pool,
        params.max_stranger_keepers,
        params.theta,
        |id| id == owner || g.are_friends(owner, id),
        |id, pool| {
            loads.keeper[id as usize] += 1;
            if loads.keeper[id as usize] as usize >= keeper_capacity {
                pool.remove(id);
            }
        },
    )
}

/// Run the placement pipeline for one owner: friends first, then the
/// stranger pool if the owner joined it and is still short of the target,
/// then a super-peer as an exclusive last resort when the node got no
/// keepers at all.
fn build_placement(
    owner: NodeId,
    g: &SocialGraph,
    accept: &AcceptanceTables,
    registry: &SuperPeerRegistry,
    params: &PlacementParameters,
    loads: &mut KeeperLoads,
    stranger_pool: &mut PatternBuckets,
) -> StorekeeperSet {
    let mut covered = registry.tt_pool[owner as usize];
    let universe = covered.len();

    let friend_keepers = friend_select(owner, g, accept, registry, params, loads, &mut covered);
    for &f in &friend_keepers {
        loads.keeper[f as usize] += 1;
        if loads.keeper[f as usize] as usize >= params.keeper_capacity {
            stranger_pool.remove(f);
        }
    }

    let mut stranger_keepers = Vec::new();
    if !coverage_reached(covered.count(), universe, params.theta)
        && registry.in_stranger_pool(owner)
    {
        stranger_keepers = stranger_suggest(owner, g, params, loads, stranger_pool, &mut covered);
    }

    let mut super_peer_keeper = None;
    if params.mode == Mode::SuperPeer
        && friend_keepers.is_empty()
        && stranger_keepers.is_empty()
        && !coverage_reached(covered.count(), universe, params.theta)
    {
        // Least-loaded super-peer, ties to the lower id; never the owner.
        super_peer_keeper = registry
            .super_peers
            .iter()
            .copied()
            .filter(|&sp| sp != owner)
            .min_by_key(|&sp| (loads.super_peer[sp as usize], sp));
        if let Some(sp) = super_peer_keeper {
            loads.super_peer[sp as usize] += 1;
        }
    }

    let strategy = classify_strategy(&friend_keepers, &stranger_keepers, super_peer_keeper);
    StorekeeperSet {
        owner,
        friend_keepers,
        stranger_keepers,
        super_peer_keeper,
        strategy,
    }
}

/// Super-peer-mode placement for every owner, ascending id order.
pub fn place_all(
    g: &SocialGraph,
    accept: &AcceptanceTables,
    registry: &SuperPeerRegistry,
    params: &PlacementParameters,
) -> Vec<StorekeeperSet> {
    let mut loads = KeeperLoads::new(g.node_count());
    let mut stranger_pool = PatternBuckets::build(
        registry
            .stranger_pool
            .iter()
            .copied()
            .filter(|&v| accept.willing_to_accept(v)),
        &registry.tt_pool,
    );
    (0..g.node_count() as NodeId)
        .map(|owner| {
            build_placement(
                owner,
                g,
                accept,
                registry,
                params,
                &mut loads,
                &mut stranger_pool,
            )
        })
        .collect()
}

/// Flat-mode placement: friend selection as usual, then stranger matching by
/// reciprocal pairing. Two mutually non-friend, non-new-joinee nodes pair
/// when each covers at least 10% of the other's uncovered slots, greedily
/// over a seeded random order, one partner per node. New joinees skip
/// stranger matching entirely; there is no super-peer fallback.
pub fn flat_place_all(
    g: &SocialGraph,
    accept: &AcceptanceTables,
    registry: &SuperPeerRegistry,
    params: &PlacementParameters,
    seed: u64,
) -> Vec<StorekeeperSet> {
    let n = g.node_count();
    let mut loads = KeeperLoads::new(n);
    let mut covered: Vec<SlotSet> = registry.tt_pool.clone();
    let mut friend_sets: Vec<Vec<NodeId>> = Vec::with_capacity(n);
    for owner in 0..n as NodeId {
        let picks = friend_select(
            owner,
            g,
            accept,
            registry,
            params,
            &loads,
            &mut covered[owner as usize],
        );
        for &f in &picks {
            loads.keeper[f as usize] += 1;
        }
        friend_sets.push(picks);
    }

    let universe = registry.tt_pool.first().map(|s| s.len()).unwrap_or(0);
    let mut order: Vec<NodeId> = (0..n as NodeId).collect();
    {
        use rand::Rng;
        let mut r = rng::stream_rng(seed, Stream::FlatOrder, 0);
        for i in (1..order.len()).rev() {
            let j = r.random_range(0..=i);
            order.swap(i, j);
        }
    }

    let mut partner: Vec<Option<NodeId>> = vec![None; n];
    let eligible = |v: NodeId, covered: &[SlotSet], loads: &KeeperLoads, partner: &[Option<NodeId>]| {
        !g.is_new_joinee(v)
            && partner[v as usize].is_none()
            && (loads.keeper[v as usize] as usize) < params.keeper_capacity
            && !coverage_reached(covered[v as usize].count(), universe, params.theta)
    };

    // Candidates still open for pairing, in the shuffled order; paired nodes
    // are swap-removed as the scan encounters them.
    let mut open: Vec<NodeId> = order.clone();
    for &i in &order {
        if !eligible(i, &covered, &loads, &partner) {
            continue;
        }
        let uncovered_i = covered[i as usize].complement();
        let need_i = uncovered_i.count();
        if need_i == 0 {
            continue;
        }
        let mut chosen: Option<NodeId> = None;
        let mut scan = 0usize;
        while scan < open.len() {
            let j = open[scan];
            if j == i {
                scan += 1;
                continue;
            }
            // Every disqualification is permanent (loads and coverage only
            // grow), so drop ineligible nodes from the scan list for good.
            if !eligible(j, &covered, &loads, &partner) {
                open.swap_remove(scan);
                continue;
            }
            if g.are_friends(i, j) {
                scan += 1;
                continue;
            }
            let uncovered_j = covered[j as usize].complement();
            let need_j = uncovered_j.count();
            let gain_ij = registry.tt_pool[j as usize].intersection_count(&uncovered_i);
            let gain_ji = registry.tt_pool[i as usize].intersection_count(&uncovered_j);
            if need_j > 0
                && gain_ij as f64 >= 0.10 * need_i as f64
                && gain_ji as f64 >= 0.10 * need_j as f64
            {
                chosen = Some(j);
                break;
            }
            scan += 1;
        }
        if let Some(j) = chosen {
            partner[i as usize] = Some(j);
            partner[j as usize] = Some(i);
            loads.keeper[i as usize] += 1;
            loads.keeper[j as usize] += 1;
            let pattern_j = registry.tt_pool[j as usize];
            let pattern_i = registry.tt_pool[i as usize];
            covered[i as usize].union_with(&pattern_j);
            covered[j as usize].union_with(&pattern_i);
        }
    }

    (0..n as NodeId)
        .map(|owner| {
            let friend_keepers = friend_sets[owner as usize].clone();
            let stranger_keepers: Vec<NodeId> = partner[owner as usize].into_iter().collect();
            let strategy = classify_strategy(&friend_keepers, &stranger_keepers, None);
            StorekeeperSet {
                owner,
                friend_keepers,
                stranger_keepers,
                super_peer_keeper: None,
                strategy,
            }
        })
        .collect()
}

/// Percentage of owners in each strategy class, ordered as
/// [`Strategy::ALL`]. Sums to 100 up to float error.
pub fn strategy_distribution(placements: &[StorekeeperSet]) -> [f64; 4] {
    let mut counts = [0usize; 4];
    for p in placements {
        let idx = Strategy::ALL.iter().position(|s| *s == p.strategy).unwrap();
        counts[idx] += 1;
    }
    let total = placements.len().max(1) as f64;
    counts.map(|c| 100.0 * c as f64 / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_synthetic;
    use crate::trace::{assign_behaviors, render_trace, super_peer_trace};

    fn world(
        n: usize,
        seed: u64,
        params: &PlacementParameters,
    ) -> (
        SocialGraph,
        AcceptanceTables,
        SuperPeerRegistry,
        Vec<UptimeTrace>,
    ) {
        let grid = TimeGrid::standard();
        let g = generate_synthetic(n, 6.0, seed)
            .unwrap()
            .elect_super_peers(0.002, seed)
            .unwrap();
        let assigns = assign_behaviors(n, seed);
        let mut traces: Vec<UptimeTrace> = assigns
            .iter()
            .enumerate()
            .map(|(i, b)| render_trace(i as NodeId, b, &grid))
            .collect();
        for sp in g.super_peers() {
            traces[sp as usize] = super_peer_trace(sp, &grid, assigns[sp as usize].location);
        }
        let accept = sample_acceptances(params, seed);
        let registry = SuperPeerRegistry::build(&g, &accept, &traces, &grid);
        (g, accept, registry, traces)
    }

    #[test]
    fn degenerate_probabilities() {
        let params = PlacementParameters {
            p_fd: 100.0,
            p_sd: 0.0,
            ..Default::default()
        };
        let (g, accept, registry, traces) = world(500, 3, &params);
        for owner in 0..500u32 {
            for &f in g.neighbors(owner) {
                assert!(accept.friend_accepts(owner, f));
            }
        }
        assert!(registry.stranger_pool.is_empty());

        let full = PlacementParameters {
            p_sd: 100.0,
            ..Default::default()
        };
        let accept = sample_acceptances(&full, 3);
        let registry = SuperPeerRegistry::build(&g, &accept, &traces, &TimeGrid::standard());
        let non_sp = (0..500u32).filter(|&v| !g.is_super_peer(v)).count();
        assert_eq!(registry.stranger_pool.len(), non_sp);
    }

    #[test]
    fn pool_size_tracks_binomial() {
        let params = PlacementParameters {
            p_sd: 70.0,
            ..Default::default()
        };
        let (g, _, registry, _) = world(10_000, 5, &params);
        let non_sp = (0..10_000u32).filter(|&v| !g.is_super_peer(v)).count() as f64;
        let expected = 0.70 * non_sp;
        let sigma = (non_sp * 0.7 * 0.3).sqrt();
        let got = registry.stranger_pool.len() as f64;
        assert!(
            (got - expected).abs() < 3.0 * sigma,
            "pool size {got} vs expected {expected} (3 sigma {})",
            3.0 * sigma
        );
    }

    #[test]
    fn always_online_owner_needs_no_keepers() {
        let params = PlacementParameters::default();
        let (g, accept, mut registry, _) = world(200, 7, &params);
        registry.tt_pool[0] = SlotSet::full(168);
        let loads = KeeperLoads::new(200);
        let mut covered = registry.tt_pool[0];
        let picks = friend_select(0, &g, &accept, &registry, &params, &loads, &mut covered);
        assert!(picks.is_empty());
    }

    #[test]
    fn complementary_friend_selected() {
        let params = PlacementParameters {
            p_fd: 100.0,
            ..Default::default()
        };
        let g = crate::graph::load_edge_list("0 1\n0 2\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8\n8 9")
            .unwrap();
        let accept = sample_acceptances(&params, 1);
        let mut tt = vec![SlotSet::new(168); 10];
        // Owner 0 online the first half of every day; friend 1 exactly the rest.
        for day in 0..7 {
            for s in 0..12 {
                tt[0].insert(day * 24 + s);
                tt[1].insert(day * 24 + 12 + s);
            }
        }
        let registry = SuperPeerRegistry {
            super_peers: vec![],
            stranger_pool: vec![],
            tt_pool: tt,
            user_count: 10,
        };
        let loads = KeeperLoads::new(10);
        let mut covered = registry.tt_pool[0];
        let picks = friend_select(0, &g, &accept, &registry, &params, &loads, &mut covered);
        assert_eq!(picks, vec![1]);
        assert_eq!(covered.count(), 168);
    }

    /// Exhaustive max-coverage oracle over subsets of bounded size.
    fn brute_force_best(base: &SlotSet, candidates: &[(NodeId, SlotSet)], max_picks: usize) -> usize {
        let mut best = base.count();
        let m = candidates.len();
        for mask in 0u32..(1 << m) {
            if (mask.count_ones() as usize) > max_picks {
                continue;
            }
            let mut u = *base;
            for (i, (_, bits)) in candidates.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    u.union_with(bits);
                }
            }
            best = best.max(u.count());
        }
        best
    }

    #[test]
    fn greedy_beats_one_minus_inverse_e() {
        use rand::Rng;
        let mut r = rng::stream_rng(99, Stream::FlatOrder, 1);
        for case in 0..200 {
            let mut base = SlotSet::new(24);
            for s in 0..24 {
                if r.random::<f64>() < 0.3 {
                    base.insert(s);
                }
            }
            let candidates: Vec<(NodeId, SlotSet)> = (0..5u32)
                .map(|id| {
                    let mut bits = SlotSet::new(24);
                    for s in 0..24 {
                        if r.random::<f64>() < 0.35 {
                            bits.insert(s);
                        }
                    }
                    (id, bits)
                })
                .collect();
            let bits_by_id: Vec<SlotSet> = candidates.iter().map(|(_, b)| *b).collect();
            let mut pool =
                PatternBuckets::build(candidates.iter().map(|(id, _)| *id), &bits_by_id);
            let mut covered = base;
            let _picks = greedy_select(&mut covered, &mut pool, 3, 1.0, |_| false, |_, _| {});
            let greedy_gain = covered.count() - base.count();
            let best = brute_force_best(&base, &candidates, 3);
            let best_gain = best - base.count();
            let bound = (1.0 - 1.0 / std::f64::consts::E) * best_gain as f64;
            assert!(
                greedy_gain as f64 >= bound - 1e-9,
                "case {case}: greedy gain {greedy_gain} below (1-1/e) of optimal gain {best_gain}"
            );
        }
    }

    #[test]
    fn toy_pool_matches_exhaustive_best() {
        // Six candidates with disjoint windows: greedy equals the exhaustive
        // optimum for any subset size.
        let sizes = [6usize, 5, 4, 3, 2, 1];
        let mut start = 0usize;
        let mut bits_by_id = Vec::new();
        for sz in sizes {
            let mut b = SlotSet::new(24);
            b.insert_range(start, start + sz);
            start += sz;
            bits_by_id.push(b);
        }
        let base = SlotSet::new(24);
        let mut pool = PatternBuckets::build(0..6u32, &bits_by_id);
        let mut covered = base;
        let picks = greedy_select(&mut covered, &mut pool, 2, 1.0, |_| false, |_, _| {});
        assert_eq!(picks, vec![0, 1]);
        let candidates: Vec<(NodeId, SlotSet)> = bits_by_id
            .iter()
            .enumerate()
            .map(|(i, b)| (i as u32, *b))
            .collect();
        assert_eq!(covered.count(), brute_force_best(&base, &candidates, 2));
    }

    #[test]
    fn satisfied_owner_skips_stranger_request() {
        // An owner fully covered by a friend never consumes pool capacity.
        let params = PlacementParameters {
            p_fd: 100.0,
            p_sd: 100.0,
            p_as: 100.0,
            ..Default::default()
        };
        let g = crate::graph::load_edge_list("0 1\n2 3\n0 2\n1 3\n4 0\n5 0\n6 0\n7 0\n8 0\n9 0")
            .unwrap();
        let mut tt = vec![SlotSet::full(168); 10];
        tt[0] = SlotSet::new(168);
        for day in 0..7 {
            for s in 0..12 {
                tt[0].insert(day * 24 + s);
            }
        }
        let accept = sample_acceptances(&params, 2);
        let registry = SuperPeerRegistry {
            super_peers: vec![],
            stranger_pool: (0..10).collect(),
            tt_pool: tt,
            user_count: 10,
        };
        let mut loads = KeeperLoads::new(10);
        let mut pool =
            PatternBuckets::build(registry.stranger_pool.iter().copied(), &registry.tt_pool);
        let set = build_placement(0, &g, &accept, &registry, &params, &mut loads, &mut pool);
        assert!(!set.friend_keepers.is_empty());
        assert!(set.stranger_keepers.is_empty());
        assert_eq!(set.strategy, Strategy::NeighborsOnly);
    }

    #[test]
    fn forced_super_peer_fallback() {
        let params = PlacementParameters {
            p_fd: 0.0,
            p_sd: 100.0,
            p_as: 0.0,
            ..Default::default()
        };
        let (g, accept, registry, _) = world(300, 11, &params);
        let placements = place_all(&g, &accept, &registry, &params);
        for p in &placements {
            assert!(p.friend_keepers.is_empty());
            assert!(p.stranger_keepers.is_empty());
            assert_eq!(p.strategy, Strategy::SuperPeerOnly);
            assert!(p.super_peer_keeper.is_some());
            assert_ne!(p.super_peer_keeper, Some(p.owner));
        }
    }

    #[test]
    fn classification_table() {
        assert_eq!(
            classify_strategy(&[1], &[2], None),
            Strategy::NeighborsAndStrangers
        );
        assert_eq!(classify_strategy(&[1], &[], None), Strategy::NeighborsOnly);
        assert_eq!(classify_strategy(&[], &[2], None), Strategy::StrangersOnly);
        assert_eq!(
            classify_strategy(&[], &[], Some(9)),
            Strategy::SuperPeerOnly
        );
        assert_eq!(classify_strategy(&[], &[], None), Strategy::NeighborsOnly);
    }

    #[test]
    fn strategy_distribution_sums_to_100() {
        let params = PlacementParameters::default();
        let (g, accept, registry, _) = world(2000, 13, &params);
        let placements = place_all(&g, &accept, &registry, &params);
        let dist = strategy_distribution(&placements);
        let sum: f64 = dist.iter().sum();
        assert!((sum - 100.0).abs() < 0.1, "sum {sum}");
    }

    #[test]
    fn modal_strategy_under_scarce_parameters() {
        // The all-scarce combination funnels most owners to super-peers.
        let params = PlacementParameters {
            p_fd: 20.0,
            p_sd: 50.0,
            p_as: 40.0,
            ..Default::default()
        };
        let (g, accept, registry, _) = world(10_000, 1, &params);
        let placements = place_all(&g, &accept, &registry, &params);
        let dist = strategy_distribution(&placements);
        let sp_share = dist[3];
        assert!(
            dist.iter().all(|&v| v <= sp_share),
            "super-peer-only is not modal: {dist:?}"
        );
    }

    #[test]
    fn capacity_never_exceeded() {
        let params = PlacementParameters {
            p_fd: 80.0,
            p_sd: 80.0,
            p_as: 80.0,
            keeper_capacity: 3,
            ..Default::default()
        };
        let (g, accept, registry, _) = world(1500, 17, &params);
        let placements = place_all(&g, &accept, &registry, &params);
        let mut load = vec![0usize; 1500];
        for p in &placements {
            for k in p.friend_keepers.iter().chain(p.stranger_keepers.iter()) {
                load[*k as usize] += 1;
            }
        }
        assert!(load.iter().all(|&l| l <= 3), "keeper over capacity");
    }

    #[test]
    fn placement_ignores_week_two() {
        let params = PlacementParameters::default();
        let grid = TimeGrid::standard();
        let (g, accept, _, mut traces) = world(400, 19, &params);
        let registry = SuperPeerRegistry::build(&g, &accept, &traces, &grid);
        let before = place_all(&g, &accept, &registry, &params);
        use rand::Rng;
        let mut r = rng::stream_rng(19, Stream::FlatOrder, 5);
        for t in traces.iter_mut() {
            for _ in 0..10 {
                let s = r.random_range(168..336);
                if t.bits.contains(s) {
                    t.bits.remove(s);
                } else {
                    t.bits.insert(s);
                }
            }
        }
        let registry2 = SuperPeerRegistry::build(&g, &accept, &traces, &grid);
        let after = place_all(&g, &accept, &registry2, &params);
        assert_eq!(before, after);
    }

    #[test]
    fn raising_p_fd_never_shrinks_acceptance() {
        let (g, _, _, _) = world(300, 23, &PlacementParameters::default());
        for p_lo in [10.0, 30.0, 50.0] {
            let lo = sample_acceptances(
                &PlacementParameters {
                    p_fd: p_lo,
                    ..Default::default()
                },
                23,
            );
            let hi = sample_acceptances(
                &PlacementParameters {
                    p_fd: p_lo + 25.0,
                    ..Default::default()
                },
                23,
            );
            for owner in 0..300u32 {
                for &f in g.neighbors(owner) {
                    assert!(!lo.friend_accepts(owner, f) || hi.friend_accepts(owner, f));
                }
            }
        }
    }

    #[test]
    fn flat_joinee_without_friends_is_owner_only() {
        let params = PlacementParameters {
            p_fd: 0.0,
            mode: Mode::Flat,
            ..Default::default()
        };
        let (g, accept, registry, _) = world(500, 29, &params);
        let placements = flat_place_all(&g, &accept, &registry, &params, 29);
        for p in &placements {
            if g.is_new_joinee(p.owner) {
                assert!(p.friend_keepers.is_empty());
                assert!(p.stranger_keepers.is_empty());
                assert!(p.super_peer_keeper.is_none());
                assert_eq!(p.strategy, Strategy::NeighborsOnly);
            }
        }
    }

    #[test]
    fn flat_pairs_complementary_non_friends() {
        let params = PlacementParameters {
            p_fd: 0.0,
            mode: Mode::Flat,
            ..Default::default()
        };
        // A 10-node path; nodes 2 and 7 are not friends. Node 0 is the
        // graph's new joinee (lowest degree, lowest id) and sits out.
        let g =
            crate::graph::load_edge_list("0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8\n8 9").unwrap();
        assert!(g.is_new_joinee(0));
        let mut tt = vec![SlotSet::new(168); 10];
        for day in 0..7 {
            for s in 0..12 {
                tt[2].insert(day * 24 + s);
                tt[7].insert(day * 24 + 12 + s);
            }
        }
        // Everyone else fully covered so they stay out of the pairing pool.
        for (v, bits) in tt.iter_mut().enumerate() {
            if v != 2 && v != 7 {
                *bits = SlotSet::full(168);
            }
        }
        let accept = sample_acceptances(&params, 31);
        let registry = SuperPeerRegistry {
            super_peers: vec![],
            stranger_pool: vec![],
            tt_pool: tt,
            user_count: 10,
        };
        let placements = flat_place_all(&g, &accept, &registry, &params, 31);
        assert_eq!(placements[2].stranger_keepers, vec![7]);
        assert_eq!(placements[7].stranger_keepers, vec![2]);
        assert_eq!(placements[2].strategy, Strategy::StrangersOnly);
    }

    #[test]
    fn flat_mode_has_no_super_peer_strategy() {
        let params = PlacementParameters {
            mode: Mode::Flat,
            ..Default::default()
        };
        let (g, accept, registry, _) = world(1000, 37, &params);
        let placements = flat_place_all(&g, &accept, &registry, &params, 37);
        assert!(placements
            .iter()
            .all(|p| p.strategy != Strategy::SuperPeerOnly));
        let dist = strategy_distribution(&placements);
        assert!((dist.iter().sum::<f64>() - 100.0).abs() < 0.1);
        assert_eq!(dist[3], 0.0);
    }

    #[test]
    fn stranger_keepers_never_friends_or_self() {
        let params = PlacementParameters {
            p_fd: 30.0,
            p_sd: 90.0,
            p_as: 90.0,
            ..Default::default()
        };
        let (g, accept, registry, _) = world(1200, 41, &params);
        let placements = place_all(&g, &accept, &registry, &params);
        for p in &placements {
            for &s in &p.stranger_keepers {
                assert_ne!(s, p.owner);
                assert!(!g.are_friends(p.owner, s));
            }
            for &f in &p.friend_keepers {
                assert!(g.are_friends(p.owner, f));
            }
        }
    }
}

#[cfg(test)]
mod calibration {
    use super::*;
    use crate::graph::{generate_with, ArrivalTuning};
    use crate::metrics;
    use crate::trace::{apply_deviation, assign_behaviors, render_trace, super_peer_trace};

    struct Probe {
        g: SocialGraph,
        traces_nd: Vec<UptimeTrace>,
        traces_d: Vec<UptimeTrace>,
        flat_nd: Vec<UptimeTrace>,
        flat_d: Vec<UptimeTrace>,
        grid: TimeGrid,
    }

    fn build_probe(n: usize, seed: u64, tuning: &ArrivalTuning) -> Probe {
        let grid = TimeGrid::standard();
        let g = generate_with(n, 6.0, seed, tuning)
            .unwrap()
            .elect_super_peers(0.002, seed)
            .unwrap();
        let assigns = assign_behaviors(n, seed);
        let base: Vec<UptimeTrace> = assigns
            .iter()
            .enumerate()
            .map(|(i, b)| render_trace(i as NodeId, b, &grid))
            .collect();
        let mut dev = base.clone();
        apply_deviation(&mut dev, &assigns, &grid, seed).unwrap();
        let mut traces_nd = base.clone();
        let mut traces_d = dev.clone();
        for sp in g.super_peers() {
            let t = super_peer_trace(sp, &grid, assigns[sp as usize].location);
            traces_nd[sp as usize] = t;
            traces_d[sp as usize] = t;
        }
        Probe { g, traces_nd, traces_d, flat_nd: base, flat_d: dev, grid }
    }

    fn params(p: (f64, f64, f64), cap: usize, mode: Mode) -> PlacementParameters {
        PlacementParameters {
            p_fd: p.0, p_sd: p.1, p_as: p.2,
            keeper_capacity: cap,
            mode,
            ..Default::default()
        }
    }

    fn place(probe: &Probe, pp: &PlacementParameters, seed: u64) -> Vec<StorekeeperSet> {
        let accept = sample_acceptances(pp, seed);
        let traces = if pp.mode == Mode::Flat { &probe.flat_nd } else { &probe.traces_nd };
        let registry = SuperPeerRegistry::build(&probe.g, &accept, traces, &probe.grid);
        match pp.mode {
            Mode::SuperPeer => place_all(&probe.g, &accept, &registry, pp),
            Mode::Flat => flat_place_all(&probe.g, &accept, &registry, pp, seed),
        }
    }

    #[test]
    #[ignore]
    fn sweep() {
        let combos = [
            (50.0, 50.0, 100.0), (50.0, 70.0, 100.0), (20.0, 70.0, 100.0), (20.0, 50.0, 100.0),
            (20.0, 50.0, 40.0), (20.0, 70.0, 40.0), (50.0, 70.0, 40.0), (50.0, 50.0, 40.0),
        ];
        let n = 20_000;
        let seed = 1;
        for (one, two, smooth) in [(0.75, 0.08, 1u64), (0.72, 0.09, 1), (0.70, 0.10, 1), (0.75, 0.08, 0)] {
            for cap in [3usize, 4] {
                let tuning = ArrivalTuning { one, two, smooth };
                let probe = build_probe(n, seed, &tuning);
                println!("=== one={one} two={two} smooth={smooth} cap={cap}");
                for (k, c) in combos.iter().enumerate() {
                    let pp = params(*c, cap, Mode::SuperPeer);
                    let pl = place(&probe, &pp, seed);
                    let d = strategy_distribution(&pl);
                    println!("  C{}: nns={:.1} nn={:.1} ns={:.1} nsp={:.1}", k + 1, d[0], d[1], d[2], d[3]);
                }
                // criterion 3: C8 ND, FT100 and TT100
                let pp8 = params(combos[7], cap, Mode::SuperPeer);
                let pl8 = place(&probe, &pp8, seed);
                let rep_nd = metrics::build_report(&probe.g, &pl8, &probe.traces_nd, &probe.grid);
                let ft100 = metrics::AvailabilityReport::fraction_at_full(&rep_nd.ft_values());
                let tt100 = metrics::AvailabilityReport::fraction_at_full(&rep_nd.tt_values());
                let rep_d = metrics::build_report(&probe.g, &pl8, &probe.traces_d, &probe.grid);
                let ftd = &rep_d.ft;
                println!(
                    "  C8-ND: FT100={:.1}% TT100={:.1}% FTND-E={:.1} FTD-E+VG={:.1}",
                    ft100 * 100.0, tt100 * 100.0,
                    rep_nd.ft.categories[0],
                    ftd.categories[0] + ftd.categories[1]
                );
                // criterion 4: flat vs sp Excellent (TT), ND and D
                let ppf = params(combos[7], cap, Mode::Flat);
                let plf = place(&probe, &ppf, seed);
                let rf_nd = metrics::build_report(&probe.g, &plf, &probe.flat_nd, &probe.grid);
                let rf_d = metrics::build_report(&probe.g, &plf, &probe.flat_d, &probe.grid);
                println!(
                    "  flat: E-ND={:.1} E-D={:.1} ratio={:.2} | sp E-ND={:.1}",
                    rf_nd.tt.categories[0], rf_d.tt.categories[0],
                    rf_d.tt.categories[0] / rf_nd.tt.categories[0].max(1e-9),
                    rep_nd.tt.categories[0]
                );
                // criterion 5: C5/D, share of nodes at TT <= 60%
                let pp5 = params(combos[4], cap, Mode::SuperPeer);
                let pl5 = place(&probe, &pp5, seed);
                let rep5 = metrics::build_report(&probe.g, &pl5, &probe.traces_d, &probe.grid);
                let le60 = rep5.nodes.iter().filter(|v| v.avl_tt <= 0.60).count() as f64
                    / rep5.nodes.len() as f64;
                println!("  C5-D: share(TT<=60%)={:.1}%", le60 * 100.0);
            }
        }
    }
}
