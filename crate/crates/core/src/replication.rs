//! Replica synchronization: sync while online together, super-peer
//! rendezvous bridging across coverage gaps, timestamped conflict
//! resolution, buffered updates, and capacity eviction.
//!
//! Each owner's replica group evolves independently given the traces and the
//! placement, so the population is replayed one group at a time. Data moves
//! only between simultaneously-online nodes: members sharing a slot equalize
//! to the freshest state, a member logging off alone deposits its state at
//! the rendezvous super-peer, and arrivals re-seed from whoever is up (or
//! the rendezvous). Within a slot, stamps are taken against the slot-start
//! snapshot and merges are max-unions, so outcomes do not depend on the
//! order participants are processed in.

use crate::error::ReplicationError;
use crate::graph::NodeId;
use crate::rng::{self, Stream};
use crate::slots::SlotSet;

/// A logical timestamp: totally ordered by counter, then author id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LogicalStamp {
    pub counter: u64,
    pub author: NodeId,
}

impl LogicalStamp {
    pub const ZERO: LogicalStamp = LogicalStamp {
        counter: 0,
        author: 0,
    };
}

/// One stored data item: its stamp and its size in abstract units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Item {
    pub stamp: LogicalStamp,
    pub size: u32,
}

/// A replica of one owner's data held by one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicaState {
    pub holder: NodeId,
    pub owner: NodeId,
    pub version: LogicalStamp,
    /// Item log, ascending by stamp; total size never exceeds `capacity_s`.
    pub items: Vec<Item>,
    pub capacity_s: u32,
}

impl ReplicaState {
    pub fn new(holder: NodeId, owner: NodeId, capacity_s: u32) -> Self {
        ReplicaState {
            holder,
            owner,
            version: LogicalStamp::ZERO,
            items: Vec::new(),
            capacity_s,
        }
    }

    pub fn total_size(&self) -> u32 {
        self.items.iter().map(|i| i.size).sum()
    }

    /// Insert an item in stamp order (idempotent on duplicates) and evict
    /// down to capacity. Fails if the item alone exceeds capacity.
    pub fn store(&mut self, item: Item) -> Result<(), ReplicationError> {
        if item.size > self.capacity_s {
            return Err(ReplicationError::Oversize {
                size: item.size,
                capacity: self.capacity_s,
            });
        }
        if let Err(pos) = self
            .items
            .binary_search_by(|probe| probe.stamp.cmp(&item.stamp))
        {
            self.items.insert(pos, item);
        }
        self.version = self.version.max(item.stamp);
        evict(self);
        Ok(())
    }

    /// Adopt everything the other replica has.
    pub fn merge_from(&mut self, other: &ReplicaState) {
        if other.version > self.version {
            self.version = other.version;
        }
        for item in &other.items {
            if let Err(pos) = self
                .items
                .binary_search_by(|probe| probe.stamp.cmp(&item.stamp))
            {
                self.items.insert(pos, *item);
            }
        }
        evict(self);
    }
}

/// Drop oldest-stamped items until the log fits the capacity again.
pub fn evict(replica: &mut ReplicaState) {
    let mut total = replica.total_size();
    while total > replica.capacity_s && !replica.items.is_empty() {
        let dropped = replica.items.remove(0);
        total -= dropped.size;
    }
}

/// An update buffered at its author while no replica of the owner is online.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PendingUpdate {
    pub author: NodeId,
    pub owner: NodeId,
    pub stamp: LogicalStamp,
    pub size: u32,
    pub buffered_at: NodeId,
}

#[derive(Debug, Clone)]
pub struct GroupParams {
    /// Per-slot probability that an online friend posts to the owner.
    pub post_probability: f64,
    /// Replica log capacity in size units.
    pub capacity_s: u32,
    /// Size of each synthetic post.
    pub post_size: u32,
    /// Whether a super-peer rendezvous bridges non-overlapping members.
    pub rendezvous: bool,
}

impl Default for GroupParams {
    fn default() -> Self {
        GroupParams {
            post_probability: 0.05,
            capacity_s: 20,
            post_size: 1,
            rendezvous: true,
        }
    }
}

/// Per-owner outcome of a replay.
#[derive(Debug, Clone)]
pub struct GroupOutcome {
    pub owner: NodeId,
    /// Fraction of slots where the best online replica lags the owner's
    /// latest produced stamp (or no replica is online at all).
    pub staleness: f64,
    pub created: usize,
    pub delivered: usize,
    pub final_versions: Vec<(NodeId, LogicalStamp)>,
}

/// Replays one owner's replica group over the horizon.
pub struct GroupSim {
    owner: NodeId,
    member_ids: Vec<NodeId>,
    owner_idx: usize,
    up: Vec<SlotSet>,
    replicas: Vec<ReplicaState>,
    /// Passive storage at a designated super-peer. Not a readable replica;
    /// it only re-seeds arriving members.
    rendezvous_sp: Option<(NodeId, SlotSet)>,
    rendezvous_state: Option<ReplicaState>,
    pending: Vec<PendingUpdate>,
    friends: Vec<NodeId>,
    friend_up: Vec<SlotSet>,
    friend_known: Vec<u64>,
    any_up_at_or_after: Vec<bool>,
    owner_latest: LogicalStamp,
    created: Vec<(LogicalStamp, usize)>,
    delivered: Vec<LogicalStamp>,
    lag_slots: usize,
    horizon: usize,
    params: GroupParams,
    seed: u64,
}

impl GroupSim {
    /// Build a group from the owner, its keepers, and its friends. Keeper
    /// and friend order is preserved and must not affect outcomes.
    pub fn new(
        owner: NodeId,
        keepers: &[NodeId],
        friends: &[NodeId],
        up_bits: impl Fn(NodeId) -> SlotSet,
        rendezvous_sp: Option<NodeId>,
        params: GroupParams,
        seed: u64,
    ) -> GroupSim {
        let mut member_ids = vec![owner];
        member_ids.extend_from_slice(keepers);
        let up: Vec<SlotSet> = member_ids.iter().map(|&m| up_bits(m)).collect();
        let horizon = up.first().map(|s| s.len()).unwrap_or(0);
        let replicas = member_ids
            .iter()
            .map(|&m| ReplicaState::new(m, owner, params.capacity_s))
            .collect();
        let mut any_up_at_or_after = vec![false; horizon + 1];
        for t in (0..horizon).rev() {
            any_up_at_or_after[t] = any_up_at_or_after[t + 1] || up.iter().any(|u| u.contains(t));
        }
        let friend_up = friends.iter().map(|&f| up_bits(f)).collect();
        GroupSim {
            owner,
            owner_idx: 0,
            member_ids,
            up,
            replicas,
            rendezvous_sp: rendezvous_sp.map(|sp| (sp, up_bits(sp))),
            rendezvous_state: None,
            pending: Vec::new(),
            friends: friends.to_vec(),
            friend_up,
            friend_known: vec![0; friends.len()],
            any_up_at_or_after,
            owner_latest: LogicalStamp::ZERO,
            created: Vec::new(),
            delivered: Vec::new(),
            lag_slots: 0,
            horizon,
            params,
            seed,
        }
    }

    fn member_up(&self, idx: usize, slot: usize) -> bool {
        self.up[idx].contains(slot)
    }

    fn was_up(&self, idx: usize, slot: usize) -> bool {
        slot > 0 && self.up[idx].contains(slot - 1)
    }

    fn rendezvous_sp_up(&self, slot: usize) -> bool {
        self.rendezvous_sp
            .as_ref()
            .is_some_and(|(_, bits)| bits.contains(slot))
    }

    /// Deliver one update at `slot` per the live-contact rules: to the owner
    /// when online, otherwise to every online keeper, otherwise buffered at
    /// the author. Authors must be friends of the owner.
    pub fn post_update(
        &mut self,
        author: NodeId,
        slot: usize,
        size: u32,
    ) -> Result<LogicalStamp, ReplicationError> {
        let Some(fidx) = self.friends.iter().position(|&f| f == author) else {
            return Err(ReplicationError::NotFriend {
                author,
                owner: self.owner,
            });
        };
        Ok(self.deliver_post(fidx, slot, size))
    }

    fn post_targets(&self, slot: usize) -> Vec<usize> {
        if self.member_up(self.owner_idx, slot) {
            vec![self.owner_idx]
        } else {
            (0..self.member_ids.len())
                .filter(|&m| self.member_up(m, slot))
                .collect()
        }
    }

    fn deliver_post(&mut self, fidx: usize, slot: usize, size: u32) -> LogicalStamp {
        let author = self.friends[fidx];
        let targets = self.post_targets(slot);
        if targets.is_empty() {
            let stamp = LogicalStamp {
                counter: self.friend_known[fidx] + 1,
                author,
            };
            // The author counts its own buffered writes so successive
            // offline posts carry distinct stamps.
            self.friend_known[fidx] = stamp.counter;
            self.pending.push(PendingUpdate {
                author,
                owner: self.owner,
                stamp,
                size,
                buffered_at: author,
            });
            self.note_created(stamp, slot);
            return stamp;
        }
        let known = targets
            .iter()
            .map(|&m| self.replicas[m].version.counter)
            .max()
            .unwrap();
        let stamp = LogicalStamp {
            counter: known + 1,
            author,
        };
        for m in targets {
            let _ = self.replicas[m].store(Item { stamp, size });
        }
        self.friend_known[fidx] = stamp.counter;
        self.note_created(stamp, slot);
        self.delivered.push(stamp);
        stamp
    }

    fn note_created(&mut self, stamp: LogicalStamp, slot: usize) {
        self.created.push((stamp, slot));
        if stamp > self.owner_latest {
            self.owner_latest = stamp;
        }
    }

    /// Advance one slot: rendezvous deposits and pulls, equalization among
    /// online replicas, buffered deliveries, this slot's posts, and the
    /// staleness ledger, in that order.
    pub fn step(&mut self, slot: usize) {
        let n = self.member_ids.len();
        let up_now: Vec<usize> = (0..n).filter(|&m| self.member_up(m, slot)).collect();

        // Members logging off deposit at the rendezvous when nobody online
        // carries their state across the boundary: no member is up in both
        // the previous and the current slot. The transfer happens while the
        // departing member is still online, so the super-peer must have been
        // up then, and only matters if someone returns later.
        let survivor = (0..n).any(|m| self.was_up(m, slot) && self.member_up(m, slot));
        if self.params.rendezvous
            && !survivor
            && self.any_up_at_or_after[slot]
            && self.rendezvous_sp_up(slot.saturating_sub(1))
        {
            for m in 0..n {
                if self.was_up(m, slot) && !self.member_up(m, slot) {
                    let departing = self.replicas[m].clone();
                    match &mut self.rendezvous_state {
                        Some(state) => state.merge_from(&departing),
                        None => {
                            let (sp, _) = self.rendezvous_sp.as_ref().unwrap();
                            let mut state = departing;
                            state.holder = *sp;
                            self.rendezvous_state = Some(state);
                        }
                    }
                }
            }
        }

        // Arrivals re-seed from the rendezvous when the super-peer is up.
        if self.rendezvous_sp_up(slot) {
            if let Some(r) = self.rendezvous_state.clone() {
                for m in 0..n {
                    if self.member_up(m, slot) && !self.was_up(m, slot) {
                        self.replicas[m].merge_from(&r);
                    }
                }
            }
        }

        // Everyone online together equalizes to the freshest state.
        if up_now.len() > 1 {
            let freshest = *up_now
                .iter()
                .max_by_key(|&&m| self.replicas[m].version)
                .unwrap();
            let state = self.replicas[freshest].clone();
            for &m in &up_now {
                if m != freshest {
                    self.replicas[m].merge_from(&state);
                }
            }
        }

        // Buffered updates deliver once any replica is back online.
        if !self.pending.is_empty() && !up_now.is_empty() {
            let owner_up = self.member_up(self.owner_idx, slot);
            let pending = std::mem::take(&mut self.pending);
            for p in pending {
                let item = Item {
                    stamp: p.stamp,
                    size: p.size,
                };
                if owner_up {
                    let _ = self.replicas[self.owner_idx].store(item);
                } else {
                    for &t in &up_now {
                        let _ = self.replicas[t].store(item);
                    }
                }
                self.delivered.push(p.stamp);
            }
        }

        // Synthetic workload: each online friend posts with fixed
        // probability, all stamped against the same pre-post snapshot.
        if self.params.post_probability > 0.0 {
            let snapshot: Vec<u64> = self.replicas.iter().map(|r| r.version.counter).collect();
            let targets = self.post_targets(slot);
            let base = targets.iter().map(|&m| snapshot[m]).max();
            for fidx in 0..self.friends.len() {
                if !self.friend_up[fidx].contains(slot) {
                    continue;
                }
                let h = rng::mix(
                    self.seed,
                    Stream::Posts,
                    self.owner as u64,
                    ((self.friends[fidx] as u64) << 32) | slot as u64,
                );
                if rng::unit(h) >= self.params.post_probability {
                    continue;
                }
                let author = self.friends[fidx];
                match base {
                    Some(counter) => {
                        let stamp = LogicalStamp {
                            counter: counter + 1,
                            author,
                        };
                        for &t in &targets {
                            let _ = self.replicas[t].store(Item {
                                stamp,
                                size: self.params.post_size,
                            });
                        }
                        self.friend_known[fidx] = stamp.counter;
                        self.note_created(stamp, slot);
                        self.delivered.push(stamp);
                    }
                    None => {
                        let stamp = LogicalStamp {
                            counter: self.friend_known[fidx] + 1,
                            author,
                        };
                        self.friend_known[fidx] = stamp.counter;
                        self.pending.push(PendingUpdate {
                            author,
                            owner: self.owner,
                            stamp,
                            size: self.params.post_size,
                            buffered_at: author,
                        });
                        self.note_created(stamp, slot);
                    }
                }
            }
        }

        // Staleness: does the best online replica lag the latest produced
        // stamp? Slots with data but nobody online count as lagging.
        if self.owner_latest > LogicalStamp::ZERO {
            let best_up = up_now.iter().map(|&m| self.replicas[m].version).max();
            match best_up {
                Some(v) if v >= self.owner_latest => {}
                _ => self.lag_slots += 1,
            }
        }
    }

    /// Staleness accumulated so far, as a fraction of the horizon.
    pub fn staleness(&self) -> f64 {
        if self.horizon == 0 {
            0.0
        } else {
            self.lag_slots as f64 / self.horizon as f64
        }
    }

    pub fn run(mut self) -> GroupOutcome {
        for slot in 0..self.horizon {
            self.step(slot);
        }
        GroupOutcome {
            owner: self.owner,
            staleness: self.staleness(),
            created: self.created.len(),
            delivered: self.delivered.len(),
            final_versions: self
                .member_ids
                .iter()
                .zip(self.replicas.iter())
                .map(|(&m, r)| (m, r.version))
                .collect(),
        }
    }

    pub fn replica(&self, member: NodeId) -> Option<&ReplicaState> {
        self.member_ids
            .iter()
            .position(|&m| m == member)
            .map(|i| &self.replicas[i])
    }

    pub fn pending_updates(&self) -> &[PendingUpdate] {
        &self.pending
    }

    pub fn created_stamps(&self) -> &[(LogicalStamp, usize)] {
        &self.created
    }

    pub fn delivered_stamps(&self) -> &[LogicalStamp] {
        &self.delivered
    }
}
