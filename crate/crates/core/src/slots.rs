//! Fixed-capacity slot bitsets and the simulation time grid.
//!
//! All uptime, coverage, and availability math in the simulator reduces to
//! boolean algebra over slot sets, so this is the hot core: a small inline
//! array of words, no heap, word-at-a-time union/intersection.

use std::fmt;

const WORDS: usize = 6;

/// Maximum universe size a [`SlotSet`] can hold.
pub const MAX_SLOTS: usize = WORDS * 64;

/// A set of time slots over a fixed universe of `len` slots.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlotSet {
    words: [u64; WORDS],
    len: u16,
}

impl SlotSet {
    /// Empty set over a universe of `len` slots.
    pub fn new(len: usize) -> Self {
        assert!(len <= MAX_SLOTS, "universe larger than {MAX_SLOTS} slots");
        SlotSet {
            words: [0; WORDS],
            len: len as u16,
        }
    }

    /// Set containing every slot of the universe.
    pub fn full(len: usize) -> Self {
        let mut s = SlotSet::new(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn insert(&mut self, slot: usize) {
        debug_assert!(slot < self.len());
        self.words[slot / 64] |= 1u64 << (slot % 64);
    }

    #[inline]
    pub fn remove(&mut self, slot: usize) {
        debug_assert!(slot < self.len());
        self.words[slot / 64] &= !(1u64 << (slot % 64));
    }

    #[inline]
    pub fn contains(&self, slot: usize) -> bool {
        debug_assert!(slot < self.len());
        self.words[slot / 64] & (1u64 << (slot % 64)) != 0
    }

    /// Insert every slot in `start..end`.
    pub fn insert_range(&mut self, start: usize, end: usize) {
        for s in start..end {
            self.insert(s);
        }
    }

    /// Number of slots present.
    #[inline]
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Union, as a new set. Both operands must share a universe.
    #[inline]
    pub fn union(&self, other: &SlotSet) -> SlotSet {
        debug_assert_eq!(self.len, other.len);
        let mut out = *self;
        for (w, o) in out.words.iter_mut().zip(other.words.iter()) {
            *w |= o;
        }
        out
    }

    #[inline]
    pub fn union_with(&mut self, other: &SlotSet) {
        debug_assert_eq!(self.len, other.len);
        for (w, o) in self.words.iter_mut().zip(other.words.iter()) {
            *w |= o;
        }
    }

    #[inline]
    pub fn intersect(&self, other: &SlotSet) -> SlotSet {
        debug_assert_eq!(self.len, other.len);
        let mut out = *self;
        for (w, o) in out.words.iter_mut().zip(other.words.iter()) {
            *w &= o;
        }
        out
    }

    /// Slots present in `self` but not in `other`.
    #[inline]
    pub fn minus(&self, other: &SlotSet) -> SlotSet {
        debug_assert_eq!(self.len, other.len);
        let mut out = *self;
        for (w, o) in out.words.iter_mut().zip(other.words.iter()) {
            *w &= !o;
        }
        out
    }

    /// Size of the intersection without materializing it.
    #[inline]
    pub fn intersection_count(&self, other: &SlotSet) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Slots of the universe not present.
    pub fn complement(&self) -> SlotSet {
        SlotSet::full(self.len()).minus(self)
    }

    /// Copy of the sub-universe `start..end` as its own set.
    pub fn window(&self, start: usize, end: usize) -> SlotSet {
        debug_assert!(start <= end && end <= self.len());
        let mut out = SlotSet::new(end - start);
        for s in start..end {
            if self.contains(s) {
                out.insert(s - start);
            }
        }
        out
    }

    /// Overwrite the sub-universe `start..start+src.len()` with `src`.
    pub fn write_window(&mut self, start: usize, src: &SlotSet) {
        debug_assert!(start + src.len() <= self.len());
        for s in 0..src.len() {
            if src.contains(s) {
                self.insert(start + s);
            } else {
                self.remove(start + s);
            }
        }
    }

    /// Cyclic rotation: each slot `i` moves to `(i + by) mod len`.
    pub fn rotate(&self, by: i32) -> SlotSet {
        let n = self.len() as i32;
        let mut out = SlotSet::new(self.len());
        for s in 0..self.len() {
            if self.contains(s) {
                out.insert((s as i32 + by).rem_euclid(n) as usize);
            }
        }
        out
    }

    /// Slot indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&s| self.contains(s))
    }
}

impl fmt::Debug for SlotSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in 0..self.len() {
            f.write_str(if self.contains(s) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// The discrete two-week horizon every trace lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeGrid {
    pub slot_minutes: u32,
    pub slots_per_day: usize,
    pub horizon_slots: usize,
    pub week_boundary: usize,
}

impl TimeGrid {
    /// Grid with `slots_per_day` slots per day over exactly two weeks.
    pub fn new(slot_minutes: u32, slots_per_day: usize) -> Self {
        let grid = TimeGrid {
            slot_minutes,
            slots_per_day,
            horizon_slots: 2 * 7 * slots_per_day,
            week_boundary: 7 * slots_per_day,
        };
        assert!(grid.horizon_slots <= MAX_SLOTS);
        grid
    }

    /// 1-hour slots: 24 per day, 336 over the horizon, week boundary at 168.
    pub fn standard() -> Self {
        TimeGrid::new(60, 24)
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid::standard()
    }
}
