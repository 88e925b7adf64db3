//! Per-node uptime traces: behavior classes, two-week rendering, week-two
//! deviation, and the always-mostly-on super-peer schedule.
//!
//! A node's week is driven by three factors: a timezone location (12 of
//! them, 2 hours apart), a weekday behavior class (6), and a weekend class
//! (4). Schedules are written in local hours and rotated left by the
//! timezone offset within each day, so total online time is invariant under
//! location.

use crate::error::TraceError;
use crate::graph::NodeId;
use crate::rng::{self, Stream};
use crate::slots::{SlotSet, TimeGrid};

pub const LOCATIONS: usize = 12;
pub const WEEKDAY_CLASSES: usize = 6;
pub const WEEKEND_CLASSES: usize = 4;

/// Share of nodes whose second week is unchanged / shifted / re-rolled.
pub const DEVIATION_SPLIT: [f64; 3] = [0.70, 0.27, 0.03];

/// Local-hour online windows per weekday class.
const WEEKDAY_HOURS: [&[(usize, usize)]; WEEKDAY_CLASSES] = [
    &[(9, 17)],           // office hours
    &[(9, 23)],           // office plus evening
    &[(17, 24)],          // evenings only
    &[(22, 24), (0, 6)],  // night shift, wraps midnight
    &[(8, 24)],           // long day
    &[(10, 12), (19, 22)],// sporadic
];

/// Local-hour online windows per weekend class. Class 3 replays the node's
/// weekday schedule and is handled in `render_trace`.
const WEEKEND_HOURS: [&[(usize, usize)]; WEEKEND_CLASSES] = [
    &[],          // offline
    &[(10, 14)],
    &[(17, 23)],
    &[],          // placeholder: replays weekday
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationClass {
    None,
    Minor,
    Major,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BehaviorAssignment {
    /// Timezone bucket; the offset from UTC is `2 * location` hours.
    pub location: u8,
    pub weekday_class: u8,
    pub weekend_class: u8,
    pub deviation: DeviationClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UptimeTrace {
    pub node: NodeId,
    pub bits: SlotSet,
}

impl UptimeTrace {
    pub fn week1(&self, grid: &TimeGrid) -> SlotSet {
        self.bits.window(0, grid.week_boundary)
    }

    pub fn week2(&self, grid: &TimeGrid) -> SlotSet {
        self.bits.window(grid.week_boundary, grid.horizon_slots)
    }
}

/// Draw location, weekday, and weekend classes uniformly per node and assign
/// deviation classes to exactly the 70/27/3 split (largest-remainder
/// rounding), deterministic per seed.
pub fn assign_behaviors(node_count: usize, seed: u64) -> Vec<BehaviorAssignment> {
    let mut out: Vec<BehaviorAssignment> = (0..node_count as u64)
        .map(|i| BehaviorAssignment {
            location: (rng::mix(seed, Stream::Behavior, i, 0) % LOCATIONS as u64) as u8,
            weekday_class: (rng::mix(seed, Stream::Behavior, i, 1) % WEEKDAY_CLASSES as u64) as u8,
            weekend_class: (rng::mix(seed, Stream::Behavior, i, 2) % WEEKEND_CLASSES as u64) as u8,
            deviation: DeviationClass::None,
        })
        .collect();

    let counts = largest_remainder(node_count, &DEVIATION_SPLIT);
    let mut order: Vec<usize> = (0..node_count).collect();
    shuffle(&mut order, seed, Stream::DeviationSplit);
    for (rank, &node) in order.iter().enumerate() {
        out[node].deviation = if rank < counts[0] {
            DeviationClass::None
        } else if rank < counts[0] + counts[1] {
            DeviationClass::Minor
        } else {
            DeviationClass::Major
        };
    }
    out
}

/// Apportion `n` into integer counts proportional to `shares`, assigning
/// leftover seats by largest fractional remainder (ties to the earlier
/// share).
fn largest_remainder(n: usize, shares: &[f64]) -> Vec<usize> {
    let quotas: Vec<f64> = shares.iter().map(|s| s * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for k in 0..(n - assigned) {
        counts[order[k % shares.len()]] += 1;
    }
    counts
}

/// Fisher-Yates shuffle driven by a dedicated stream.
fn shuffle<T>(items: &mut [T], seed: u64, stream: Stream) {
    use rand::Rng;
    let mut r = rng::stream_rng(seed, stream, 0);
    for i in (1..items.len()).rev() {
        let j = r.random_range(0..=i);
        items.swap(i, j);
    }
}

fn hours_for_day(b: &BehaviorAssignment, weekday: bool) -> &'static [(usize, usize)] {
    if weekday || b.weekend_class == 3 {
        WEEKDAY_HOURS[b.weekday_class as usize]
    } else {
        WEEKEND_HOURS[b.weekend_class as usize]
    }
}

fn render_week(b: &BehaviorAssignment, grid: &TimeGrid, target: &mut SlotSet, week_start: usize) {
    let spd = grid.slots_per_day;
    let offset = 2 * b.location as usize;
    for day in 0..7 {
        let windows = hours_for_day(b, day < 5);
        for &(start, end) in windows {
            for h in start..end {
                // Rotate left by the timezone offset within the day.
                let utc = (h + spd - offset % spd) % spd;
                target.insert(week_start + day * spd + utc);
            }
        }
    }
}

/// Render both weeks of a node's trace from its behavior assignment. Week
/// two starts as a copy of week one; deviation is applied separately.
pub fn render_trace(node: NodeId, b: &BehaviorAssignment, grid: &TimeGrid) -> UptimeTrace {
    let mut bits = SlotSet::new(grid.horizon_slots);
    render_week(b, grid, &mut bits, 0);
    render_week(b, grid, &mut bits, grid.week_boundary);
    UptimeTrace { node, bits }
}

/// Apply week-two deviation in place. Minor shifts the whole second week by
/// a fixed per-node offset from {-2, -1, +1, +2} slots, wrapping within the
/// week; Major re-renders week two from freshly resampled location and
/// behavior classes. Week one is never touched.
pub fn apply_deviation(
    traces: &mut [UptimeTrace],
    assignments: &[BehaviorAssignment],
    grid: &TimeGrid,
    seed: u64,
) -> Result<(), TraceError> {
    if traces.len() != assignments.len() {
        return Err(TraceError::LengthMismatch {
            traces: traces.len(),
            assignments: assignments.len(),
        });
    }
    for (trace, b) in traces.iter_mut().zip(assignments) {
        let i = trace.node as u64;
        match b.deviation {
            DeviationClass::None => {}
            DeviationClass::Minor => {
                const OFFSETS: [i32; 4] = [-2, -1, 1, 2];
                let pick = (rng::mix(seed, Stream::DeviationMinor, i, 0) % 4) as usize;
                let shifted = trace.week2(grid).rotate(OFFSETS[pick]);
                trace.bits.write_window(grid.week_boundary, &shifted);
            }
            DeviationClass::Major => {
                let resampled = BehaviorAssignment {
                    location: (rng::mix(seed, Stream::DeviationMajor, i, 0) % LOCATIONS as u64)
                        as u8,
                    weekday_class: (rng::mix(seed, Stream::DeviationMajor, i, 1)
                        % WEEKDAY_CLASSES as u64) as u8,
                    weekend_class: (rng::mix(seed, Stream::DeviationMajor, i, 2)
                        % WEEKEND_CLASSES as u64) as u8,
                    deviation: DeviationClass::Major,
                };
                let mut week = SlotSet::new(grid.week_boundary);
                render_week(&resampled, grid, &mut week, 0);
                trace.bits.write_window(grid.week_boundary, &week);
            }
        }
    }
    Ok(())
}

/// The super-peer schedule: online 22 hours a day, offline local 04:00 to
/// 06:00, identical in both weeks. Super-peers never deviate.
pub fn super_peer_trace(node: NodeId, grid: &TimeGrid, location: u8) -> UptimeTrace {
    let spd = grid.slots_per_day;
    let offset = 2 * location as usize;
    let mut bits = SlotSet::full(grid.horizon_slots);
    for day in 0..14 {
        for h in [4usize, 5] {
            let utc = (h + spd - offset % spd) % spd;
            bits.remove(day * spd + utc);
        }
    }
    UptimeTrace { node, bits }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TimeGrid {
        TimeGrid::standard()
    }

    #[test]
    fn deviation_split_exact_at_100() {
        let b = assign_behaviors(100, 42);
        let none = b.iter().filter(|a| a.deviation == DeviationClass::None).count();
        let minor = b.iter().filter(|a| a.deviation == DeviationClass::Minor).count();
        let major = b.iter().filter(|a| a.deviation == DeviationClass::Major).count();
        assert_eq!((none, minor, major), (70, 27, 3));
    }

    #[test]
    fn single_node_gets_none() {
        let b = assign_behaviors(1, 9);
        assert_eq!(b[0].deviation, DeviationClass::None);
    }

    #[test]
    fn assignments_deterministic() {
        assert_eq!(assign_behaviors(10_000, 5), assign_behaviors(10_000, 5));
    }

    #[test]
    fn office_schedule_renders_monday() {
        let b = BehaviorAssignment {
            location: 0,
            weekday_class: 0,
            weekend_class: 0,
            deviation: DeviationClass::None,
        };
        let t = render_trace(0, &b, &grid());
        // Hand-rendered: W0 is 09-17 local, so slots 9..=16 of day one.
        for s in 0..24 {
            assert_eq!(t.bits.contains(s), (9..17).contains(&s), "slot {s}");
        }
    }

    #[test]
    fn timezone_rotates_left_within_day() {
        let base = BehaviorAssignment {
            location: 0,
            weekday_class: 0,
            weekend_class: 1,
            deviation: DeviationClass::None,
        };
        let east = BehaviorAssignment { location: 3, ..base };
        let t0 = render_trace(0, &base, &grid());
        let t3 = render_trace(0, &east, &grid());
        // Oracle: rotate each day of the base trace left by 6 slots.
        for day in 0..14 {
            for s in 0..24 {
                let rotated = t0.bits.contains(day * 24 + (s + 6) % 24);
                assert_eq!(t3.bits.contains(day * 24 + s), rotated, "day {day} slot {s}");
            }
        }
        assert_eq!(t0.bits.count(), t3.bits.count());
    }

    #[test]
    fn offline_weekend_class_is_dark() {
        let b = BehaviorAssignment {
            location: 2,
            weekday_class: 4,
            weekend_class: 0,
            deviation: DeviationClass::None,
        };
        let t = render_trace(0, &b, &grid());
        for day in [5usize, 6, 12, 13] {
            for s in 0..24 {
                assert!(!t.bits.contains(day * 24 + s), "weekend day {day} slot {s}");
            }
        }
    }

    #[test]
    fn weekend_replay_class_uses_weekday_hours() {
        let b = BehaviorAssignment {
            location: 0,
            weekday_class: 2,
            weekend_class: 3,
            deviation: DeviationClass::None,
        };
        let t = render_trace(0, &b, &grid());
        for s in 0..24 {
            assert_eq!(t.bits.contains(5 * 24 + s), (17..24).contains(&s));
        }
    }

    #[test]
    fn rendered_weeks_start_identical() {
        for wd in 0..6u8 {
            for we in 0..4u8 {
                let b = BehaviorAssignment {
                    location: 7,
                    weekday_class: wd,
                    weekend_class: we,
                    deviation: DeviationClass::None,
                };
                let t = render_trace(0, &b, &grid());
                assert_eq!(t.week1(&grid()), t.week2(&grid()));
            }
        }
    }

    #[test]
    fn no_deviation_means_identical_weeks() {
        let g = grid();
        let assigns = assign_behaviors(50, 3);
        let mut traces: Vec<UptimeTrace> = assigns
            .iter()
            .enumerate()
            .map(|(i, b)| render_trace(i as NodeId, b, &g))
            .collect();
        let unchanged: Vec<usize> = assigns
            .iter()
            .enumerate()
            .filter(|(_, b)| b.deviation == DeviationClass::None)
            .map(|(i, _)| i)
            .collect();
        apply_deviation(&mut traces, &assigns, &g, 3).unwrap();
        for i in unchanged {
            assert_eq!(traces[i].week1(&g), traces[i].week2(&g));
        }
    }

    #[test]
    fn minor_shift_moves_office_day() {
        let g = grid();
        let b = BehaviorAssignment {
            location: 0,
            weekday_class: 0,
            weekend_class: 0,
            deviation: DeviationClass::Minor,
        };
        let mut traces = vec![render_trace(0, &b, &g)];
        // Find a seed whose minor offset for node 0 is +1.
        let seed = (0..)
            .find(|&s| rng::mix(s, Stream::DeviationMinor, 0, 0) % 4 == 2)
            .unwrap();
        apply_deviation(&mut traces, &[b], &g, seed).unwrap();
        let w2 = traces[0].week2(&g);
        // Oracle: a 09-17 day shifted by +1 becomes 10-18.
        for s in 0..24 {
            assert_eq!(w2.contains(s), (10..18).contains(&s), "slot {s}");
        }
    }

    #[test]
    fn minor_preserves_weekly_online_count() {
        let g = grid();
        let assigns: Vec<BehaviorAssignment> = assign_behaviors(200, 8)
            .into_iter()
            .map(|mut b| {
                b.deviation = DeviationClass::Minor;
                b
            })
            .collect();
        let mut traces: Vec<UptimeTrace> = assigns
            .iter()
            .enumerate()
            .map(|(i, b)| render_trace(i as NodeId, b, &g))
            .collect();
        let before: Vec<usize> = traces.iter().map(|t| t.week2(&g).count()).collect();
        apply_deviation(&mut traces, &assigns, &g, 8).unwrap();
        for (t, b) in traces.iter().zip(&before) {
            assert_eq!(t.week2(&g).count(), *b);
            assert_eq!(t.week1(&g).count(), *b, "week one was touched");
        }
    }

    #[test]
    fn population_split_leaves_700_unchanged() {
        let g = grid();
        let assigns = assign_behaviors(1000, 77);
        let mut traces: Vec<UptimeTrace> = assigns
            .iter()
            .enumerate()
            .map(|(i, b)| render_trace(i as NodeId, b, &g))
            .collect();
        apply_deviation(&mut traces, &assigns, &g, 77).unwrap();
        let identical = traces
            .iter()
            .filter(|t| t.week1(&g) == t.week2(&g))
            .count();
        // Minor/Major can coincide with the original only by accident; the
        // None class alone guarantees 700.
        assert!(identical >= 700, "only {identical} traces kept both weeks equal");
        let none = assigns
            .iter()
            .filter(|b| b.deviation == DeviationClass::None)
            .count();
        assert_eq!(none, 700);
    }

    #[test]
    fn deviation_length_mismatch_rejected() {
        let g = grid();
        let assigns = assign_behaviors(3, 1);
        let mut traces = vec![render_trace(0, &assigns[0], &g)];
        assert!(matches!(
            apply_deviation(&mut traces, &assigns, &g, 1),
            Err(TraceError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn super_peer_uptime_fraction() {
        let g = grid();
        for loc in 0..12u8 {
            let t = super_peer_trace(0, &g, loc);
            let frac = t.bits.count() as f64 / g.horizon_slots as f64;
            assert!((frac - 22.0 / 24.0).abs() < 1e-9, "loc {loc}: {frac}");
            assert_eq!(t.week1(&g), t.week2(&g));
        }
    }

    #[test]
    fn opposite_super_peers_cover_everything() {
        let g = grid();
        let a = super_peer_trace(0, &g, 0);
        let b = super_peer_trace(1, &g, 6);
        assert_eq!(a.bits.union(&b.bits).count(), g.horizon_slots);
    }

    #[test]
    fn online_count_invariant_under_location() {
        let g = grid();
        for wd in 0..6u8 {
            for we in 0..4u8 {
                let counts: Vec<usize> = (0..12u8)
                    .map(|loc| {
                        let b = BehaviorAssignment {
                            location: loc,
                            weekday_class: wd,
                            weekend_class: we,
                            deviation: DeviationClass::None,
                        };
                        render_trace(0, &b, &g).bits.count()
                    })
                    .collect();
                assert!(counts.windows(2).all(|w| w[0] == w[1]), "wd {wd} we {we}: {counts:?}");
            }
        }
    }
}
