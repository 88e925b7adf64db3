//! Availability metrics: per-node total-time and friend-time availability
//! over the evaluation week, the six-category classification, and the
//! aggregate distributions behind the report CSVs.

use std::fmt;

use crate::graph::{NodeId, SocialGraph};
use crate::placement::{Strategy, StorekeeperSet};
use crate::slots::{SlotSet, TimeGrid};
use crate::trace::UptimeTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Excellent,
    VeryGood,
    Good,
    Mediocre,
    Poor,
    VeryBad,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::Excellent,
        Category::VeryGood,
        Category::Good,
        Category::Mediocre,
        Category::Poor,
        Category::VeryBad,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Category::Excellent => "Excellent",
            Category::VeryGood => "Very Good",
            Category::Good => "Good",
            Category::Mediocre => "Mediocre",
            Category::Poor => "Poor",
            Category::VeryBad => "Very Bad",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Classify an availability percentage into its category band.
pub fn categorize(avl_percent: f64) -> Category {
    if avl_percent >= 95.0 {
        Category::Excellent
    } else if avl_percent >= 80.0 {
        Category::VeryGood
    } else if avl_percent >= 65.0 {
        Category::Good
    } else if avl_percent >= 50.0 {
        Category::Mediocre
    } else if avl_percent >= 30.0 {
        Category::Poor
    } else {
        Category::VeryBad
    }
}

/// The evaluation window: week two of the horizon.
fn eval_window(grid: &TimeGrid) -> (usize, usize) {
    (grid.week_boundary, grid.horizon_slots)
}

fn sigma_union(keepers: &StorekeeperSet, traces: &[UptimeTrace], start: usize, end: usize) -> SlotSet {
    let mut u = traces[keepers.owner as usize].bits.window(start, end);
    for k in keepers
        .friend_keepers
        .iter()
        .chain(keepers.stranger_keepers.iter())
        .chain(keepers.super_peer_keeper.iter())
    {
        u.union_with(&traces[*k as usize].bits.window(start, end));
    }
    u
}

/// Total-time availability: the union of the online slots of the owner and
/// all of its keepers over the evaluation week, as a fraction of that week.
pub fn availability_tt(keepers: &StorekeeperSet, traces: &[UptimeTrace], grid: &TimeGrid) -> f64 {
    let (start, end) = eval_window(grid);
    availability_tt_window(keepers, traces, start, end)
}

pub fn availability_tt_window(
    keepers: &StorekeeperSet,
    traces: &[UptimeTrace],
    start: usize,
    end: usize,
) -> f64 {
    let union = sigma_union(keepers, traces, start, end);
    union.count() as f64 / (end - start) as f64
}

/// Friend-time availability: the fraction of slots with at least one friend
/// online during which the data is reachable. Owners with no friends (or
/// whose friends are never online) report 1.0: there is no demand to serve.
pub fn availability_ft(
    keepers: &StorekeeperSet,
    g: &SocialGraph,
    traces: &[UptimeTrace],
    grid: &TimeGrid,
) -> f64 {
    let (start, end) = eval_window(grid);
    availability_ft_window(keepers, g, traces, start, end)
}

pub fn availability_ft_window(
    keepers: &StorekeeperSet,
    g: &SocialGraph,
    traces: &[UptimeTrace],
    start: usize,
    end: usize,
) -> f64 {
    let friends = g.neighbors(keepers.owner);
    if friends.is_empty() {
        return 1.0;
    }
    let mut demand = SlotSet::new(end - start);
    for &f in friends {
        demand.union_with(&traces[f as usize].bits.window(start, end));
    }
    let demanded = demand.count();
    if demanded == 0 {
        return 1.0;
    }
    let union = sigma_union(keepers, traces, start, end);
    union.intersection_count(&demand) as f64 / demanded as f64
}

/// Aggregates over a population of availability fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct Distributions {
    /// `cumulative[x]` = percentage of nodes with availability >= x percent,
    /// for x in 0..=100.
    pub cumulative: Vec<f64>,
    /// `histogram[x]` = percentage of nodes in the 1-point bin at x percent
    /// (floor of the percentage, 100 kept at 100).
    pub histogram: Vec<f64>,
    /// Percentage per category, ordered as [`Category::ALL`].
    pub categories: [f64; 6],
}

/// Build the cumulative curve, the 1% histogram, and the category shares
/// from per-node availability fractions in [0, 1].
pub fn distributions(values: &[f64]) -> Distributions {
    let n = values.len().max(1) as f64;
    let mut cumulative = vec![0.0; 101];
    let mut histogram = vec![0.0; 101];
    let mut categories = [0.0; 6];
    for &v in values {
        let pct = v * 100.0;
        let bin = (pct.floor() as usize).min(100);
        histogram[bin] += 1.0;
        let cat = categorize(pct);
        let idx = Category::ALL.iter().position(|c| *c == cat).unwrap();
        categories[idx] += 1.0;
        for entry in cumulative.iter_mut().take(pct.floor() as usize + 1) {
            *entry += 1.0;
        }
    }
    let scale = 100.0 / n;
    cumulative.iter_mut().for_each(|x| *x *= scale);
    histogram.iter_mut().for_each(|x| *x *= scale);
    categories.iter_mut().for_each(|x| *x *= scale);
    Distributions {
        cumulative,
        histogram,
        categories,
    }
}

/// Per-node availability figures.
#[derive(Debug, Clone)]
pub struct NodeReport {
    pub node: NodeId,
    pub strategy: Strategy,
    pub avl_tt: f64,
    pub avl_ft: f64,
    pub category_tt: Category,
    pub category_ft: Category,
}

/// Full availability report for one run.
#[derive(Debug, Clone)]
pub struct AvailabilityReport {
    pub nodes: Vec<NodeReport>,
    /// Percentage per strategy class, ordered as [`Strategy::ALL`].
    pub strategy_pct: [f64; 4],
    pub tt: Distributions,
    pub ft: Distributions,
}

impl AvailabilityReport {
    pub fn tt_values(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.avl_tt).collect()
    }

    pub fn ft_values(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.avl_ft).collect()
    }

    /// Fraction of nodes whose availability is exactly 1.0 under the given
    /// metric values.
    pub fn fraction_at_full(values: &[f64]) -> f64 {
        if values.is_empty() {
            return 0.0;
        }
        values.iter().filter(|&&v| v >= 1.0).count() as f64 / values.len() as f64
    }
}

/// Evaluate every owner's availability over week two and aggregate.
pub fn build_report(
    g: &SocialGraph,
    placements: &[StorekeeperSet],
    traces: &[UptimeTrace],
    grid: &TimeGrid,
) -> AvailabilityReport {
    let nodes: Vec<NodeReport> = placements
        .iter()
        .map(|p| {
            let avl_tt = availability_tt(p, traces, grid);
            let avl_ft = availability_ft(p, g, traces, grid);
            NodeReport {
                node: p.owner,
                strategy: p.strategy,
                avl_tt,
                avl_ft,
                category_tt: categorize(avl_tt * 100.0),
                category_ft: categorize(avl_ft * 100.0),
            }
        })
        .collect();
    let strategy_pct = crate::placement::strategy_distribution(placements);
    let tt = distributions(&nodes.iter().map(|n| n.avl_tt).collect::<Vec<_>>());
    let ft = distributions(&nodes.iter().map(|n| n.avl_ft).collect::<Vec<_>>());
    AvailabilityReport {
        nodes,
        strategy_pct,
        tt,
        ft,
    }
}
