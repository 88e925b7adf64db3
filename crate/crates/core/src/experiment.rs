//! Experiment orchestration: configuration, the graph-to-report pipeline,
//! the eight-combination matrix, the three comparison studies, and CSV
//! emission.
//!
//! Everything is a pure function of (config, seed): acceptance draws,
//! deviation, placement order, and the synthetic update workload all key off
//! hashed streams, and runs that share a seed share their random numbers, so
//! contrasts between runs reflect the treatment rather than sampling noise.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::ConfigError;
use crate::graph::{generate_synthetic, load_edge_list, NodeId, SocialGraph};
use crate::metrics::{build_report, AvailabilityReport, Category, Distributions};
use crate::placement::{
    flat_place_all, place_all, sample_acceptances, Mode, PlacementParameters, StorekeeperSet,
    Strategy, SuperPeerRegistry,
};
use crate::replication::{GroupParams, GroupSim};
use crate::slots::TimeGrid;
use crate::trace::{
    apply_deviation, assign_behaviors, render_trace, super_peer_trace, UptimeTrace,
};

/// The eight canonical (p_fd, p_sd, p_as) percent triples.
pub const COMBINATIONS: [(&str, f64, f64, f64); 8] = [
    ("C1", 50.0, 50.0, 100.0),
    ("C2", 50.0, 70.0, 100.0),
    ("C3", 20.0, 70.0, 100.0),
    ("C4", 20.0, 50.0, 100.0),
    ("C5", 20.0, 50.0, 40.0),
    ("C6", 20.0, 70.0, 40.0),
    ("C7", 50.0, 70.0, 40.0),
    ("C8", 50.0, 50.0, 40.0),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Combination {
    Named(u8),
    Custom { p_fd: f64, p_sd: f64, p_as: f64 },
}

impl Combination {
    pub fn percents(&self) -> (f64, f64, f64) {
        match *self {
            Combination::Named(k) => {
                let (_, a, b, c) = COMBINATIONS[(k - 1) as usize];
                (a, b, c)
            }
            Combination::Custom { p_fd, p_sd, p_as } => (p_fd, p_sd, p_as),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Combination::Named(k) => format!("C{k}"),
            Combination::Custom { p_fd, p_sd, p_as } => format!("custom-{p_fd}-{p_sd}-{p_as}"),
        }
    }
}

impl FromStr for Combination {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let t = s.trim();
        let upper = t.to_ascii_uppercase();
        if let Some(num) = upper.strip_prefix('C') {
            if let Ok(k) = num.parse::<u8>() {
                if (1..=8).contains(&k) {
                    return Ok(Combination::Named(k));
                }
            }
            return Err(ConfigError::UnknownCombination(s.to_string()));
        }
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if parts.len() == 3 {
            let vals: Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
            if let Ok(v) = vals {
                if v.iter().all(|x| (0.0..=100.0).contains(x)) {
                    return Ok(Combination::Custom {
                        p_fd: v[0],
                        p_sd: v[1],
                        p_as: v[2],
                    });
                }
            }
        }
        Err(ConfigError::UnknownCombination(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Synthetic { nodes: usize, degree: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    TotalTime,
    FriendTime,
}

impl MetricKind {
    pub fn label(&self) -> &'static str {
        match self {
            MetricKind::TotalTime => "tt",
            MetricKind::FriendTime => "ft",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub seed: u64,
    pub combination: Combination,
    pub mode: Mode,
    pub deviation: bool,
    pub metric: MetricKind,
    pub theta: f64,
    pub max_friend_keepers: usize,
    pub keeper_capacity: usize,
    pub max_stranger_keepers: usize,
    pub sp_fraction: f64,
    pub post_probability: f64,
    pub capacity_s: u32,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph: GraphSource::Synthetic {
                nodes: 20_000,
                degree: 6.0,
            },
            seed: 1,
            combination: Combination::Named(8),
            mode: Mode::SuperPeer,
            deviation: false,
            metric: MetricKind::TotalTime,
            theta: 0.95,
            max_friend_keepers: 8,
            keeper_capacity: 8,
            max_stranger_keepers: 5,
            sp_fraction: 0.002,
            post_probability: 0.05,
            capacity_s: 20,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn placement_parameters(&self) -> PlacementParameters {
        let (p_fd, p_sd, p_as) = self.combination.percents();
        PlacementParameters {
            p_fd,
            p_sd,
            p_as,
            theta: self.theta,
            max_friend_keepers: self.max_friend_keepers,
            keeper_capacity: self.keeper_capacity,
            max_stranger_keepers: self.max_stranger_keepers,
            mode: self.mode,
        }
    }

    /// Apply `key=value` pairs from a config file. Unknown keys error.
    pub fn apply(&mut self, map: &BTreeMap<String, String>) -> Result<(), ConfigError> {
        for (key, value) in map {
            match key.as_str() {
                "graph" => self.graph = GraphSource::File(PathBuf::from(value)),
                "nodes" => {
                    let nodes = parse_num(key, value)?;
                    self.graph = match self.graph {
                        GraphSource::Synthetic { degree, .. } => {
                            GraphSource::Synthetic { nodes, degree }
                        }
                        _ => GraphSource::Synthetic { nodes, degree: 6.0 },
                    };
                }
                "degree" => {
                    let degree = parse_num(key, value)?;
                    self.graph = match self.graph {
                        GraphSource::Synthetic { nodes, .. } => {
                            GraphSource::Synthetic { nodes, degree }
                        }
                        _ => GraphSource::Synthetic {
                            nodes: 20_000,
                            degree,
                        },
                    };
                }
                "seed" => self.seed = parse_num(key, value)?,
                "combination" => self.combination = value.parse()?,
                "mode" => self.mode = parse_mode(value)?,
                "deviation" => self.deviation = parse_on_off(value)?,
                "metric" => self.metric = parse_metric(value)?,
                "theta" => self.theta = parse_num(key, value)?,
                "max_friend_keepers" => self.max_friend_keepers = parse_num(key, value)?,
                "keeper_capacity" => self.keeper_capacity = parse_num(key, value)?,
                "max_stranger_keepers" => self.max_stranger_keepers = parse_num(key, value)?,
                "sp_fraction" => self.sp_fraction = parse_num(key, value)?,
                "post_probability" => self.post_probability = parse_num(key, value)?,
                "capacity_s" => self.capacity_s = parse_num(key, value)?,
                "out" => self.out_dir = PathBuf::from(value),
                other => {
                    return Err(ConfigError::Invalid(format!("unknown config key {other:?}")))
                }
            }
        }
        Ok(())
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError::Invalid(format!("bad value {value:?} for {key}")))
}

pub fn parse_mode(value: &str) -> Result<Mode, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "sp" | "super-peer" | "superpeer" => Ok(Mode::SuperPeer),
        "flat" => Ok(Mode::Flat),
        other => Err(ConfigError::Invalid(format!(
            "mode must be sp or flat, got {other:?}"
        ))),
    }
}

pub fn parse_on_off(value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "on" | "true" | "1" | "yes" => Ok(true),
        "off" | "false" | "0" | "no" => Ok(false),
        other => Err(ConfigError::Invalid(format!(
            "expected on/off, got {other:?}"
        ))),
    }
}

pub fn parse_metric(value: &str) -> Result<MetricKind, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "tt" => Ok(MetricKind::TotalTime),
        "ft" => Ok(MetricKind::FriendTime),
        other => Err(ConfigError::Invalid(format!(
            "metric must be tt or ft, got {other:?}"
        ))),
    }
}

/// Parse a flat `key=value` config file; `#` starts a comment line.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Invalid(format!(
                "config line {}: expected key=value, got {line:?}",
                idx + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// The shared world a set of runs operates on: graph with roles, behavior
/// assignments, and traces with and without week-two deviation.
pub struct World {
    pub graph: SocialGraph,
    pub grid: TimeGrid,
    pub base_traces: Vec<UptimeTrace>,
    pub deviated_traces: Vec<UptimeTrace>,
    /// Super-peer schedules, substituted only in super-peer-mode runs.
    sp_overrides: Vec<(NodeId, UptimeTrace)>,
}

impl World {
    pub fn build(cfg: &ExperimentConfig) -> Result<World, ConfigError> {
        let grid = TimeGrid::standard();
        let graph = match &cfg.graph {
            GraphSource::File(path) => {
                let text = fs::read_to_string(path)?;
                load_edge_list(&text)?.giant_component()
            }
            GraphSource::Synthetic { nodes, degree } => {
                generate_synthetic(*nodes, *degree, cfg.seed)?
            }
        };
        let graph = graph.elect_super_peers(cfg.sp_fraction, cfg.seed)?;
        let assignments = assign_behaviors(graph.node_count(), cfg.seed);
        let base: Vec<UptimeTrace> = assignments
            .iter()
            .enumerate()
            .map(|(i, b)| render_trace(i as NodeId, b, &grid))
            .collect();
        let mut deviated = base.clone();
        apply_deviation(&mut deviated, &assignments, &grid, cfg.seed)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        // Super-peers run on their dedicated schedule and never deviate.
        // That trace only exists in super-peer mode; the flat scheme sees
        // their ordinary behavior.
        let sp_overrides: Vec<(NodeId, UptimeTrace)> = graph
            .super_peers()
            .iter()
            .map(|&sp| {
                (
                    sp,
                    super_peer_trace(sp, &grid, assignments[sp as usize].location),
                )
            })
            .collect();
        Ok(World {
            graph,
            grid,
            base_traces: base,
            deviated_traces: deviated,
            sp_overrides,
        })
    }

    /// Traces for a run: deviated or not, with super-peer schedules swapped
    /// in when the run uses the super-peer architecture.
    pub fn traces(&self, mode: Mode, deviation: bool) -> Vec<UptimeTrace> {
        let mut traces = if deviation {
            self.deviated_traces.clone()
        } else {
            self.base_traces.clone()
        };
        if mode == Mode::SuperPeer {
            for (sp, trace) in &self.sp_overrides {
                traces[*sp as usize] = *trace;
            }
        }
        traces
    }
}

/// One run's outputs.
pub struct RunBundle {
    pub name: String,
    pub report: AvailabilityReport,
    pub placements: Vec<StorekeeperSet>,
    pub staleness: Vec<(NodeId, f64)>,
}

/// Run one parameter combination end to end on a prebuilt world.
pub fn run_on_world(
    world: &World,
    cfg: &ExperimentConfig,
    name: &str,
) -> Result<RunBundle, ConfigError> {
    let params = cfg.placement_parameters();
    let traces = world.traces(cfg.mode, cfg.deviation);
    let accept = sample_acceptances(&params, cfg.seed);
    let registry = SuperPeerRegistry::build(&world.graph, &accept, &traces, &world.grid);
    let placements = match cfg.mode {
        Mode::SuperPeer => place_all(&world.graph, &accept, &registry, &params),
        Mode::Flat => flat_place_all(&world.graph, &accept, &registry, &params, cfg.seed),
    };
    let staleness = run_replication(world, cfg, &placements, &traces, &registry);
    let report = build_report(&world.graph, &placements, &traces, &world.grid);
    Ok(RunBundle {
        name: name.to_string(),
        report,
        placements,
        staleness,
    })
}

fn run_replication(
    world: &World,
    cfg: &ExperimentConfig,
    placements: &[StorekeeperSet],
    traces: &[UptimeTrace],
    registry: &SuperPeerRegistry,
) -> Vec<(NodeId, f64)> {
    let params = GroupParams {
        post_probability: cfg.post_probability,
        capacity_s: cfg.capacity_s,
        post_size: 1,
        rendezvous: cfg.mode == Mode::SuperPeer,
    };
    let default_sp = registry.super_peers.first().copied();
    placements
        .iter()
        .map(|p| {
            let keepers = p.keepers();
            let rendezvous = match cfg.mode {
                Mode::SuperPeer => p.super_peer_keeper.or(default_sp).filter(|&sp| sp != p.owner),
                Mode::Flat => None,
            };
            let sim = GroupSim::new(
                p.owner,
                &keepers,
                world.graph.neighbors(p.owner),
                |id| traces[id as usize].bits,
                rendezvous,
                params.clone(),
                cfg.seed,
            );
            let outcome = sim.run();
            (p.owner, outcome.staleness)
        })
        .collect()
}

/// Run a single combination and write its CSVs under `out/<name>/`.
pub fn run_combination(cfg: &ExperimentConfig) -> Result<RunBundle, ConfigError> {
    let world = World::build(cfg)?;
    let name = bundle_name(&cfg.combination, cfg.mode, cfg.deviation);
    let bundle = run_on_world(&world, cfg, &name)?;
    let dir = cfg.out_dir.join(&bundle.name);
    write_bundle(&bundle, cfg.metric, &dir)?;
    Ok(bundle)
}

pub fn bundle_name(combination: &Combination, mode: Mode, deviation: bool) -> String {
    format!(
        "{}-{}-{}",
        combination.name().to_ascii_lowercase(),
        match mode {
            Mode::SuperPeer => "sp",
            Mode::Flat => "flat",
        },
        if deviation { "d" } else { "nd" }
    )
}

/// The C1..C8 x {ND, D} matrix on one shared world. Returns the sixteen
/// bundles in combination-major order.
pub fn run_matrix(cfg: &ExperimentConfig) -> Result<Vec<RunBundle>, ConfigError> {
    let world = World::build(cfg)?;
    let mut bundles = Vec::with_capacity(16);
    for k in 1..=8u8 {
        for deviation in [false, true] {
            let mut run_cfg = cfg.clone();
            run_cfg.combination = Combination::Named(k);
            run_cfg.deviation = deviation;
            let name = bundle_name(&run_cfg.combination, run_cfg.mode, deviation);
            let bundle = run_on_world(&world, &run_cfg, &name)?;
            let dir = cfg.out_dir.join("matrix").join(&bundle.name);
            write_bundle(&bundle, cfg.metric, &dir)?;
            bundles.push(bundle);
        }
    }
    write_matrix_summary(&bundles, &cfg.out_dir.join("matrix"))?;
    Ok(bundles)
}

/// A named set of distribution arms, mirroring one comparison figure.
pub struct ComparisonBundle {
    pub name: String,
    pub arms: Vec<(String, Distributions)>,
}

pub struct ComparisonSet {
    pub ft_vs_tt: ComparisonBundle,
    pub flat_vs_sp: ComparisonBundle,
    pub best_vs_worst: ComparisonBundle,
}

/// The three comparison studies: friend-time vs total-time on the pragmatic
/// combination, flat vs super-peer on the same, and the best-cooperation vs
/// worst-cooperation combinations, each with and without deviation.
pub fn run_comparisons(cfg: &ExperimentConfig) -> Result<ComparisonSet, ConfigError> {
    let world = World::build(cfg)?;

    // (1) FT vs TT on C8: identical placement per arm, metric differs.
    let mut arms = Vec::new();
    for deviation in [false, true] {
        let mut c = cfg.clone();
        c.combination = Combination::Named(8);
        c.mode = Mode::SuperPeer;
        c.deviation = deviation;
        let bundle = run_on_world(&world, &c, "ft-tt")?;
        let suffix = if deviation { "D" } else { "ND" };
        arms.push((format!("TT{suffix}"), bundle.report.tt.clone()));
        arms.push((format!("FT{suffix}"), bundle.report.ft.clone()));
    }
    let ft_vs_tt = ComparisonBundle {
        name: "ft-tt".into(),
        arms,
    };

    // (2) Flat vs super-peer on C8, total time.
    let mut arms = Vec::new();
    for (mode, tag) in [(Mode::SuperPeer, "SP"), (Mode::Flat, "F")] {
        for deviation in [false, true] {
            let mut c = cfg.clone();
            c.combination = Combination::Named(8);
            c.mode = mode;
            c.deviation = deviation;
            let bundle = run_on_world(&world, &c, "flat-sp")?;
            let suffix = if deviation { "D" } else { "ND" };
            arms.push((format!("{tag}{suffix}"), bundle.report.tt.clone()));
        }
    }
    let flat_vs_sp = ComparisonBundle {
        name: "flat-sp".into(),
        arms,
    };

    // (3) Best (C2) vs worst (C5), total time.
    let mut arms = Vec::new();
    for (k, tag) in [(2u8, "B"), (5u8, "W")] {
        for deviation in [false, true] {
            let mut c = cfg.clone();
            c.combination = Combination::Named(k);
            c.mode = Mode::SuperPeer;
            c.deviation = deviation;
            let bundle = run_on_world(&world, &c, "best-worst")?;
            let suffix = if deviation { "D" } else { "ND" };
            arms.push((format!("{tag}{suffix}"), bundle.report.tt.clone()));
        }
    }
    let best_vs_worst = ComparisonBundle {
        name: "best-worst".into(),
        arms,
    };

    let set = ComparisonSet {
        ft_vs_tt,
        flat_vs_sp,
        best_vs_worst,
    };
    for bundle in [&set.ft_vs_tt, &set.flat_vs_sp, &set.best_vs_worst] {
        write_comparison(bundle, &cfg.out_dir.join(format!("compare-{}", bundle.name)))?;
    }
    Ok(set)
}

// ---------------------------------------------------------------------------
// CSV emission. All files are UTF-8, comma-separated, header first; rows are
// written in fixed orders so identical runs produce identical bytes.
// ---------------------------------------------------------------------------

fn fmt_frac(v: f64) -> String {
    format!("{v:.6}")
}

fn fmt_pct(v: f64) -> String {
    format!("{v:.4}")
}

/// Write `report.csv`, `aggregate.csv`, and `staleness.csv` for one bundle.
pub fn write_bundle(bundle: &RunBundle, metric: MetricKind, dir: &Path) -> Result<(), ConfigError> {
    fs::create_dir_all(dir)?;

    let mut report = String::from("node,strategy,avl_tt,avl_ft,category\n");
    for n in &bundle.report.nodes {
        let category = match metric {
            MetricKind::TotalTime => n.category_tt,
            MetricKind::FriendTime => n.category_ft,
        };
        let _ = writeln!(
            report,
            "{},{},{},{},{}",
            n.node,
            n.strategy.label(),
            fmt_frac(n.avl_tt),
            fmt_frac(n.avl_ft),
            category.label()
        );
    }
    fs::write(dir.join("report.csv"), report)?;

    let dist = match metric {
        MetricKind::TotalTime => &bundle.report.tt,
        MetricKind::FriendTime => &bundle.report.ft,
    };
    let mut agg = String::from("metric,bucket,value\n");
    for (s, pct) in Strategy::ALL.iter().zip(bundle.report.strategy_pct.iter()) {
        let _ = writeln!(agg, "strategy,{},{}", s.label(), fmt_pct(*pct));
    }
    for (c, pct) in Category::ALL.iter().zip(dist.categories.iter()) {
        let _ = writeln!(agg, "category,{},{}", c.label(), fmt_pct(*pct));
    }
    for (x, pct) in dist.cumulative.iter().enumerate() {
        let _ = writeln!(agg, "cumulative,{x},{}", fmt_pct(*pct));
    }
    for (x, pct) in dist.histogram.iter().enumerate() {
        let _ = writeln!(agg, "histogram,{x},{}", fmt_pct(*pct));
    }
    fs::write(dir.join("aggregate.csv"), agg)?;

    let mut staleness = String::from("owner,staleness_fraction\n");
    for (owner, frac) in &bundle.staleness {
        let _ = writeln!(staleness, "{owner},{}", fmt_frac(*frac));
    }
    fs::write(dir.join("staleness.csv"), staleness)?;
    Ok(())
}

fn write_matrix_summary(bundles: &[RunBundle], dir: &Path) -> Result<(), ConfigError> {
    fs::create_dir_all(dir)?;
    let mut out = String::from("bundle,metric,bucket,value\n");
    for b in bundles {
        for (s, pct) in Strategy::ALL.iter().zip(b.report.strategy_pct.iter()) {
            let _ = writeln!(out, "{},strategy,{},{}", b.name, s.label(), fmt_pct(*pct));
        }
        for (c, pct) in Category::ALL.iter().zip(b.report.tt.categories.iter()) {
            let _ = writeln!(out, "{},category,{},{}", b.name, c.label(), fmt_pct(*pct));
        }
    }
    fs::write(dir.join("summary.csv"), out)?;
    Ok(())
}

fn write_comparison(bundle: &ComparisonBundle, dir: &Path) -> Result<(), ConfigError> {
    fs::create_dir_all(dir)?;
    let mut cumulative = String::from("metric,bucket,value\n");
    let mut individual = String::from("metric,bucket,value\n");
    let mut category = String::from("metric,bucket,value\n");
    for (arm, dist) in &bundle.arms {
        for (x, pct) in dist.cumulative.iter().enumerate() {
            let _ = writeln!(cumulative, "{arm},{x},{}", fmt_pct(*pct));
        }
        for (x, pct) in dist.histogram.iter().enumerate() {
            let _ = writeln!(individual, "{arm},{x},{}", fmt_pct(*pct));
        }
        for (c, pct) in Category::ALL.iter().zip(dist.categories.iter()) {
            let _ = writeln!(category, "{arm},{},{}", c.label(), fmt_pct(*pct));
        }
    }
    fs::write(dir.join("cumulative.csv"), cumulative)?;
    fs::write(dir.join("individual.csv"), individual)?;
    fs::write(dir.join("category.csv"), category)?;
    Ok(())
}

/// Write the graph as an edge-list file.
pub fn write_edge_list(g: &SocialGraph, path: &Path) -> Result<(), ConfigError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut out = String::new();
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write traces as CSV: node id and the horizon as a 0/1 string.
pub fn write_traces(traces: &[UptimeTrace], path: &Path) -> Result<(), ConfigError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut out = String::from("node,bits\n");
    for t in traces {
        let _ = writeln!(out, "{},{:?}", t.node, t.bits);
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write placements: keeper id lists are semicolon-separated.
pub fn write_placements(placements: &[StorekeeperSet], path: &Path) -> Result<(), ConfigError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let join = |ids: &[NodeId]| {
        ids.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(";")
    };
    let mut out = String::from("owner,strategy,friend_keepers,stranger_keepers,super_peer\n");
    for p in placements {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            p.owner,
            p.strategy.label(),
            join(&p.friend_keepers),
            join(&p.stranger_keepers),
            p.super_peer_keeper.map(|s| s.to_string()).unwrap_or_default()
        );
    }
    fs::write(path, out)?;
    Ok(())
}
