//! Daily-load and latency sweeps under both hosting policies.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::demand::{active_count, generate_requests, DemandConfig, LoadProfile, SplitMix64};
use crate::formulation::{build, extract_placement, placement_power_with, BuildError, BuildOptions, FormulationReport, Placement};
use crate::milp::write_lp;
use crate::model::{work_rate, HostingPolicy, LinkKind, NetworkInstance, NodeKind, PowerBreakdown};
use crate::queueing::{mm1_delay, QueueState};
use crate::solver::{solve_milp, BnbStatus, SolverError, SolverOptions};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioOptions {
    pub build: BuildOptions,
    pub solver: SolverOptions,
    /// Threads for independent solves; results do not depend on it.
    pub workers: usize,
    /// When set, every sweep solve writes its LP text into this directory.
    #[serde(skip)]
    pub lp_dir: Option<std::path::PathBuf>,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        ScenarioOptions {
            build: BuildOptions::default(),
            solver: SolverOptions::default(),
            workers: 1,
            lp_dir: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RowStatus {
    Optimal,
    Infeasible,
    NodeLimit,
    Failed,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Optimal => "OPTIMAL",
            RowStatus::Infeasible => "INFEASIBLE",
            RowStatus::NodeLimit => "NODE_LIMIT",
            RowStatus::Failed => "FAILED",
        }
    }
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One policy solved on one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlotSolution {
    pub policy: HostingPolicy,
    pub status: RowStatus,
    /// Recomputed from the placement; zero unless optimal.
    pub power: PowerBreakdown,
    pub objective: f64,
    pub root_bound: f64,
    pub nodes: u64,
    pub placement: Option<Placement>,
    pub formulation: FormulationReport,
    pub message: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("latency grid: {0}")]
    Grid(String),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Builds, solves and decodes one policy.
pub fn solve_policy(
    instance: &NetworkInstance,
    policy: HostingPolicy,
    options: &ScenarioOptions,
) -> Result<SlotSolution, ScenarioError> {
    solve_policy_with_dump(instance, policy, options, None)
}

/// As [`solve_policy`]; `dump` receives the LP text of the built problem.
pub fn solve_policy_with_dump(
    instance: &NetworkInstance,
    policy: HostingPolicy,
    options: &ScenarioOptions,
    dump: Option<&mut dyn FnMut(&str)>,
) -> Result<SlotSolution, ScenarioError> {
    let f = build(instance, policy, &options.build)?;
    if let Some(sink) = dump {
        sink(&write_lp(&f.problem));
    }
    let mut out = SlotSolution {
        policy,
        status: RowStatus::Failed,
        power: PowerBreakdown::default(),
        objective: f64::INFINITY,
        root_bound: f64::NAN,
        nodes: 0,
        placement: None,
        formulation: f.report.clone(),
        message: None,
    };
    let report = match solve_milp(&f.problem, &options.solver) {
        Ok(r) => r,
        Err(SolverError::IterationLimit(r)) => {
            out.status = RowStatus::NodeLimit;
            out.nodes = r.nodes;
            out.root_bound = r.root_bound;
            out.message = Some(format!("node limit, gap {:e}", r.gap));
            return Ok(out);
        }
        Err(e) => {
            out.message = Some(e.to_string());
            return Ok(out);
        }
    };
    out.nodes = report.nodes;
    out.root_bound = report.root_bound;
    if report.status == BnbStatus::Infeasible {
        out.status = RowStatus::Infeasible;
        return Ok(out);
    }
    match extract_placement(&f.varmap, &report.values) {
        Ok(p) => {
            out.power = placement_power_with(instance, &p, options.build.response_multiplier);
            out.objective = report.objective;
            out.status = RowStatus::Optimal;
            let drift = (out.power.total_w - report.objective).abs();
            if drift > 1e-6 * (1.0 + report.objective.abs()) {
                log::warn!("{policy}: placement power {} differs from objective {}", out.power.total_w, report.objective);
            }
            out.placement = Some(p);
        }
        Err(e) => out.message = Some(e.to_string()),
    }
    Ok(out)
}

/// `100 (p_cran - p_fran) / p_cran`.
pub fn saving_pct(p_cran: f64, p_fran: f64) -> Result<f64, DivisionByZero> {
    if p_cran == 0.0 {
        return Err(DivisionByZero);
    }
    Ok(100.0 * (p_cran - p_fran) / p_cran)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("C-RAN power is zero")]
pub struct DivisionByZero;

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(untagged)]
pub enum SweepKey {
    Hour(u8),
    Latency(f64),
}

impl SweepKey {
    fn order(&self) -> f64 {
        match *self {
            SweepKey::Hour(h) => h as f64,
            SweepKey::Latency(l) => l,
        }
    }
}

impl fmt::Display for SweepKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepKey::Hour(h) => write!(f, "{h}"),
            SweepKey::Latency(l) => write!(f, "{l:.16e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub key: SweepKey,
    pub policy: HostingPolicy,
    pub status: RowStatus,
    pub power: PowerBreakdown,
    pub bnb_nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exclusion {
    pub key: SweepKey,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Load,
    Latency,
}

/// How the latency grid was chosen.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridInfo {
    /// `explicit`, `auto`, or `auto-fallback`.
    pub mode: String,
    pub points: Vec<f64>,
    /// `1.05 / h`, with `h` the best spare capacity of a single GPON node
    /// carrying all demand.
    pub tightest: Option<f64>,
    /// Largest host delay in the unconstrained optima of both policies.
    pub plateau_delay: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub kind: SweepKind,
    /// Sorted by key, then policy (C-RAN first).
    pub rows: Vec<SweepRow>,
    /// Per-key saving where both policies are optimal and C-RAN power is positive.
    pub savings: Vec<(SweepKey, f64)>,
    pub average_saving_pct: Option<f64>,
    pub excluded: Vec<Exclusion>,
    pub grid: Option<GridInfo>,
}

impl SweepResult {
    fn assemble(kind: SweepKind, mut rows: Vec<SweepRow>, grid: Option<GridInfo>) -> Self {
        rows.sort_by(|a, b| a.key.order().total_cmp(&b.key.order()).then(a.policy.cmp(&b.policy)));
        let mut savings = Vec::new();
        let mut excluded = Vec::new();
        for pair in rows.chunks(2) {
            let [c, f] = pair else { continue };
            debug_assert_eq!((c.policy, f.policy), (HostingPolicy::Cran, HostingPolicy::Fran));
            let key = c.key;
            if c.status != RowStatus::Optimal || f.status != RowStatus::Optimal {
                excluded.push(Exclusion {
                    key,
                    reason: format!("cran {}, fran {}", c.status, f.status),
                });
                continue;
            }
            match saving_pct(c.power.total_w, f.power.total_w) {
                Ok(s) => savings.push((key, s)),
                Err(_) => excluded.push(Exclusion {
                    key,
                    reason: "zero C-RAN power".into(),
                }),
            }
        }
        let average_saving_pct = if savings.is_empty() {
            None
        } else {
            Some(savings.iter().map(|s| s.1).sum::<f64>() / savings.len() as f64)
        };
        SweepResult {
            kind,
            rows,
            savings,
            average_saving_pct,
            excluded,
            grid,
        }
    }

    /// Total power per key for one policy, in key order.
    pub fn column(&self, policy: HostingPolicy) -> Vec<(SweepKey, RowStatus, f64)> {
        self.rows
            .iter()
            .filter(|r| r.policy == policy)
            .map(|r| (r.key, r.status, r.power.total_w))
            .collect()
    }
}

fn run_all<T: Sync, R: Send>(
    items: &[T],
    workers: usize,
    f: impl Fn(&T) -> R + Sync + Send,
) -> Result<Vec<R>, ScenarioError> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if workers > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| ScenarioError::Pool(e.to_string()))?;
            return Ok(pool.install(|| items.par_iter().map(&f).collect()));
        }
    }
    let _ = workers;
    Ok(items.iter().map(f).collect())
}

fn ud_ids(instance: &NetworkInstance) -> Vec<String> {
    let mut ids: Vec<String> = instance
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Ud)
        .map(|n| n.id.clone())
        .collect();
    ids.sort();
    ids
}

/// `instance` with the full demand of every UD.
pub fn with_demand(instance: &NetworkInstance, demand: &DemandConfig) -> NetworkInstance {
    NetworkInstance {
        requests: generate_requests(demand, &ud_ids(instance)),
        ..instance.clone()
    }
}

/// `instance` with only the requests of the first `count` UDs by id.
pub fn restrict_to_active(instance: &NetworkInstance, count: usize) -> NetworkInstance {
    let active: Vec<String> = ud_ids(instance).into_iter().take(count).collect();
    NetworkInstance {
        requests: instance
            .requests
            .iter()
            .filter(|r| active.contains(&r.source))
            .cloned()
            .collect(),
        ..instance.clone()
    }
}

/// `instance` with every latency bound replaced by `latency`.
pub fn with_latency(instance: &NetworkInstance, latency: f64) -> NetworkInstance {
    let mut out = instance.clone();
    for r in &mut out.requests {
        r.max_latency_l = latency;
    }
    out
}

/// A small random cell cut out of `instance`: every GPON node, one
/// eNodeB, up to `max_uds` of its UDs and 1 to `max_requests` of their
/// requests drawn from `demand` reseeded with `seed`.
pub fn sample_cell(
    instance: &NetworkInstance,
    demand: &DemandConfig,
    seed: u64,
    max_uds: usize,
    max_requests: usize,
) -> NetworkInstance {
    let mut rng = SplitMix64::new(seed);
    let enbs: Vec<&str> = instance
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Enodeb)
        .map(|n| n.id.as_str())
        .collect();
    let mut keep: Vec<&str> = instance
        .nodes
        .iter()
        .filter(|n| n.kind.is_gpon())
        .map(|n| n.id.as_str())
        .collect();
    let mut uds = Vec::new();
    if !enbs.is_empty() {
        let enb = enbs[rng.below(enbs.len())];
        keep.push(enb);
        let mut cell: Vec<&str> = instance
            .links
            .iter()
            .filter(|l| l.from == enb && l.kind == LinkKind::Licensed)
            .map(|l| l.to.as_str())
            .collect();
        cell.sort_unstable();
        cell.dedup();
        let want = 1 + rng.below(max_uds.max(1)).min(cell.len().saturating_sub(1));
        while uds.len() < want && !cell.is_empty() {
            uds.push(cell.remove(rng.below(cell.len())));
        }
        uds.sort_unstable();
        keep.extend(uds.iter().copied());
    }
    let nodes: Vec<_> = instance.nodes.iter().filter(|n| keep.contains(&n.id.as_str())).cloned().collect();
    let links = instance
        .links
        .iter()
        .filter(|l| keep.contains(&l.from.as_str()) && keep.contains(&l.to.as_str()))
        .cloned()
        .collect();
    let mut pool = generate_requests(&DemandConfig { seed, ..demand.clone() }, &uds);
    let count = (1 + rng.below(max_requests.max(1))).min(pool.len());
    let mut requests = Vec::with_capacity(count);
    while requests.len() < count {
        requests.push(pool.remove(rng.below(pool.len())));
    }
    requests.sort_by(|a, b| a.id.cmp(&b.id));
    NetworkInstance { nodes, links, requests }
}

/// Sets each GPON node's capacity to `factor` times the work of all demand on it.
pub fn scale_gpon_capacity(instance: &NetworkInstance, factor: f64) -> NetworkInstance {
    let mut out = instance.clone();
    for n in out.nodes.iter_mut().filter(|n| n.kind.is_gpon()) {
        let work: f64 = instance.requests.iter().map(|r| work_rate(r, n)).sum();
        n.capacity_f = factor * work;
    }
    out
}

fn solve_row(
    instance: &NetworkInstance,
    key: SweepKey,
    label: &str,
    policy: HostingPolicy,
    options: &ScenarioOptions,
) -> Result<SweepRow, ScenarioError> {
    let s = match &options.lp_dir {
        Some(dir) => {
            let path = dir.join(format!("{label}_{policy}.lp"));
            let mut sink = |text: &str| {
                if let Err(e) = std::fs::write(&path, text) {
                    log::warn!("cannot write {}: {e}", path.display());
                }
            };
            solve_policy_with_dump(instance, policy, options, Some(&mut sink))?
        }
        None => solve_policy(instance, policy, options)?,
    };
    log::info!(
        "{key} {policy}: {} {:.6} W after {} nodes",
        s.status,
        s.power.total_w,
        s.nodes
    );
    Ok(SweepRow {
        key,
        policy,
        status: s.status,
        power: s.power,
        bnb_nodes: s.nodes,
    })
}

/// Solves every profile slot under both policies.
///
/// `instance` supplies the topology; its requests are replaced by the full
/// demand, of which each slot keeps the active UDs' share. Slots with the
/// same number of active UDs share one solve.
pub fn run_load_sweep(
    instance: &NetworkInstance,
    profile: &LoadProfile,
    demand: &DemandConfig,
    options: &ScenarioOptions,
) -> Result<SweepResult, ScenarioError> {
    let full = with_demand(instance, demand);
    let nud = ud_ids(instance).len();
    let mut counts: Vec<usize> = profile
        .slots
        .iter()
        .map(|s| active_count(s.active_fraction, nud))
        .collect();
    counts.sort_unstable();
    counts.dedup();
    let tasks: Vec<(usize, HostingPolicy)> = counts
        .iter()
        .flat_map(|&c| HostingPolicy::ALL.map(|p| (c, p)))
        .collect();
    let solved = run_all(&tasks, options.workers, |&(count, policy)| {
        let inst = restrict_to_active(&full, count);
        solve_row(&inst, SweepKey::Hour(0), &format!("active{count:02}"), policy, options)
    })?;
    let mut by_task = Vec::with_capacity(tasks.len());
    for (task, row) in tasks.iter().zip(solved) {
        by_task.push((*task, row?));
    }
    let mut rows = Vec::with_capacity(2 * profile.slots.len());
    for slot in &profile.slots {
        let count = active_count(slot.active_fraction, nud);
        for ((c, _), row) in &by_task {
            if *c == count {
                rows.push(SweepRow {
                    key: SweepKey::Hour(slot.hour),
                    ..row.clone()
                });
            }
        }
    }
    Ok(SweepResult::assemble(SweepKind::Load, rows, None))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatencyGrid {
    /// The string `"auto"`.
    Auto(AutoTag),
    Explicit(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

impl Default for LatencyGrid {
    fn default() -> Self {
        LatencyGrid::Auto(AutoTag::Auto)
    }
}

impl LatencyGrid {
    pub fn check(&self) -> Result<(), String> {
        if let LatencyGrid::Explicit(points) = self {
            if points.is_empty() {
                return Err("latency grid is empty".into());
            }
            if points.iter().any(|&l| !(l > 0.0)) {
                return Err("latency grid values must be positive".into());
            }
            if points.windows(2).any(|w| w[0] >= w[1]) {
                return Err("latency grid must be strictly increasing".into());
            }
        }
        Ok(())
    }
}

pub const AUTO_POINTS: usize = 16;

/// Largest host delay of an optimal placement.
fn max_host_delay(instance: &NetworkInstance, placement: &Placement) -> f64 {
    let mut load = vec![0.0; instance.nodes.len()];
    for (r, &h) in placement.hosts.iter().enumerate() {
        load[h] += work_rate(&instance.requests[r], &instance.nodes[h]);
    }
    let mut worst: f64 = 0.0;
    for (n, &lambda) in load.iter().enumerate() {
        if placement.hosts.contains(&n) {
            let d = mm1_delay(QueueState {
                capacity_mu: instance.nodes[n].capacity_f,
                work_arrival_lambda: lambda,
            })
            .unwrap_or(f64::INFINITY);
            worst = worst.max(d);
        }
    }
    worst
}

/// Sixteen log-spaced bounds from just above the tightest single-GPON bound
/// to past the point where the unconstrained optima become feasible.
pub fn auto_latency_grid(instance: &NetworkInstance, options: &ScenarioOptions) -> Result<GridInfo, ScenarioError> {
    let headroom = instance
        .nodes
        .iter()
        .filter(|n| n.kind.is_gpon())
        .map(|n| n.capacity_f - instance.requests.iter().map(|r| work_rate(r, n)).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    if !(headroom > 0.0) {
        return Err(ScenarioError::Grid(
            "no single GPON node can carry the full demand; give an explicit grid".into(),
        ));
    }
    let tightest = 1.05 / headroom;
    let open = with_latency(instance, f64::INFINITY);
    let mut plateau: f64 = 0.0;
    for policy in HostingPolicy::ALL {
        let s = solve_policy(&open, policy, options)?;
        let p = s.placement.ok_or_else(|| {
            ScenarioError::Grid(format!("unconstrained {policy} solve ended {}", s.status))
        })?;
        plateau = plateau.max(max_host_delay(&open, &p));
    }
    let steps = (AUTO_POINTS - 3) as f64;
    let (mode, ratio) = if plateau.is_infinite() {
        ("auto-fallback", 1.5)
    } else {
        let top = plateau * (1.0 + 1e-3);
        if top <= tightest * 1.01 {
            ("auto-fallback", 1.01f64.powf(1.0 / steps).max(1.001))
        } else {
            ("auto", (top / tightest).powf(1.0 / steps))
        }
    };
    let points = (0..AUTO_POINTS).map(|i| tightest * ratio.powi(i as i32)).collect();
    Ok(GridInfo {
        mode: mode.into(),
        points,
        tightest: Some(tightest),
        plateau_delay: Some(plateau),
        ratio: Some(ratio),
    })
}

/// Solves both policies with every latency bound set to each grid value.
/// `instance` supplies the topology; its requests are replaced by the full demand.
pub fn run_latency_sweep(
    instance: &NetworkInstance,
    demand: &DemandConfig,
    grid: &LatencyGrid,
    options: &ScenarioOptions,
) -> Result<SweepResult, ScenarioError> {
    run_latency_sweep_on(&with_demand(instance, demand), grid, options)
}

/// As [`run_latency_sweep`], keeping the requests of `instance`.
pub fn run_latency_sweep_on(
    instance: &NetworkInstance,
    grid: &LatencyGrid,
    options: &ScenarioOptions,
) -> Result<SweepResult, ScenarioError> {
    grid.check().map_err(ScenarioError::Grid)?;
    let info = match grid {
        LatencyGrid::Auto(_) => auto_latency_grid(instance, options)?,
        LatencyGrid::Explicit(points) => GridInfo {
            mode: "explicit".into(),
            points: points.clone(),
            tightest: None,
            plateau_delay: None,
            ratio: None,
        },
    };
    let tasks: Vec<(f64, HostingPolicy)> = info
        .points
        .iter()
        .flat_map(|&l| HostingPolicy::ALL.map(|p| (l, p)))
        .collect();
    let rows = run_all(&tasks, options.workers, |&(l, policy)| {
        let key = SweepKey::Latency(l);
        solve_row(&with_latency(instance, l), key, &key.to_string(), policy, options)
    })?
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult::assemble(SweepKind::Latency, rows, Some(info)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saving_examples() {
        assert!((saving_pct(10.0, 6.6).unwrap() - 34.0).abs() < 1e-12);
        assert_eq!(saving_pct(10.0, 10.0), Ok(0.0));
        assert_eq!(saving_pct(5.0, 0.0), Ok(100.0));
        assert_eq!(saving_pct(0.0, 0.0), Err(DivisionByZero));
    }

    #[test]
    fn key_formatting() {
        assert_eq!(SweepKey::Hour(7).to_string(), "7");
        assert_eq!(SweepKey::Latency(0.25).to_string(), "2.5000000000000000e-1");
    }

    #[test]
    fn grid_checks() {
        assert!(LatencyGrid::Explicit(vec![0.1, 0.2]).check().is_ok());
        assert!(LatencyGrid::Explicit(vec![0.2, 0.2]).check().is_err());
        assert!(LatencyGrid::Explicit(vec![-1.0, 0.2]).check().is_err());
        assert!(LatencyGrid::Explicit(vec![]).check().is_err());
        let auto: LatencyGrid = serde_json::from_str("\"auto\"").unwrap();
        assert_eq!(auto, LatencyGrid::default());
        assert!(serde_json::from_str::<LatencyGrid>("\"manual\"").is_err());
    }

    fn row(key: SweepKey, policy: HostingPolicy, status: RowStatus, total: f64) -> SweepRow {
        SweepRow {
            key,
            policy,
            status,
            power: PowerBreakdown::new(total, 0.0, 0.0),
            bnb_nodes: 1,
        }
    }

    #[test]
    fn sampled_cells_are_valid_and_small() {
        let full = crate::model::reference_topology(&crate::model::TopologyParams::default());
        for seed in 0..40 {
            let inst = sample_cell(&full, &DemandConfig::default(), seed, 5, 3);
            assert!(crate::model::validate(&inst).is_empty(), "seed {seed}");
            let uds = inst.nodes.iter().filter(|n| n.kind == NodeKind::Ud).count();
            let enbs = inst.nodes.iter().filter(|n| n.kind == NodeKind::Enodeb).count();
            assert!((1..=5).contains(&uds) && enbs == 1);
            assert!((1..=3).contains(&inst.requests.len()));
            assert_eq!(inst, sample_cell(&full, &DemandConfig::default(), seed, 5, 3));
        }
    }

    #[test]
    fn assembly_sorts_and_excludes() {
        use HostingPolicy::*;
        let rows = vec![
            row(SweepKey::Hour(3), Fran, RowStatus::Optimal, 6.0),
            row(SweepKey::Hour(3), Cran, RowStatus::Optimal, 10.0),
            row(SweepKey::Hour(1), Fran, RowStatus::Optimal, 0.0),
            row(SweepKey::Hour(1), Cran, RowStatus::Optimal, 0.0),
            row(SweepKey::Hour(2), Cran, RowStatus::Infeasible, 0.0),
            row(SweepKey::Hour(2), Fran, RowStatus::Optimal, 3.0),
        ];
        let r = SweepResult::assemble(SweepKind::Load, rows, None);
        let keys: Vec<String> = r.rows.iter().map(|r| format!("{}{}", r.key, r.policy)).collect();
        assert_eq!(keys, ["1cran", "1fran", "2cran", "2fran", "3cran", "3fran"]);
        assert_eq!(r.average_saving_pct, Some(40.0));
        assert_eq!(r.excluded.len(), 2);
        assert_eq!(r.excluded[0].reason, "zero C-RAN power");
        assert_eq!(r.excluded[1].reason, "cran INFEASIBLE, fran OPTIMAL");
    }
}
