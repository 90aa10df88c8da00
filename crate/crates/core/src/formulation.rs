//! The placement-and-routing MILP.
//!
//! Variable families:
//! - `x[r][n]` request `r` is hosted on node `n` (hosting set only),
//! - `z[r][l]` request `r` is routed over directed link `l`,
//! - `y[n]` node `n` runs at least one VM (every node; non-hosts stay at 0).
//!
//! Row families: assignment, activation, compute capacity, latency,
//! per-request flow conservation and link capacity.

use std::fmt;

use serde::Serialize;

use crate::milp::{LinearExpr, MilpError, MilpProblem, Sense, VarSpec};
use crate::model::{
    validate, work_rate, HostingPolicy, NetworkInstance, PowerBreakdown, Topology, Violation,
};
use crate::queueing::{big_m_for, required_headroom};

/// How the latency rows pick their big-M coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BigMMode {
    /// One instance-wide `M` (largest headroom of any request).
    Global,
    /// `M_r` equal to the row's own headroom, the smallest valid choice.
    PerRow,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuildOptions {
    /// Response traffic charged on the request route, as a multiple of `traffic_t`.
    pub response_multiplier: f64,
    /// Absolute slack added to every latency headroom.
    pub latency_slack: f64,
    pub big_m: BigMMode,
    /// Adds the valid rows `load_n <= F_n y_n` and
    /// `load_n + h_r x[r][n] <= F_n y_n`, which tighten the relaxation.
    pub strengthen: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            response_multiplier: 0.0,
            latency_slack: 1e-9,
            big_m: BigMMode::PerRow,
            strengthen: true,
        }
    }
}

/// Index maps from model entities to MILP variables.
#[derive(Clone, Debug, PartialEq)]
pub struct VarMap {
    pub policy: HostingPolicy,
    /// Node indices of the hosting set, ascending.
    pub hosts: Vec<usize>,
    /// `x[r][k]` is the variable for request `r` on `hosts[k]`.
    pub x: Vec<Vec<usize>>,
    /// `z[r][l]` for every request and link.
    pub z: Vec<Vec<usize>>,
    /// `y[n]` for every node.
    pub y: Vec<usize>,
    /// Source node per request.
    pub sources: Vec<usize>,
    /// `(from, to)` per link.
    pub endpoints: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FormulationReport {
    pub x_vars: usize,
    pub z_vars: usize,
    pub y_vars: usize,
    pub assignment_rows: usize,
    pub activation_rows: usize,
    pub capacity_rows: usize,
    pub latency_rows: usize,
    pub flow_rows: usize,
    pub link_rows: usize,
    /// Optional tightening rows, zero unless enabled.
    pub strengthening_rows: usize,
    /// Instance-wide big-M, including the latency slack.
    pub big_m: f64,
}

impl FormulationReport {
    pub fn binaries(&self) -> usize {
        self.x_vars + self.z_vars + self.y_vars
    }

    pub fn rows(&self) -> usize {
        self.assignment_rows
            + self.activation_rows
            + self.capacity_rows
            + self.latency_rows
            + self.flow_rows
            + self.link_rows
            + self.strengthening_rows
    }
}

#[derive(Clone, Debug)]
pub struct Formulation {
    pub problem: MilpProblem,
    pub varmap: VarMap,
    pub report: FormulationReport,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error("instance is invalid: {}", join(.0))]
    InvalidInstance(Vec<Violation>),
    #[error("policy {0} has no candidate hosts")]
    EmptyHostingSet(HostingPolicy),
    #[error("request `{0}` cannot leave its source and the source may not host")]
    UnroutableRequest(String),
    #[error(transparent)]
    Milp(#[from] MilpError),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

pub fn build(
    instance: &NetworkInstance,
    policy: HostingPolicy,
    options: &BuildOptions,
) -> Result<Formulation, BuildError> {
    let violations = validate(instance);
    if !violations.is_empty() {
        return Err(BuildError::InvalidInstance(violations));
    }
    let topo = Topology::new(instance).expect("validated instance has known ids");
    let hosts = topo.hosts(policy);
    if hosts.is_empty() {
        return Err(BuildError::EmptyHostingSet(policy));
    }
    let nodes = &instance.nodes;
    let links = &instance.links;
    let reqs = &instance.requests;
    let mut host_pos = vec![None; nodes.len()];
    for (k, &n) in hosts.iter().enumerate() {
        host_pos[n] = Some(k);
    }
    for (r, req) in reqs.iter().enumerate() {
        let src = topo.sources[r];
        if topo.out_links[src].is_empty() && host_pos[src].is_none() {
            return Err(BuildError::UnroutableRequest(req.id.clone()));
        }
    }

    let mut p = MilpProblem::new();
    let mut objective = LinearExpr::new();
    let mut report = FormulationReport::default();

    let mut x = Vec::with_capacity(reqs.len());
    for req in reqs {
        let mut row = Vec::with_capacity(hosts.len());
        for &n in &hosts {
            let v = p.add_variable(VarSpec::binary(format!("x[{}][{}]", req.id, nodes[n].id)))?;
            objective.push(v, nodes[n].proc_energy * work_rate(req, &nodes[n]));
            row.push(v);
        }
        x.push(row);
    }
    report.x_vars = reqs.len() * hosts.len();

    let mut z = Vec::with_capacity(reqs.len());
    for req in reqs {
        let carried = req.traffic_t * (1.0 + options.response_multiplier);
        let mut row = Vec::with_capacity(links.len());
        for l in links {
            let v = p.add_variable(VarSpec::binary(format!("z[{}][{}]", req.id, l.id)))?;
            objective.push(v, l.tx_energy * carried);
            row.push(v);
        }
        z.push(row);
    }
    report.z_vars = reqs.len() * links.len();

    let mut y = Vec::with_capacity(nodes.len());
    for n in nodes {
        let v = p.add_variable(VarSpec::binary(format!("y[{}]", n.id)))?;
        objective.push(v, n.vm_overhead_w);
        y.push(v);
    }
    report.y_vars = nodes.len();
    p.set_objective(objective)?;

    // Every request lands on exactly one host.
    for (r, req) in reqs.iter().enumerate() {
        let e = LinearExpr::from_terms(x[r].iter().map(|&v| (v, 1.0)).collect());
        p.add_constraint(format!("assign[{}]", req.id), e, Sense::Eq, 1.0)?;
    }
    report.assignment_rows = reqs.len();

    // Hosting switches the VM on.
    for (r, req) in reqs.iter().enumerate() {
        for (k, &n) in hosts.iter().enumerate() {
            let e = LinearExpr::from_terms(vec![(x[r][k], 1.0), (y[n], -1.0)]);
            p.add_constraint(format!("act[{}][{}]", req.id, nodes[n].id), e, Sense::Le, 0.0)?;
        }
    }
    report.activation_rows = reqs.len() * hosts.len();

    // Served work fits the node.
    for (k, &n) in hosts.iter().enumerate() {
        let e = LinearExpr::from_terms(
            reqs.iter()
                .enumerate()
                .map(|(r, req)| (x[r][k], work_rate(req, &nodes[n])))
                .collect(),
        );
        p.add_constraint(format!("cap[{}]", nodes[n].id), e, Sense::Le, nodes[n].capacity_f)?;
    }
    report.capacity_rows = hosts.len();

    // Latency: F_n - load_n >= h_r + eps - M (1 - x[r][n]), written as
    //     load_n + M x[r][n] <= F_n - h_r - eps + M.
    let eps = options.latency_slack;
    let global_m = big_m_for(instance) + eps;
    report.big_m = if reqs.iter().any(|r| r.max_latency_l.is_finite()) {
        global_m
    } else {
        0.0
    };
    for (r, req) in reqs.iter().enumerate() {
        if req.max_latency_l.is_infinite() {
            continue;
        }
        let h = required_headroom(req.max_latency_l) + eps;
        let m = match options.big_m {
            BigMMode::Global => global_m,
            BigMMode::PerRow => h,
        };
        for (k, &n) in hosts.iter().enumerate() {
            let mut e = LinearExpr::from_terms(
                reqs.iter()
                    .enumerate()
                    .map(|(q, other)| (x[q][k], work_rate(other, &nodes[n])))
                    .collect(),
            );
            e.push(x[r][k], m);
            let rhs = nodes[n].capacity_f - h + m;
            p.add_constraint(format!("lat[{}][{}]", req.id, nodes[n].id), e, Sense::Le, rhs)?;
            report.latency_rows += 1;
        }
    }

    // Flow: out - in = [v = source] - x[r][v].
    for (r, req) in reqs.iter().enumerate() {
        for v in 0..nodes.len() {
            let mut e = LinearExpr::new();
            for &l in &topo.out_links[v] {
                e.push(z[r][l], 1.0);
            }
            for &l in &topo.in_links[v] {
                e.push(z[r][l], -1.0);
            }
            if let Some(k) = host_pos[v] {
                e.push(x[r][k], 1.0);
            }
            let supply = if topo.sources[r] == v { 1.0 } else { 0.0 };
            p.add_constraint(format!("flow[{}][{}]", req.id, nodes[v].id), e, Sense::Eq, supply)?;
        }
    }
    report.flow_rows = reqs.len() * nodes.len();

    // Valid for integral points because x[r][n] <= y[n].
    if options.strengthen {
        for (k, &n) in hosts.iter().enumerate() {
            let load: Vec<(usize, f64)> = reqs
                .iter()
                .enumerate()
                .map(|(q, other)| (x[q][k], work_rate(other, &nodes[n])))
                .collect();
            let mut e = LinearExpr::from_terms(load.clone());
            e.push(y[n], -nodes[n].capacity_f);
            p.add_constraint(format!("capy[{}]", nodes[n].id), e, Sense::Le, 0.0)?;
            report.strengthening_rows += 1;
            for (r, req) in reqs.iter().enumerate() {
                if req.max_latency_l.is_infinite() {
                    continue;
                }
                let mut e = LinearExpr::from_terms(load.clone());
                e.push(x[r][k], required_headroom(req.max_latency_l) + eps);
                e.push(y[n], -nodes[n].capacity_f);
                p.add_constraint(format!("laty[{}][{}]", req.id, nodes[n].id), e, Sense::Le, 0.0)?;
                report.strengthening_rows += 1;
            }
        }
    }

    // Link capacity.
    for (li, l) in links.iter().enumerate() {
        let e = LinearExpr::from_terms(
            reqs.iter()
                .enumerate()
                .map(|(r, req)| (z[r][li], req.traffic_t))
                .collect(),
        );
        p.add_constraint(format!("link[{}]", l.id), e, Sense::Le, l.capacity_b)?;
    }
    report.link_rows = links.len();

    Ok(Formulation {
        problem: p,
        varmap: VarMap {
            policy,
            hosts,
            x,
            z,
            y,
            sources: topo.sources.clone(),
            endpoints: topo.endpoints.clone(),
        },
        report,
    })
}

/// Hosting decision and route for every request.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Placement {
    /// Hosting node index per request.
    pub hosts: Vec<usize>,
    /// Ordered link indices from source to host per request; empty when self-hosted.
    pub routes: Vec<Vec<usize>>,
    /// VM-on flag per node as decided by the solver.
    pub vm_on: Vec<bool>,
}

impl Placement {
    /// Human-readable `request -> host via a->b, b->c` lines.
    pub fn describe(&self, instance: &NetworkInstance) -> Vec<String> {
        self.hosts
            .iter()
            .zip(&self.routes)
            .enumerate()
            .map(|(r, (&h, route))| {
                let hops: Vec<String> = route
                    .iter()
                    .map(|&l| format!("{}->{}", instance.links[l].from, instance.links[l].to))
                    .collect();
                format!(
                    "{} -> {} via [{}]",
                    instance.requests[r].id,
                    instance.nodes[h].id,
                    hops.join(", ")
                )
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("corrupt solution for request {request}: {reason}")]
    CorruptSolution { request: usize, reason: String },
}

impl ExtractError {
    fn corrupt(request: usize, reason: impl fmt::Display) -> Self {
        ExtractError::CorruptSolution {
            request,
            reason: reason.to_string(),
        }
    }
}

/// Reads hosts and routes out of an integral solution vector.
pub fn extract_placement(varmap: &VarMap, values: &[f64]) -> Result<Placement, ExtractError> {
    let on = |v: usize| values[v] > 0.5;
    let mut hosts = Vec::with_capacity(varmap.x.len());
    let mut routes = Vec::with_capacity(varmap.x.len());
    for (r, row) in varmap.x.iter().enumerate() {
        let chosen: Vec<usize> = row
            .iter()
            .enumerate()
            .filter(|&(_, &v)| on(v))
            .map(|(k, _)| varmap.hosts[k])
            .collect();
        let host = match chosen.as_slice() {
            [h] => *h,
            [] => return Err(ExtractError::corrupt(r, "no host selected")),
            _ => return Err(ExtractError::corrupt(r, "several hosts selected")),
        };
        let used: Vec<usize> = varmap.z[r]
            .iter()
            .enumerate()
            .filter(|&(_, &v)| on(v))
            .map(|(l, _)| l)
            .collect();
        let mut route = Vec::with_capacity(used.len());
        let mut at = varmap.sources[r];
        let mut visited = vec![at];
        while at != host {
            let mut next = used.iter().filter(|&&l| varmap.endpoints[l].0 == at);
            let l = match (next.next(), next.next()) {
                (Some(&l), None) => l,
                (None, _) => return Err(ExtractError::corrupt(r, format!("route stops at node {at}"))),
                _ => return Err(ExtractError::corrupt(r, format!("route branches at node {at}"))),
            };
            at = varmap.endpoints[l].1;
            if visited.contains(&at) {
                return Err(ExtractError::corrupt(r, "route revisits a node"));
            }
            visited.push(at);
            route.push(l);
        }
        if route.len() != used.len() {
            return Err(ExtractError::corrupt(r, "links selected off the route"));
        }
        hosts.push(host);
        routes.push(route);
    }
    let vm_on = varmap.y.iter().map(|&v| on(v)).collect();
    Ok(Placement {
        hosts,
        routes,
        vm_on,
    })
}

/// Recomputes the objective terms from a placement.
pub fn placement_power(instance: &NetworkInstance, placement: &Placement) -> PowerBreakdown {
    placement_power_with(instance, placement, 0.0)
}

/// As [`placement_power`], with response traffic charged on each route.
pub fn placement_power_with(
    instance: &NetworkInstance,
    placement: &Placement,
    response_multiplier: f64,
) -> PowerBreakdown {
    let mut proc_w = 0.0;
    let mut traffic_w = 0.0;
    let mut hosting = vec![false; instance.nodes.len()];
    for (r, req) in instance.requests.iter().enumerate() {
        let host = &instance.nodes[placement.hosts[r]];
        hosting[placement.hosts[r]] = true;
        proc_w += host.proc_energy * work_rate(req, host);
        let carried = req.traffic_t * (1.0 + response_multiplier);
        for &l in &placement.routes[r] {
            traffic_w += instance.links[l].tx_energy * carried;
        }
    }
    let vm_w = instance
        .nodes
        .iter()
        .zip(&hosting)
        .filter(|(_, &h)| h)
        .map(|(n, _)| n.vm_overhead_w)
        .sum();
    PowerBreakdown::new(proc_w, vm_w, traffic_w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::VarDomain;
    use crate::model::{LinkKind, LinkSpec, NodeKind, NodeSpec, Request};

    fn node(id: &str, kind: NodeKind) -> NodeSpec {
        NodeSpec {
            id: id.into(),
            kind,
            capacity_f: 10.0,
            cpi: 1.0,
            vm_overhead_w: 1.0,
            proc_energy: 1.0,
        }
    }

    fn link(from: &str, to: &str, kind: LinkKind) -> LinkSpec {
        LinkSpec {
            id: format!("{from}-{to}"),
            from: from.into(),
            to: to.into(),
            kind,
            capacity_b: 100.0,
            tx_energy: 0.1,
        }
    }

    fn req(id: &str, source: &str, latency: f64) -> Request {
        Request {
            id: id.into(),
            source: source.into(),
            arrival_a: 1.0,
            instr: 0.5,
            traffic_t: 2.0,
            max_latency_l: latency,
        }
    }

    /// olt0 - onu0 - enb0 - {ud0, ud1}; 8 directed links.
    fn small(latency: f64) -> NetworkInstance {
        let nodes = vec![
            node("olt0", NodeKind::Olt),
            node("onu0", NodeKind::Onu),
            node("enb0", NodeKind::Enodeb),
            node("ud0", NodeKind::Ud),
            node("ud1", NodeKind::Ud),
        ];
        let mut links = Vec::new();
        for (a, b, k) in [
            ("olt0", "onu0", LinkKind::Fibre),
            ("onu0", "enb0", LinkKind::Fibre),
            ("ud0", "enb0", LinkKind::Licensed),
            ("ud1", "enb0", LinkKind::Licensed),
        ] {
            links.push(link(a, b, k));
            links.push(link(b, a, k));
        }
        NetworkInstance {
            nodes,
            links,
            requests: vec![req("r0", "ud0", latency), req("r1", "ud1", latency)],
        }
    }

    /// olt0 - {onu0, onu1}, onu0 - enb0 - ud0; 8 directed links, two requests from ud0.
    fn three_gpon() -> NetworkInstance {
        let nodes = vec![
            node("olt0", NodeKind::Olt),
            node("onu0", NodeKind::Onu),
            node("onu1", NodeKind::Onu),
            node("enb0", NodeKind::Enodeb),
            node("ud0", NodeKind::Ud),
        ];
        let mut links = Vec::new();
        for (a, b, k) in [
            ("olt0", "onu0", LinkKind::Fibre),
            ("olt0", "onu1", LinkKind::Fibre),
            ("onu0", "enb0", LinkKind::Fibre),
            ("ud0", "enb0", LinkKind::Licensed),
        ] {
            links.push(link(a, b, k));
            links.push(link(b, a, k));
        }
        NetworkInstance {
            nodes,
            links,
            requests: vec![req("r0", "ud0", 0.5), req("r1", "ud0", f64::INFINITY)],
        }
    }

    #[test]
    fn binary_count_example() {
        // |R| = 2, |H| = 3, |L| = 8, |N| = 5.
        let f = build(&three_gpon(), HostingPolicy::Cran, &BuildOptions::default()).unwrap();
        assert_eq!(f.varmap.hosts.len(), 3);
        assert_eq!(f.report.binaries(), 27);
        assert_eq!(f.problem.variables.len(), 27);
        assert!(f.problem.variables.iter().all(|v| v.domain == VarDomain::Binary));
        let r = &f.report;
        assert_eq!(
            (r.assignment_rows, r.activation_rows, r.capacity_rows, r.latency_rows, r.flow_rows, r.link_rows),
            (2, 6, 3, 3, 10, 8)
        );
        assert_eq!(r.rows(), f.problem.constraints.len());
    }

    #[test]
    fn invalid_instance_is_refused() {
        let mut inst = three_gpon();
        inst.links.retain(|l| l.from != "ud0");
        assert!(matches!(
            build(&inst, HostingPolicy::Cran, &BuildOptions::default()),
            Err(BuildError::InvalidInstance(_))
        ));
    }

    #[test]
    fn per_row_and_global_big_m_accept_the_same_points() {
        let inst = three_gpon();
        let a = build(&inst, HostingPolicy::Fran, &BuildOptions::default()).unwrap();
        let b = build(&inst, HostingPolicy::Fran, &BuildOptions { big_m: BigMMode::Global, ..BuildOptions::default() }).unwrap();
        let n = a.problem.variables.len();
        let k = a.varmap.hosts.len();
        for pair in 0..k * k {
            let mut v = vec![0.0; n];
            let (h0, h1) = (pair % k, pair / k);
            v[a.varmap.x[0][h0]] = 1.0;
            v[a.varmap.x[1][h1]] = 1.0;
            let lat = |f: &Formulation| {
                f.problem
                    .constraints
                    .iter()
                    .filter(|c| c.name.starts_with("lat"))
                    .all(|c| c.violation(&v) == 0.0)
            };
            assert_eq!(lat(&a), lat(&b));
        }
    }

    #[test]
    fn infinite_latency_emits_no_latency_rows() {
        let f = build(&small(f64::INFINITY), HostingPolicy::Fran, &BuildOptions::default()).unwrap();
        assert_eq!(f.report.latency_rows, 0);
        assert_eq!(f.report.big_m, 0.0);
        let f = build(&small(0.5), HostingPolicy::Fran, &BuildOptions::default()).unwrap();
        assert_eq!(f.report.latency_rows, 2 * 5);
        assert!((f.report.big_m - 2.0).abs() < 1e-6);
    }

    #[test]
    fn self_hosting_is_flow_feasible_with_empty_route() {
        let inst = small(f64::INFINITY);
        let f = build(&inst, HostingPolicy::Fran, &BuildOptions::default()).unwrap();
        let mut values = vec![0.0; f.problem.variables.len()];
        for r in 0..2 {
            let k = f.varmap.hosts.iter().position(|&n| n == f.varmap.sources[r]).unwrap();
            values[f.varmap.x[r][k]] = 1.0;
            values[f.varmap.y[f.varmap.sources[r]]] = 1.0;
        }
        let (viol, what) = f.problem.max_violation(&values);
        assert_eq!(viol, 0.0, "{what:?}");
        let placement = extract_placement(&f.varmap, &values).unwrap();
        assert!(placement.routes.iter().all(|r| r.is_empty()));
    }

    #[test]
    fn empty_x_row_is_corrupt() {
        let inst = small(f64::INFINITY);
        let f = build(&inst, HostingPolicy::Fran, &BuildOptions::default()).unwrap();
        let values = vec![0.0; f.problem.variables.len()];
        assert!(matches!(
            extract_placement(&f.varmap, &values),
            Err(ExtractError::CorruptSolution { request: 0, .. })
        ));
    }

    #[test]
    fn stray_cycle_is_corrupt() {
        let inst = small(f64::INFINITY);
        let f = build(&inst, HostingPolicy::Fran, &BuildOptions::default()).unwrap();
        let mut values = vec![0.0; f.problem.variables.len()];
        for r in 0..2 {
            let k = f.varmap.hosts.iter().position(|&n| n == f.varmap.sources[r]).unwrap();
            values[f.varmap.x[r][k]] = 1.0;
        }
        // olt0 -> onu0 -> olt0 for request 0.
        values[f.varmap.z[0][0]] = 1.0;
        values[f.varmap.z[0][1]] = 1.0;
        assert!(extract_placement(&f.varmap, &values).is_err());
    }

    #[test]
    fn path_is_reconstructed_in_order() {
        let inst = small(f64::INFINITY);
        let f = build(&inst, HostingPolicy::Cran, &BuildOptions::default()).unwrap();
        let mut values = vec![0.0; f.problem.variables.len()];
        // r0: ud0 -> enb0 -> onu0 (host index 1 in {olt0, onu0}).
        values[f.varmap.x[0][1]] = 1.0;
        let idx = |id: &str| inst.links.iter().position(|l| l.id == id).unwrap();
        for id in ["enb0-onu0", "ud0-enb0"] {
            values[f.varmap.z[0][idx(id)]] = 1.0;
        }
        // r1: ud1 -> enb0 -> onu0 -> olt0.
        values[f.varmap.x[1][0]] = 1.0;
        for id in ["ud1-enb0", "enb0-onu0", "onu0-olt0"] {
            values[f.varmap.z[1][idx(id)]] = 1.0;
        }
        values[f.varmap.y[0]] = 1.0;
        values[f.varmap.y[1]] = 1.0;
        assert_eq!(f.problem.max_violation(&values).0, 0.0);
        let p = extract_placement(&f.varmap, &values).unwrap();
        assert_eq!(p.hosts, vec![1, 0]);
        assert_eq!(p.routes[0], vec![idx("ud0-enb0"), idx("enb0-onu0")]);
        assert_eq!(
            p.describe(&inst)[1],
            "r1 -> olt0 via [ud1->enb0, enb0->onu0, onu0->olt0]"
        );
        let power = placement_power(&inst, &p);
        assert!((power.total_w - f.problem.objective_value(&values)).abs() < 1e-12);
    }

    #[test]
    fn single_self_hosted_request_power() {
        // a = 1, instr = 0.5, cpi = 1, proc_energy = 2, vm_overhead = 1.
        let mut inst = small(f64::INFINITY);
        inst.requests.truncate(1);
        inst.nodes[3].proc_energy = 2.0;
        let p = Placement {
            hosts: vec![3],
            routes: vec![vec![]],
            vm_on: vec![false, false, false, true, false],
        };
        let power = placement_power(&inst, &p);
        // Hand sum: proc 2 * (1 * 0.5 * 1) = 1.0, vm 1.0, traffic 0.0.
        assert_eq!(power, PowerBreakdown { total_w: 2.0, proc_w: 1.0, vm_w: 1.0, traffic_w: 0.0 });
    }

    #[test]
    fn no_requests_no_power() {
        let mut inst = small(f64::INFINITY);
        inst.requests.clear();
        let p = Placement {
            hosts: vec![],
            routes: vec![],
            vm_on: vec![false; 5],
        };
        assert_eq!(placement_power(&inst, &p).total_w, 0.0);
    }

    #[test]
    fn traffic_scales_linearly_with_tx_energy() {
        let inst = small(f64::INFINITY);
        let p = Placement {
            hosts: vec![1, 1],
            routes: vec![vec![4, 2], vec![6, 2]],
            vm_on: vec![false, true, false, false, false],
        };
        let base = placement_power(&inst, &p);
        let mut doubled = inst.clone();
        doubled.links.iter_mut().for_each(|l| l.tx_energy *= 2.0);
        let twice = placement_power(&doubled, &p);
        assert_eq!(twice.traffic_w, 2.0 * base.traffic_w);
        assert_eq!((twice.proc_w, twice.vm_w), (base.proc_w, base.vm_w));
    }

}
