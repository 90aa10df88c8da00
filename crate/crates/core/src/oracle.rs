//! Exhaustive reference optimizer for tiny instances.
//!
//! Every host assignment is enumerated; each request then travels on its own
//! minimum-energy path. This only matches the joint optimum when link
//! capacities do not bind, so the oracle refuses instances where they would.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::formulation::Placement;
use crate::model::{validate, work_rate, HostingPolicy, NetworkInstance, Topology, Violation};

pub const MAX_ASSIGNMENTS: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleOptions {
    pub latency_slack: f64,
    pub response_multiplier: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            latency_slack: 1e-9,
            response_multiplier: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub objective: f64,
    pub placement: Placement,
    pub assignments_examined: u64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("{0} assignments exceed the enumeration limit")]
    TooLarge(u128),
    #[error("no feasible assignment")]
    Infeasible,
    #[error("per-request shortest paths overload link `{link}`")]
    CapacityCoupling { link: String },
    #[error("instance is invalid ({} violations)", .0.len())]
    InvalidInstance(Vec<Violation>),
}

/// Cheapest path per (request, destination) as `(energy, links)`.
type Paths = Vec<Vec<Option<(f64, Vec<usize>)>>>;

fn shortest_paths(instance: &NetworkInstance, topo: &Topology, multiplier: f64) -> Paths {
    let n = instance.nodes.len();
    instance
        .requests
        .iter()
        .enumerate()
        .map(|(r, req)| {
            let carried = req.traffic_t * (1.0 + multiplier);
            let mut dist = vec![f64::INFINITY; n];
            let mut pred: Vec<Option<usize>> = vec![None; n];
            let mut done = vec![false; n];
            let src = topo.sources[r];
            dist[src] = 0.0;
            // Distances are nonnegative, so their bit patterns order like the values.
            let mut heap = BinaryHeap::from([Reverse((0u64, src))]);
            while let Some(Reverse((_, v))) = heap.pop() {
                if done[v] {
                    continue;
                }
                done[v] = true;
                for &l in &topo.out_links[v] {
                    let link = &instance.links[l];
                    if link.capacity_b < req.traffic_t {
                        continue;
                    }
                    let w = topo.endpoints[l].1;
                    let d = dist[v] + link.tx_energy * carried;
                    if d < dist[w] {
                        dist[w] = d;
                        pred[w] = Some(l);
                        heap.push(Reverse((d.to_bits(), w)));
                    }
                }
            }
            (0..n)
                .map(|v| {
                    if dist[v].is_infinite() {
                        return None;
                    }
                    let mut route = Vec::new();
                    let mut at = v;
                    while let Some(l) = pred[at] {
                        route.push(l);
                        at = topo.endpoints[l].0;
                    }
                    route.reverse();
                    Some((dist[v], route))
                })
                .collect()
        })
        .collect()
}

/// Minimum-power placement by enumeration of all host assignments.
///
/// Ties go to the lexicographically first assignment, with requests in
/// instance order and hosts in node order.
pub fn enumerate_optimum(
    instance: &NetworkInstance,
    policy: HostingPolicy,
    options: &OracleOptions,
) -> Result<OracleResult, OracleError> {
    let violations = validate(instance);
    if !violations.is_empty() {
        return Err(OracleError::InvalidInstance(violations));
    }
    let topo = Topology::new(instance).expect("validated instance");
    let hosts = topo.hosts(policy);
    let nreq = instance.requests.len();
    let total = (hosts.len() as u128).checked_pow(nreq as u32).unwrap_or(u128::MAX);
    if total > MAX_ASSIGNMENTS as u128 {
        return Err(OracleError::TooLarge(total));
    }
    let paths = shortest_paths(instance, &topo, options.response_multiplier);
    let nodes = &instance.nodes;
    let headroom: Vec<f64> = instance
        .requests
        .iter()
        .map(|r| {
            if r.max_latency_l.is_finite() {
                1.0 / r.max_latency_l + options.latency_slack
            } else {
                0.0
            }
        })
        .collect();

    let mut choice = vec![0usize; nreq];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut examined = 0u64;
    let mut load = vec![0.0; nodes.len()];
    loop {
        examined += 1;
        load.iter_mut().for_each(|x| *x = 0.0);
        for (r, req) in instance.requests.iter().enumerate() {
            let n = hosts[choice[r]];
            load[n] += work_rate(req, &nodes[n]);
        }
        let feasible = (0..nreq).all(|r| {
            let n = hosts[choice[r]];
            paths[r][n].is_some() && load[n] <= nodes[n].capacity_f && nodes[n].capacity_f - load[n] >= headroom[r]
        }) && hosts.iter().all(|&n| load[n] <= nodes[n].capacity_f);
        if feasible {
            let mut used = vec![false; nodes.len()];
            let mut power = 0.0;
            let mut link_load = vec![0.0; instance.links.len()];
            for (r, req) in instance.requests.iter().enumerate() {
                let n = hosts[choice[r]];
                let (energy, route) = paths[r][n].as_ref().expect("checked above");
                power += nodes[n].proc_energy * work_rate(req, &nodes[n]) + energy;
                used[n] = true;
                for &l in route {
                    link_load[l] += req.traffic_t;
                }
            }
            if let Some(l) = (0..link_load.len()).find(|&l| link_load[l] > instance.links[l].capacity_b) {
                return Err(OracleError::CapacityCoupling {
                    link: instance.links[l].id.clone(),
                });
            }
            power += nodes
                .iter()
                .zip(&used)
                .filter(|(_, &u)| u)
                .map(|(n, _)| n.vm_overhead_w)
                .sum::<f64>();
            if best.as_ref().is_none_or(|(p, _)| power < *p) {
                best = Some((power, choice.clone()));
            }
        }
        // Odometer with the last request varying fastest.
        let mut i = nreq;
        let exhausted = loop {
            if i == 0 {
                break true;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < hosts.len() {
                break false;
            }
            choice[i] = 0;
        };
        if exhausted {
            break;
        }
    }

    let (objective, choice) = best.ok_or(OracleError::Infeasible)?;
    let host_of: Vec<usize> = choice.iter().map(|&k| hosts[k]).collect();
    let mut vm_on = vec![false; nodes.len()];
    for &h in &host_of {
        vm_on[h] = true;
    }
    let routes = host_of
        .iter()
        .enumerate()
        .map(|(r, &h)| paths[r][h].as_ref().expect("feasible").1.clone())
        .collect();
    Ok(OracleResult {
        objective,
        placement: Placement {
            hosts: host_of,
            routes,
            vm_on,
        },
        assignments_examined: examined,
    })
}
