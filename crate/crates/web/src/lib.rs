//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes the scenario config as JSON text and returns JSON text.
//! The `*_json` functions hold the logic so they can be tested natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use franopt::config::ScenarioConfig;
use franopt::demand::active_count;
use franopt::model::{HostingPolicy, NetworkInstance, NodeKind};
use franopt::scenarios::{
    restrict_to_active, run_latency_sweep_on, run_load_sweep, solve_policy, RowStatus, SlotSolution, SweepResult,
};

fn parse(config: &str) -> Result<ScenarioConfig, String> {
    ScenarioConfig::from_json(config).map_err(|e| e.to_string())
}

fn slot_json(inst: &NetworkInstance, s: &SlotSolution) -> Value {
    let mut per_kind = serde_json::Map::new();
    if let Some(p) = &s.placement {
        for &h in &p.hosts {
            let kind = inst.nodes[h].kind.to_string();
            let n = per_kind.get(&kind).and_then(Value::as_u64).unwrap_or(0);
            per_kind.insert(kind, json!(n + 1));
        }
    }
    let vms = s
        .placement
        .as_ref()
        .map(|p| p.vm_on.iter().filter(|&&on| on).count())
        .unwrap_or(0);
    json!({
        "policy": s.policy.as_str(),
        "status": s.status.as_str(),
        "total_w": s.power.total_w,
        "proc_w": s.power.proc_w,
        "vm_w": s.power.vm_w,
        "traffic_w": s.power.traffic_w,
        "bnb_nodes": s.nodes,
        "vms_on": vms,
        "requests_by_host_kind": per_kind,
    })
}

/// Both policies for the requests of the first `active_fraction` of UDs.
pub fn solve_slot_json(config: &str, active_fraction: f64) -> Result<String, String> {
    if !(0.0..=1.0).contains(&active_fraction) {
        return Err(format!("active fraction {active_fraction} is outside [0, 1]"));
    }
    let c = parse(config)?;
    let full = c.instance();
    let nud = full.nodes.iter().filter(|n| n.kind == NodeKind::Ud).count();
    let active = active_count(active_fraction, nud);
    let inst = restrict_to_active(&full, active);
    let options = c.scenario_options();
    let mut out = Vec::new();
    for policy in HostingPolicy::ALL {
        let s = solve_policy(&inst, policy, &options).map_err(|e| e.to_string())?;
        out.push(slot_json(&inst, &s));
    }
    Ok(json!({
        "active_uds": active,
        "requests": inst.requests.len(),
        "policies": out,
    })
    .to_string())
}

fn sweep_json(result: &SweepResult, keys: Vec<Value>) -> Value {
    let col = |policy| -> Vec<Value> {
        result
            .column(policy)
            .into_iter()
            .map(|(_, status, p)| if status == RowStatus::Optimal { json!(p) } else { Value::Null })
            .collect()
    };
    json!({
        "keys": keys,
        "cran": col(HostingPolicy::Cran),
        "fran": col(HostingPolicy::Fran),
        "average_saving_pct": result.average_saving_pct,
        "excluded": result.excluded.len(),
    })
}

/// Daily load sweep: power per hour for both policies.
pub fn load_curve_json(config: &str) -> Result<String, String> {
    let c = parse(config)?;
    let r = run_load_sweep(&c.instance(), &c.profile, &c.demand, &c.scenario_options()).map_err(|e| e.to_string())?;
    let hours = c.profile.slots.iter().map(|s| json!(s.hour)).collect();
    let mut v = sweep_json(&r, hours);
    v["active_fraction"] = c.profile.slots.iter().map(|s| s.active_fraction).collect();
    Ok(v.to_string())
}

/// Latency sweep over the configured grid.
pub fn latency_curve_json(config: &str) -> Result<String, String> {
    let c = parse(config)?;
    let r = run_latency_sweep_on(&c.instance(), &c.sweep.latency_grid, &c.scenario_options())
        .map_err(|e| e.to_string())?;
    let points = r.grid.as_ref().map(|g| g.points.iter().map(|&l| json!(l)).collect()).unwrap_or_default();
    Ok(sweep_json(&r, points).to_string())
}

#[wasm_bindgen]
pub fn default_config() -> String {
    ScenarioConfig::reference().resolved_json()
}

#[wasm_bindgen]
pub fn solve_slot(config: &str, active_fraction: f64) -> Result<String, JsValue> {
    solve_slot_json(config, active_fraction).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn load_curve(config: &str) -> Result<String, JsValue> {
    load_curve_json(config).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn latency_curve(config: &str) -> Result<String, JsValue> {
    latency_curve_json(config).map_err(|e| JsValue::from_str(&e))
}
