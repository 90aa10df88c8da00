//! End-to-end acceptance checks, one printed line per criterion.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use franopt::config::{load_config, ScenarioConfig};
use franopt::formulation::build;
use franopt::model::{HostingPolicy, NetworkInstance, NodeKind};
use franopt::oracle::{enumerate_optimum, OracleError, OracleOptions};
use franopt::queueing::{mm1_delay, required_headroom, QueueState};
use franopt::scenarios::{
    restrict_to_active, run_latency_sweep, run_load_sweep, run_latency_sweep_on, scale_gpon_capacity,
    solve_policy, RowStatus, ScenarioOptions, SweepResult,
};
use franopt::solver::{solve_milp, BnbStatus, SolverOptions};

type Verdict = Result<String, String>;

fn default_config() -> ScenarioConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json");
    load_config(&path).expect("shipped config loads")
}

fn oracle_options(options: &ScenarioOptions) -> OracleOptions {
    OracleOptions {
        latency_slack: options.build.latency_slack,
        response_multiplier: options.build.response_multiplier,
    }
}

fn oracle_equivalence() -> Verdict {
    let options = ScenarioOptions::default();
    let oracle = oracle_options(&options);
    let start = Instant::now();
    let (mut compared, mut infeasible) = (0, 0);
    for seed in 0..50u64 {
        let inst = common::random_cell(1000 + seed, 5, 3);
        for policy in HostingPolicy::ALL {
            let s = solve_policy(&inst, policy, &options).map_err(|e| e.to_string())?;
            match (enumerate_optimum(&inst, policy, &oracle), s.status) {
                (Ok(o), RowStatus::Optimal) if (o.objective - s.objective).abs() <= 1e-6 => compared += 1,
                (Err(OracleError::Infeasible), RowStatus::Infeasible) => infeasible += 1,
                (o, status) => {
                    return Err(format!(
                        "seed {seed} {policy}: oracle {:?}, solver {status} {}",
                        o.map(|o| o.objective),
                        s.objective
                    ))
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("took {secs:.1} s"));
    }
    Ok(format!("{compared} optima and {infeasible} infeasible verdicts agree in {secs:.2} s"))
}

fn dominance() -> Verdict {
    let options = ScenarioOptions::default();
    let (mut found, mut seed, mut worst) = (0, 5000u64, f64::NEG_INFINITY);
    while found < 100 {
        seed += 1;
        if seed > 20_000 {
            return Err(format!("only {found} feasible instances generated"));
        }
        let inst = common::random_cell(seed, 8, 10);
        let c = solve_policy(&inst, HostingPolicy::Cran, &options).map_err(|e| e.to_string())?;
        if c.status != RowStatus::Optimal {
            continue;
        }
        let f = solve_policy(&inst, HostingPolicy::Fran, &options).map_err(|e| e.to_string())?;
        if f.status != RowStatus::Optimal || f.objective > c.objective + 1e-9 {
            return Err(format!("seed {seed}: fran {} {} vs cran {}", f.status, f.objective, c.objective));
        }
        worst = worst.max(f.objective - c.objective);
        found += 1;
    }
    Ok(format!("100 instances, max P_F - P_C = {worst:.3e}"))
}

fn column(result: &SweepResult, policy: HostingPolicy) -> Result<Vec<f64>, String> {
    result
        .column(policy)
        .into_iter()
        .map(|(key, status, p)| {
            if status == RowStatus::Optimal {
                Ok(p)
            } else {
                Err(format!("{key} {policy} ended {status}"))
            }
        })
        .collect()
}

fn latency_shape(config: &ScenarioConfig, latency: &SweepResult) -> Verdict {
    let fran = column(latency, HostingPolicy::Fran)?;
    if let Some(w) = fran.windows(2).position(|w| w[1] > w[0] * (1.0 + 1e-9)) {
        return Err(format!("F-RAN power rises between grid points {w} and {}", w + 1));
    }
    let tail = &fran[fran.len() - 3..];
    let spread = (tail[0] - tail[2]).abs() / tail[2];
    if spread > 1e-6 {
        return Err(format!("last three F-RAN points differ by {spread:.3e}"));
    }
    let full = config.instance();
    let roomy = scale_gpon_capacity(&full, 10.0);
    let scaled = run_latency_sweep_on(&roomy, &config.sweep.latency_grid, &config.scenario_options())
        .map_err(|e| e.to_string())?;
    let cran = column(&scaled, HostingPolicy::Cran)?;
    let (lo, hi) = cran.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &p| (a.min(p), b.max(p)));
    let variation = 100.0 * (hi - lo) / lo;
    if variation >= 1.0 {
        return Err(format!("C-RAN varies by {variation:.3}% with roomy GPON"));
    }
    Ok(format!(
        "F-RAN nonincreasing, plateau spread {spread:.1e}, roomy C-RAN variation {variation:.4}%"
    ))
}

fn tight_convergence(instance: &NetworkInstance, latency: &SweepResult) -> Verdict {
    let points = &latency.grid.as_ref().ok_or("no grid info")?.points;
    let widest_edge = instance
        .nodes
        .iter()
        .filter(|n| !n.kind.is_gpon())
        .map(|n| n.capacity_f)
        .fold(0.0, f64::max);
    let cran = latency.column(HostingPolicy::Cran);
    let fran = latency.column(HostingPolicy::Fran);
    for (i, &l) in points.iter().enumerate() {
        if cran[i].1 != RowStatus::Optimal || fran[i].1 != RowStatus::Optimal {
            continue;
        }
        if widest_edge >= required_headroom(l) {
            return Err(format!("first feasible point L={l} already admits non-GPON hosts"));
        }
        let gap = 100.0 * (fran[i].2 - cran[i].2).abs() / cran[i].2;
        return if gap < 1.0 {
            Ok(format!("L={l:.6}: P_F={:.4} P_C={:.4} ({gap:.4}%)", fran[i].2, cran[i].2))
        } else {
            Err(format!("L={l:.6}: gap {gap:.3}%"))
        };
    }
    Err("no grid point is feasible for both policies".into())
}

fn banded_savings(load: &SweepResult, latency: &SweepResult, secs: f64) -> Verdict {
    let l = load.average_saving_pct.ok_or("no load savings")?;
    let t = latency.average_saving_pct.ok_or("no latency savings")?;
    let ok = (20.0..=45.0).contains(&l) && (15.0..=40.0).contains(&t) && secs < 600.0;
    let msg = format!("load {l:.2}% in [20,45], latency {t:.2}% in [15,40], both sweeps {secs:.1} s");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn load_tracking(config: &ScenarioConfig, load: &SweepResult) -> Verdict {
    let fractions: Vec<f64> = config.profile.slots.iter().map(|s| s.active_fraction).collect();
    let mut parts = Vec::new();
    for policy in HostingPolicy::ALL {
        let power = column(load, policy)?;
        let rho = common::spearman(&fractions, &power);
        if !(rho >= 0.95) {
            return Err(format!("{policy} rho {rho:.4}"));
        }
        parts.push(format!("{policy} rho {rho:.4}"));
    }
    Ok(parts.join(", "))
}

fn mm1_checks() -> Verdict {
    let d = mm1_delay(QueueState { capacity_mu: 2.0, work_arrival_lambda: 1.0 }).map_err(|e| e.to_string())?;
    if d != 1.0 {
        return Err(format!("mm1_delay(2,1) = {d}"));
    }
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let mu = 0.5 + i as f64 * 0.37;
        let lambda = mu * (i as f64 / 201.0);
        let delay = mm1_delay(QueueState { capacity_mu: mu, work_arrival_lambda: lambda }).unwrap();
        worst = worst.max((required_headroom(delay) - (mu - lambda)).abs() / (mu - lambda));
    }
    if worst > 1e-12 {
        return Err(format!("round trip off by {worst:e}"));
    }
    for (mu, lambda) in [(1.0, 1.0), (1.0, 2.0)] {
        if mm1_delay(QueueState { capacity_mu: mu, work_arrival_lambda: lambda }).is_ok() {
            return Err(format!("({mu}, {lambda}) did not report instability"));
        }
    }
    Ok(format!("delay(2,1)=1, round trip within {worst:.1e}, unstable at lambda >= mu"))
}

fn soundness(config: &ScenarioConfig) -> Verdict {
    let options = SolverOptions::default();
    let build_options = config.formulation.clone();
    let mut instances: Vec<NetworkInstance> = (0..40).map(|s| common::random_cell(9000 + s, 8, 10)).collect();
    let full = config.instance();
    let nud = full.nodes.iter().filter(|n| n.kind == NodeKind::Ud).count();
    instances.extend([nud / 3, nud].map(|k| restrict_to_active(&full, k)));
    let (mut checked, mut worst) = (0, 0.0f64);
    for inst in &instances {
        for policy in HostingPolicy::ALL {
            let f = build(inst, policy, &build_options).map_err(|e| e.to_string())?;
            let r = solve_milp(&f.problem, &options).map_err(|e| e.to_string())?;
            if r.status != BnbStatus::Optimal {
                continue;
            }
            let (v, row) = f.problem.max_violation(&r.values);
            if v > 1e-7 {
                return Err(format!("incumbent violates {row:?} by {v:e}"));
            }
            if r.root_bound > r.objective + 1e-9 * (1.0 + r.objective.abs()) {
                return Err(format!("root bound {} above optimum {}", r.root_bound, r.objective));
            }
            worst = worst.max(v);
            checked += 1;
        }
    }
    Ok(format!("{checked} optima re-validate (max violation {worst:.1e}), root bounds below"))
}

fn run_compare(config: &Path, out: &Path, workers: usize) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_franopt"))
        .args(["--workers", &workers.to_string(), "--out"])
        .arg(out)
        .arg("compare")
        .arg(config)
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(format!("compare exited {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr)))
    }
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json");
    let runs: Vec<PathBuf> = [1, 1, 4, 4]
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let out = dir.path().join(format!("run{i}_w{w}"));
            run_compare(&config, &out, w).map(|_| out)
        })
        .collect::<Result<_, _>>()?;
    for csv in ["load_sweep.csv", "latency_sweep.csv"] {
        let first = std::fs::read(runs[0].join(csv)).map_err(|e| e.to_string())?;
        for run in &runs[1..] {
            if std::fs::read(run.join(csv)).map_err(|e| e.to_string())? != first {
                return Err(format!("{csv} differs in {}", run.display()));
            }
        }
    }
    Ok("load and latency CSVs byte-identical over 2 runs each at 1 and 4 workers".into())
}

fn main() {
    let config = default_config();
    let instance = config.instance();
    let options = config.scenario_options();
    let start = Instant::now();
    let load = run_load_sweep(&instance, &config.profile, &config.demand, &options).expect("load sweep runs");
    let latency = run_latency_sweep(&instance, &config.demand, &config.sweep.latency_grid, &options)
        .expect("latency sweep runs");
    let secs = start.elapsed().as_secs_f64();

    let checks: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("dominance", Box::new(dominance)),
        ("latency monotonicity and plateau", Box::new(|| latency_shape(&config, &latency))),
        ("tight-latency convergence", Box::new(|| tight_convergence(&instance, &latency))),
        ("banded savings", Box::new(|| banded_savings(&load, &latency, secs))),
        ("load tracking", Box::new(|| load_tracking(&config, &load))),
        ("M/M/1 arithmetic", Box::new(mm1_checks)),
        ("solver soundness", Box::new(|| soundness(&config))),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(msg) => println!("criterion {} PASS {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", checks.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", checks.len());
}
