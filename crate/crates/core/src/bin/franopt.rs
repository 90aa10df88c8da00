//! Command-line front end: validate configs, solve single slots, run sweeps.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use franopt::config::{load_config, ConfigError, ScenarioConfig};
use franopt::demand::active_uds;
use franopt::model::{HostingPolicy, NetworkInstance, NodeKind};
use franopt::oracle::{enumerate_optimum, OracleError, OracleOptions};
use franopt::output::{write_results, ResultMeta};
use franopt::scenarios::{
    run_latency_sweep_on, run_load_sweep, sample_cell, solve_policy, solve_policy_with_dump, with_latency,
    RowStatus, ScenarioError, SlotSolution, SweepResult,
};

#[derive(Parser)]
#[command(name = "franopt", version, about = "Energy-minimal VM placement for C-RAN and F-RAN")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Overrides demand.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides solver.workers.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the LP text of every solve into the output directory.
    #[arg(long, global = true)]
    dump_lp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check a configuration and print its resolved form.
    Validate { config: PathBuf },
    /// Solve one instance under one policy.
    Solve {
        config: PathBuf,
        #[arg(long, value_parser = parse_policy)]
        policy: HostingPolicy,
        /// Keep only the UDs active at this profile hour.
        #[arg(long, conflicts_with = "latency")]
        hour: Option<u8>,
        /// Override every request's latency bound (seconds).
        #[arg(long)]
        latency: Option<f64>,
    },
    /// Daily-load sweep under both policies.
    SweepLoad { config: PathBuf },
    /// Latency sweep under both policies.
    SweepLatency { config: PathBuf },
    /// Both sweeps plus a savings summary.
    Compare { config: PathBuf },
    /// Solver against exhaustive enumeration on cells cut from the topology.
    OracleCheck {
        config: PathBuf,
        #[arg(long, default_value_t = 20)]
        cases: u64,
    },
}

fn parse_policy(s: &str) -> Result<HostingPolicy, String> {
    match s {
        "cran" => Ok(HostingPolicy::Cran),
        "fran" => Ok(HostingPolicy::Fran),
        _ => Err(format!("expected cran or fran, got {s}")),
    }
}

/// Exit status with its message.
enum Failure {
    Infeasible(String),
    Config(String),
    Solver(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Build(b) => Failure::Config(b.to_string()),
            ScenarioError::Grid(g) => Failure::Config(format!("latency grid: {g}")),
            ScenarioError::Pool(p) => Failure::Solver(p),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Solver(format!("cannot write {}: {e}", path.display()))
}

struct Run {
    config: ScenarioConfig,
    out: PathBuf,
    dump_lp: bool,
}

impl Run {
    fn load(path: &Path, g: &Global) -> Result<Self, Failure> {
        let mut config = load_config(path)?;
        if let Some(seed) = g.seed {
            config.demand.seed = seed;
        }
        if let Some(w) = g.workers {
            config.solver.workers = w;
        }
        // Re-check so overrides go through the same validation.
        let config = ScenarioConfig::from_json(&config.resolved_json())?;
        Ok(Run {
            config,
            out: g.out.clone(),
            dump_lp: g.dump_lp,
        })
    }

    fn prepare_out(&self) -> Result<(), Failure> {
        std::fs::create_dir_all(&self.out).map_err(|e| io_failure(&self.out, e))?;
        self.write("resolved_config.json", &self.config.resolved_json())
    }

    fn write(&self, name: &str, text: &str) -> Result<(), Failure> {
        let path = self.out.join(name);
        std::fs::write(&path, text).map_err(|e| io_failure(&path, e))
    }

    fn options(&self) -> franopt::scenarios::ScenarioOptions {
        let mut o = self.config.scenario_options();
        if self.dump_lp {
            o.lp_dir = Some(self.out.clone());
        }
        o
    }

    fn save_sweep(&self, result: &SweepResult, name: &str) -> Result<(), Failure> {
        let path = self.out.join(name);
        let meta = ResultMeta::new(result, self.config.demand.seed, &self.config.sha256());
        write_results(result, &path, &meta).map_err(|e| io_failure(&path, e))?;
        println!(
            "{}: {} rows, average saving {}",
            path.display(),
            result.rows.len(),
            result
                .average_saving_pct
                .map_or("n/a".to_string(), |s| format!("{s:.2}%"))
        );
        for x in &result.excluded {
            println!("  excluded {}: {}", x.key, x.reason);
        }
        Ok(())
    }
}

/// 3 for unsolved rows, 1 for infeasible rows, else 0.
fn sweep_status(results: &[&SweepResult]) -> Result<(), Failure> {
    let rows = results.iter().flat_map(|r| &r.rows);
    let mut infeasible = 0;
    let mut failed = 0;
    for r in rows {
        match r.status {
            RowStatus::Optimal => {}
            RowStatus::Infeasible => infeasible += 1,
            RowStatus::NodeLimit | RowStatus::Failed => failed += 1,
        }
    }
    if failed > 0 {
        Err(Failure::Solver(format!("{failed} rows not solved to optimality")))
    } else if infeasible > 0 {
        Err(Failure::Infeasible(format!("{infeasible} infeasible rows")))
    } else {
        Ok(())
    }
}

fn validate(path: &Path, g: &Global) -> Result<(), Failure> {
    let run = Run::load(path, g)?;
    let inst = run.config.instance();
    let uds = inst.nodes.iter().filter(|n| n.kind == NodeKind::Ud).count();
    eprintln!(
        "ok: {} nodes ({uds} UDs), {} links, {} requests, sha256 {}",
        inst.nodes.len(),
        inst.links.len(),
        inst.requests.len(),
        run.config.sha256()
    );
    print!("{}", run.config.resolved_json());
    Ok(())
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    seed: u64,
    config_sha256: String,
    hour: Option<u8>,
    latency: Option<f64>,
    solution: &'a SlotSolution,
    hosts: Vec<String>,
}

fn solve(path: &Path, g: &Global, policy: HostingPolicy, hour: Option<u8>, latency: Option<f64>) -> Result<(), Failure> {
    let run = Run::load(path, g)?;
    run.prepare_out()?;
    let mut inst = run.config.instance();
    if let Some(h) = hour {
        let slot = run
            .config
            .profile
            .slots
            .iter()
            .find(|s| s.hour == h)
            .ok_or_else(|| Failure::Config(format!("profile has no hour {h}")))?;
        let ud_ids: Vec<String> = inst
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Ud)
            .map(|n| n.id.clone())
            .collect();
        let active = active_uds(slot.active_fraction, &ud_ids);
        inst.requests.retain(|r| active.contains(&r.source));
    }
    if let Some(l) = latency {
        if !(l > 0.0) {
            return Err(Failure::Config(format!("latency must be positive, got {l}")));
        }
        inst = with_latency(&inst, l);
    }
    let options = run.options();
    let s = if run.dump_lp {
        let mut text = String::new();
        let mut sink = |t: &str| text = t.to_string();
        let s = solve_policy_with_dump(&inst, policy, &options, Some(&mut sink))?;
        run.write(&format!("solve_{policy}.lp"), &text)?;
        s
    } else {
        solve_policy(&inst, policy, &options)?
    };
    report_solution(&inst, &s);
    let hosts = s
        .placement
        .as_ref()
        .map(|p| p.hosts.iter().map(|&h| inst.nodes[h].id.clone()).collect())
        .unwrap_or_default();
    let out = SolveOutput {
        seed: run.config.demand.seed,
        config_sha256: run.config.sha256(),
        hour,
        latency,
        solution: &s,
        hosts,
    };
    let mut json = serde_json::to_string_pretty(&out).expect("solution serializes");
    json.push('\n');
    run.write(&format!("solve_{policy}.json"), &json)?;
    match s.status {
        RowStatus::Optimal => Ok(()),
        RowStatus::Infeasible => Err(Failure::Infeasible(format!("{policy}: infeasible"))),
        _ => Err(Failure::Solver(format!(
            "{policy}: {}",
            s.message.clone().unwrap_or_else(|| s.status.to_string())
        ))),
    }
}

fn report_solution(inst: &NetworkInstance, s: &SlotSolution) {
    println!(
        "{} {}: total {:.6} W (proc {:.6}, vm {:.6}, traffic {:.6}), {} nodes",
        s.policy, s.status, s.power.total_w, s.power.proc_w, s.power.vm_w, s.power.traffic_w, s.nodes
    );
    if let Some(p) = &s.placement {
        for line in p.describe(inst) {
            println!("  {line}");
        }
    }
}

fn sweep_load(run: &Run) -> Result<SweepResult, Failure> {
    let c = &run.config;
    let bare = NetworkInstance {
        requests: Vec::new(),
        ..c.instance()
    };
    Ok(run_load_sweep(&bare, &c.profile, &c.demand, &run.options())?)
}

fn sweep_latency(run: &Run) -> Result<SweepResult, Failure> {
    Ok(run_latency_sweep_on(&run.config.instance(), &run.config.sweep.latency_grid, &run.options())?)
}

#[derive(Serialize)]
struct Summary {
    seed: u64,
    config_sha256: String,
    load_average_saving_pct: Option<f64>,
    latency_average_saving_pct: Option<f64>,
}

fn compare(path: &Path, g: &Global) -> Result<(), Failure> {
    let run = Run::load(path, g)?;
    run.prepare_out()?;
    let load = sweep_load(&run)?;
    run.save_sweep(&load, "load_sweep.csv")?;
    let latency = sweep_latency(&run)?;
    run.save_sweep(&latency, "latency_sweep.csv")?;
    let summary = Summary {
        seed: run.config.demand.seed,
        config_sha256: run.config.sha256(),
        load_average_saving_pct: load.average_saving_pct,
        latency_average_saving_pct: latency.average_saving_pct,
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    run.write("summary.json", &json)?;
    sweep_status(&[&load, &latency])
}

fn oracle_check(path: &Path, g: &Global, cases: u64) -> Result<(), Failure> {
    let run = Run::load(path, g)?;
    let c = &run.config;
    let full = c.instance();
    let options = run.options();
    let oracle_opts = OracleOptions {
        latency_slack: c.formulation.latency_slack,
        response_multiplier: c.formulation.response_multiplier,
    };
    let (mut agree, mut skipped, mut mismatched) = (0, 0, 0);
    for case in 0..cases {
        let inst = sample_cell(&full, &c.demand, c.demand.seed.wrapping_add(case), 5, 3);
        for policy in HostingPolicy::ALL {
            let s = solve_policy(&inst, policy, &options)?;
            let verdict = match (enumerate_optimum(&inst, policy, &oracle_opts), s.status) {
                (Ok(o), RowStatus::Optimal) if (o.objective - s.objective).abs() <= 1e-6 => {
                    agree += 1;
                    format!("ok {:.9}", o.objective)
                }
                (Err(OracleError::Infeasible), RowStatus::Infeasible) => {
                    agree += 1;
                    "ok infeasible".to_string()
                }
                (Err(e @ (OracleError::TooLarge(_) | OracleError::CapacityCoupling { .. })), _) => {
                    skipped += 1;
                    format!("skipped: {e}")
                }
                (o, status) => {
                    mismatched += 1;
                    let oracle = match o {
                        Ok(o) => format!("{:.9}", o.objective),
                        Err(e) => e.to_string(),
                    };
                    format!("MISMATCH oracle {oracle}, solver {status} {:.9}", s.objective)
                }
            };
            println!(
                "case {case:3} {policy} ({} requests, {} nodes): {verdict}",
                inst.requests.len(),
                inst.nodes.len()
            );
        }
    }
    println!("{agree} agree, {skipped} skipped, {mismatched} mismatched");
    if mismatched > 0 {
        Err(Failure::Solver(format!("{mismatched} solver/oracle mismatches")))
    } else {
        Ok(())
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Validate { config } => validate(config, g),
        Command::Solve {
            config,
            policy,
            hour,
            latency,
        } => solve(config, g, *policy, *hour, *latency),
        Command::SweepLoad { config } => {
            let run = Run::load(config, g)?;
            run.prepare_out()?;
            let r = sweep_load(&run)?;
            run.save_sweep(&r, "load_sweep.csv")?;
            sweep_status(&[&r])
        }
        Command::SweepLatency { config } => {
            let run = Run::load(config, g)?;
            run.prepare_out()?;
            let r = sweep_latency(&run)?;
            run.save_sweep(&r, "latency_sweep.csv")?;
            sweep_status(&[&r])
        }
        Command::Compare { config } => compare(config, g),
        Command::OracleCheck { config, cases } => oracle_check(config, g, *cases),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Infeasible(m)) => {
            eprintln!("infeasible: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(m)) => {
            eprintln!("solver failure: {m}");
            ExitCode::from(3)
        }
    }
}
