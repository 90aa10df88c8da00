//! Scenario configuration files: strict JSON in, resolved JSON out.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::demand::{DemandConfig, LoadProfile};
use crate::formulation::BuildOptions;
use crate::model::{reference_topology, validate, LinkSpec, NetworkInstance, NodeSpec, TopologyParams};
use crate::scenarios::{with_demand, LatencyGrid, ScenarioOptions};
use crate::solver::{LpEngine, SolverOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySection {
    pub nodes: Vec<NodeSpec>,
    pub links: Vec<LinkSpec>,
}

/// Solver tolerances and budgets plus the number of parallel solves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub engine: LpEngine,
    pub feasibility_tol: f64,
    pub integrality_tol: f64,
    pub prune_tol: f64,
    pub node_limit: Option<u64>,
    pub batch: usize,
    pub warm_cap: usize,
    pub presolve: bool,
    pub dive: bool,
    pub workers: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let o = SolverOptions::default();
        SolverSection {
            engine: o.engine,
            feasibility_tol: o.feasibility_tol,
            integrality_tol: o.integrality_tol,
            prune_tol: o.prune_tol,
            node_limit: o.node_limit,
            batch: o.batch,
            warm_cap: o.warm_cap,
            presolve: o.presolve,
            dive: o.dive,
            workers: 1,
        }
    }
}

impl SolverSection {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            engine: self.engine,
            feasibility_tol: self.feasibility_tol,
            integrality_tol: self.integrality_tol,
            prune_tol: self.prune_tol,
            node_limit: self.node_limit,
            batch: self.batch,
            warm_cap: self.warm_cap,
            presolve: self.presolve,
            dive: self.dive,
        }
    }

    fn check(&self) -> Result<(), String> {
        for (name, v) in [
            ("feasibility_tol", self.feasibility_tol),
            ("integrality_tol", self.integrality_tol),
            ("prune_tol", self.prune_tol),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("solver.{name} must be a finite non-negative number"));
            }
        }
        if self.integrality_tol >= 0.5 {
            return Err("solver.integrality_tol must be below 0.5".into());
        }
        if self.workers == 0 || self.batch == 0 {
            return Err("solver.workers and solver.batch must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub latency_grid: LatencyGrid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub topology: TopologySection,
    #[serde(default)]
    pub demand: DemandConfig,
    #[serde(default)]
    pub profile: LoadProfile,
    #[serde(default)]
    pub formulation: BuildOptions,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error at `{key}`: {message}")]
    Schema { key: String, message: String },
    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),
}

impl ConfigError {
    /// The offending key of a schema error.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Schema { key, .. } => Some(key),
            _ => None,
        }
    }
}

/// The name between the first pair of backticks, as serde words missing
/// and unknown fields.
fn quoted(message: &str) -> Option<&str> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(&message[start..start + len])
}

impl ScenarioConfig {
    /// The shipped configuration: the reference two-cell topology with the
    /// default demand, profile and solver settings.
    pub fn reference() -> Self {
        let inst = reference_topology(&TopologyParams::default());
        ScenarioConfig {
            topology: TopologySection {
                nodes: inst.nodes,
                links: inst.links,
            },
            demand: DemandConfig::default(),
            profile: LoadProfile::default(),
            formulation: BuildOptions::default(),
            solver: SolverSection::default(),
            sweep: SweepSection::default(),
        }
    }

    /// Parses and validates a configuration document.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let parsed: Result<ScenarioConfig, _> = serde_path_to_error::deserialize(&mut de);
        let config = match parsed {
            Ok(c) => {
                de.end().map_err(|e| ConfigError::Parse {
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                })?;
                c
            }
            Err(e) => {
                let path = e.path().to_string();
                let inner = e.into_inner();
                if !inner.is_data() {
                    return Err(ConfigError::Parse {
                        line: inner.line(),
                        column: inner.column(),
                        message: inner.to_string(),
                    });
                }
                let message = inner.to_string();
                let named = message.starts_with("missing field") || message.starts_with("unknown field");
                let key = match (named, quoted(&message)) {
                    (true, Some(k)) => k.to_string(),
                    _ => path,
                };
                return Err(ConfigError::Schema { key, message });
            }
        };
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<(), ConfigError> {
        let mut problems: Vec<String> = validate(&self.instance()).iter().map(|v| v.to_string()).collect();
        let sections = [
            self.demand.check(),
            self.profile.check(),
            self.solver.check(),
            self.sweep.latency_grid.check(),
        ];
        problems.extend(sections.into_iter().filter_map(Result::err));
        let f = &self.formulation;
        if !(f.response_multiplier.is_finite() && f.response_multiplier >= 0.0) {
            problems.push("formulation.response_multiplier must be finite and non-negative".into());
        }
        if !(f.latency_slack.is_finite() && f.latency_slack >= 0.0) {
            problems.push("formulation.latency_slack must be finite and non-negative".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Validation(problems))
        }
    }

    /// The topology with every UD's full demand attached.
    pub fn instance(&self) -> NetworkInstance {
        let bare = NetworkInstance {
            nodes: self.topology.nodes.clone(),
            links: self.topology.links.clone(),
            requests: Vec::new(),
        };
        with_demand(&bare, &self.demand)
    }

    pub fn scenario_options(&self) -> ScenarioOptions {
        ScenarioOptions {
            build: self.formulation,
            solver: self.solver.options(),
            workers: self.solver.workers,
            ..ScenarioOptions::default()
        }
    }

    /// Pretty JSON with every default filled in; loading it gives back
    /// the same configuration.
    pub fn resolved_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("configuration serializes");
        s.push('\n');
        s
    }

    /// Hex SHA-256 of [`ScenarioConfig::resolved_json`].
    pub fn sha256(&self) -> String {
        Sha256::digest(self.resolved_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ScenarioConfig::from_json(&text)
}
