//! LP relaxations and branch-and-bound over binaries.

mod bnb;
mod dense;
mod presolve;
mod sparse;

pub use bnb::solve_milp;

use serde::{Deserialize, Serialize};

use crate::milp::{MilpProblem, VarDomain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Empty unless optimal.
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: u64,
}

impl LpSolution {
    fn status_only(status: LpStatus, iterations: u64) -> Self {
        LpSolution {
            status,
            values: Vec::new(),
            objective: f64::NAN,
            iterations,
        }
    }
}

/// Which simplex implementation solves the relaxations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpEngine {
    /// Dense two-phase tableau; small problems and cross-checks.
    Dense,
    /// Sparse revised simplex with warm-started children.
    #[default]
    Sparse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub engine: LpEngine,
    /// Row and bound tolerance for accepting an incumbent.
    pub feasibility_tol: f64,
    /// Distance from 0/1 below which a relaxed binary counts as integral.
    pub integrality_tol: f64,
    /// Nodes whose bound is within this of the incumbent are pruned.
    pub prune_tol: f64,
    /// Maximum number of LP relaxations solved by one branch-and-bound run.
    pub node_limit: Option<u64>,
    /// Open nodes expanded together; results do not depend on worker count.
    pub batch: usize,
    /// Open nodes that may keep a warm-start state.
    pub warm_cap: usize,
    /// Fix binaries implied by single rows before branching.
    pub presolve: bool,
    /// Run a diving heuristic from the root relaxation for an early incumbent.
    pub dive: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            engine: LpEngine::Sparse,
            feasibility_tol: 1e-7,
            integrality_tol: 1e-6,
            prune_tol: 1e-9,
            node_limit: Some(200_000),
            batch: 1,
            warm_cap: 64,
            presolve: true,
            dive: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BnbStatus {
    Optimal,
    Infeasible,
    /// Node budget exhausted; only inside [`SolverError::IterationLimit`].
    NodeLimit,
}

impl BnbStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BnbStatus::Optimal => "OPTIMAL",
            BnbStatus::Infeasible => "INFEASIBLE",
            BnbStatus::NodeLimit => "NODE_LIMIT",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BnbReport {
    pub status: BnbStatus,
    /// Incumbent objective; infinite when there is none.
    pub objective: f64,
    /// Incumbent values; empty when there is none.
    pub values: Vec<f64>,
    /// LP relaxations solved, root included.
    pub nodes: u64,
    pub lp_iterations: u64,
    /// Smallest bound of any open node, or the incumbent once closed.
    pub best_bound: f64,
    /// `objective - best_bound`.
    pub gap: f64,
    /// Objective of the root relaxation.
    pub root_bound: f64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("node limit reached after {} nodes (gap {})", .0.nodes, .0.gap)]
    IterationLimit(Box<BnbReport>),
    #[error("relaxation is unbounded")]
    Unbounded,
}

fn bounds(problem: &MilpProblem) -> (Vec<f64>, Vec<f64>) {
    problem
        .variables
        .iter()
        .map(|v| match v.domain {
            VarDomain::Binary => (v.lower.max(0.0), v.upper.min(1.0)),
            VarDomain::Continuous => (v.lower, v.upper),
        })
        .unzip()
}

/// Solves the LP relaxation (binaries relaxed to `[0, 1]`).
pub fn solve_lp(problem: &MilpProblem, engine: LpEngine) -> Result<LpSolution, SolverError> {
    let (lower, upper) = bounds(problem);
    match engine {
        LpEngine::Dense => dense::solve(problem, &lower, &upper),
        LpEngine::Sparse => sparse::solve(problem, &lower, &upper),
    }
}
