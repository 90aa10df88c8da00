//! LP relaxations through `microlp`, with warm-started bound fixing.

use std::sync::Arc;

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome, Solution, Variable};

use super::{LpSolution, LpStatus, SolverError};
use crate::milp::{MilpProblem, Sense};

/// A relaxation that can be re-solved with extra fixings.
#[derive(Clone)]
pub(crate) struct Relaxation {
    vars: Vec<Variable>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Rows whose expression became empty; checked once here.
    trivially_infeasible: bool,
    problem: Problem,
}

/// Solver state of a solved node, kept for warm starts of its children.
pub(crate) type Warm = Arc<Solution>;

fn map_err(e: microlp::Error) -> Result<LpStatus, SolverError> {
    match e {
        microlp::Error::Infeasible => Ok(LpStatus::Infeasible),
        microlp::Error::Unbounded => Ok(LpStatus::Unbounded),
        other => Err(SolverError::NumericalBreakdown(other.to_string())),
    }
}

impl Relaxation {
    pub(crate) fn new(problem: &MilpProblem, lower: &[f64], upper: &[f64]) -> Self {
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let mut cost = vec![0.0; problem.variables.len()];
        for &(v, c) in &problem.objective.terms {
            cost[v] += c;
        }
        let vars: Vec<Variable> = (0..problem.variables.len())
            .map(|j| lp.add_var(cost[j], (lower[j], upper[j])))
            .collect();
        let mut trivially_infeasible = false;
        for c in &problem.constraints {
            let rhs = c.rhs - c.expr.constant;
            if c.expr.terms.is_empty() {
                trivially_infeasible |= match c.sense {
                    Sense::Le => rhs < -1e-9,
                    Sense::Ge => rhs > 1e-9,
                    Sense::Eq => rhs.abs() > 1e-9,
                };
                continue;
            }
            let op = match c.sense {
                Sense::Le => ComparisonOp::Le,
                Sense::Ge => ComparisonOp::Ge,
                Sense::Eq => ComparisonOp::Eq,
            };
            lp.add_constraint(c.expr.terms.iter().map(|&(v, a)| (vars[v], a)), op, rhs);
        }
        Relaxation {
            vars,
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            trivially_infeasible,
            problem: lp,
        }
    }

    fn finish(
        &self,
        problem: &MilpProblem,
        outcome: Result<SolveOutcome, microlp::Error>,
    ) -> Result<(LpSolution, Option<Warm>), SolverError> {
        let solution = match outcome {
            Ok(SolveOutcome::Solution(s)) => s,
            Ok(SolveOutcome::Interrupted(_)) => {
                return Err(SolverError::NumericalBreakdown("LP solve interrupted".into()))
            }
            Err(e) => return Ok((LpSolution::status_only(map_err(e)?, 0), None)),
        };
        let values: Vec<f64> = self.vars.iter().map(|&v| solution.var_value_raw(v)).collect();
        let lp = LpSolution {
            status: LpStatus::Optimal,
            objective: problem.objective_value(&values),
            values,
            iterations: solution.stats().lp_iterations,
        };
        Ok((lp, Some(Arc::new(solution))))
    }

    pub(crate) fn solve(&self, problem: &MilpProblem) -> Result<(LpSolution, Option<Warm>), SolverError> {
        if self.trivially_infeasible {
            return Ok((LpSolution::status_only(LpStatus::Infeasible, 0), None));
        }
        self.finish(problem, self.problem.solve())
    }

    /// Re-solves `base` with `added` applied one at a time; `all` is the
    /// node's complete fixing list.
    ///
    /// Warm-started bound changes occasionally report infeasibility for a
    /// feasible node after long update chains, so that verdict is confirmed
    /// by a cold solve before it is returned.
    pub(crate) fn resolve(
        &self,
        problem: &MilpProblem,
        base: &Warm,
        added: &[(usize, f64)],
        all: &[(usize, f64)],
    ) -> Result<(LpSolution, Option<Warm>), SolverError> {
        let before = base.stats().lp_iterations;
        let mut current = Solution::clone(base);
        let last = added.len().saturating_sub(1);
        for (k, &(v, val)) in added.iter().enumerate() {
            match current.fix_var(self.vars[v], val) {
                Ok(SolveOutcome::Solution(s)) if k < last => current = s,
                outcome => {
                    let (mut lp, warm) = self.finish(problem, outcome)?;
                    if lp.status == LpStatus::Infeasible {
                        return self.cold(problem, all);
                    }
                    lp.iterations = lp.iterations.saturating_sub(before);
                    return Ok((lp, warm));
                }
            }
        }
        // No fixings: the base itself.
        let (mut lp, warm) = self.finish(problem, Ok(SolveOutcome::Solution(current)))?;
        lp.iterations = 0;
        Ok((lp, warm))
    }

    /// Solves from scratch with `fixings` folded into the bounds.
    fn cold(&self, problem: &MilpProblem, fixings: &[(usize, f64)]) -> Result<(LpSolution, Option<Warm>), SolverError> {
        let (mut lo, mut hi) = (self.lower.clone(), self.upper.clone());
        for &(v, x) in fixings {
            if x < lo[v] || x > hi[v] {
                return Ok((LpSolution::status_only(LpStatus::Infeasible, 0), None));
            }
            lo[v] = x;
            hi[v] = x;
        }
        log::trace!("cold re-solve with {} fixings", fixings.len());
        Relaxation::new(problem, &lo, &hi).solve(problem)
    }
}

pub(crate) fn solve(problem: &MilpProblem, lower: &[f64], upper: &[f64]) -> Result<LpSolution, SolverError> {
    Relaxation::new(problem, lower, upper).solve(problem).map(|r| r.0)
}
