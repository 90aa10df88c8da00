//! Best-first branch-and-bound over binary variables.
//!
//! Open nodes are ordered by `(bound, creation id)`. Nodes are expanded in
//! batches of a fixed size; children within a batch may be solved in
//! parallel, but their ids are assigned before solving and they are merged
//! back in id order, so the search is identical for any number of workers.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::sparse::{Relaxation, Warm};
use super::{bounds, dense, presolve, BnbReport, BnbStatus, LpEngine, LpSolution, LpStatus, SolverError, SolverOptions};
use crate::milp::{MilpProblem, VarDomain};

/// Most fixings tried by the root dive.
const DIVE_STEPS: usize = 200;

struct Node {
    bound: f64,
    id: u64,
    fixings: Vec<(usize, f64)>,
    branch_var: usize,
    warm: Option<Warm>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Reversed: the heap pops the smallest (bound, id).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

enum Engine {
    Dense {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Sparse {
        relax: Relaxation,
        root: Option<Warm>,
    },
}

type Solved = (LpSolution, Option<Warm>);

impl Engine {
    fn solve(
        &self,
        problem: &MilpProblem,
        parent: Option<&Warm>,
        fixings: &[(usize, f64)],
    ) -> Result<Solved, SolverError> {
        match self {
            Engine::Dense { lower, upper } => {
                let (mut lo, mut hi) = (lower.clone(), upper.clone());
                for &(v, x) in fixings {
                    lo[v] = x;
                    hi[v] = x;
                }
                Ok((dense::solve(problem, &lo, &hi)?, None))
            }
            Engine::Sparse { relax, root, .. } => match (parent, root) {
                (Some(w), _) => relax.resolve(problem, w, &fixings[fixings.len() - 1..], fixings),
                (None, Some(root)) => relax.resolve(problem, root, fixings, fixings),
                (None, None) => relax.solve(problem),
            },
        }
    }
}

struct Search<'a> {
    problem: &'a MilpProblem,
    options: &'a SolverOptions,
    binaries: Vec<usize>,
    incumbent: Option<(f64, Vec<f64>)>,
    open: BinaryHeap<Node>,
    warm_alive: usize,
    nodes: u64,
    dive_lps: u64,
    lp_iterations: u64,
}

impl Search<'_> {
    fn cutoff(&self) -> f64 {
        self.incumbent
            .as_ref()
            .map_or(f64::INFINITY, |(obj, _)| obj - self.options.prune_tol)
    }

    /// Binary nearest 0.5 among those farther than `tol` from 0/1.
    fn branch_var(&self, values: &[f64], tol: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &j in &self.binaries {
            let frac = (values[j] - values[j].round()).abs();
            if frac <= tol {
                continue;
            }
            let dist = (values[j] - 0.5).abs();
            if best.is_none_or(|(_, d)| dist < d) {
                best = Some((j, dist));
            }
        }
        best.map(|b| b.0)
    }

    /// Snaps the binaries of an integral relaxation and keeps the point if it
    /// re-validates and improves on the incumbent. Returns the worst row
    /// violation when it does not validate.
    fn offer(&mut self, values: &[f64]) -> Result<(), (f64, Option<String>)> {
        let mut snapped = values.to_vec();
        for &j in &self.binaries {
            snapped[j] = snapped[j].round();
        }
        let (viol, what) = self.problem.max_violation(&snapped);
        if viol > self.options.feasibility_tol {
            return Err((viol, what));
        }
        let obj = self.problem.objective_value(&snapped);
        if self.incumbent.as_ref().is_none_or(|(best, _)| obj < *best) {
            self.incumbent = Some((obj, snapped));
        }
        Ok(())
    }

    /// Fractional diving from `start`: repeatedly fixes the least fractional
    /// binary to its nearest value, flipping once on failure, until the
    /// relaxation is integral or both directions fail.
    fn dive(&mut self, engine: &Engine, start: &Solved) -> Result<(), SolverError> {
        let tol = self.options.integrality_tol;
        let (mut values, mut warm) = (start.0.values.clone(), start.1.clone());
        let mut fixings: Vec<(usize, f64)> = Vec::new();
        for _ in 0..self.binaries.len().min(DIVE_STEPS) {
            let mut pick: Option<(usize, f64)> = None;
            for &j in &self.binaries {
                let frac = (values[j] - values[j].round()).abs();
                if frac > tol && pick.is_none_or(|(_, f)| frac < f) {
                    pick = Some((j, frac));
                }
            }
            let Some((j, _)) = pick else {
                if self.offer(&values).is_ok() {
                    log::debug!("dive found {:?} after {} fixings", self.incumbent.as_ref().map(|i| i.0), fixings.len());
                }
                return Ok(());
            };
            let near = values[j].round();
            let mut moved = false;
            for v in [near, 1.0 - near] {
                fixings.push((j, v));
                let (lp, w) = engine.solve(self.problem, warm.as_ref(), &fixings)?;
                self.lp_iterations += lp.iterations;
                self.dive_lps += 1;
                if lp.status == LpStatus::Optimal && lp.objective < self.cutoff() {
                    values = lp.values;
                    warm = w;
                    moved = true;
                    break;
                }
                fixings.pop();
            }
            if !moved {
                log::debug!("dive stuck at {} = {} after {} fixings", self.problem.variables[j].name, values[j], fixings.len());
                return Ok(());
            }
        }
        Ok(())
    }

    /// Prunes, accepts as incumbent, or queues a solved node.
    fn absorb(&mut self, id: u64, fixings: Vec<(usize, f64)>, solved: Solved) -> Result<(), SolverError> {
        let (lp, mut warm) = solved;
        self.lp_iterations += lp.iterations;
        match lp.status {
            LpStatus::Infeasible => return Ok(()),
            LpStatus::Unbounded => return Err(SolverError::Unbounded),
            LpStatus::Optimal => {}
        }
        if lp.objective >= self.cutoff() {
            return Ok(());
        }
        let branch_var = match self.branch_var(&lp.values, self.options.integrality_tol) {
            Some(j) => j,
            None => {
                let (viol, what) = match self.offer(&lp.values) {
                    Ok(()) => {
                        log::debug!("incumbent candidate at node {id}");
                        return Ok(());
                    }
                    Err(v) => v,
                };
                // Rounding broke a row; keep branching on the least integral binary.
                match self.branch_var(&lp.values, 0.0) {
                    Some(j) => j,
                    None => {
                        return Err(SolverError::NumericalBreakdown(format!(
                            "integral relaxation violates {} by {viol:e}",
                            what.unwrap_or_default()
                        )))
                    }
                }
            }
        };
        if warm.is_some() {
            if self.warm_alive < self.options.warm_cap {
                self.warm_alive += 1;
            } else {
                warm = None;
            }
        }
        self.open.push(Node {
            bound: lp.objective,
            id,
            fixings,
            branch_var,
            warm,
        });
        Ok(())
    }

    fn best_bound(&self) -> f64 {
        let open = self.open.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
        let inc = self.incumbent.as_ref().map_or(f64::INFINITY, |i| i.0);
        open.min(inc)
    }

    fn report(&self, status: BnbStatus, root_bound: f64) -> BnbReport {
        let (objective, values) = match &self.incumbent {
            Some((o, v)) => (*o, v.clone()),
            None => (f64::INFINITY, Vec::new()),
        };
        let best_bound = match status {
            BnbStatus::Optimal => objective,
            BnbStatus::Infeasible => f64::INFINITY,
            BnbStatus::NodeLimit => self.best_bound(),
        };
        BnbReport {
            status,
            objective,
            values,
            nodes: self.nodes,
            lp_iterations: self.lp_iterations,
            best_bound,
            gap: if objective.is_finite() { objective - best_bound } else { f64::INFINITY },
            root_bound,
        }
    }
}

/// Exact minimization over the binaries of `problem`.
pub fn solve_milp(problem: &MilpProblem, options: &SolverOptions) -> Result<BnbReport, SolverError> {
    let (mut lower, mut upper) = bounds(problem);
    if options.presolve && !presolve::tighten(problem, &mut lower, &mut upper) {
        return Ok(BnbReport {
            status: BnbStatus::Infeasible,
            objective: f64::INFINITY,
            values: Vec::new(),
            nodes: 0,
            lp_iterations: 0,
            best_bound: f64::INFINITY,
            gap: f64::INFINITY,
            root_bound: f64::INFINITY,
        });
    }
    let mut engine = match options.engine {
        LpEngine::Dense => Engine::Dense { lower, upper },
        LpEngine::Sparse => Engine::Sparse {
            relax: Relaxation::new(problem, &lower, &upper),
            root: None,
        },
    };
    let mut search = Search {
        problem,
        options,
        binaries: problem
            .variables
            .iter()
            .filter(|v| v.domain == VarDomain::Binary)
            .map(|v| v.index)
            .collect(),
        incumbent: None,
        open: BinaryHeap::new(),
        warm_alive: 0,
        nodes: 1,
        dive_lps: 0,
        lp_iterations: 0,
    };

    let root = engine.solve(problem, None, &[])?;
    let root_bound = match root.0.status {
        LpStatus::Optimal => root.0.objective,
        LpStatus::Infeasible => f64::INFINITY,
        LpStatus::Unbounded => return Err(SolverError::Unbounded),
    };
    if let Engine::Sparse { root: slot, .. } = &mut engine {
        *slot = root.1.clone();
    }
    if options.dive && root.0.status == LpStatus::Optimal {
        search.dive(&engine, &root)?;
        log::debug!("root dive: {} relaxations", search.dive_lps);
    }
    search.absorb(0, Vec::new(), root)?;
    let mut next_id = 1u64;
    let batch = options.batch.max(1);

    loop {
        let cutoff = search.cutoff();
        let mut parents = Vec::with_capacity(batch);
        while parents.len() < batch {
            let Some(node) = search.open.pop() else { break };
            if node.warm.is_some() {
                search.warm_alive -= 1;
            }
            if node.bound < cutoff {
                parents.push(node);
            }
        }
        if parents.is_empty() {
            break;
        }
        if let Some(limit) = options.node_limit {
            if search.nodes + 2 * parents.len() as u64 > limit {
                search.open.extend(parents);
                let report = search.report(BnbStatus::NodeLimit, root_bound);
                return Err(SolverError::IterationLimit(Box::new(report)));
            }
        }
        let mut jobs = Vec::with_capacity(2 * parents.len());
        for parent in &parents {
            for value in [0.0, 1.0] {
                let mut fixings = parent.fixings.clone();
                fixings.push((parent.branch_var, value));
                jobs.push((next_id, parent.warm.as_ref(), fixings));
                next_id += 1;
            }
        }
        let solve = |(_, warm, fixings): &(u64, Option<&Warm>, Vec<(usize, f64)>)| {
            engine.solve(problem, *warm, fixings)
        };
        #[cfg(feature = "parallel")]
        let results: Vec<Result<Solved, SolverError>> = if jobs.len() > 1 {
            jobs.par_iter().map(solve).collect()
        } else {
            jobs.iter().map(solve).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let results: Vec<Result<Solved, SolverError>> = jobs.iter().map(solve).collect();
        search.nodes += jobs.len() as u64;
        let jobs: Vec<(u64, Vec<(usize, f64)>)> = jobs.into_iter().map(|(id, _, f)| (id, f)).collect();
        drop(parents);
        for ((id, fixings), result) in jobs.into_iter().zip(results) {
            search.absorb(id, fixings, result?)?;
        }
        if search.nodes % 2000 < 2 * batch as u64 {
            log::debug!(
                "bnb: {} nodes, {} open, bound {:.6}, incumbent {:?}",
                search.nodes,
                search.open.len(),
                search.best_bound(),
                search.incumbent.as_ref().map(|i| i.0)
            );
        }
    }

    let status = if search.incumbent.is_some() {
        BnbStatus::Optimal
    } else {
        BnbStatus::Infeasible
    };
    let report = search.report(status, root_bound);
    if status == BnbStatus::Optimal && root_bound > report.objective + 1e-6 * (1.0 + report.objective.abs()) {
        log::warn!("root bound {root_bound} exceeds optimum {}", report.objective);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{LinearExpr, Sense, VarSpec};
    use proptest::prelude::*;

    fn opts(engine: LpEngine) -> SolverOptions {
        SolverOptions {
            engine,
            ..SolverOptions::default()
        }
    }

    #[test]
    fn forced_rounding_up() {
        for e in [LpEngine::Dense, LpEngine::Sparse] {
            let mut p = MilpProblem::new();
            let a = p.add_variable(VarSpec::binary("x1")).unwrap();
            let b = p.add_variable(VarSpec::binary("x2")).unwrap();
            p.set_objective(LinearExpr::from_terms(vec![(a, 1.0), (b, 1.0)])).unwrap();
            p.add_constraint("c", LinearExpr::from_terms(vec![(a, 1.0), (b, 1.0)]), Sense::Ge, 1.5)
                .unwrap();
            let r = solve_milp(&p, &opts(e)).unwrap();
            assert_eq!(r.status, BnbStatus::Optimal);
            assert_eq!(r.objective, 2.0);
            assert_eq!(r.values, vec![1.0, 1.0]);
            assert!(r.root_bound <= r.objective);
            assert_eq!(r.gap, 0.0);
        }
    }

    #[test]
    fn binary_above_one_is_infeasible() {
        for e in [LpEngine::Dense, LpEngine::Sparse] {
            let mut p = MilpProblem::new();
            let x = p.add_variable(VarSpec::binary("x")).unwrap();
            p.add_constraint("c", LinearExpr::from_terms(vec![(x, 1.0)]), Sense::Ge, 2.0).unwrap();
            let r = solve_milp(&p, &opts(e)).unwrap();
            assert_eq!(r.status, BnbStatus::Infeasible);
            assert!(r.values.is_empty());
        }
    }

    #[test]
    fn node_limit_carries_report() {
        // Odd-sum parity: every relaxation is fractional until deep in the tree.
        let mut p = MilpProblem::new();
        let xs: Vec<usize> = (0..12).map(|i| p.add_variable(VarSpec::binary(format!("x{i}"))).unwrap()).collect();
        p.set_objective(LinearExpr::from_terms(xs.iter().map(|&x| (x, 1.0)).collect())).unwrap();
        p.add_constraint(
            "c",
            LinearExpr::from_terms(xs.iter().map(|&x| (x, 2.0)).collect()),
            Sense::Eq,
            11.0,
        )
        .unwrap();
        let o = SolverOptions {
            node_limit: Some(20),
            ..SolverOptions::default()
        };
        match solve_milp(&p, &o) {
            Err(SolverError::IterationLimit(r)) => {
                assert_eq!(r.status, BnbStatus::NodeLimit);
                assert!(r.nodes <= 20);
                assert!(r.best_bound >= r.root_bound - 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    fn knapsack() -> impl Strategy<Value = MilpProblem> {
        (prop::collection::vec((1i32..20, 1i32..15), 2..9), 0.2f64..0.8).prop_map(|(items, frac)| {
            let mut p = MilpProblem::new();
            let xs: Vec<usize> = (0..items.len())
                .map(|i| p.add_variable(VarSpec::binary(format!("x{i}"))).unwrap())
                .collect();
            p.set_objective(LinearExpr::from_terms(
                xs.iter().zip(&items).map(|(&x, &(v, _))| (x, -(v as f64))).collect(),
            ))
            .unwrap();
            let cap = frac * items.iter().map(|i| i.1 as f64).sum::<f64>();
            p.add_constraint(
                "cap",
                LinearExpr::from_terms(xs.iter().zip(&items).map(|(&x, &(_, w))| (x, w as f64)).collect()),
                Sense::Le,
                cap,
            )
            .unwrap();
            p
        })
    }

    fn brute_force(p: &MilpProblem) -> f64 {
        let n = p.variables.len();
        (0u32..1 << n)
            .map(|mask| (0..n).map(|j| ((mask >> j) & 1) as f64).collect::<Vec<_>>())
            .filter(|v| p.max_violation(v).0 <= 1e-9)
            .map(|v| p.objective_value(&v))
            .fold(f64::INFINITY, f64::min)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_enumeration(p in knapsack()) {
            let truth = brute_force(&p);
            for e in [LpEngine::Dense, LpEngine::Sparse] {
                let r = solve_milp(&p, &opts(e)).unwrap();
                prop_assert!((r.objective - truth).abs() <= 1e-9, "{:?}: {} vs {}", e, r.objective, truth);
                prop_assert!(p.max_violation(&r.values).0 <= 1e-7);
                prop_assert!(r.root_bound <= r.objective + 1e-9);
            }
        }

        #[test]
        fn batch_size_is_deterministic(p in knapsack()) {
            let o = SolverOptions { batch: 4, ..SolverOptions::default() };
            let a = solve_milp(&p, &o).unwrap();
            let b = solve_milp(&p, &o).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
