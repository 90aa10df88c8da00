//! Bound tightening on binaries from row activity limits.

use crate::milp::{Constraint, MilpProblem, Sense, VarDomain};

const TOL: f64 = 1e-9;

/// Rows as `sum a x <= b`; equalities contribute both directions.
fn as_le(c: &Constraint) -> Vec<(f64, f64)> {
    match c.sense {
        Sense::Le => vec![(1.0, c.rhs - c.expr.constant)],
        Sense::Ge => vec![(-1.0, -(c.rhs - c.expr.constant))],
        Sense::Eq => vec![(1.0, c.rhs - c.expr.constant), (-1.0, -(c.rhs - c.expr.constant))],
    }
}

/// Fixes binaries whose other value would violate some row even with every
/// other variable at its most favourable bound. Returns `false` when a row
/// cannot be satisfied at all.
pub(crate) fn tighten(problem: &MilpProblem, lower: &mut [f64], upper: &mut [f64]) -> bool {
    let binary: Vec<bool> = problem.variables.iter().map(|v| v.domain == VarDomain::Binary).collect();
    for _pass in 0..20 {
        let mut changed = false;
        for c in &problem.constraints {
            for (sign, b) in as_le(c) {
                let mut min_act = 0.0;
                for &(v, a) in &c.expr.terms {
                    let a = sign * a;
                    min_act += if a > 0.0 { a * lower[v] } else { a * upper[v] };
                }
                if !min_act.is_finite() {
                    continue;
                }
                let slack = b - min_act;
                if slack < -TOL * (1.0 + b.abs()) {
                    return false;
                }
                for &(v, a) in &c.expr.terms {
                    if !binary[v] || lower[v] == upper[v] {
                        continue;
                    }
                    let a = sign * a;
                    // Moving v off its favourable bound costs |a|.
                    if a.abs() > slack + TOL * (1.0 + b.abs()) {
                        if a > 0.0 {
                            upper[v] = 0.0;
                        } else {
                            lower[v] = 1.0;
                        }
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    true
}
