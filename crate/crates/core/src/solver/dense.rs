//! Dense two-phase tableau simplex.
//!
//! Entering columns follow the most negative reduced cost for the first
//! `3 (m + n)` pivots and Bland's lowest-index rule afterwards, so the method
//! terminates on degenerate problems.

use super::{LpSolution, LpStatus, SolverError};
use crate::milp::{MilpProblem, Sense};

const PIVOT_TOL: f64 = 1e-9;
const PIVOT_FLOOR: f64 = 1e-11;
const COST_TOL: f64 = 1e-9;

/// How an original variable is expressed in nonnegative columns.
#[derive(Clone, Copy, Debug)]
enum Map {
    Fixed(f64),
    /// `x = offset + sign * y[col]`.
    Shift { col: usize, sign: f64, offset: f64 },
    /// `x = y[pos] - y[neg]`.
    Free { pos: usize, neg: usize },
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows + 1` rows of `cols + 1` entries; the last row holds reduced costs,
    /// the last column right-hand sides.
    a: Vec<f64>,
    basis: Vec<usize>,
    iterations: u64,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.a[r * w + c];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        self.a[r * w + c] = 1.0;
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.a[i * w + j] -= f * self.a[r * w + j];
            }
            self.a[i * w + c] = 0.0;
        }
        self.basis[r] = c;
        self.iterations += 1;
    }

    /// Loads `cost` into the objective row, reduced against the basis.
    fn set_cost(&mut self, cost: &[f64]) {
        let w = self.cols + 1;
        let obj = self.rows * w;
        for j in 0..w {
            self.a[obj + j] = if j < self.cols { cost[j] } else { 0.0 };
        }
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..w {
                    self.a[obj + j] -= cb * self.a[i * w + j];
                }
            }
        }
    }

    /// Minimizes the loaded cost over the columns `allowed`.
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<bool, SolverError> {
        let bland_after = 3 * (self.rows + self.cols) as u64;
        let cap = bland_after + 50 * (self.rows + self.cols) as u64 + 1000;
        let start = self.iterations;
        loop {
            let spent = self.iterations - start;
            if spent > cap {
                return Err(SolverError::NumericalBreakdown(format!(
                    "no convergence after {spent} pivots"
                )));
            }
            let bland = spent >= bland_after;
            let mut enter = None;
            let mut best = -COST_TOL;
            for j in 0..self.cols {
                if !allowed(j) {
                    continue;
                }
                let d = self.at(self.rows, j);
                if d < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = enter else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            let mut tiny = false;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a <= PIVOT_TOL {
                    tiny |= a > PIVOT_FLOOR;
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - 1e-12 * best.abs().max(1.0)
                            || (ratio <= best + 1e-12 * best.abs().max(1.0)
                                && self.basis[i] < self.basis[r])
                        {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None if tiny => {
                    return Err(SolverError::NumericalBreakdown(format!(
                        "only pivots below {PIVOT_TOL:e} in column {c}"
                    )))
                }
                None => return Ok(false),
            }
        }
    }
}

pub(crate) fn solve(problem: &MilpProblem, lower: &[f64], upper: &[f64]) -> Result<LpSolution, SolverError> {
    let nvars = problem.variables.len();
    let mut maps = Vec::with_capacity(nvars);
    let mut ncols = 0;
    // Extra `y <= u - l` rows: (column, bound).
    let mut bound_rows = Vec::new();
    for j in 0..nvars {
        let (l, u) = (lower[j], upper[j]);
        let m = if l == u {
            Map::Fixed(l)
        } else if l.is_finite() {
            if u.is_finite() {
                bound_rows.push((ncols, u - l));
            }
            Map::Shift { col: ncols, sign: 1.0, offset: l }
        } else if u.is_finite() {
            Map::Shift { col: ncols, sign: -1.0, offset: u }
        } else {
            ncols += 1;
            Map::Free { pos: ncols - 1, neg: ncols }
        };
        ncols += 1;
        if matches!(m, Map::Fixed(_)) {
            ncols -= 1;
        }
        maps.push(m);
    }
    let nstruct = ncols;

    // Rows in structural columns: (coefficients, sense, rhs).
    let mut rows: Vec<(Vec<(usize, f64)>, Sense, f64)> = Vec::new();
    let expand = |terms: &[(usize, f64)], constant: f64| {
        let mut out = Vec::new();
        let mut shift = constant;
        for &(v, a) in terms {
            match maps[v] {
                Map::Fixed(x) => shift += a * x,
                Map::Shift { col, sign, offset } => {
                    out.push((col, a * sign));
                    shift += a * offset;
                }
                Map::Free { pos, neg } => {
                    out.push((pos, a));
                    out.push((neg, -a));
                }
            }
        }
        (out, shift)
    };
    for c in &problem.constraints {
        let (terms, shift) = expand(&c.expr.terms, c.expr.constant);
        let rhs = c.rhs - shift;
        if terms.iter().all(|t| t.1 == 0.0) {
            let ok = match c.sense {
                Sense::Le => rhs >= -1e-9,
                Sense::Ge => rhs <= 1e-9,
                Sense::Eq => rhs.abs() <= 1e-9,
            };
            if !ok {
                return Ok(LpSolution::status_only(LpStatus::Infeasible, 0));
            }
            continue;
        }
        rows.push((terms, c.sense, rhs));
    }
    for &(col, b) in &bound_rows {
        rows.push((vec![(col, 1.0)], Sense::Le, b));
    }
    let (obj_terms, _) = expand(&problem.objective.terms, problem.objective.constant);

    let m = rows.len();
    let nslack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    // Artificial columns are added for rows without a +1 slack.
    let needs_art: Vec<bool> = rows
        .iter()
        .map(|(_, s, b)| match s {
            Sense::Eq => true,
            Sense::Le => *b < 0.0,
            Sense::Ge => *b > 0.0,
        })
        .collect();
    let nart = needs_art.iter().filter(|&&x| x).count();
    let cols = nstruct + nslack + nart;
    let mut t = Tableau {
        rows: m,
        cols,
        a: vec![0.0; (m + 1) * (cols + 1)],
        basis: vec![0; m],
        iterations: 0,
    };
    let w = cols + 1;
    let (mut s, mut art) = (nstruct, nstruct + nslack);
    for (i, (terms, sense, b)) in rows.iter().enumerate() {
        let flip = if *b < 0.0 { -1.0 } else { 1.0 };
        for &(col, a) in terms {
            t.a[i * w + col] += flip * a;
        }
        t.a[i * w + cols] = flip * b;
        let slack_col = match sense {
            Sense::Eq => None,
            Sense::Le => Some(1.0),
            Sense::Ge => Some(-1.0),
        };
        if let Some(sign) = slack_col {
            t.a[i * w + s] = flip * sign;
            if !needs_art[i] {
                t.basis[i] = s;
            }
            s += 1;
        }
        if needs_art[i] {
            t.a[i * w + art] = 1.0;
            t.basis[i] = art;
            art += 1;
        }
    }
    // A Ge row with b == 0 is negated so that its slack enters the basis at +1.
    for (i, (_, sense, b)) in rows.iter().enumerate() {
        if *sense == Sense::Ge && *b == 0.0 {
            for j in 0..w {
                t.a[i * w + j] = -t.a[i * w + j];
            }
            t.a[i * w + cols] = 0.0;
        }
    }

    if nart > 0 {
        let mut cost = vec![0.0; cols];
        for c in cost.iter_mut().skip(nstruct + nslack) {
            *c = 1.0;
        }
        t.set_cost(&cost);
        t.optimize(&|_| true)?;
        let infeas = -t.at(m, cols);
        let scale = rows.iter().map(|r| r.2.abs()).fold(1.0, f64::max);
        if infeas > 1e-9 * scale {
            return Ok(LpSolution::status_only(LpStatus::Infeasible, t.iterations));
        }
        for i in 0..m {
            if t.basis[i] < nstruct + nslack {
                continue;
            }
            if let Some(j) = (0..nstruct + nslack).find(|&j| t.at(i, j).abs() > PIVOT_TOL) {
                t.pivot(i, j);
            }
        }
    }

    let mut cost = vec![0.0; cols];
    for &(col, a) in &obj_terms {
        cost[col] += a;
    }
    t.set_cost(&cost);
    let limit = nstruct + nslack;
    if !t.optimize(&|j| j < limit)? {
        return Ok(LpSolution::status_only(LpStatus::Unbounded, t.iterations));
    }

    let mut y = vec![0.0; cols];
    for i in 0..m {
        y[t.basis[i]] = t.rhs(i);
    }
    let values: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            Map::Fixed(x) => x,
            Map::Shift { col, sign, offset } => offset + sign * y[col],
            Map::Free { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: problem.objective_value(&values),
        values,
        iterations: t.iterations,
    })
}
