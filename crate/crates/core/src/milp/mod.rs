//! Solver-independent mixed-integer linear programs.
//!
//! Variables are identified by dense indices in creation order; names are
//! diagnostics only. Every problem minimizes.

mod lp_text;

pub use lp_text::{parse_lp, write_lp, LpParseError};

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarDomain {
    Continuous,
    Binary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub index: usize,
    pub name: String,
    pub domain: VarDomain,
    pub lower: f64,
    pub upper: f64,
}

/// What to add; the index is assigned by [`MilpProblem::add_variable`].
#[derive(Clone, Debug, PartialEq)]
pub struct VarSpec {
    pub name: String,
    pub domain: VarDomain,
    pub lower: f64,
    pub upper: f64,
}

impl VarSpec {
    pub fn binary(name: impl Into<String>) -> Self {
        VarSpec {
            name: name.into(),
            domain: VarDomain::Binary,
            lower: 0.0,
            upper: 1.0,
        }
    }

    pub fn continuous(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        VarSpec {
            name: name.into(),
            domain: VarDomain::Continuous,
            lower,
            upper,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl LinearExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: Vec<(usize, f64)>) -> Self {
        LinearExpr {
            terms,
            constant: 0.0,
        }
    }

    pub fn push(&mut self, var: usize, coeff: f64) {
        self.terms.push((var, coeff));
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|&(v, c)| c * values[v])
                .sum::<f64>()
    }
}

/// Merges duplicate indices, drops exact zeros and sorts by index.
pub fn normalize(expr: &LinearExpr) -> LinearExpr {
    let mut terms = expr.terms.clone();
    terms.sort_by_key(|&(v, _)| v);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
    for (v, c) in terms {
        match merged.last_mut() {
            Some((last, acc)) if *last == v => *acc += c,
            _ => merged.push((v, c)),
        }
    }
    merged.retain(|&(_, c)| c != 0.0);
    LinearExpr {
        terms: merged,
        constant: expr.constant,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub expr: LinearExpr,
    pub sense: Sense,
    pub rhs: f64,
    pub name: String,
}

impl Constraint {
    /// Amount by which `values` violate this row, 0 when satisfied.
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.expr.eval(values);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MilpError {
    #[error("invalid bounds for `{name}`: [{lower}, {upper}]")]
    InvalidBounds {
        name: String,
        lower: f64,
        upper: f64,
    },
    #[error("{context} references unknown variable {index}")]
    UnknownVariable { context: String, index: usize },
    #[error("{context} has a non-finite coefficient or right-hand side")]
    NonFinite { context: String },
}

/// A minimization problem.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MilpProblem {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: LinearExpr,
}

impl MilpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, spec: VarSpec) -> Result<usize, MilpError> {
        let (lower, upper) = match spec.domain {
            VarDomain::Binary => (spec.lower.max(0.0), spec.upper.min(1.0)),
            VarDomain::Continuous => (spec.lower, spec.upper),
        };
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(MilpError::InvalidBounds {
                name: spec.name,
                lower: spec.lower,
                upper: spec.upper,
            });
        }
        let index = self.variables.len();
        self.variables.push(Variable {
            index,
            name: spec.name,
            domain: spec.domain,
            lower,
            upper,
        });
        Ok(index)
    }

    fn check_expr(&self, expr: &LinearExpr, context: &str) -> Result<(), MilpError> {
        for &(v, c) in &expr.terms {
            if v >= self.variables.len() {
                return Err(MilpError::UnknownVariable {
                    context: context.to_string(),
                    index: v,
                });
            }
            if !c.is_finite() {
                return Err(MilpError::NonFinite {
                    context: context.to_string(),
                });
            }
        }
        if !expr.constant.is_finite() {
            return Err(MilpError::NonFinite {
                context: context.to_string(),
            });
        }
        Ok(())
    }

    /// Appends a normalized row and returns its index.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        expr: LinearExpr,
        sense: Sense,
        rhs: f64,
    ) -> Result<usize, MilpError> {
        let name = name.into();
        self.check_expr(&expr, &name)?;
        if !rhs.is_finite() {
            return Err(MilpError::NonFinite { context: name });
        }
        self.constraints.push(Constraint {
            expr: normalize(&expr),
            sense,
            rhs,
            name,
        });
        Ok(self.constraints.len() - 1)
    }

    pub fn set_objective(&mut self, expr: LinearExpr) -> Result<(), MilpError> {
        self.check_expr(&expr, "objective")?;
        self.objective = normalize(&expr);
        Ok(())
    }

    pub fn binaries(&self) -> impl Iterator<Item = usize> + '_ {
        self.variables
            .iter()
            .filter(|v| v.domain == VarDomain::Binary)
            .map(|v| v.index)
    }

    pub fn has_continuous(&self) -> bool {
        self.variables.iter().any(|v| v.domain == VarDomain::Continuous)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.eval(values)
    }

    /// Largest bound or row violation of `values`, with the offending item.
    pub fn max_violation(&self, values: &[f64]) -> (f64, Option<String>) {
        let mut worst = (0.0, None);
        for v in &self.variables {
            let x = values[v.index];
            let mut viol = (v.lower - x).max(x - v.upper).max(0.0);
            if v.domain == VarDomain::Binary {
                viol = viol.max((x - x.round()).abs());
            }
            if viol > worst.0 {
                worst = (viol, Some(format!("bound of `{}`", v.name)));
            }
        }
        for c in &self.constraints {
            let viol = c.violation(values);
            if viol > worst.0 {
                worst = (viol, Some(format!("row `{}`", c.name)));
            }
        }
        worst
    }
}

impl fmt::Display for MilpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_lp(self))
    }
}
