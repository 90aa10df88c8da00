//! Plain-text dump of a [`MilpProblem`]; grammar in `docs/lp-format.md`.
//!
//! Numbers are written with 17 significant digits so that parsing the dump
//! reproduces every coefficient bit for bit.

use std::fmt::Write;

use super::{Constraint, LinearExpr, MilpProblem, Sense, VarDomain, Variable};

const HEADER: &str = "\\ franopt milp v1";

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LpParseError {
    pub line: usize,
    pub message: String,
}

fn num(x: f64) -> String {
    format!("{x:+.16e}")
}

fn clean(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_whitespace() || c == ':' { '_' } else { c })
        .collect()
}

fn write_expr(out: &mut String, expr: &LinearExpr) {
    out.push_str(&num(expr.constant));
    for &(v, c) in &expr.terms {
        let _ = write!(out, " {} v{v}", num(c));
    }
}

pub fn write_lp(problem: &MilpProblem) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push_str("\nMINIMIZE\n obj: ");
    write_expr(&mut out, &problem.objective);
    out.push_str("\nSUBJECT TO\n");
    for c in &problem.constraints {
        let _ = write!(out, " {}: ", clean(&c.name));
        write_expr(&mut out, &c.expr);
        let _ = writeln!(out, " {} {}", c.sense.symbol(), num(c.rhs));
    }
    out.push_str("BOUNDS\n");
    for v in &problem.variables {
        let _ = writeln!(out, " {} <= v{} <= {}", num(v.lower), v.index, num(v.upper));
    }
    out.push_str("BINARIES\n");
    for v in problem.variables.iter().filter(|v| v.domain == VarDomain::Binary) {
        let _ = writeln!(out, " v{}", v.index);
    }
    out.push_str("NAMES\n");
    for v in &problem.variables {
        let _ = writeln!(out, " v{} {}", v.index, clean(&v.name));
    }
    out.push_str("END\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Start,
    Objective,
    Rows,
    Bounds,
    Binaries,
    Names,
    Done,
}

struct Parser {
    line: usize,
}

impl Parser {
    fn err(&self, message: impl Into<String>) -> LpParseError {
        LpParseError {
            line: self.line,
            message: message.into(),
        }
    }

    fn number(&self, tok: &str) -> Result<f64, LpParseError> {
        tok.parse::<f64>()
            .map_err(|_| self.err(format!("bad number `{tok}`")))
    }

    fn var(&self, tok: &str) -> Result<usize, LpParseError> {
        tok.strip_prefix('v')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err(format!("bad variable `{tok}`")))
    }

    fn expr<'a>(
        &self,
        tokens: &mut std::iter::Peekable<impl Iterator<Item = &'a str>>,
    ) -> Result<LinearExpr, LpParseError> {
        let constant = self.number(tokens.next().ok_or_else(|| self.err("missing constant"))?)?;
        let mut terms = Vec::new();
        while let Some(&tok) = tokens.peek() {
            if matches!(tok, "<=" | ">=" | "=") {
                break;
            }
            tokens.next();
            let coeff = self.number(tok)?;
            let v = self.var(tokens.next().ok_or_else(|| self.err("coefficient without variable"))?)?;
            terms.push((v, coeff));
        }
        Ok(LinearExpr { terms, constant })
    }
}

/// Parses the output of [`write_lp`].
pub fn parse_lp(text: &str) -> Result<MilpProblem, LpParseError> {
    let mut p = Parser { line: 0 };
    let mut section = Section::Start;
    let mut problem = MilpProblem::new();
    let mut bounds: Vec<(usize, f64, f64)> = Vec::new();
    let mut binaries = Vec::new();
    let mut names = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        p.line = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        let next = match line {
            "MINIMIZE" => Some(Section::Objective),
            "SUBJECT TO" => Some(Section::Rows),
            "BOUNDS" => Some(Section::Bounds),
            "BINARIES" => Some(Section::Binaries),
            "NAMES" => Some(Section::Names),
            "END" => Some(Section::Done),
            _ => None,
        };
        if let Some(next) = next {
            if next as u8 <= section as u8 {
                return Err(p.err(format!("section `{line}` out of order")));
            }
            section = next;
            continue;
        }
        match section {
            Section::Start | Section::Done => return Err(p.err("content outside a section")),
            Section::Objective => {
                let rest = line.strip_prefix("obj:").ok_or_else(|| p.err("expected `obj:`"))?;
                let mut toks = rest.split_whitespace().peekable();
                problem.objective = p.expr(&mut toks)?;
                if toks.next().is_some() {
                    return Err(p.err("trailing tokens after objective"));
                }
            }
            Section::Rows => {
                let (name, rest) = line.split_once(": ").ok_or_else(|| p.err("expected `name: ...`"))?;
                let mut toks = rest.split_whitespace().peekable();
                let expr = p.expr(&mut toks)?;
                let sense = match toks.next() {
                    Some("<=") => Sense::Le,
                    Some(">=") => Sense::Ge,
                    Some("=") => Sense::Eq,
                    other => return Err(p.err(format!("expected a sense, found {other:?}"))),
                };
                let rhs = p.number(toks.next().ok_or_else(|| p.err("missing rhs"))?)?;
                if toks.next().is_some() {
                    return Err(p.err("trailing tokens after rhs"));
                }
                problem.constraints.push(Constraint {
                    expr,
                    sense,
                    rhs,
                    name: name.to_string(),
                });
            }
            Section::Bounds => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 5 || toks[1] != "<=" || toks[3] != "<=" {
                    return Err(p.err("expected `lo <= vN <= hi`"));
                }
                bounds.push((p.var(toks[2])?, p.number(toks[0])?, p.number(toks[4])?));
            }
            Section::Binaries => {
                for tok in line.split_whitespace() {
                    binaries.push(p.var(tok)?);
                }
            }
            Section::Names => {
                let (v, name) = line.split_once(' ').ok_or_else(|| p.err("expected `vN name`"))?;
                names.push((p.var(v)?, name.trim().to_string()));
            }
        }
    }
    if section != Section::Done {
        return Err(p.err("missing END"));
    }

    let n = bounds.len();
    for (k, &(v, _, _)) in bounds.iter().enumerate() {
        if v != k {
            return Err(LpParseError {
                line: 0,
                message: format!("bounds must list v0..v{} in order", n.saturating_sub(1)),
            });
        }
    }
    problem.variables = bounds
        .into_iter()
        .map(|(index, lower, upper)| Variable {
            index,
            name: format!("v{index}"),
            domain: VarDomain::Continuous,
            lower,
            upper,
        })
        .collect();
    for v in binaries {
        problem
            .variables
            .get_mut(v)
            .ok_or_else(|| LpParseError {
                line: 0,
                message: format!("binary v{v} has no bounds line"),
            })?
            .domain = VarDomain::Binary;
    }
    for (v, name) in names {
        if let Some(var) = problem.variables.get_mut(v) {
            var.name = name;
        }
    }
    let referenced = problem
        .objective
        .terms
        .iter()
        .chain(problem.constraints.iter().flat_map(|c| c.expr.terms.iter()))
        .map(|&(v, _)| v)
        .max();
    if let Some(v) = referenced.filter(|&v| v >= n) {
        return Err(LpParseError {
            line: 0,
            message: format!("v{v} is referenced but has no bounds line"),
        });
    }
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::VarSpec;
    use proptest::prelude::*;

    fn sample() -> MilpProblem {
        let mut p = MilpProblem::new();
        let a = p.add_variable(VarSpec::binary("x[r0][olt0]")).unwrap();
        let b = p.add_variable(VarSpec::continuous("flow", f64::NEG_INFINITY, 2.5)).unwrap();
        p.set_objective(LinearExpr::from_terms(vec![(a, 0.1), (b, -1.0 / 3.0)])).unwrap();
        p.add_constraint("cap", LinearExpr::from_terms(vec![(a, 1e-300), (b, 7.0)]), Sense::Le, 3.0)
            .unwrap();
        p.add_constraint("eq", LinearExpr::from_terms(vec![(b, -0.0), (a, 2.0)]), Sense::Eq, -0.0)
            .unwrap();
        p
    }

    #[test]
    fn golden_shape() {
        let text = write_lp(&sample());
        let expected = "\\ franopt milp v1
MINIMIZE
 obj: +0.0000000000000000e0 +1.0000000000000001e-1 v0 -3.3333333333333331e-1 v1
SUBJECT TO
 cap: +0.0000000000000000e0 +1.0000000000000000e-300 v0 +7.0000000000000000e0 v1 <= +3.0000000000000000e0
 eq: +0.0000000000000000e0 +2.0000000000000000e0 v0 = -0.0000000000000000e0
BOUNDS
 +0.0000000000000000e0 <= v0 <= +1.0000000000000000e0
 -inf <= v1 <= +2.5000000000000000e0
BINARIES
 v0
NAMES
 v0 x[r0][olt0]
 v1 flow
END
";
        assert_eq!(text, expected);
    }

    #[test]
    fn round_trip_sample() {
        let p = sample();
        assert_eq!(parse_lp(&write_lp(&p)).unwrap(), p);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_lp("MINIMIZE\n obj: +1e0 v0\nEND\n").is_err());
        assert!(parse_lp("hello").is_err());
        let missing_end = write_lp(&sample()).replace("END\n", "");
        assert_eq!(parse_lp(&missing_end).unwrap_err().message, "missing END");
    }

    proptest! {
        #[test]
        fn coefficients_round_trip_bitwise(
            coeffs in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 1..20),
            rhs in prop::num::f64::NORMAL,
        ) {
            let mut p = MilpProblem::new();
            for i in 0..coeffs.len() {
                p.add_variable(VarSpec::continuous(format!("v{i}"), -1.0, 1.0)).unwrap();
            }
            let terms: Vec<_> = coeffs.iter().copied().enumerate().collect();
            p.constraints.push(Constraint {
                expr: LinearExpr { terms: terms.clone(), constant: coeffs[0] },
                sense: Sense::Ge,
                rhs,
                name: "row".into(),
            });
            p.objective = LinearExpr { terms, constant: rhs };
            let back = parse_lp(&write_lp(&p)).unwrap();
            let bits = |e: &LinearExpr| e.terms.iter().map(|t| t.1.to_bits()).chain([e.constant.to_bits()]).collect::<Vec<_>>();
            prop_assert_eq!(bits(&back.objective), bits(&p.objective));
            prop_assert_eq!(bits(&back.constraints[0].expr), bits(&p.constraints[0].expr));
            prop_assert_eq!(back.constraints[0].rhs.to_bits(), rhs.to_bits());
        }
    }
}
