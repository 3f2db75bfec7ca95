use std::fmt::Write as _;

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use super::Sense;
use crate::error::LpFailure;
use crate::{Error, Result};

/// Solver-side feasibility tolerance.
pub const SOLVER_TOL: f64 = 1e-9;

/// Largest row residual accepted from the solver on equilibrium LPs; the
/// decoded witness is verified separately at the verification tolerance.
pub const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

impl Cmp {
    fn symbol(self) -> &'static str {
        match self {
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
            Cmp::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpVariable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpConstraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub cmp: Cmp,
    pub rhs: f64,
}

/// Solver-agnostic sparse linear program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub title: String,
    pub sense: Sense,
    pub variables: Vec<LpVariable>,
    pub constraints: Vec<LpConstraint>,
}

impl LinearProgram {
    pub fn new(title: impl Into<String>, sense: Sense) -> Self {
        LinearProgram {
            title: title.into(),
            sense,
            variables: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64, objective: f64) -> usize {
        self.variables.push(LpVariable {
            name: name.into(),
            lower,
            upper,
            objective,
        });
        self.variables.len() - 1
    }

    /// Adds a row unless every coefficient is zero; also drops `Σ c x ≥ 0`
    /// rows with non-negative coefficients on non-negative variables, which
    /// can never bind. Repeated variables are merged.
    pub fn add_row(&mut self, name: impl Into<String>, mut terms: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        terms.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (v, c) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += c,
                _ => merged.push((v, c)),
            }
        }
        let terms: Vec<(usize, f64)> = merged.into_iter().filter(|(_, c)| *c != 0.0).collect();
        if terms.is_empty() && rhs == 0.0 {
            return;
        }
        if cmp == Cmp::Ge
            && rhs <= 0.0
            && terms.iter().all(|&(v, c)| c > 0.0 && self.variables[v].lower >= 0.0)
        {
            return;
        }
        self.constraints.push(LpConstraint {
            name: name.into(),
            terms,
            cmp,
            rhs,
        });
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_residual(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &val) in self.variables.iter().zip(x) {
            worst = worst.max(v.lower - val).max(val - v.upper);
        }
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().map(|&(v, k)| k * x[v]).sum();
            let r = match c.cmp {
                Cmp::Le => lhs - c.rhs,
                Cmp::Ge => c.rhs - lhs,
                Cmp::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(r);
        }
        worst
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.variables.iter().zip(x).map(|(v, val)| v.objective * val).sum()
    }

    /// Plain-text export: one constraint per line, CPLEX-LP flavoured.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "\\ {}", self.title);
        let _ = writeln!(out, "{}", if self.sense == Sense::Max { "Maximize" } else { "Minimize" });
        let obj: Vec<(usize, f64)> = self
            .variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.objective != 0.0)
            .map(|(i, v)| (i, v.objective))
            .collect();
        let _ = writeln!(out, " obj: {}", self.expr(&obj));
        let _ = writeln!(out, "Subject To");
        for c in &self.constraints {
            let _ = writeln!(out, " {}: {} {} {}", c.name, self.expr(&c.terms), c.cmp.symbol(), fmt_num(c.rhs));
        }
        let _ = writeln!(out, "Bounds");
        for v in &self.variables {
            if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
                let _ = writeln!(out, " {} free", v.name);
            } else {
                let _ = writeln!(out, " {} <= {} <= {}", fmt_num(v.lower), v.name, fmt_num(v.upper));
            }
        }
        out.push_str("End\n");
        out
    }

    fn expr(&self, terms: &[(usize, f64)]) -> String {
        if terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, &(v, c)) in terms.iter().enumerate() {
            let sign = if c < 0.0 { "-" } else if k > 0 { "+" } else { "" };
            if k > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{sign}{} {}", fmt_num(c.abs()), self.variables[v].name);
        }
        s
    }
}

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub objective: f64,
    pub values: Vec<f64>,
    pub status: String,
    pub max_residual: f64,
}

/// Solves with the bundled simplex backend, which pivots deterministically.
/// The returned point is clipped into its bounds and then checked against
/// every row; a residual above `tolerance` is a numerical failure.
pub fn solve_lp(lp: &LinearProgram, tolerance: f64) -> Result<LpSolution> {
    let mut problem = Problem::new(match lp.sense {
        Sense::Max => OptimizationDirection::Maximize,
        Sense::Min => OptimizationDirection::Minimize,
    });
    let vars: Vec<_> = lp
        .variables
        .iter()
        .map(|v| problem.add_var(v.objective, (v.lower, v.upper)))
        .collect();
    for c in &lp.constraints {
        let terms: Vec<_> = c.terms.iter().map(|&(v, k)| (vars[v], k)).collect();
        let op = match c.cmp {
            Cmp::Le => ComparisonOp::Le,
            Cmp::Ge => ComparisonOp::Ge,
            Cmp::Eq => ComparisonOp::Eq,
        };
        problem.add_constraint(terms.as_slice(), op, c.rhs);
    }
    let failure = |kind: LpFailure, message: String| Error::Lp {
        kind,
        message,
        dump: Some(lp.to_text()),
    };
    let outcome = problem.solve().map_err(|e| match e {
        microlp::Error::Infeasible => failure(LpFailure::Infeasible, format!("`{}` is infeasible", lp.title)),
        microlp::Error::Unbounded => failure(LpFailure::Unbounded, format!("`{}` is unbounded", lp.title)),
        other => failure(LpFailure::Numerical, format!("`{}`: {other}", lp.title)),
    })?;
    let solution = outcome
        .into_solution()
        .map_err(|_| failure(LpFailure::Numerical, format!("`{}`: solve interrupted", lp.title)))?;
    let values: Vec<f64> = vars
        .iter()
        .zip(&lp.variables)
        .map(|(&v, spec)| solution.var_value(v).clamp(spec.lower, spec.upper))
        .collect();
    let max_residual = lp.max_residual(&values);
    if max_residual > tolerance {
        return Err(failure(
            LpFailure::Numerical,
            format!("`{}`: primal residual {max_residual:e} exceeds {tolerance:e}", lp.title),
        ));
    }
    Ok(LpSolution {
        objective: lp.objective_at(&values),
        values,
        status: "optimal".into(),
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(sense: Sense) -> LinearProgram {
        // x + y = 1, x - 2y >= -0.5
        let mut lp = LinearProgram::new("tiny", sense);
        let x = lp.add_var("x", 0.0, 1.0, 1.0);
        let y = lp.add_var("y", 0.0, 1.0, 3.0);
        lp.add_row("simplex", vec![(x, 1.0), (y, 1.0)], Cmp::Eq, 1.0);
        lp.add_row("ic", vec![(x, 1.0), (y, -2.0)], Cmp::Ge, -0.5);
        lp
    }

    #[test]
    fn solves_both_senses() {
        let max = solve_lp(&tiny(Sense::Max), SOLVER_TOL).unwrap();
        assert!((max.objective - 2.0).abs() < 1e-9, "{}", max.objective);
        let min = solve_lp(&tiny(Sense::Min), SOLVER_TOL).unwrap();
        assert!((min.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn repeated_solves_are_bit_identical() {
        let a = solve_lp(&tiny(Sense::Max), SOLVER_TOL).unwrap();
        let b = solve_lp(&tiny(Sense::Max), SOLVER_TOL).unwrap();
        assert_eq!(a.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn infeasible_programs_carry_a_dump() {
        let mut lp = tiny(Sense::Max);
        lp.add_row("bad", vec![(0, 1.0)], Cmp::Ge, 2.0);
        match solve_lp(&lp, SOLVER_TOL) {
            Err(Error::Lp { kind, dump, .. }) => {
                assert_eq!(kind, LpFailure::Infeasible);
                assert!(dump.unwrap().contains("bad: 1.0 x >= 2.0"));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn trivial_rows_are_dropped() {
        let mut lp = LinearProgram::new("t", Sense::Max);
        let x = lp.add_var("x", 0.0, 1.0, 1.0);
        lp.add_row("zero", vec![(x, 0.0)], Cmp::Ge, 0.0);
        lp.add_row("slack", vec![(x, 2.0)], Cmp::Ge, 0.0);
        assert!(lp.constraints.is_empty());
        assert!(lp.to_text().contains("0.0 <= x <= 1.0"));
    }
}
