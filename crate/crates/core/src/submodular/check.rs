use rand::Rng;
use serde::{Deserialize, Serialize};

use super::function::mask_elements;
use super::SetFunctionSpec;
use crate::{rng, Budget, Error, Result, EXACT_TOL};

/// Witnesses kept per violation kind.
const MAX_WITNESSES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum CheckMode {
    /// Tabulate all `2^|E|` values; refuses above the enumeration budget.
    Exhaustive,
    /// Random `X ⊂ X+v` chains; absence of violations is evidence only.
    Sampled { checks: u64, seed: u64 },
}

/// `f(X + u) < f(X)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneViolation {
    pub x: Vec<String>,
    pub u: String,
    pub f_x: f64,
    pub f_x_plus_u: f64,
}

/// `f(u | X) < f(u | Y)` with `X ⊂ Y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmodularViolation {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub u: String,
    pub marginal_x: f64,
    pub marginal_y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmodularReport {
    pub mode: CheckMode,
    /// Number of local conditions tested.
    pub checks: u64,
    pub non_negative: bool,
    pub is_monotone: bool,
    pub is_submodular: bool,
    pub monotone_violations: Vec<MonotoneViolation>,
    pub submodular_violations: Vec<SubmodularViolation>,
    pub prng: Option<String>,
}

impl SubmodularReport {
    pub fn passed(&self) -> bool {
        self.non_negative && self.is_monotone && self.is_submodular
    }

    /// One-line description of what the report actually establishes.
    pub fn evidence(&self) -> String {
        match (self.mode, self.passed()) {
            (CheckMode::Exhaustive, true) => "exhaustive: monotone and submodular".into(),
            (CheckMode::Sampled { .. }, true) => {
                format!("sampled: no violation found in {} checks", self.checks)
            }
            (_, false) => format!(
                "violations found: {} monotonicity, {} submodularity",
                self.monotone_violations.len(),
                self.submodular_violations.len()
            ),
        }
    }
}

/// Checks monotonicity and submodularity through the local conditions
/// `f(X+u) ≥ f(X)` and `f(X+u) + f(X+v) ≥ f(X+u+v) + f(X)`, which together
/// are equivalent to the global definitions.
pub fn check_monotone_submodular(
    f: &SetFunctionSpec,
    mode: CheckMode,
    budget: &Budget,
) -> Result<SubmodularReport> {
    match mode {
        CheckMode::Exhaustive => exhaustive(f, budget),
        CheckMode::Sampled { checks, seed } => sampled(f, checks, seed),
    }
}

struct Collector<'a> {
    f: &'a SetFunctionSpec,
    monotone: Vec<MonotoneViolation>,
    submodular: Vec<SubmodularViolation>,
    any_monotone: bool,
    any_submodular: bool,
    checks: u64,
}

impl<'a> Collector<'a> {
    fn new(f: &'a SetFunctionSpec) -> Self {
        Collector {
            f,
            monotone: Vec::new(),
            submodular: Vec::new(),
            any_monotone: false,
            any_submodular: false,
            checks: 0,
        }
    }

    fn monotone(&mut self, x: &[usize], u: usize, f_x: f64, f_xu: f64) {
        self.checks += 1;
        if f_xu < f_x - EXACT_TOL {
            self.any_monotone = true;
            if self.monotone.len() < MAX_WITNESSES {
                self.monotone.push(MonotoneViolation {
                    x: self.f.ground().names(x),
                    u: self.f.ground().id(u).to_string(),
                    f_x,
                    f_x_plus_u: f_xu,
                });
            }
        }
    }

    fn submodular(&mut self, x: &[usize], v: usize, u: usize, marginal_x: f64, marginal_y: f64) {
        self.checks += 1;
        if marginal_x < marginal_y - EXACT_TOL {
            self.any_submodular = true;
            if self.submodular.len() < MAX_WITNESSES {
                let mut y = x.to_vec();
                y.push(v);
                y.sort_unstable();
                self.submodular.push(SubmodularViolation {
                    x: self.f.ground().names(x),
                    y: self.f.ground().names(&y),
                    u: self.f.ground().id(u).to_string(),
                    marginal_x,
                    marginal_y,
                });
            }
        }
    }

    fn finish(self, mode: CheckMode, non_negative: bool) -> SubmodularReport {
        SubmodularReport {
            mode,
            checks: self.checks,
            non_negative,
            is_monotone: !self.any_monotone,
            is_submodular: !self.any_submodular,
            monotone_violations: self.monotone,
            submodular_violations: self.submodular,
            prng: match mode {
                CheckMode::Sampled { .. } => Some(rng::PRNG_NAME.to_string()),
                CheckMode::Exhaustive => None,
            },
        }
    }
}

fn exhaustive(f: &SetFunctionSpec, budget: &Budget) -> Result<SubmodularReport> {
    let g = f.len();
    let required = if g >= 127 { u128::MAX } else { 1u128 << g };
    budget
        .require("exhaustive submodularity check (2^|E| evaluations)", required)
        .map_err(|e| e.with_hint("use sampled mode"))?;
    let table: Vec<f64> = (0..1usize << g).map(|m| f.value(&mask_elements(m))).collect();
    let non_negative = table.iter().all(|&v| v >= -EXACT_TOL);
    let mut c = Collector::new(f);
    for x in 0..1usize << g {
        let x_elems = mask_elements(x);
        for u in (0..g).filter(|u| x >> u & 1 == 0) {
            let xu = x | 1 << u;
            c.monotone(&x_elems, u, table[x], table[xu]);
            for v in (0..g).filter(|&v| v != u && x >> v & 1 == 0) {
                let xv = x | 1 << v;
                c.submodular(&x_elems, v, u, table[xu] - table[x], table[xu | xv] - table[xv]);
            }
        }
    }
    Ok(c.finish(CheckMode::Exhaustive, non_negative))
}

fn sampled(f: &SetFunctionSpec, checks: u64, seed: u64) -> Result<SubmodularReport> {
    let g = f.len();
    let mode = CheckMode::Sampled { checks, seed };
    let mut c = Collector::new(f);
    if g == 0 {
        return Ok(c.finish(mode, f.value(&[]) >= -EXACT_TOL));
    }
    if checks == 0 {
        return Err(Error::Invalid("sampled check needs at least one check".into()));
    }
    let mut rng = rng::seeded(seed);
    let mut non_negative = f.value(&[]) >= -EXACT_TOL;
    for _ in 0..checks {
        let u = rng.random_range(0..g);
        let x: Vec<usize> = (0..g).filter(|&e| e != u && rng.random_bool(0.5)).collect();
        let f_x = f.value(&x);
        non_negative &= f_x >= -EXACT_TOL;
        let mut xu = x.clone();
        xu.push(u);
        let f_xu = f.value(&xu);
        c.monotone(&x, u, f_x, f_xu);
        let outside: Vec<usize> = (0..g).filter(|&e| e != u && !x.contains(&e)).collect();
        if outside.is_empty() {
            continue;
        }
        let v = outside[rng.random_range(0..outside.len())];
        let mut xv = x.clone();
        xv.push(v);
        let mut xuv = xv.clone();
        xuv.push(u);
        let f_xv = f.value(&xv);
        c.submodular(&x, v, u, f_xu - f_x, f.value(&xuv) - f_xv);
    }
    Ok(c.finish(mode, non_negative))
}
