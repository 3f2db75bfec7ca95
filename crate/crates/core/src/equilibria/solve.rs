use serde::Serialize;

use super::bne::enumerate_pure_bne;
use super::build::{build, Layout};
use super::check::{check_equilibrium, max_gain, Witness};
use super::dist::{StrategyDistribution, TypeDependentDistribution};
use super::lp::{solve_lp, RESIDUAL_TOL};
use super::{ConceptId, Sense, VERIFY_TOL};
use crate::error::LpFailure;
use crate::game::GameDefinition;
use crate::submodular::Ratio;
use crate::{Budget, Error, Result};

/// Entries below this are treated as solver noise when decoding a witness.
const DECODE_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultStatus {
    /// Exact optimum over a convex concept.
    Optimal,
    /// Extremum over enumerated pure Bayes–Nash equilibria only.
    PureOnly,
    /// No pure Bayes–Nash equilibrium exists.
    NoneFound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumResult {
    pub concept: ConceptId,
    pub sense: Sense,
    /// Optimal expected welfare; `None` only with [`ResultStatus::NoneFound`].
    pub value: Option<f64>,
    pub status: ResultStatus,
    pub witness: Option<Witness>,
    /// Largest incentive-constraint gain at the witness, clipped at zero.
    pub max_violation: f64,
    pub lp_variables: usize,
    pub lp_constraints: usize,
    /// Number of pure equilibria found (pure Bayes–Nash only).
    pub pure_equilibria: Option<usize>,
}

/// Serializable form of an [`EquilibriumResult`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub concept: ConceptId,
    pub sense: Sense,
    pub value: Option<f64>,
    pub status: ResultStatus,
    pub max_violation: f64,
    pub lp_variables: usize,
    pub lp_constraints: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pure_equilibria: Option<usize>,
    pub witness: Option<serde_json::Value>,
}

impl EquilibriumResult {
    pub fn report(&self, g: &GameDefinition) -> EquilibriumReport {
        EquilibriumReport {
            concept: self.concept,
            sense: self.sense,
            value: self.value,
            status: self.status,
            max_violation: self.max_violation,
            lp_variables: self.lp_variables,
            lp_constraints: self.lp_constraints,
            pure_equilibria: self.pure_equilibria,
            witness: self.witness.as_ref().map(|w| w.to_json(g)),
        }
    }
}

pub fn min_welfare(g: &GameDefinition, concept: ConceptId, budget: &Budget) -> Result<EquilibriumResult> {
    optimize_welfare(g, concept, Sense::Min, budget)
}

pub fn max_welfare(g: &GameDefinition, concept: ConceptId, budget: &Budget) -> Result<EquilibriumResult> {
    optimize_welfare(g, concept, Sense::Max, budget)
}

/// Worst or best expected welfare over `concept`, with a re-verified witness.
pub fn optimize_welfare(
    g: &GameDefinition,
    concept: ConceptId,
    sense: Sense,
    budget: &Budget,
) -> Result<EquilibriumResult> {
    if concept == ConceptId::BnePure {
        return pure_extremum(g, sense, budget);
    }
    let built = build(g, concept, sense, budget)?;
    let solution = solve_lp(&built.lp, RESIDUAL_TOL)?;
    let witness = match &built.layout {
        Layout::Pi(layout) => {
            let slices = layout
                .slices
                .iter()
                .map(|slice| {
                    let entries = slice
                        .profiles
                        .iter()
                        .enumerate()
                        .map(|(j, a)| (a.clone(), solution.values[slice.offset + j]))
                        .collect();
                    (slice.theta.clone(), normalize(entries))
                })
                .collect();
            Witness::TypeDependent(TypeDependentDistribution::new(g, slices)?)
        }
        Layout::Sigma(layout) => {
            let entries = (0..layout.len()).map(|j| (j, solution.values[j])).collect();
            let entries = normalize(entries).into_iter().map(|(j, p)| (layout.profile(g, j), p)).collect();
            Witness::Strategy(StrategyDistribution::new(g, entries)?)
        }
    };
    let numerical = |message: String| Error::Lp {
        kind: LpFailure::Numerical,
        message,
        dump: Some(built.lp.to_text()),
    };
    let violations = check_equilibrium(g, concept, &witness, VERIFY_TOL)?;
    if let Some(v) = violations.first() {
        return Err(numerical(format!(
            "{concept} {sense}: solver witness fails re-verification: {}",
            v.describe(g)
        )));
    }
    let welfare = witness.expected_welfare(g);
    if (welfare - solution.objective).abs() > VERIFY_TOL {
        return Err(numerical(format!(
            "{concept} {sense}: LP value {} but the decoded witness has welfare {welfare}",
            solution.objective
        )));
    }
    Ok(EquilibriumResult {
        concept,
        sense,
        value: Some(solution.objective),
        status: ResultStatus::Optimal,
        max_violation: max_gain(g, concept, &witness)?.max(0.0),
        witness: Some(witness),
        lp_variables: built.lp.variables.len(),
        lp_constraints: built.lp.constraints.len(),
        pure_equilibria: None,
    })
}

fn normalize<K>(entries: Vec<(K, f64)>) -> Vec<(K, f64)> {
    let kept: Vec<(K, f64)> = entries.into_iter().filter(|(_, p)| *p > DECODE_FLOOR).collect();
    let total: f64 = kept.iter().map(|(_, p)| p).sum();
    kept.into_iter().map(|(k, p)| (k, p / total)).collect()
}

fn pure_extremum(g: &GameDefinition, sense: Sense, budget: &Budget) -> Result<EquilibriumResult> {
    let found = enumerate_pure_bne(g, budget)?;
    let count = found.len();
    // First extremal profile in index order.
    let pick = found.into_iter().reduce(|best, cand| {
        let better = match sense {
            Sense::Min => cand.1 < best.1,
            Sense::Max => cand.1 > best.1,
        };
        if better {
            cand
        } else {
            best
        }
    });
    let Some((profile, welfare)) = pick else {
        return Ok(EquilibriumResult {
            concept: ConceptId::BnePure,
            sense,
            value: None,
            status: ResultStatus::NoneFound,
            witness: None,
            max_violation: 0.0,
            lp_variables: 0,
            lp_constraints: 0,
            pure_equilibria: Some(0),
        });
    };
    let witness = Witness::Strategy(StrategyDistribution::point_mass(g, profile)?);
    Ok(EquilibriumResult {
        concept: ConceptId::BnePure,
        sense,
        value: Some(welfare),
        status: ResultStatus::PureOnly,
        max_violation: max_gain(g, ConceptId::BnePure, &witness)?.max(0.0),
        witness: Some(witness),
        lp_variables: 0,
        lp_constraints: 0,
        pure_equilibria: Some(count),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub concept: ConceptId,
    pub sense: Sense,
    /// Equilibrium welfare (numerator); `None` if no equilibrium was found.
    pub welfare: Option<f64>,
    pub opt: f64,
    #[serde(serialize_with = "ratio_json")]
    pub ratio: Option<Ratio>,
}

fn ratio_json<S: serde::Serializer>(r: &Option<Ratio>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(Ratio::Value(v)) => s.serialize_f64(*v),
        Some(Ratio::Vacuous) => s.serialize_str("vacuous"),
        None => s.serialize_none(),
    }
}

/// `min welfare / OPT`.
pub fn poa(g: &GameDefinition, concept: ConceptId, budget: &Budget) -> Result<RatioReport> {
    ratio(g, concept, Sense::Min, budget)
}

/// `max welfare / OPT`.
pub fn pos(g: &GameDefinition, concept: ConceptId, budget: &Budget) -> Result<RatioReport> {
    ratio(g, concept, Sense::Max, budget)
}

fn ratio(g: &GameDefinition, concept: ConceptId, sense: Sense, budget: &Budget) -> Result<RatioReport> {
    let opt = crate::welfare::compute_opt(g, budget)?.value;
    let result = optimize_welfare(g, concept, sense, budget)?;
    Ok(RatioReport {
        concept,
        sense,
        welfare: result.value,
        opt,
        ratio: result.value.map(|w| Ratio::of(w, opt)),
    })
}
