use std::collections::BTreeMap;

use serde::Serialize;

use super::dist::{StrategyDistribution, TypeDependentDistribution};
use super::eval::{support_by_type, Evaluator};
use super::{ConceptDomain, ConceptId};
use crate::game::GameDefinition;
use crate::{Error, Result};

/// A candidate equilibrium in either domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    TypeDependent(TypeDependentDistribution),
    Strategy(StrategyDistribution),
}

impl Witness {
    pub fn expected_welfare(&self, g: &GameDefinition) -> f64 {
        match self {
            Witness::TypeDependent(pi) => pi.expected_welfare(g),
            Witness::Strategy(sigma) => sigma.expected_welfare(g),
        }
    }

    pub fn to_json(&self, g: &GameDefinition) -> serde_json::Value {
        match self {
            Witness::TypeDependent(pi) => serde_json::to_value(pi.to_json(g)),
            Witness::Strategy(sigma) => serde_json::to_value(sigma.to_json(g)),
        }
        .expect("witness JSON is plain data")
    }
}

/// The most profitable deviation within one incentive family. Actions are
/// ground-set indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Deviation {
    /// Obey everything except recommendation `recommended`, which is
    /// replaced by `deviation`.
    ActionSwap { recommended: usize, deviation: usize },
    /// Report type `reported`, then map each recommendation through `map`.
    Misreport { reported: usize, map: Vec<(usize, usize)> },
    /// Ignore the mediator and play `action`.
    Constant { action: usize },
    /// Ignore the mediator and play this strategy (one action per type).
    Strategy { actions: Vec<usize> },
    /// On recommendation of strategy `recommended`, play `deviation`.
    StrategyMap { recommended: Vec<usize>, deviation: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub player: usize,
    /// The deviating player's true type, empty for ex-ante families.
    pub types: Vec<usize>,
    pub deviation: Deviation,
    /// Conditional on the type for per-type families, ex ante otherwise.
    pub gain: f64,
}

impl Violation {
    pub fn describe(&self, g: &GameDefinition) -> String {
        let who = g.player_name(self.player);
        let ty = self.types.first().map(|&t| format!(" of type `{}`", g.type_name(self.player, t))).unwrap_or_default();
        let names = |v: &[usize]| g.action_names(v).join(",");
        let what = match &self.deviation {
            Deviation::ActionSwap { recommended, deviation } => {
                format!("plays `{}` when told `{}`", g.action_name(*deviation), g.action_name(*recommended))
            }
            Deviation::Misreport { reported, map } => format!(
                "reports `{}` and maps {}",
                g.type_name(self.player, *reported),
                map.iter()
                    .map(|(a, b)| format!("{}→{}", g.action_name(*a), g.action_name(*b)))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            Deviation::Constant { action } => format!("always plays `{}`", g.action_name(*action)),
            Deviation::Strategy { actions } => format!("switches to strategy ({})", names(actions)),
            Deviation::StrategyMap { recommended, deviation } => {
                format!("plays ({}) when told ({})", names(deviation), names(recommended))
            }
        };
        format!("player `{who}`{ty} {what}: gain {:.6e}", self.gain)
    }
}

/// Every incentive constraint of `concept`, re-evaluated at `witness`.
/// Returns the deviations whose gain exceeds `tolerance`.
pub fn check_equilibrium(
    g: &GameDefinition,
    concept: ConceptId,
    witness: &Witness,
    tolerance: f64,
) -> Result<Vec<Violation>> {
    Ok(best_deviations(g, concept, witness)?.into_iter().filter(|v| v.gain > tolerance).collect())
}

/// Largest gain over all deviations (≤ 0 at an exact equilibrium).
pub fn max_gain(g: &GameDefinition, concept: ConceptId, witness: &Witness) -> Result<f64> {
    Ok(best_deviations(g, concept, witness)?
        .into_iter()
        .map(|v| v.gain)
        .fold(f64::NEG_INFINITY, f64::max))
}

type Outcomes = Vec<Vec<(Vec<usize>, f64)>>;

/// One best deviation per family member.
fn best_deviations(g: &GameDefinition, concept: ConceptId, witness: &Witness) -> Result<Vec<Violation>> {
    let prior = g.prior();
    let outcomes: Outcomes = match (concept.domain(), witness) {
        (ConceptDomain::TypeDependent, Witness::TypeDependent(pi)) => (0..prior.len())
            .map(|k| pi.slice(prior.profile(k)).map(<[_]>::to_vec).ok_or_else(|| missing(prior.profile(k))))
            .collect::<Result<_>>()?,
        (ConceptDomain::Strategy, Witness::Strategy(sigma)) => (0..prior.len())
            .map(|k| sigma.entries().iter().map(|(s, p)| (s.play(prior.profile(k)), *p)).collect())
            .collect(),
        _ => {
            return Err(Error::Domain(format!(
                "{concept} is defined over {} distributions",
                if concept.domain() == ConceptDomain::Strategy { "strategy" } else { "type-dependent" }
            )))
        }
    };
    let by_type = support_by_type(g);
    let mut ev = Evaluator::new(g);
    let mut out = Vec::new();
    let n = g.players();
    match concept {
        ConceptId::Bs | ConceptId::Anfce | ConceptId::ComEq => {
            for i in 0..n {
                for t in 0..g.type_count(i) {
                    for &a in g.actions(i, t) {
                        if let Some(v) = action_swap(&mut ev, &by_type, &outcomes, i, t, a)? {
                            out.push(v);
                        }
                    }
                }
            }
            if concept == ConceptId::ComEq {
                let Witness::TypeDependent(pi) = witness else { unreachable!() };
                for i in 0..n {
                    for t in 0..g.type_count(i) {
                        for r in 0..g.type_count(i) {
                            if r != t && !by_type[i][t].is_empty() {
                                out.push(misreport(&mut ev, &by_type, pi, i, t, r)?);
                            }
                        }
                    }
                }
            }
        }
        ConceptId::Anfcbs | ConceptId::Anfcce => {
            for i in 0..n {
                for t in 0..g.type_count(i) {
                    if !by_type[i][t].is_empty() {
                        out.push(constant(&mut ev, &by_type, &outcomes, i, t)?);
                    }
                }
            }
        }
        ConceptId::Sfcbs | ConceptId::Sfcce | ConceptId::BnePure => {
            if concept == ConceptId::BnePure {
                let Witness::Strategy(sigma) = witness else { unreachable!() };
                if sigma.entries().iter().filter(|(_, p)| *p > 0.0).count() != 1 {
                    return Err(Error::Domain("a pure Bayes–Nash witness must be a point mass".into()));
                }
            }
            for i in 0..n {
                let (gain, actions) = coarse(&mut ev, &by_type, &outcomes, i)?;
                out.push(Violation {
                    player: i,
                    types: vec![],
                    deviation: Deviation::Strategy { actions },
                    gain,
                });
            }
        }
        ConceptId::Sfce => {
            let Witness::Strategy(sigma) = witness else { unreachable!() };
            for i in 0..n {
                let mut groups: BTreeMap<&Vec<usize>, Vec<usize>> = BTreeMap::new();
                for (e, (s, _)) in sigma.entries().iter().enumerate() {
                    groups.entry(&s.actions[i]).or_default().push(e);
                }
                for (rec, members) in groups {
                    let sub: Outcomes = outcomes
                        .iter()
                        .map(|slice| members.iter().map(|&e| slice[e].clone()).collect())
                        .collect();
                    let (gain, actions) = coarse(&mut ev, &by_type, &sub, i)?;
                    out.push(Violation {
                        player: i,
                        types: vec![],
                        deviation: Deviation::StrategyMap {
                            recommended: rec.clone(),
                            deviation: actions,
                        },
                        gain,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn missing(theta: &[usize]) -> Error {
    Error::Domain(format!("distribution has no slice for type profile {theta:?}"))
}

/// Best `d ≠ a` replacing recommendation `a` for player `i` of type `t`.
fn action_swap(
    ev: &mut Evaluator,
    by_type: &[Vec<Vec<usize>>],
    outcomes: &Outcomes,
    i: usize,
    t: usize,
    a: usize,
) -> Result<Option<Violation>> {
    let g = ev.game();
    let prior = g.prior();
    let mut mass = 0.0;
    let mut best: Option<(f64, usize)> = None;
    for &d in g.actions(i, t) {
        if d == a {
            continue;
        }
        let mut gain = 0.0;
        for &k in &by_type[i][t] {
            for (b, p) in &outcomes[k] {
                if b[i] == a && *p > 0.0 {
                    gain += prior.prob(k) * p * (ev.v_dev(i, b, d)? - ev.v(i, b)?);
                    mass += p;
                }
            }
        }
        if best.is_none_or(|(g0, _)| gain > g0) {
            best = Some((gain, d));
        }
    }
    Ok(match best {
        Some((gain, d)) if mass > 0.0 => Some(Violation {
            player: i,
            types: vec![t],
            deviation: Deviation::ActionSwap {
                recommended: a,
                deviation: d,
            },
            gain: gain / prior.marginal(i, t),
        }),
        _ => None,
    })
}

fn constant(ev: &mut Evaluator, by_type: &[Vec<Vec<usize>>], outcomes: &Outcomes, i: usize, t: usize) -> Result<Violation> {
    let g = ev.game();
    let prior = g.prior();
    let mut best = (f64::NEG_INFINITY, 0);
    for &d in g.actions(i, t) {
        let mut gain = 0.0;
        for &k in &by_type[i][t] {
            for (b, p) in &outcomes[k] {
                gain += prior.prob(k) * p * (ev.v_dev(i, b, d)? - ev.v(i, b)?);
            }
        }
        if gain > best.0 {
            best = (gain, d);
        }
    }
    Ok(Violation {
        player: i,
        types: vec![t],
        deviation: Deviation::Constant { action: best.1 },
        gain: best.0 / prior.marginal(i, t),
    })
}

/// Best unilateral strategy against the outcome law: ex-ante gain and the
/// maximizing per-type actions.
fn coarse(ev: &mut Evaluator, by_type: &[Vec<Vec<usize>>], outcomes: &Outcomes, i: usize) -> Result<(f64, Vec<usize>)> {
    let g = ev.game();
    let prior = g.prior();
    let mut current = 0.0;
    for (k, slice) in outcomes.iter().enumerate() {
        for (b, p) in slice {
            current += prior.prob(k) * p * ev.v(i, b)?;
        }
    }
    let mut deviation = 0.0;
    let mut actions = Vec::with_capacity(g.type_count(i));
    for t in 0..g.type_count(i) {
        let mut best = (f64::NEG_INFINITY, g.actions(i, t)[0]);
        for &d in g.actions(i, t) {
            let mut h = 0.0;
            for &k in &by_type[i][t] {
                for (b, p) in &outcomes[k] {
                    h += prior.prob(k) * p * ev.v_dev(i, b, d)?;
                }
            }
            if h > best.0 {
                best = (h, d);
            }
        }
        if !by_type[i][t].is_empty() {
            deviation += best.0;
        }
        actions.push(best.1);
    }
    Ok((deviation - current, actions))
}

/// Report `r` instead of `t`, then best-respond per recommendation.
fn misreport(
    ev: &mut Evaluator,
    by_type: &[Vec<Vec<usize>>],
    pi: &TypeDependentDistribution,
    i: usize,
    t: usize,
    r: usize,
) -> Result<Violation> {
    let g = ev.game();
    let prior = g.prior();
    let mut truthful = 0.0;
    for &k in &by_type[i][t] {
        let slice = pi.slice(prior.profile(k)).ok_or_else(|| missing(prior.profile(k)))?;
        for (b, p) in slice {
            truthful += prior.prob(k) * p * ev.v(i, b)?;
        }
    }
    let mut total = 0.0;
    let mut map = Vec::new();
    for &rec in g.actions(i, r) {
        let mut best = (f64::NEG_INFINITY, g.actions(i, t)[0]);
        for &d in g.actions(i, t) {
            let mut h = 0.0;
            for &k in &by_type[i][t] {
                let mut reported = prior.profile(k).to_vec();
                reported[i] = r;
                let slice = pi.slice(&reported).ok_or_else(|| missing(&reported))?;
                for (b, p) in slice {
                    if b[i] == rec {
                        h += prior.prob(k) * p * ev.v_dev(i, b, d)?;
                    }
                }
            }
            if h > best.0 {
                best = (h, d);
            }
        }
        total += best.0;
        map.push((rec, best.1));
    }
    Ok(Violation {
        player: i,
        types: vec![t],
        deviation: Deviation::Misreport { reported: r, map },
        gain: (total - truthful) / prior.marginal(i, t),
    })
}
