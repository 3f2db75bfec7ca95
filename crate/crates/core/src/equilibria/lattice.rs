use std::collections::BTreeMap;

use serde::Serialize;

use super::check::{check_equilibrium, max_gain, Witness};
use super::dist::strategy_to_type_dependent;
use super::solve::{optimize_welfare, EquilibriumResult};
use super::{ConceptId, Sense, VERIFY_TOL};
use crate::game::GameDefinition;
use crate::{Budget, Result};

/// Slack allowed when comparing optima of nested concepts.
const ORDER_TOL: f64 = 1e-6;

/// `sub ⊆ sup`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub sub: ConceptId,
    pub sup: ConceptId,
}

const fn arrow(sub: ConceptId, sup: ConceptId) -> Arrow {
    Arrow { sub, sup }
}

/// Inclusions between the concepts, tail inside head.
pub const ARROWS: [Arrow; 11] = {
    use ConceptId::*;
    [
        arrow(BnePure, Sfce),
        arrow(Sfce, Anfce),
        arrow(Sfce, ComEq),
        arrow(Anfce, Bs),
        arrow(ComEq, Bs),
        arrow(Anfce, Anfcce),
        arrow(Anfcce, Sfcce),
        arrow(Anfcce, Anfcbs),
        arrow(Bs, Anfcbs),
        arrow(Anfcbs, Sfcbs),
        arrow(Sfcce, Sfcbs),
    ]
};

/// σ-concepts whose pushforward must land in a π-concept.
const EMBEDDINGS: [Arrow; 3] = [
    arrow(ConceptId::Anfce, ConceptId::Bs),
    arrow(ConceptId::Anfcce, ConceptId::Anfcbs),
    arrow(ConceptId::Sfcce, ConceptId::Sfcbs),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConceptRange {
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// Why the concept could not be computed, if it could not.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArrowCheck {
    pub arrow: Arrow,
    /// Both endpoints have values.
    pub computable: bool,
    pub min_ok: bool,
    pub max_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingCheck {
    pub arrow: Arrow,
    pub sense: Sense,
    pub passes: bool,
    /// Largest gain of the image under the target concept.
    pub max_gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeReport {
    pub ranges: BTreeMap<ConceptId, ConceptRange>,
    pub arrows: Vec<ArrowCheck>,
    pub embeddings: Vec<EmbeddingCheck>,
}

impl LatticeReport {
    pub fn holds(&self) -> bool {
        self.arrows.iter().all(|a| a.min_ok && a.max_ok) && self.embeddings.iter().all(|e| e.passes)
    }

    /// Human-readable failures, empty when the lattice holds.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in &self.arrows {
            let (lo, hi) = (&self.ranges[&a.arrow.sub], &self.ranges[&a.arrow.sup]);
            if !a.min_ok {
                out.push(format!("min {} = {:?} < min {} = {:?}", a.arrow.sub, lo.min, a.arrow.sup, hi.min));
            }
            if !a.max_ok {
                out.push(format!("max {} = {:?} > max {} = {:?}", a.arrow.sub, lo.max, a.arrow.sup, hi.max));
            }
        }
        for e in self.embeddings.iter().filter(|e| !e.passes) {
            out.push(format!(
                "{} {} witness pushed forward violates {} by {:e}",
                e.arrow.sub, e.sense, e.arrow.sup, e.max_gain
            ));
        }
        out
    }
}

/// Solves min and max for every concept within budget and checks that the
/// optima are ordered along every inclusion, plus that pushed-forward
/// σ-witnesses satisfy their π-counterparts.
pub fn lattice_check(g: &GameDefinition, budget: &Budget) -> Result<LatticeReport> {
    let mut ranges = BTreeMap::new();
    let mut results: BTreeMap<(ConceptId, Sense), EquilibriumResult> = BTreeMap::new();
    for concept in ConceptId::ALL {
        let mut range = ConceptRange {
            min: None,
            max: None,
            skipped: None,
        };
        for sense in [Sense::Min, Sense::Max] {
            match optimize_welfare(g, concept, sense, budget) {
                Ok(r) => {
                    match sense {
                        Sense::Min => range.min = r.value,
                        Sense::Max => range.max = r.value,
                    }
                    results.insert((concept, sense), r);
                }
                Err(e) if e.is_budget() => range.skipped = Some(e.to_string()),
                Err(e) => return Err(e),
            }
        }
        if range.skipped.is_none() && range.min.is_none() {
            range.skipped = Some("no pure equilibrium".into());
        }
        ranges.insert(concept, range);
    }

    let arrows = ARROWS
        .iter()
        .map(|&arrow| {
            let (sub, sup) = (&ranges[&arrow.sub], &ranges[&arrow.sup]);
            let pair = |a: Option<f64>, b: Option<f64>| a.zip(b);
            let min = pair(sub.min, sup.min);
            let max = pair(sub.max, sup.max);
            ArrowCheck {
                arrow,
                computable: min.is_some() && max.is_some(),
                min_ok: min.is_none_or(|(a, b)| a >= b - ORDER_TOL),
                max_ok: max.is_none_or(|(a, b)| a <= b + ORDER_TOL),
            }
        })
        .collect();

    let mut embeddings = Vec::new();
    for arrow in EMBEDDINGS {
        for sense in [Sense::Min, Sense::Max] {
            let Some(Witness::Strategy(sigma)) = results.get(&(arrow.sub, sense)).and_then(|r| r.witness.as_ref()) else {
                continue;
            };
            let image = Witness::TypeDependent(strategy_to_type_dependent(g, sigma));
            let passes = check_equilibrium(g, arrow.sup, &image, VERIFY_TOL)?.is_empty();
            embeddings.push(EmbeddingCheck {
                arrow,
                sense,
                passes,
                max_gain: max_gain(g, arrow.sup, &image)?,
            });
        }
    }
    Ok(LatticeReport {
        ranges,
        arrows,
        embeddings,
    })
}
