//! Bayes (coarse) correlated equilibrium concepts: LP construction, welfare
//! optimization over each concept, witness verification, pure Bayes–Nash
//! enumeration and the inclusion lattice.

mod bne;
mod build;
mod check;
mod dist;
mod eval;
mod lattice;
mod lp;
mod solve;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use bne::enumerate_pure_bne;
pub use build::build_lp;
pub use check::{check_equilibrium, max_gain, Deviation, Violation, Witness};
pub use dist::{
    misreport_closure, strategy_to_type_dependent, StrategyDistribution, StrategyDistributionJson,
    TypeDependentDistribution, TypeDependentJson,
};
pub use lattice::{lattice_check, Arrow, ArrowCheck, ConceptRange, EmbeddingCheck, LatticeReport, ARROWS};
pub use lp::{solve_lp, Cmp, LinearProgram, LpConstraint, LpSolution, LpVariable, RESIDUAL_TOL, SOLVER_TOL};
pub use solve::{
    max_welfare, min_welfare, optimize_welfare, poa, pos, EquilibriumReport, EquilibriumResult,
    RatioReport, ResultStatus,
};

/// Tolerance for re-verifying solver output from the outside.
pub const VERIFY_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConceptId {
    #[serde(rename = "BNE_pure")]
    BnePure,
    #[serde(rename = "SFCE")]
    Sfce,
    #[serde(rename = "ANFCE")]
    Anfce,
    #[serde(rename = "ComEq")]
    ComEq,
    #[serde(rename = "BS")]
    Bs,
    #[serde(rename = "ANFCCE")]
    Anfcce,
    #[serde(rename = "SFCCE")]
    Sfcce,
    #[serde(rename = "ANFCBS")]
    Anfcbs,
    #[serde(rename = "SFCBS")]
    Sfcbs,
}

/// What an equilibrium of a concept is a distribution over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConceptDomain {
    /// `σ ∈ Δ(S)`.
    Strategy,
    /// `π ∈ Π_θ Δ(A^θ)`.
    TypeDependent,
}

impl ConceptId {
    pub const ALL: [ConceptId; 9] = [
        ConceptId::BnePure,
        ConceptId::Sfce,
        ConceptId::Anfce,
        ConceptId::ComEq,
        ConceptId::Bs,
        ConceptId::Anfcce,
        ConceptId::Sfcce,
        ConceptId::Anfcbs,
        ConceptId::Sfcbs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConceptId::BnePure => "BNE_pure",
            ConceptId::Sfce => "SFCE",
            ConceptId::Anfce => "ANFCE",
            ConceptId::ComEq => "ComEq",
            ConceptId::Bs => "BS",
            ConceptId::Anfcce => "ANFCCE",
            ConceptId::Sfcce => "SFCCE",
            ConceptId::Anfcbs => "ANFCBS",
            ConceptId::Sfcbs => "SFCBS",
        }
    }

    pub fn domain(self) -> ConceptDomain {
        match self {
            ConceptId::BnePure | ConceptId::Sfce | ConceptId::Anfce | ConceptId::Anfcce | ConceptId::Sfcce => {
                ConceptDomain::Strategy
            }
            ConceptId::ComEq | ConceptId::Bs | ConceptId::Anfcbs | ConceptId::Sfcbs => ConceptDomain::TypeDependent,
        }
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConceptId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        ConceptId::ALL
            .into_iter()
            .find(|c| c.name().to_ascii_lowercase().replace('_', "") == key || (key == "bne" && *c == ConceptId::BnePure))
            .ok_or_else(|| {
                Error::Invalid(format!(
                    "unknown concept `{s}` (expected one of {})",
                    ConceptId::ALL.map(ConceptId::name).join(", ")
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Min => "min",
            Sense::Max => "max",
        })
    }
}

impl FromStr for Sense {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "min" | "minimize" => Ok(Sense::Min),
            "max" | "maximize" => Ok(Sense::Max),
            _ => Err(Error::Invalid(format!("unknown sense `{s}` (expected min or max)"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concept_names_round_trip() {
        for c in ConceptId::ALL {
            assert_eq!(c.name().parse::<ConceptId>().unwrap(), c);
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.name()));
        }
        assert_eq!("comeq".parse::<ConceptId>().unwrap(), ConceptId::ComEq);
        assert!("nash".parse::<ConceptId>().is_err());
    }
}
