//! The Bayesian game model: tabular priors, type-dependent action sets,
//! utility rules, validators and the strategic-form construction.

mod model;
mod prior;
mod strategic;
mod validate;

use serde::{Deserialize, Serialize};

use crate::submodular::SetFunctionJson;

pub use model::{GameDefinition, Owner, StrategyProfile, UtilityModel};
pub use prior::{Independence, Prior};
pub use strategic::strategic_form;
pub use validate::{
    check_valid_conditions, validate_game, CheckOutcome, ConditionViolation, ValidConditionsReport,
    ValidationReport,
};

/// Version written into and required from every game file.
pub const SCHEMA_VERSION: u32 = 1;

/// JSON game schema; the single source of truth for a game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Generator parameters, when the game came from a recipe.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe: Option<serde_json::Value>,
    pub players: Vec<String>,
    /// `types[i]` lists `Θ_i`.
    pub types: Vec<Vec<String>>,
    pub prior: PriorSpec,
    pub actions: Vec<ActionSetSpec>,
    /// One null action `∅_i` per player.
    pub null_actions: Vec<String>,
    pub welfare: SetFunctionJson,
    pub utilities: UtilitySpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub profiles: Vec<PriorProfileSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorProfileSpec {
    pub types: Vec<String>,
    pub p: f64,
}

/// `A_i^{θ_i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionSetSpec {
    pub player: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub ids: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum UtilitySpec {
    /// Payoff vectors keyed by action profile (actions determine types).
    ExplicitTable { entries: Vec<UtilityEntrySpec> },
    /// `v_i(a) = SW(a) − SW(∅_i, a_{−i})`.
    BasicDerived,
    /// Each covered universe weight is split equally among its coverers.
    EqualShareCoverage,
    /// Weight goes to the high-priority coverers if any, else to the
    /// low-priority ones, equally.
    PriorityShareCoverage { high_priority: Vec<bool> },
    /// Each resource payoff is split in proportion to the loads the players
    /// put on it.
    ProportionalShareWeights,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityEntrySpec {
    pub actions: Vec<String>,
    pub payoffs: Vec<f64>,
}

/// Mixed-radix counter over `Π_k [radices[k]]`, last digit fastest, so that
/// tuples come out in lexicographic order.
#[derive(Clone, Debug)]
pub struct Odometer {
    radices: Vec<usize>,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl Odometer {
    pub fn new(radices: Vec<usize>) -> Self {
        let done = radices.contains(&0);
        Odometer {
            current: vec![0; radices.len()],
            radices,
            started: false,
            done,
        }
    }

    /// Number of tuples, saturating.
    pub fn count(radices: &[usize]) -> u128 {
        radices
            .iter()
            .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
            .unwrap_or(u128::MAX)
    }

    /// Advances and returns the next tuple.
    pub fn next_tuple(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        let mut k = self.radices.len();
        loop {
            if k == 0 {
                self.done = true;
                return None;
            }
            k -= 1;
            self.current[k] += 1;
            if self.current[k] < self.radices[k] {
                return Some(&self.current);
            }
            self.current[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::Odometer;

    #[test]
    fn odometer_is_lexicographic() {
        let mut o = Odometer::new(vec![2, 3]);
        let mut seen = Vec::new();
        while let Some(t) = o.next_tuple() {
            seen.push(t.to_vec());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![0, 1]);
        assert_eq!(seen[3], vec![1, 0]);
        let mut empty = Odometer::new(vec![]);
        assert_eq!(empty.next_tuple(), Some(&[][..]));
        assert_eq!(empty.next_tuple(), None);
        assert!(Odometer::new(vec![2, 0]).next_tuple().is_none());
    }
}
