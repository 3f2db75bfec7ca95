use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{validate_game, GameSpec, Odometer, Prior};
use crate::submodular::{SetFunctionKind, SetFunctionSpec};
use crate::{Budget, Error, Result};

/// Who an element of the welfare ground set belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Owner {
    Action { player: usize, ty: usize },
    Null { player: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum UtilityModel {
    ExplicitTable(HashMap<Vec<usize>, Vec<f64>>),
    BasicDerived,
    EqualShareCoverage,
    PriorityShareCoverage { high_priority: Vec<bool> },
    ProportionalShareWeights,
}

/// A validated Bayesian game. Action profiles are slices of welfare-ground
/// indices, one per player.
#[derive(Clone, Debug)]
pub struct GameDefinition {
    pub(crate) spec: GameSpec,
    pub(crate) prior: Prior,
    /// `actions[i][t]` is `A_i^{θ_i}` for the `t`-th type of player `i`.
    pub(crate) actions: Vec<Vec<Vec<usize>>>,
    pub(crate) nulls: Vec<usize>,
    pub(crate) owner: Vec<Owner>,
    pub(crate) welfare: SetFunctionSpec,
    pub(crate) utilities: UtilityModel,
}

/// Pure strategy profile: `actions[i][t]` is the action player `i` takes
/// under its `t`-th type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub actions: Vec<Vec<usize>>,
}

impl StrategyProfile {
    /// `s(θ)`.
    pub fn play(&self, theta: &[usize]) -> Vec<usize> {
        theta.iter().enumerate().map(|(i, &t)| self.actions[i][t]).collect()
    }

    /// `player -> type -> action` by id, for reports.
    pub fn named(&self, g: &GameDefinition) -> BTreeMap<String, BTreeMap<String, String>> {
        self.actions
            .iter()
            .enumerate()
            .map(|(i, per_type)| {
                (
                    g.player_name(i).to_string(),
                    per_type
                        .iter()
                        .enumerate()
                        .map(|(t, &a)| (g.type_name(i, t).to_string(), g.action_name(a).to_string()))
                        .collect(),
                )
            })
            .collect()
    }
}

impl GameDefinition {
    /// Validates `spec` and builds the game; fails with the rendered
    /// validation report if any check fails.
    pub fn from_spec(spec: GameSpec, budget: &Budget) -> Result<Self> {
        let (report, game) = validate::analyze(&spec, budget);
        match game {
            Some(g) if report.passed() => Ok(g),
            _ => Err(Error::Invalid(report.failure_summary())),
        }
    }

    pub fn from_json_str(text: &str, budget: &Budget) -> Result<Self> {
        let spec: GameSpec = serde_json::from_str(text)?;
        GameDefinition::from_spec(spec, budget)
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.spec).expect("game specs always serialize")
    }

    pub fn name(&self) -> Option<&str> {
        self.spec.name.as_deref()
    }

    pub fn players(&self) -> usize {
        self.actions.len()
    }

    pub fn player_name(&self, i: usize) -> &str {
        &self.spec.players[i]
    }

    pub fn type_name(&self, i: usize, t: usize) -> &str {
        &self.spec.types[i][t]
    }

    pub fn type_count(&self, i: usize) -> usize {
        self.actions[i].len()
    }

    pub fn action_name(&self, a: usize) -> &str {
        self.welfare.ground().id(a)
    }

    pub fn action_names(&self, a: &[usize]) -> Vec<String> {
        self.welfare.ground().names(a)
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn welfare(&self) -> &SetFunctionSpec {
        &self.welfare
    }

    pub fn utility_model(&self) -> &UtilityModel {
        &self.utilities
    }

    /// `A_i^{θ_i}`.
    pub fn actions(&self, i: usize, t: usize) -> &[usize] {
        &self.actions[i][t]
    }

    /// `A_i = ⋃_{θ_i} A_i^{θ_i}`, in type order.
    pub fn all_actions(&self, i: usize) -> Vec<usize> {
        self.actions[i].iter().flatten().copied().collect()
    }

    pub fn null(&self, i: usize) -> usize {
        self.nulls[i]
    }

    pub fn owner(&self, element: usize) -> Owner {
        self.owner[element]
    }

    pub fn is_complete_information(&self) -> bool {
        self.actions.iter().all(|per_type| per_type.len() == 1)
    }

    /// `A^θ` as one action list per player.
    pub fn action_sets(&self, theta: &[usize]) -> Vec<&[usize]> {
        theta.iter().enumerate().map(|(i, &t)| self.actions[i][t].as_slice()).collect()
    }

    /// `|A^θ|`.
    pub fn profile_count(&self, theta: &[usize]) -> u128 {
        let radices: Vec<usize> = self.action_sets(theta).iter().map(|s| s.len()).collect();
        Odometer::count(&radices)
    }

    /// All of `A^θ` in lexicographic action order.
    pub fn profiles(&self, theta: &[usize]) -> Vec<Vec<usize>> {
        let sets = self.action_sets(theta);
        let mut odo = Odometer::new(sets.iter().map(|s| s.len()).collect());
        let mut out = Vec::new();
        while let Some(pos) = odo.next_tuple() {
            out.push(pos.iter().zip(&sets).map(|(&p, s)| s[p]).collect());
        }
        out
    }

    /// Errors unless `a_i ∈ A_i^{θ_i}` for every player.
    pub fn check_profile(&self, theta: &[usize], a: &[usize]) -> Result<()> {
        let n = self.players();
        if theta.len() != n || a.len() != n {
            return Err(Error::Domain(format!("profiles must have {n} entries")));
        }
        for i in 0..n {
            if theta[i] >= self.type_count(i) {
                return Err(Error::Domain(format!("player {i} has no type {}", theta[i])));
            }
            if !self.actions[i][theta[i]].contains(&a[i]) {
                return Err(Error::Domain(format!(
                    "action `{}` is not available to player `{}` of type `{}`",
                    self.welfare.ground().ids().get(a[i]).map_or("?", String::as_str),
                    self.player_name(i),
                    self.type_name(i, theta[i])
                )));
            }
        }
        Ok(())
    }

    /// `SW(a) = f({a_1, …, a_n})`, unchecked.
    pub fn sw(&self, a: &[usize]) -> f64 {
        self.welfare.value(a)
    }

    /// `SW(a)` after checking `a ∈ A^θ`.
    pub fn social_welfare(&self, theta: &[usize], a: &[usize]) -> Result<f64> {
        self.check_profile(theta, a)?;
        Ok(self.sw(a))
    }

    /// `(v_1(a), …, v_n(a))` after checking `a ∈ A^θ`.
    pub fn utilities(&self, theta: &[usize], a: &[usize]) -> Result<Vec<f64>> {
        self.check_profile(theta, a)?;
        self.payoffs(a)
    }

    /// `SW(∅_i, a_{−i})`.
    pub fn sw_without(&self, i: usize, a: &[usize]) -> f64 {
        let mut b = a.to_vec();
        b[i] = self.nulls[i];
        self.sw(&b)
    }

    /// Payoff vector of an action profile (entries may be null actions).
    pub fn payoffs(&self, a: &[usize]) -> Result<Vec<f64>> {
        let n = self.players();
        match &self.utilities {
            UtilityModel::ExplicitTable(table) => table.get(a).cloned().ok_or_else(|| {
                Error::Domain(format!("no utility entry for profile {:?}", self.action_names(a)))
            }),
            UtilityModel::BasicDerived => {
                let total = self.sw(a);
                Ok((0..n).map(|i| total - self.sw_without(i, a)).collect())
            }
            UtilityModel::EqualShareCoverage => Ok(self.shares(a, None)),
            UtilityModel::PriorityShareCoverage { high_priority } => Ok(self.shares(a, Some(high_priority))),
            UtilityModel::ProportionalShareWeights => Ok(self.proportional_shares(a)),
        }
    }

    /// `v_i(a)`.
    pub fn payoff(&self, i: usize, a: &[usize]) -> Result<f64> {
        match &self.utilities {
            UtilityModel::BasicDerived => Ok(self.sw(a) - self.sw_without(i, a)),
            _ => Ok(self.payoffs(a)?[i]),
        }
    }

    fn shares(&self, a: &[usize], priority: Option<&Vec<bool>>) -> Vec<f64> {
        let cov = self.welfare.as_coverage().expect("sharing rules are validated against coverage welfare");
        let n = a.len();
        let mut out = vec![0.0; n];
        let mut seen: Vec<usize> = Vec::new();
        for i in 0..n {
            for &u in cov.covers(a[i]) {
                if seen.contains(&u) {
                    continue;
                }
                seen.push(u);
                let coverers: Vec<usize> = (0..n).filter(|&j| cov.covers(a[j]).contains(&u)).collect();
                let receivers: Vec<usize> = match priority {
                    Some(high) if coverers.iter().any(|&j| high[j]) => {
                        coverers.into_iter().filter(|&j| high[j]).collect()
                    }
                    _ => coverers,
                };
                let share = cov.weights()[u] / receivers.len() as f64;
                for j in receivers {
                    out[j] += share;
                }
            }
        }
        out
    }

    fn proportional_shares(&self, a: &[usize]) -> Vec<f64> {
        let SetFunctionKind::ConcaveLoad(load) = self.welfare.kind() else {
            unreachable!("proportional sharing is validated against concave-load welfare")
        };
        let loads = load.loads(a);
        let mut out = vec![0.0; a.len()];
        for (i, &e) in a.iter().enumerate() {
            for &(r, w) in load.usage(e) {
                if w > 0 {
                    out[i] += w as f64 / loads[r] as f64 * load.payoff(r, loads[r]);
                }
            }
        }
        out
    }

    /// `|S_i| = Π_{θ_i} |A_i^{θ_i}|`, saturating.
    pub fn strategy_count(&self, i: usize) -> u128 {
        let radices: Vec<usize> = self.actions[i].iter().map(Vec::len).collect();
        Odometer::count(&radices)
    }

    /// `Π_i |S_i|`, saturating.
    pub fn strategy_profile_count(&self) -> u128 {
        (0..self.players())
            .try_fold(1u128, |acc, i| acc.checked_mul(self.strategy_count(i)))
            .unwrap_or(u128::MAX)
    }

    /// The `k`-th pure strategy of player `i` (lexicographic, first type most
    /// significant), as one action per type.
    pub fn strategy(&self, i: usize, mut k: u64) -> Vec<usize> {
        let sets = &self.actions[i];
        let mut out = vec![0; sets.len()];
        for t in (0..sets.len()).rev() {
            let r = sets[t].len() as u64;
            out[t] = sets[t][(k % r) as usize];
            k /= r;
        }
        out
    }

    /// All pure strategies of player `i`, in index order.
    pub fn strategies(&self, i: usize) -> Vec<Vec<usize>> {
        (0..self.strategy_count(i) as u64).map(|k| self.strategy(i, k)).collect()
    }

    /// `E_θ[SW(s(θ))]`.
    pub fn expected_welfare(&self, s: &StrategyProfile) -> f64 {
        (0..self.prior.len())
            .map(|k| self.prior.prob(k) * self.sw(&s.play(self.prior.profile(k))))
            .sum()
    }

    /// `E_θ[v_i(s(θ))]` for every player.
    pub fn expected_payoffs(&self, s: &StrategyProfile) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.players()];
        for k in 0..self.prior.len() {
            let v = self.payoffs(&s.play(self.prior.profile(k)))?;
            for (o, x) in out.iter_mut().zip(v) {
                *o += self.prior.prob(k) * x;
            }
        }
        Ok(out)
    }

    /// Checks totality and action availability of a strategy profile.
    pub fn check_strategy(&self, s: &StrategyProfile) -> Result<()> {
        if s.actions.len() != self.players() {
            return Err(Error::Domain("strategy profile has the wrong number of players".into()));
        }
        for (i, per_type) in s.actions.iter().enumerate() {
            if per_type.len() != self.type_count(i) {
                return Err(Error::Domain(format!("strategy of player {i} is not total on its types")));
            }
            for (t, a) in per_type.iter().enumerate() {
                if !self.actions[i][t].contains(a) {
                    return Err(Error::Domain(format!(
                        "strategy of player {i} picks an unavailable action under type {t}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Re-runs the structural validation (useful after deserializing).
    pub fn revalidate(&self, budget: &Budget) -> super::ValidationReport {
        validate_game(&self.spec, budget)
    }
}

use super::validate;
