use rand::Rng;
use serde::{Deserialize, Serialize};

use super::opt::compute_opt;
use crate::game::{GameDefinition, Odometer, StrategyProfile};
use crate::rng::{seeded, shard_seed};
use crate::submodular::Ratio;
use crate::{Budget, Result};

/// Improvements smaller than this do not count during ascent.
const ASCENT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum StrMode {
    Exact,
    Local { restarts: u32, seed: u64 },
    /// Exact within budget, local otherwise.
    Auto { restarts: u32, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrResult {
    pub value: f64,
    pub profile: StrategyProfile,
    /// `"exact"` or `"local"`; local values are lower bounds on STR.
    pub mode: &'static str,
}

/// `STR = max_s E_θ[SW(s(θ))]` over all pure strategy profiles; ties go to
/// the first profile in index order (player 0 most significant).
pub fn compute_str_exact(g: &GameDefinition, budget: &Budget) -> Result<StrResult> {
    let prior = g.prior();
    let count = g.strategy_profile_count();
    budget
        .require("exact STR (Π|S_i| strategy profiles × support)", count.saturating_mul(prior.len() as u128))
        .map_err(|e| e.with_hint("use compute_str_local"))?;
    let n = g.players();
    let strategies: Vec<Vec<Vec<usize>>> = (0..n).map(|i| g.strategies(i)).collect();
    let mut odo = Odometer::new(strategies.iter().map(Vec::len).collect());
    let mut a = vec![0; n];
    let mut best: Option<(Vec<usize>, f64)> = None;
    while let Some(pos) = odo.next_tuple() {
        let mut value = 0.0;
        for k in 0..prior.len() {
            let theta = prior.profile(k);
            for i in 0..n {
                a[i] = strategies[i][pos[i]][theta[i]];
            }
            value += prior.prob(k) * g.sw(&a);
        }
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((pos.to_vec(), value));
        }
    }
    let (pos, value) = best.expect("every player has a strategy");
    Ok(StrResult {
        value,
        profile: StrategyProfile {
            actions: pos.iter().enumerate().map(|(i, &p)| strategies[i][p].clone()).collect(),
        },
        mode: "exact",
    })
}

/// Best-response ascent on expected welfare, one `(player, type)` cell at a
/// time, from the all-first-actions profile and `restarts` seeded random
/// profiles. The result is a lower bound on STR with no improving
/// single-player change.
pub fn compute_str_local(g: &GameDefinition, restarts: u32, seed: u64) -> StrResult {
    let n = g.players();
    let prior = g.prior();
    let mut by_type: Vec<Vec<Vec<usize>>> = (0..n).map(|i| vec![Vec::new(); g.type_count(i)]).collect();
    for k in 0..prior.len() {
        for (i, &t) in prior.profile(k).iter().enumerate() {
            by_type[i][t].push(k);
        }
    }
    let mut best: Option<(StrategyProfile, f64)> = None;
    for r in 0..=restarts {
        let actions = (0..n)
            .map(|i| {
                let mut rng = seeded(shard_seed(seed, (r as u64) << 16 | i as u64));
                (0..g.type_count(i))
                    .map(|t| {
                        let set = g.actions(i, t);
                        if r == 0 {
                            set[0]
                        } else {
                            set[rng.random_range(0..set.len())]
                        }
                    })
                    .collect()
            })
            .collect();
        let mut s = StrategyProfile { actions };
        ascend(g, &by_type, &mut s);
        let value = g.expected_welfare(&s);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((s, value));
        }
    }
    let (profile, value) = best.expect("at least one start");
    StrResult {
        value,
        profile,
        mode: "local",
    }
}

fn ascend(g: &GameDefinition, by_type: &[Vec<Vec<usize>>], s: &mut StrategyProfile) {
    let prior = g.prior();
    let mut a = vec![0; g.players()];
    loop {
        let mut improved = false;
        for i in 0..g.players() {
            for t in 0..g.type_count(i) {
                let mut cell = |choice: usize, s: &StrategyProfile| {
                    let mut v = 0.0;
                    for &k in &by_type[i][t] {
                        let theta = prior.profile(k);
                        for (j, slot) in a.iter_mut().enumerate() {
                            *slot = s.actions[j][theta[j]];
                        }
                        a[i] = choice;
                        v += prior.prob(k) * g.sw(&a);
                    }
                    v
                };
                let current = cell(s.actions[i][t], s);
                let mut top = (current, s.actions[i][t]);
                for &d in g.actions(i, t) {
                    let v = cell(d, s);
                    if v > top.0 + ASCENT_TOL {
                        top = (v, d);
                    }
                }
                if top.1 != s.actions[i][t] {
                    s.actions[i][t] = top.1;
                    improved = true;
                }
            }
        }
        if !improved {
            return;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SrGapReport {
    pub opt: f64,
    pub str_value: f64,
    pub str_mode: &'static str,
    /// `STR / OPT`, a lower bound on the gap when `str_mode` is local.
    #[serde(serialize_with = "ratio_json")]
    pub gap: Ratio,
    pub lower_bound: bool,
}

fn ratio_json<S: serde::Serializer>(r: &Ratio, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Ratio::Value(v) => s.serialize_f64(*v),
        Ratio::Vacuous => s.serialize_str("vacuous"),
    }
}

/// Resolves a mode to a STR value.
pub(crate) fn compute_str(g: &GameDefinition, mode: StrMode, budget: &Budget) -> Result<StrResult> {
    match mode {
        StrMode::Exact => compute_str_exact(g, budget),
        StrMode::Local { restarts, seed } => Ok(compute_str_local(g, restarts, seed)),
        StrMode::Auto { restarts, seed } => match compute_str_exact(g, budget) {
            Err(e) if e.is_budget() => Ok(compute_str_local(g, restarts, seed)),
            other => other,
        },
    }
}

/// `STR / OPT`.
pub fn sr_gap(g: &GameDefinition, mode: StrMode, budget: &Budget) -> Result<SrGapReport> {
    let opt = compute_opt(g, budget)?.value;
    let str_result = compute_str(g, mode, budget)?;
    Ok(SrGapReport {
        opt,
        str_value: str_result.value,
        str_mode: str_result.mode,
        gap: Ratio::of(str_result.value, opt),
        lower_bound: str_result.mode == "local",
    })
}
