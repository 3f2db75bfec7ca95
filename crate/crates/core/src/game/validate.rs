use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::model::{GameDefinition, Owner, UtilityModel};
use super::{GameSpec, Odometer, Prior, UtilitySpec, SCHEMA_VERSION};
use crate::submodular::{check_monotone_submodular, CheckMode, SetFunctionKind, SetFunctionSpec};
use crate::{Budget, Result, EXACT_TOL};

/// Checks used when an exhaustive welfare check is over budget.
const SAMPLED_CHECKS: u64 = 20_000;
const SAMPLED_SEED: u64 = 0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub ok: bool,
    pub evidence: String,
    pub witnesses: Vec<String>,
}

impl CheckOutcome {
    fn pass(name: &str, evidence: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            ok: true,
            evidence: evidence.into(),
            witnesses: Vec::new(),
        }
    }

    fn fail(name: &str, evidence: impl Into<String>, witnesses: Vec<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            ok: false,
            evidence: evidence.into(),
            witnesses,
        }
    }

    fn skipped(name: &str, after: &str) -> Self {
        CheckOutcome::fail(name, format!("skipped: `{after}` failed"), Vec::new())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub(crate) fn failure_summary(&self) -> String {
        let lines: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.ok)
            .map(|c| match c.witnesses.first() {
                Some(w) => format!("{}: {} ({w})", c.name, c.evidence),
                None => format!("{}: {}", c.name, c.evidence),
            })
            .collect();
        format!("game validation failed: {}", lines.join("; "))
    }
}

/// Structural validation of a game file: schema, prior, action families,
/// disjointness, null-action neutrality, welfare evidence and utility
/// consistency. Each failed check carries concrete witnesses.
pub fn validate_game(spec: &GameSpec, budget: &Budget) -> ValidationReport {
    analyze(spec, budget).0
}

pub(crate) fn analyze(spec: &GameSpec, budget: &Budget) -> (ValidationReport, Option<GameDefinition>) {
    let mut checks = Vec::new();
    let game = build(spec, budget, &mut checks);
    (ValidationReport { checks }, game)
}

const STAGES: [&str; 9] = [
    "schema",
    "players_and_types",
    "prior",
    "action_sets",
    "disjointness",
    "welfare_ground",
    "null_neutrality",
    "welfare_monotone_submodular",
    "utilities",
];

fn skip_rest(checks: &mut Vec<CheckOutcome>, failed: &str) {
    let from = STAGES.iter().position(|s| *s == failed).unwrap() + 1;
    for s in &STAGES[from..] {
        checks.push(CheckOutcome::skipped(s, failed));
    }
}

fn build(spec: &GameSpec, budget: &Budget, checks: &mut Vec<CheckOutcome>) -> Option<GameDefinition> {
    macro_rules! stage {
        ($name:expr, $outcome:expr) => {{
            let (outcome, value) = $outcome;
            let ok = outcome.ok;
            checks.push(outcome);
            if !ok {
                skip_rest(checks, $name);
                return None;
            }
            value
        }};
    }

    stage!("schema", {
        if spec.schema_version == SCHEMA_VERSION {
            (CheckOutcome::pass("schema", format!("schema version {SCHEMA_VERSION}")), ())
        } else {
            (
                CheckOutcome::fail(
                    "schema",
                    format!("unsupported schema version {}", spec.schema_version),
                    vec![format!("expected {SCHEMA_VERSION}")],
                ),
                (),
            )
        }
    });

    let n = spec.players.len();
    stage!("players_and_types", players_and_types(spec));
    let type_index: Vec<HashMap<&str, usize>> = spec
        .types
        .iter()
        .map(|ts| ts.iter().enumerate().map(|(t, s)| (s.as_str(), t)).collect())
        .collect();
    let player_index: HashMap<&str, usize> = spec.players.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();

    let prior = stage!("prior", prior_check(spec, &type_index));
    let action_ids = stage!("action_sets", action_sets(spec, &player_index, &type_index));
    stage!("disjointness", disjointness(spec, &action_ids));

    let (welfare, actions, nulls, owner) = stage!("welfare_ground", welfare_ground(spec, &action_ids))?;
    stage!("null_neutrality", null_neutrality(&welfare, &nulls, budget));
    stage!("welfare_monotone_submodular", welfare_evidence(&welfare, budget));
    let utilities = stage!("utilities", utilities(spec, &welfare, &actions, &nulls, n));

    Some(GameDefinition {
        spec: spec.clone(),
        prior,
        actions,
        nulls,
        owner,
        welfare,
        utilities,
    })
}

fn players_and_types(spec: &GameSpec) -> (CheckOutcome, ()) {
    let name = "players_and_types";
    let mut witnesses = Vec::new();
    if spec.players.is_empty() {
        witnesses.push("no players".to_string());
    }
    if spec.types.len() != spec.players.len() {
        witnesses.push(format!("{} players but {} type lists", spec.players.len(), spec.types.len()));
    }
    if spec.null_actions.len() != spec.players.len() {
        witnesses.push(format!(
            "{} players but {} null actions",
            spec.players.len(),
            spec.null_actions.len()
        ));
    }
    let mut seen = HashMap::new();
    for p in &spec.players {
        if seen.insert(p.as_str(), ()).is_some() {
            witnesses.push(format!("duplicate player `{p}`"));
        }
    }
    for (i, ts) in spec.types.iter().enumerate() {
        if ts.is_empty() {
            witnesses.push(format!("player {i} has no types"));
        }
        let mut seen = HashMap::new();
        for t in ts {
            if seen.insert(t.as_str(), ()).is_some() {
                witnesses.push(format!("player {i} lists type `{t}` twice"));
            }
        }
    }
    if witnesses.is_empty() {
        (CheckOutcome::pass(name, format!("{} players", spec.players.len())), ())
    } else {
        (CheckOutcome::fail(name, "malformed players or types", witnesses), ())
    }
}

fn prior_check(spec: &GameSpec, type_index: &[HashMap<&str, usize>]) -> (CheckOutcome, Prior) {
    let name = "prior";
    let counts: Vec<usize> = spec.types.iter().map(Vec::len).collect();
    let mut support = Vec::with_capacity(spec.prior.profiles.len());
    for prof in &spec.prior.profiles {
        if prof.types.len() != counts.len() {
            return (
                CheckOutcome::fail(name, "type profile has the wrong length", vec![format!("{:?}", prof.types)]),
                Prior::default_empty(),
            );
        }
        let mut theta = Vec::with_capacity(counts.len());
        for (i, t) in prof.types.iter().enumerate() {
            match type_index[i].get(t.as_str()) {
                Some(&k) => theta.push(k),
                None => {
                    return (
                        CheckOutcome::fail(name, format!("unknown type `{t}` for player {i}"), vec![format!("{:?}", prof.types)]),
                        Prior::default_empty(),
                    )
                }
            }
        }
        support.push((theta, prof.p));
    }
    match Prior::new(counts, support) {
        Ok(p) => {
            let indep = p.is_independent().independent;
            (
                CheckOutcome::pass(
                    name,
                    format!(
                        "{} support profiles, {}",
                        p.len(),
                        if indep { "independent" } else { "correlated" }
                    ),
                ),
                p,
            )
        }
        Err(e) => (
            CheckOutcome::fail(name, "prior rejected", vec![e.to_string()]),
            Prior::default_empty(),
        ),
    }
}

impl Prior {
    fn default_empty() -> Prior {
        Prior::new(vec![], vec![(vec![], 1.0)]).expect("trivial prior")
    }
}

/// `action_ids[i][t]` = ids of `A_i^{θ_i}`.
fn action_sets(
    spec: &GameSpec,
    player_index: &HashMap<&str, usize>,
    type_index: &[HashMap<&str, usize>],
) -> (CheckOutcome, Vec<Vec<Vec<String>>>) {
    let name = "action_sets";
    let mut sets: Vec<Vec<Option<Vec<String>>>> = spec.types.iter().map(|ts| vec![None; ts.len()]).collect();
    let mut witnesses = Vec::new();
    for a in &spec.actions {
        let Some(&i) = player_index.get(a.player.as_str()) else {
            witnesses.push(format!("unknown player `{}`", a.player));
            continue;
        };
        let Some(&t) = type_index[i].get(a.ty.as_str()) else {
            witnesses.push(format!("unknown type `{}` of player `{}`", a.ty, a.player));
            continue;
        };
        if a.ids.is_empty() {
            witnesses.push(format!("empty action set for player `{}` type `{}`", a.player, a.ty));
        }
        if sets[i][t].replace(a.ids.clone()).is_some() {
            witnesses.push(format!("two action sets for player `{}` type `{}`", a.player, a.ty));
        }
    }
    for (i, per_type) in sets.iter().enumerate() {
        for (t, s) in per_type.iter().enumerate() {
            if s.is_none() {
                witnesses.push(format!(
                    "missing action set for player `{}` type `{}`",
                    spec.players[i], spec.types[i][t]
                ));
            }
        }
    }
    if !witnesses.is_empty() {
        return (CheckOutcome::fail(name, "malformed action family", witnesses), Vec::new());
    }
    let sets: Vec<Vec<Vec<String>>> = sets
        .into_iter()
        .map(|per_type| per_type.into_iter().map(Option::unwrap).collect())
        .collect();
    let total: usize = sets.iter().flatten().map(Vec::len).sum();
    (CheckOutcome::pass(name, format!("{total} actions")), sets)
}

fn disjointness(spec: &GameSpec, action_ids: &[Vec<Vec<String>>]) -> (CheckOutcome, ()) {
    let name = "disjointness";
    let mut first: HashMap<&str, String> = HashMap::new();
    let mut witnesses = Vec::new();
    for (i, per_type) in action_ids.iter().enumerate() {
        for (t, ids) in per_type.iter().enumerate() {
            for id in ids {
                let here = format!("player `{}` type `{}`", spec.players[i], spec.types[i][t]);
                if let Some(prev) = first.insert(id, here.clone()) {
                    witnesses.push(format!("action `{id}` appears in {prev} and {here}"));
                }
            }
        }
    }
    for (i, id) in spec.null_actions.iter().enumerate() {
        let here = format!("null action of player `{}`", spec.players[i]);
        if let Some(prev) = first.insert(id, here.clone()) {
            witnesses.push(format!("action `{id}` appears in {prev} and {here}"));
        }
    }
    if witnesses.is_empty() {
        (CheckOutcome::pass(name, "action sets and null actions are pairwise disjoint"), ())
    } else {
        (CheckOutcome::fail(name, "shared action ids", witnesses), ())
    }
}

type GroundParts = (SetFunctionSpec, Vec<Vec<Vec<usize>>>, Vec<usize>, Vec<Owner>);

fn welfare_ground(spec: &GameSpec, action_ids: &[Vec<Vec<String>>]) -> (CheckOutcome, Option<GroundParts>) {
    let name = "welfare_ground";
    let welfare = match SetFunctionSpec::from_json(&spec.welfare) {
        Ok(w) => w,
        Err(e) => return (CheckOutcome::fail(name, "welfare function rejected", vec![e.to_string()]), None),
    };
    let ground = welfare.ground();
    let mut owner: Vec<Option<Owner>> = vec![None; ground.len()];
    let mut witnesses = Vec::new();
    let mut actions = Vec::with_capacity(action_ids.len());
    for (i, per_type) in action_ids.iter().enumerate() {
        let mut pt = Vec::with_capacity(per_type.len());
        for (t, ids) in per_type.iter().enumerate() {
            let mut set = Vec::with_capacity(ids.len());
            for id in ids {
                match ground.index_of(id) {
                    Some(e) => {
                        owner[e] = Some(Owner::Action { player: i, ty: t });
                        set.push(e);
                    }
                    None => witnesses.push(format!("action `{id}` is not in the welfare ground set")),
                }
            }
            pt.push(set);
        }
        actions.push(pt);
    }
    let mut nulls = Vec::with_capacity(spec.null_actions.len());
    for (i, id) in spec.null_actions.iter().enumerate() {
        match ground.index_of(id) {
            Some(e) => {
                owner[e] = Some(Owner::Null { player: i });
                nulls.push(e);
            }
            None => witnesses.push(format!("null action `{id}` is not in the welfare ground set")),
        }
    }
    for (e, o) in owner.iter().enumerate() {
        if o.is_none() {
            witnesses.push(format!("ground element `{}` is neither an action nor a null action", ground.id(e)));
        }
    }
    if !witnesses.is_empty() {
        return (CheckOutcome::fail(name, "welfare ground does not match the actions", witnesses), None);
    }
    let owner = owner.into_iter().map(Option::unwrap).collect();
    (
        CheckOutcome::pass(name, format!("{} ground elements", ground.len())),
        Some((welfare, actions, nulls, owner)),
    )
}

fn null_neutrality(welfare: &SetFunctionSpec, nulls: &[usize], budget: &Budget) -> (CheckOutcome, ()) {
    let name = "null_neutrality";
    let g = welfare.len();
    let mut witnesses = Vec::new();
    let mut evidence = "by construction (null actions contribute nothing)";
    for &z in nulls {
        match welfare.structurally_null(z) {
            Some(true) => {}
            Some(false) => witnesses.push(format!("null action `{}` contributes welfare", welfare.ground().id(z))),
            None => {
                let required = if g >= 127 { u128::MAX } else { 1u128 << g };
                if budget.require("null neutrality", required).is_ok() {
                    evidence = "exhaustive over all subsets";
                    for mask in 0..1usize << g {
                        if mask >> z & 1 == 1 {
                            continue;
                        }
                        let x: Vec<usize> = (0..g).filter(|b| mask >> b & 1 == 1).collect();
                        let mut xz = x.clone();
                        xz.push(z);
                        if (welfare.value(&xz) - welfare.value(&x)).abs() > EXACT_TOL {
                            witnesses.push(format!(
                                "f({:?} + `{}`) != f({:?})",
                                welfare.ground().names(&x),
                                welfare.ground().id(z),
                                welfare.ground().names(&x)
                            ));
                            break;
                        }
                    }
                } else {
                    witnesses.push(format!(
                        "cannot verify null action `{}`: 2^{g} subsets exceed the budget",
                        welfare.ground().id(z)
                    ));
                }
            }
        }
    }
    if witnesses.is_empty() {
        (CheckOutcome::pass(name, evidence), ())
    } else {
        (CheckOutcome::fail(name, "null actions are not neutral", witnesses), ())
    }
}

fn welfare_evidence(welfare: &SetFunctionSpec, budget: &Budget) -> (CheckOutcome, ()) {
    let name = "welfare_monotone_submodular";
    if welfare.structurally_submodular() {
        return (CheckOutcome::pass(name, "by construction (coverage / concave load representation)"), ());
    }
    let report = match check_monotone_submodular(welfare, CheckMode::Exhaustive, budget) {
        Ok(r) => r,
        Err(e) if e.is_budget() => {
            match check_monotone_submodular(
                welfare,
                CheckMode::Sampled {
                    checks: SAMPLED_CHECKS,
                    seed: SAMPLED_SEED,
                },
                budget,
            ) {
                Ok(r) => r,
                Err(e) => return (CheckOutcome::fail(name, "check failed", vec![e.to_string()]), ()),
            }
        }
        Err(e) => return (CheckOutcome::fail(name, "check failed", vec![e.to_string()]), ()),
    };
    if report.passed() {
        (CheckOutcome::pass(name, report.evidence()), ())
    } else {
        let mut witnesses: Vec<String> = report
            .monotone_violations
            .iter()
            .map(|v| format!("f({:?} + {}) = {} < f(X) = {}", v.x, v.u, v.f_x_plus_u, v.f_x))
            .collect();
        witnesses.extend(report.submodular_violations.iter().map(|v| {
            format!(
                "f({} | {:?}) = {} < f({} | {:?}) = {}",
                v.u, v.x, v.marginal_x, v.u, v.y, v.marginal_y
            )
        }));
        if !report.non_negative {
            witnesses.push("negative welfare value".into());
        }
        (CheckOutcome::fail(name, report.evidence(), witnesses), ())
    }
}

fn utilities(
    spec: &GameSpec,
    welfare: &SetFunctionSpec,
    actions: &[Vec<Vec<usize>>],
    nulls: &[usize],
    n: usize,
) -> (CheckOutcome, UtilityModel) {
    let name = "utilities";
    let fail = |msg: &str, w: Vec<String>| (CheckOutcome::fail(name, msg, w), UtilityModel::BasicDerived);
    let coverage = welfare.as_coverage().is_some();
    match &spec.utilities {
        UtilitySpec::BasicDerived => (CheckOutcome::pass(name, "basic (marginal contribution)"), UtilityModel::BasicDerived),
        UtilitySpec::EqualShareCoverage => {
            if coverage {
                (CheckOutcome::pass(name, "equal sharing of covered weight"), UtilityModel::EqualShareCoverage)
            } else {
                fail("equal sharing needs a coverage welfare function", vec![])
            }
        }
        UtilitySpec::PriorityShareCoverage { high_priority } => {
            if !coverage {
                return fail("priority sharing needs a coverage welfare function", vec![]);
            }
            if high_priority.len() != n {
                return fail("one priority class per player is required", vec![format!("{} classes", high_priority.len())]);
            }
            if let SetFunctionKind::PrioritySharingCoverage { high_priority: w, .. } = welfare.kind() {
                if w != high_priority {
                    return fail("priority classes differ between welfare and utilities", vec![]);
                }
            }
            (
                CheckOutcome::pass(name, "priority sharing of covered weight"),
                UtilityModel::PriorityShareCoverage {
                    high_priority: high_priority.clone(),
                },
            )
        }
        UtilitySpec::ProportionalShareWeights => {
            if matches!(welfare.kind(), SetFunctionKind::ConcaveLoad(_)) {
                (CheckOutcome::pass(name, "proportional sharing of resource payoffs"), UtilityModel::ProportionalShareWeights)
            } else {
                fail("proportional sharing needs a concave-load welfare function", vec![])
            }
        }
        UtilitySpec::ExplicitTable { entries } => {
            let ground = welfare.ground();
            let mut table = HashMap::with_capacity(entries.len());
            let mut witnesses = Vec::new();
            for entry in entries {
                let profile = match ground.resolve(&entry.actions) {
                    Ok(p) => p,
                    Err(e) => {
                        witnesses.push(e.to_string());
                        continue;
                    }
                };
                if profile.len() != n || entry.payoffs.len() != n {
                    witnesses.push(format!("entry {:?} does not have {n} actions and payoffs", entry.actions));
                    continue;
                }
                let well_formed = profile.iter().enumerate().all(|(i, a)| {
                    *a == nulls[i] || actions[i].iter().any(|set| set.contains(a))
                });
                if !well_formed {
                    witnesses.push(format!("entry {:?} uses another player's action", entry.actions));
                }
                if entry.payoffs.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    witnesses.push(format!("entry {:?} has a negative or non-finite payoff", entry.actions));
                }
                if table.insert(profile, entry.payoffs.clone()).is_some() {
                    witnesses.push(format!("entry {:?} listed twice", entry.actions));
                }
            }
            if witnesses.is_empty() {
                (
                    CheckOutcome::pass(name, format!("explicit table with {} entries", table.len())),
                    UtilityModel::ExplicitTable(table),
                )
            } else {
                fail("malformed utility table", witnesses)
            }
        }
    }
}

/// A failed total-utility or marginal-contribution inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionViolation {
    pub condition: String,
    /// Player index for marginal-contribution violations.
    pub player: Option<usize>,
    pub profile: Vec<String>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidConditionsReport {
    pub profiles_checked: u64,
    pub total_utility_ok: bool,
    pub marginal_contribution_ok: bool,
    pub valid: bool,
    /// Marginal contribution holds with equality everywhere.
    pub basic: bool,
    pub violations: Vec<ConditionViolation>,
    /// A profile where some player's utility strictly exceeds its marginal
    /// contribution (explains `basic = false`).
    pub non_basic_witness: Option<ConditionViolation>,
}

/// Checks `SW(a) ≥ Σ_i v_i(a)` and `v_i(a) ≥ SW(a) − SW(∅_i, a_{−i})` on
/// every `a ∈ A = Π_i A_i`.
pub fn check_valid_conditions(g: &GameDefinition, budget: &Budget) -> Result<ValidConditionsReport> {
    let n = g.players();
    let all: Vec<Vec<usize>> = (0..n).map(|i| g.all_actions(i)).collect();
    let radices: Vec<usize> = all.iter().map(Vec::len).collect();
    budget.require("valid-condition check (|A| profiles)", Odometer::count(&radices))?;
    let mut report = ValidConditionsReport {
        profiles_checked: 0,
        total_utility_ok: true,
        marginal_contribution_ok: true,
        valid: true,
        basic: true,
        violations: Vec::new(),
        non_basic_witness: None,
    };
    let mut odo = Odometer::new(radices);
    let mut a = vec![0; n];
    while let Some(pos) = odo.next_tuple() {
        for i in 0..n {
            a[i] = all[i][pos[i]];
        }
        report.profiles_checked += 1;
        let sw = g.sw(&a);
        let v = g.payoffs(&a)?;
        let total: f64 = v.iter().sum();
        if sw < total - EXACT_TOL {
            report.total_utility_ok = false;
            if report.violations.len() < 16 {
                report.violations.push(ConditionViolation {
                    condition: "total_utility".into(),
                    player: None,
                    profile: g.action_names(&a),
                    lhs: sw,
                    rhs: total,
                });
            }
        }
        for i in 0..n {
            let marginal = sw - g.sw_without(i, &a);
            if v[i] < marginal - EXACT_TOL {
                report.marginal_contribution_ok = false;
                if report.violations.len() < 16 {
                    report.violations.push(ConditionViolation {
                        condition: "marginal_contribution".into(),
                        player: Some(i),
                        profile: g.action_names(&a),
                        lhs: v[i],
                        rhs: marginal,
                    });
                }
            }
            if (v[i] - marginal).abs() > EXACT_TOL {
                report.basic = false;
                if report.non_basic_witness.is_none() && v[i] > marginal {
                    report.non_basic_witness = Some(ConditionViolation {
                        condition: "utility_exceeds_marginal".into(),
                        player: Some(i),
                        profile: g.action_names(&a),
                        lhs: v[i],
                        rhs: marginal,
                    });
                }
            }
        }
    }
    report.valid = report.total_utility_ok && report.marginal_contribution_ok;
    report.basic &= report.valid;
    Ok(report)
}
