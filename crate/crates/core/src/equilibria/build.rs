use std::collections::HashMap;

use super::dist::misreport_closure;
use super::eval::{merge_terms, support_by_type, Evaluator};
use super::lp::{Cmp, LinearProgram};
use super::{ConceptDomain, ConceptId, Sense};
use crate::game::{GameDefinition, StrategyProfile};
use crate::{Budget, Error, Result};

/// One `π(θ)` block of the variable vector.
pub(crate) struct PiSlice {
    pub theta: Vec<usize>,
    /// `ρ(θ)`, zero for off-support slices.
    pub weight: f64,
    pub profiles: Vec<Vec<usize>>,
    pub offset: usize,
}

pub(crate) struct PiLayout {
    pub slices: Vec<PiSlice>,
    pub index: HashMap<Vec<usize>, usize>,
}

impl PiLayout {
    fn new(g: &GameDefinition, thetas: Vec<Vec<usize>>, budget: &Budget) -> Result<Self> {
        let total: u128 = thetas.iter().map(|t| g.profile_count(t)).fold(0u128, u128::saturating_add);
        require_vars(budget, "type-dependent distribution (Σ_θ |A^θ| variables)", total)?;
        let mut slices = Vec::with_capacity(thetas.len());
        let mut index = HashMap::with_capacity(thetas.len());
        let mut offset = 0;
        for theta in thetas {
            let profiles = g.profiles(&theta);
            index.insert(theta.clone(), slices.len());
            let n = profiles.len();
            slices.push(PiSlice {
                weight: g.prior().prob_of(&theta),
                theta,
                profiles,
                offset,
            });
            offset += n;
        }
        Ok(PiLayout { slices, index })
    }
}

/// `σ ∈ Δ(S)` indexed by mixed radix over `(|S_1|, …, |S_n|)`, player 0 most
/// significant.
pub(crate) struct SigmaLayout {
    pub radices: Vec<usize>,
    /// `plays[j][k] = s^j(θ^k)` for support profile `k`.
    pub plays: Vec<Vec<Vec<usize>>>,
}

impl SigmaLayout {
    pub(crate) fn new(g: &GameDefinition, budget: &Budget) -> Result<Self> {
        let count = g.strategy_profile_count();
        require_vars(budget, "strategy distribution (Π_i |S_i| variables)", count)?;
        budget.require("strategy profiles × support type profiles", count.saturating_mul(g.prior().len() as u128))?;
        let radices: Vec<usize> = (0..g.players()).map(|i| g.strategy_count(i) as usize).collect();
        let prior = g.prior();
        let plays = (0..count as usize)
            .map(|j| {
                let s = profile_of(g, &radices, j);
                (0..prior.len()).map(|k| s.play(prior.profile(k))).collect()
            })
            .collect();
        Ok(SigmaLayout { radices, plays })
    }

    pub fn len(&self) -> usize {
        self.plays.len()
    }

    /// Index of player `i`'s strategy within joint index `j`.
    pub fn digit(&self, j: usize, i: usize) -> usize {
        let below: usize = self.radices[i + 1..].iter().product();
        (j / below) % self.radices[i]
    }

    pub fn profile(&self, g: &GameDefinition, j: usize) -> StrategyProfile {
        profile_of(g, &self.radices, j)
    }
}

fn profile_of(g: &GameDefinition, radices: &[usize], mut j: usize) -> StrategyProfile {
    let mut digits = vec![0; radices.len()];
    for i in (0..radices.len()).rev() {
        digits[i] = j % radices[i];
        j /= radices[i];
    }
    StrategyProfile {
        actions: digits.iter().enumerate().map(|(i, &d)| g.strategy(i, d as u64)).collect(),
    }
}

fn require_vars(budget: &Budget, what: &str, required: u128) -> Result<()> {
    if required > budget.lp_variables as u128 {
        Err(Error::budget(what, required, budget.lp_variables as u128).with_hint("raise the LP budget"))
    } else {
        Ok(())
    }
}

pub(crate) enum Layout {
    Pi(PiLayout),
    Sigma(SigmaLayout),
}

pub(crate) struct Built {
    pub lp: LinearProgram,
    pub layout: Layout,
}

/// The welfare-optimization LP for a convex concept.
pub fn build_lp(g: &GameDefinition, concept: ConceptId, sense: Sense, budget: &Budget) -> Result<LinearProgram> {
    Ok(build(g, concept, sense, budget)?.lp)
}

pub(crate) fn build(g: &GameDefinition, concept: ConceptId, sense: Sense, budget: &Budget) -> Result<Built> {
    if concept == ConceptId::BnePure {
        return Err(Error::Invalid("pure Bayes–Nash equilibria are enumerated, not linear-programmed".into()));
    }
    match concept.domain() {
        ConceptDomain::TypeDependent => build_pi(g, concept, sense, budget),
        ConceptDomain::Strategy => build_sigma(g, concept, sense, budget),
    }
}

fn build_pi(g: &GameDefinition, concept: ConceptId, sense: Sense, budget: &Budget) -> Result<Built> {
    let thetas = if concept == ConceptId::ComEq {
        misreport_closure(g)
    } else {
        g.prior().profiles().to_vec()
    };
    let layout = PiLayout::new(g, thetas, budget)?;
    let mut ev = Evaluator::new(g);
    let mut lp = LinearProgram::new(format!("{concept} {sense} welfare"), sense);
    for (s, slice) in layout.slices.iter().enumerate() {
        for (j, a) in slice.profiles.iter().enumerate() {
            lp.add_var(format!("pi[{s}][{j}]"), 0.0, 1.0, slice.weight * ev.sw(a)?);
        }
        let terms = (0..slice.profiles.len()).map(|j| (slice.offset + j, 1.0)).collect();
        lp.add_row(format!("simplex[{s}]"), terms, Cmp::Eq, 1.0);
    }
    let by_type = support_by_type(g);
    let prior = g.prior();
    // Support slice of prior index k is slice k: both list support first.
    let n = g.players();

    // Σ_{k: θ^k_i = t} ρ_k Σ_{a: a_i = rec} π_k(a) (v_i(a) − v_i(d, a_{−i})), with
    // `rec = None` meaning every recommendation.
    let swap_terms = |ev: &mut Evaluator, i: usize, t: usize, rec: Option<usize>, d: usize| -> Result<Vec<(usize, f64)>> {
        let mut terms = Vec::new();
        for &k in &by_type[i][t] {
            let slice = &layout.slices[k];
            for (j, a) in slice.profiles.iter().enumerate() {
                if rec.is_some_and(|r| a[i] != r) {
                    continue;
                }
                let c = prior.prob(k) * (ev.v(i, a)? - ev.v_dev(i, a, d)?);
                terms.push((slice.offset + j, c));
            }
        }
        Ok(terms)
    };

    match concept {
        ConceptId::Bs | ConceptId::ComEq => {
            for i in 0..n {
                for t in 0..g.type_count(i) {
                    for &a in g.actions(i, t) {
                        for &d in g.actions(i, t) {
                            if d == a {
                                continue;
                            }
                            let terms = swap_terms(&mut ev, i, t, Some(a), d)?;
                            lp.add_row(format!("bs[{i}][{t}][{a}][{d}]"), terms, Cmp::Ge, 0.0);
                        }
                    }
                }
            }
            if concept == ConceptId::ComEq {
                add_misreport_rows(&mut lp, &mut ev, &layout, &by_type)?;
            }
        }
        ConceptId::Anfcbs => {
            for i in 0..n {
                for t in 0..g.type_count(i) {
                    for &d in g.actions(i, t) {
                        let terms = swap_terms(&mut ev, i, t, None, d)?;
                        lp.add_row(format!("anfcbs[{i}][{t}][{d}]"), terms, Cmp::Ge, 0.0);
                    }
                }
            }
        }
        ConceptId::Sfcbs => {
            for i in 0..n {
                let mut total = Vec::new();
                for t in 0..g.type_count(i) {
                    if by_type[i][t].is_empty() {
                        continue;
                    }
                    let z = lp.add_var(format!("z[{i}][{t}]"), f64::NEG_INFINITY, f64::INFINITY, 0.0);
                    total.push((z, -1.0));
                    for &d in g.actions(i, t) {
                        let mut terms = vec![(z, 1.0)];
                        for &k in &by_type[i][t] {
                            let slice = &layout.slices[k];
                            for (j, a) in slice.profiles.iter().enumerate() {
                                terms.push((slice.offset + j, -prior.prob(k) * ev.v_dev(i, a, d)?));
                            }
                        }
                        lp.add_row(format!("sfcbs_epi[{i}][{t}][{d}]"), terms, Cmp::Ge, 0.0);
                    }
                }
                for k in 0..prior.len() {
                    let slice = &layout.slices[k];
                    for (j, a) in slice.profiles.iter().enumerate() {
                        total.push((slice.offset + j, prior.prob(k) * ev.v(i, a)?));
                    }
                }
                lp.add_row(format!("sfcbs[{i}]"), total, Cmp::Ge, 0.0);
            }
        }
        _ => unreachable!("strategy-domain concepts go through build_sigma"),
    }
    Ok(Built {
        lp,
        layout: Layout::Pi(layout),
    })
}

/// Misreport family: for each `(i, θ_i, θ'_i ≠ θ_i)`, auxiliaries
/// `z_a ≥ Σ ρ(θ) π(θ'_i, θ_{−i})(a, a_{−i}) v_i(d, a_{−i})` for every
/// `d ∈ A_i^{θ_i}`, and truthful payoff `≥ Σ_{a ∈ A_i^{θ'_i}} z_a`.
fn add_misreport_rows(
    lp: &mut LinearProgram,
    ev: &mut Evaluator,
    layout: &PiLayout,
    by_type: &[Vec<Vec<usize>>],
) -> Result<()> {
    let g = ev.game();
    let prior = g.prior();
    for i in 0..g.players() {
        for t in 0..g.type_count(i) {
            if by_type[i][t].is_empty() {
                continue;
            }
            let mut truthful = Vec::new();
            for &k in &by_type[i][t] {
                let slice = &layout.slices[k];
                for (j, a) in slice.profiles.iter().enumerate() {
                    truthful.push((slice.offset + j, prior.prob(k) * ev.v(i, a)?));
                }
            }
            for r in 0..g.type_count(i) {
                if r == t {
                    continue;
                }
                let mut row = truthful.clone();
                for &rec in g.actions(i, r) {
                    let z = lp.add_var(format!("z[{i}][{t}][{r}][{rec}]"), f64::NEG_INFINITY, f64::INFINITY, 0.0);
                    row.push((z, -1.0));
                    for &d in g.actions(i, t) {
                        let mut terms = vec![(z, 1.0)];
                        for &k in &by_type[i][t] {
                            let mut reported = prior.profile(k).to_vec();
                            reported[i] = r;
                            let slice = &layout.slices[layout.index[&reported]];
                            for (j, a) in slice.profiles.iter().enumerate() {
                                if a[i] == rec {
                                    terms.push((slice.offset + j, -prior.prob(k) * ev.v_dev(i, a, d)?));
                                }
                            }
                        }
                        lp.add_row(
                            format!("comeq_epi[{i}][{t}][{r}][{rec}][{d}]"),
                            merge_terms(terms),
                            Cmp::Ge,
                            0.0,
                        );
                    }
                }
                lp.add_row(format!("comeq[{i}][{t}][{r}]"), row, Cmp::Ge, 0.0);
            }
        }
    }
    Ok(())
}

fn build_sigma(g: &GameDefinition, concept: ConceptId, sense: Sense, budget: &Budget) -> Result<Built> {
    let layout = SigmaLayout::new(g, budget)?;
    let prior = g.prior();
    let n = g.players();
    let by_type = support_by_type(g);
    let mut ev = Evaluator::new(g);
    let mut lp = LinearProgram::new(format!("{concept} {sense} welfare"), sense);
    for j in 0..layout.len() {
        let mut w = 0.0;
        for k in 0..prior.len() {
            w += prior.prob(k) * ev.sw(&layout.plays[j][k])?;
        }
        lp.add_var(format!("sigma[{j}]"), 0.0, 1.0, w);
    }
    lp.add_row("simplex", (0..layout.len()).map(|j| (j, 1.0)).collect(), Cmp::Eq, 1.0);

    // Coefficient of σ_j in Σ_{k: θ^k_i = t} ρ_k (v_i(s(θ)) − v_i(d, s_{−i}(θ_{−i}))).
    let gain_coef = |ev: &mut Evaluator, j: usize, i: usize, t: usize, d: usize| -> Result<f64> {
        let mut c = 0.0;
        for &k in &by_type[i][t] {
            let a = &layout.plays[j][k];
            c += prior.prob(k) * (ev.v(i, a)? - ev.v_dev(i, a, d)?);
        }
        Ok(c)
    };
    let dev_coef = |ev: &mut Evaluator, j: usize, i: usize, t: usize, d: usize| -> Result<f64> {
        let mut c = 0.0;
        for &k in &by_type[i][t] {
            c += prior.prob(k) * ev.v_dev(i, &layout.plays[j][k], d)?;
        }
        Ok(c)
    };
    let own_coef = |ev: &mut Evaluator, j: usize, i: usize| -> Result<f64> {
        let mut c = 0.0;
        for k in 0..prior.len() {
            c += prior.prob(k) * ev.v(i, &layout.plays[j][k])?;
        }
        Ok(c)
    };

    match concept {
        ConceptId::Anfce => {
            for i in 0..n {
                for t in 0..g.type_count(i) {
                    if by_type[i][t].is_empty() {
                        continue;
                    }
                    for &a in g.actions(i, t) {
                        let members: Vec<usize> = (0..layout.len())
                            .filter(|&j| layout.plays[j][by_type[i][t][0]][i] == a)
                            .collect();
                        for &d in g.actions(i, t) {
                            if d == a {
                                continue;
                            }
                            let mut terms = Vec::with_capacity(members.len());
                            for &j in &members {
                                terms.push((j, gain_coef(&mut ev, j, i, t, d)?));
                            }
                            lp.add_row(format!("anfce[{i}][{t}][{a}][{d}]"), terms, Cmp::Ge, 0.0);
                        }
                    }
                }
            }
        }
        ConceptId::Anfcce => {
            for i in 0..n {
                for t in 0..g.type_count(i) {
                    for &d in g.actions(i, t) {
                        let mut terms = Vec::new();
                        for j in 0..layout.len() {
                            terms.push((j, gain_coef(&mut ev, j, i, t, d)?));
                        }
                        lp.add_row(format!("anfcce[{i}][{t}][{d}]"), terms, Cmp::Ge, 0.0);
                    }
                }
            }
        }
        ConceptId::Sfcce | ConceptId::Sfce => {
            for i in 0..n {
                // SFCCE: one group holding every σ_j. SFCE: one group per
                // recommended strategy of player i.
                let groups: Vec<(String, Vec<usize>)> = if concept == ConceptId::Sfcce {
                    vec![(format!("{i}"), (0..layout.len()).collect())]
                } else {
                    (0..layout.radices[i])
                        .map(|r| (format!("{i}][{r}"), (0..layout.len()).filter(|&j| layout.digit(j, i) == r).collect()))
                        .collect()
                };
                let tag = if concept == ConceptId::Sfcce { "sfcce" } else { "sfce" };
                for (label, members) in groups {
                    let mut total = Vec::new();
                    for t in 0..g.type_count(i) {
                        if by_type[i][t].is_empty() {
                            continue;
                        }
                        let z = lp.add_var(format!("z[{label}][{t}]"), f64::NEG_INFINITY, f64::INFINITY, 0.0);
                        total.push((z, -1.0));
                        for &d in g.actions(i, t) {
                            let mut terms = vec![(z, 1.0)];
                            for &j in &members {
                                terms.push((j, -dev_coef(&mut ev, j, i, t, d)?));
                            }
                            lp.add_row(format!("{tag}_epi[{label}][{t}][{d}]"), terms, Cmp::Ge, 0.0);
                        }
                    }
                    for &j in &members {
                        total.push((j, own_coef(&mut ev, j, i)?));
                    }
                    lp.add_row(format!("{tag}[{label}]"), total, Cmp::Ge, 0.0);
                }
            }
        }
        _ => unreachable!("type-dependent concepts go through build_pi"),
    }
    Ok(Built {
        lp,
        layout: Layout::Sigma(layout),
    })
}
