use super::build::SigmaLayout;
use super::eval::{support_by_type, Evaluator};
use crate::game::{GameDefinition, StrategyProfile};
use crate::{Budget, Result};

/// Improvement threshold below which a deviation does not count.
const IMPROVEMENT_TOL: f64 = 1e-9;

/// Every pure strategy profile at which no player gains more than `1e-9`
/// (ex ante) from a unilateral strategy change, with its expected welfare.
/// Profiles come out in index order.
pub fn enumerate_pure_bne(g: &GameDefinition, budget: &Budget) -> Result<Vec<(StrategyProfile, f64)>> {
    let count = g.strategy_profile_count();
    budget
        .require("pure BNE enumeration (strategy profiles × support)", count.saturating_mul(g.prior().len() as u128))
        .map_err(|e| e.with_hint("raise the enumeration budget"))?;
    let layout = SigmaLayout::new(g, &Budget {
        lp_variables: usize::MAX,
        ..*budget
    })?;
    let prior = g.prior();
    let by_type = support_by_type(g);
    let mut ev = Evaluator::new(g);
    let mut out = Vec::new();
    'profiles: for j in 0..layout.len() {
        let plays = &layout.plays[j];
        for i in 0..g.players() {
            let mut current = 0.0;
            for (k, a) in plays.iter().enumerate() {
                current += prior.prob(k) * ev.v(i, a)?;
            }
            let mut best = 0.0;
            for t in 0..g.type_count(i) {
                if by_type[i][t].is_empty() {
                    continue;
                }
                let mut top = f64::NEG_INFINITY;
                for &d in g.actions(i, t) {
                    let mut h = 0.0;
                    for &k in &by_type[i][t] {
                        h += prior.prob(k) * ev.v_dev(i, &plays[k], d)?;
                    }
                    top = top.max(h);
                }
                best += top;
            }
            if best - current > IMPROVEMENT_TOL {
                continue 'profiles;
            }
        }
        let mut welfare = 0.0;
        for (k, a) in plays.iter().enumerate() {
            welfare += prior.prob(k) * ev.sw(a)?;
        }
        out.push((layout.profile(g, j), welfare));
    }
    Ok(out)
}
