use serde::Serialize;

use crate::game::GameDefinition;
use crate::{Budget, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimalProfile {
    pub theta: Vec<usize>,
    /// `a^θ`, the first maximizer in lexicographic action order.
    pub profile: Vec<usize>,
    pub welfare: f64,
}

/// One argmax per support type profile, in prior order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimalProfileCertificate {
    /// `OPT = Σ_θ ρ(θ) SW(a^θ)`.
    pub value: f64,
    pub profiles: Vec<OptimalProfile>,
}

impl OptimalProfileCertificate {
    /// `a^θ` for support profile index `k`.
    pub fn profile(&self, k: usize) -> &[usize] {
        &self.profiles[k].profile
    }
}

/// `OPT = E_θ[max_{a ∈ A^θ} SW(a)]` by per-profile enumeration.
pub fn compute_opt(g: &GameDefinition, budget: &Budget) -> Result<OptimalProfileCertificate> {
    let prior = g.prior();
    let total = prior
        .profiles()
        .iter()
        .map(|t| g.profile_count(t))
        .fold(0u128, u128::saturating_add);
    budget.require("optimal welfare (Σ_θ |A^θ| profiles)", total)?;
    let mut value = 0.0;
    let mut profiles = Vec::with_capacity(prior.len());
    for k in 0..prior.len() {
        let theta = prior.profile(k);
        let mut best: Option<(Vec<usize>, f64)> = None;
        for a in g.profiles(theta) {
            let w = g.sw(&a);
            if best.as_ref().is_none_or(|(_, b)| w > *b) {
                best = Some((a, w));
            }
        }
        let (profile, welfare) = best.expect("action sets are nonempty");
        value += prior.prob(k) * welfare;
        profiles.push(OptimalProfile {
            theta: theta.to_vec(),
            profile,
            welfare,
        });
    }
    Ok(OptimalProfileCertificate { value, profiles })
}
