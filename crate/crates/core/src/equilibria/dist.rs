use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::game::{GameDefinition, StrategyProfile};
use crate::{Error, Result};

const SUM_TOL: f64 = 1e-9;

/// `π ∈ Π_θ Δ(A^θ)`, stored sparsely per type profile. Slices exist for
/// every support profile and optionally for off-support profiles (used by
/// misreport deviations).
#[derive(Clone, Debug, PartialEq)]
pub struct TypeDependentDistribution {
    slices: Vec<(Vec<usize>, Vec<(Vec<usize>, f64)>)>,
    index: HashMap<Vec<usize>, usize>,
}

impl TypeDependentDistribution {
    pub fn new(g: &GameDefinition, slices: Vec<(Vec<usize>, Vec<(Vec<usize>, f64)>)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(slices.len());
        for (k, (theta, entries)) in slices.iter().enumerate() {
            if index.insert(theta.clone(), k).is_some() {
                return Err(Error::Domain(format!("type profile {theta:?} has two slices")));
            }
            let mut total = 0.0;
            for (a, p) in entries {
                g.check_profile(theta, a)?;
                if !(*p >= -SUM_TOL) {
                    return Err(Error::Domain(format!("negative probability {p}")));
                }
                total += p;
            }
            if (total - 1.0).abs() > SUM_TOL {
                return Err(Error::Domain(format!("slice {theta:?} sums to {total}, not 1")));
            }
        }
        for theta in g.prior().profiles() {
            if !index.contains_key(theta) {
                return Err(Error::Domain(format!("no slice for support profile {theta:?}")));
            }
        }
        Ok(TypeDependentDistribution { slices, index })
    }

    pub fn slices(&self) -> &[(Vec<usize>, Vec<(Vec<usize>, f64)>)] {
        &self.slices
    }

    /// `π(θ)` if defined.
    pub fn slice(&self, theta: &[usize]) -> Option<&[(Vec<usize>, f64)]> {
        self.index.get(theta).map(|&k| self.slices[k].1.as_slice())
    }

    /// `E_θ E_{a∼π(θ)}[SW(a)]`.
    pub fn expected_welfare(&self, g: &GameDefinition) -> f64 {
        let prior = g.prior();
        (0..prior.len())
            .map(|k| {
                let slice = self.slice(prior.profile(k)).expect("validated on construction");
                prior.prob(k) * slice.iter().map(|(a, p)| p * g.sw(a)).sum::<f64>()
            })
            .sum()
    }

    pub fn to_json(&self, g: &GameDefinition) -> TypeDependentJson {
        TypeDependentJson {
            slices: self
                .slices
                .iter()
                .map(|(theta, entries)| SliceJson {
                    types: theta.iter().enumerate().map(|(i, &t)| g.type_name(i, t).to_string()).collect(),
                    probability: g.prior().prob_of(theta),
                    actions: entries
                        .iter()
                        .map(|(a, p)| WeightedProfileJson {
                            profile: g.action_names(a),
                            p: *p,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// `σ ∈ Δ(S)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyDistribution {
    entries: Vec<(StrategyProfile, f64)>,
}

impl StrategyDistribution {
    pub fn new(g: &GameDefinition, entries: Vec<(StrategyProfile, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for (s, p) in &entries {
            g.check_strategy(s)?;
            if !(*p >= -SUM_TOL) {
                return Err(Error::Domain(format!("negative probability {p}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::Domain(format!("strategy distribution sums to {total}, not 1")));
        }
        Ok(StrategyDistribution { entries })
    }

    pub fn point_mass(g: &GameDefinition, s: StrategyProfile) -> Result<Self> {
        StrategyDistribution::new(g, vec![(s, 1.0)])
    }

    pub fn entries(&self) -> &[(StrategyProfile, f64)] {
        &self.entries
    }

    /// `E_θ E_{s∼σ}[SW(s(θ))]`.
    pub fn expected_welfare(&self, g: &GameDefinition) -> f64 {
        self.entries.iter().map(|(s, p)| p * g.expected_welfare(s)).sum()
    }

    pub fn to_json(&self, g: &GameDefinition) -> StrategyDistributionJson {
        StrategyDistributionJson {
            strategies: self
                .entries
                .iter()
                .map(|(s, p)| WeightedStrategyJson {
                    strategy: s.named(g),
                    p: *p,
                })
                .collect(),
        }
    }
}

/// Support profiles plus every profile reachable from one by a single
/// player's misreport, support first.
pub fn misreport_closure(g: &GameDefinition) -> Vec<Vec<usize>> {
    let prior = g.prior();
    let mut out: Vec<Vec<usize>> = prior.profiles().to_vec();
    let mut seen: HashMap<Vec<usize>, ()> = out.iter().map(|t| (t.clone(), ())).collect();
    for theta in prior.profiles() {
        for i in 0..g.players() {
            for t in 0..g.type_count(i) {
                let mut th = theta.clone();
                th[i] = t;
                if seen.insert(th.clone(), ()).is_none() {
                    out.push(th);
                }
            }
        }
    }
    out
}

/// `π(θ)` = law of `s(θ)` for `s ∼ σ`, on the misreport closure of the
/// support.
pub fn strategy_to_type_dependent(g: &GameDefinition, sigma: &StrategyDistribution) -> TypeDependentDistribution {
    let slices = misreport_closure(g)
        .into_iter()
        .map(|theta| {
            let mut law: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
            for (s, p) in sigma.entries() {
                *law.entry(s.play(&theta)).or_default() += p;
            }
            (theta, law.into_iter().filter(|(_, p)| *p > 0.0).collect())
        })
        .collect();
    TypeDependentDistribution::new(g, slices).expect("pushforward of a valid strategy distribution")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedProfileJson {
    pub profile: Vec<String>,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceJson {
    pub types: Vec<String>,
    /// `ρ(θ)`; zero for off-support slices.
    pub probability: f64,
    pub actions: Vec<WeightedProfileJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeDependentJson {
    pub slices: Vec<SliceJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedStrategyJson {
    pub strategy: BTreeMap<String, BTreeMap<String, String>>,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyDistributionJson {
    pub strategies: Vec<WeightedStrategyJson>,
}
