use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// Tabular common prior over type profiles, stored as a sparse support list.
#[derive(Clone, Debug, PartialEq)]
pub struct Prior {
    type_counts: Vec<usize>,
    profiles: Vec<Vec<usize>>,
    probs: Vec<f64>,
    marginals: Vec<Vec<f64>>,
    index: HashMap<Vec<usize>, usize>,
}

/// Result of the product-distribution test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Independence {
    pub independent: bool,
    /// Marginals `ρ_i(θ_i)`, present when the prior factorizes.
    pub factors: Option<Vec<Vec<f64>>>,
    /// Largest `|ρ(θ) − Π_i ρ_i(θ_i)|` over all type profiles.
    pub max_deviation: f64,
}

impl Prior {
    /// `type_counts[i] = |Θ_i|`; `support` lists `(θ, ρ(θ))` with `θ` given
    /// as type indices.
    pub fn new(type_counts: Vec<usize>, support: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let n = type_counts.len();
        let mut index = HashMap::with_capacity(support.len());
        let mut marginals: Vec<Vec<f64>> = type_counts.iter().map(|&c| vec![0.0; c]).collect();
        let mut total = 0.0;
        let mut profiles = Vec::with_capacity(support.len());
        let mut probs = Vec::with_capacity(support.len());
        for (theta, p) in support {
            if theta.len() != n || theta.iter().zip(&type_counts).any(|(&t, &c)| t >= c) {
                return Err(Error::Invalid(format!("type profile {theta:?} is malformed")));
            }
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::Invalid(format!(
                    "type profile {theta:?} has probability {p}, outside (0,1]"
                )));
            }
            if index.insert(theta.clone(), profiles.len()).is_some() {
                return Err(Error::Invalid(format!("type profile {theta:?} listed twice")));
            }
            for (i, &t) in theta.iter().enumerate() {
                marginals[i][t] += p;
            }
            total += p;
            profiles.push(theta);
            probs.push(p);
        }
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::Invalid(format!("prior probabilities sum to {total}, not 1")));
        }
        for (i, m) in marginals.iter().enumerate() {
            if let Some(t) = m.iter().position(|&v| v == 0.0) {
                return Err(Error::Invalid(format!(
                    "type {t} of player {i} has zero marginal probability"
                )));
            }
        }
        Ok(Prior {
            type_counts,
            profiles,
            probs,
            marginals,
            index,
        })
    }

    /// Independent prior from per-player marginals (full product support,
    /// lexicographic order).
    pub fn product(marginals: &[Vec<f64>]) -> Result<Self> {
        let counts: Vec<usize> = marginals.iter().map(Vec::len).collect();
        let mut support = vec![(Vec::new(), 1.0)];
        for m in marginals {
            support = support
                .into_iter()
                .flat_map(|(theta, p): (Vec<usize>, f64)| {
                    m.iter().enumerate().map(move |(t, &q)| {
                        let mut th = theta.clone();
                        th.push(t);
                        (th, p * q)
                    })
                })
                .filter(|(_, p)| *p > 0.0)
                .collect();
        }
        Prior::new(counts, support)
    }

    pub fn players(&self) -> usize {
        self.type_counts.len()
    }

    pub fn type_counts(&self) -> &[usize] {
        &self.type_counts
    }

    /// Number of support profiles.
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn profiles(&self) -> &[Vec<usize>] {
        &self.profiles
    }

    pub fn profile(&self, k: usize) -> &[usize] {
        &self.profiles[k]
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.probs[k]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Support index of a type profile.
    pub fn index_of(&self, theta: &[usize]) -> Option<usize> {
        self.index.get(theta).copied()
    }

    /// `ρ(θ)`, zero off the support.
    pub fn prob_of(&self, theta: &[usize]) -> f64 {
        self.index_of(theta).map_or(0.0, |k| self.probs[k])
    }

    /// `ρ_i(θ_i)`.
    pub fn marginal(&self, player: usize, ty: usize) -> f64 {
        self.marginals[player][ty]
    }

    pub fn marginals(&self) -> &[Vec<f64>] {
        &self.marginals
    }

    /// `ρ|_{θ_i}` as `(support index, conditional probability)` pairs.
    pub fn conditional(&self, player: usize, ty: usize) -> Vec<(usize, f64)> {
        let m = self.marginals[player][ty];
        self.profiles
            .iter()
            .enumerate()
            .filter(|(_, th)| th[player] == ty)
            .map(|(k, _)| (k, self.probs[k] / m))
            .collect()
    }

    /// Tests `ρ(θ) = Π_i ρ_i(θ_i)` on every type profile, support or not.
    pub fn is_independent(&self) -> Independence {
        let total: u128 = self.type_counts.iter().map(|&c| c as u128).product();
        let mut max_dev: f64 = 0.0;
        for (theta, &p) in self.profiles.iter().zip(&self.probs) {
            let q: f64 = theta.iter().enumerate().map(|(i, &t)| self.marginals[i][t]).product();
            max_dev = max_dev.max((p - q).abs());
        }
        if (self.profiles.len() as u128) < total {
            // an off-support profile has ρ = 0 but a positive product
            let min_missing = min_missing_product(self);
            max_dev = max_dev.max(min_missing);
        }
        let independent = max_dev <= SUM_TOL;
        Independence {
            independent,
            factors: independent.then(|| self.marginals.clone()),
            max_deviation: max_dev,
        }
    }
}

/// Product of marginals at some off-support profile (any one is a
/// witness; all marginals are positive).
fn min_missing_product(prior: &Prior) -> f64 {
    let n = prior.players();
    let mut theta = vec![0usize; n];
    loop {
        if prior.index_of(&theta).is_none() {
            return theta.iter().enumerate().map(|(i, &t)| prior.marginals[i][t]).product();
        }
        let mut i = n;
        loop {
            if i == 0 {
                return 0.0;
            }
            i -= 1;
            theta[i] += 1;
            if theta[i] < prior.type_counts[i] {
                break;
            }
            theta[i] = 0;
        }
    }
}
