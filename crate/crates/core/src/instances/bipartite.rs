use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::{coverage_json, null_ids, uniform_product_prior};
use crate::game::{ActionSetSpec, GameDefinition, GameSpec, PriorProfileSpec, PriorSpec, UtilitySpec, SCHEMA_VERSION};
use crate::rng::{seeded, shard_seed, PRNG_NAME};
use crate::submodular::Welford;
use crate::{Budget, Error, Result};

/// Size of a maximum matching between players and universe elements, where
/// player `i` may be matched to any element of `sets[i]` (augmenting paths).
pub fn max_matching(sets: &[&[usize]], universe: usize) -> usize {
    fn augment(i: usize, sets: &[&[usize]], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &u in sets[i] {
            if seen[u] {
                continue;
            }
            seen[u] = true;
            if owner[u].is_none_or(|j| augment(j, sets, seen, owner)) {
                owner[u] = Some(i);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; universe];
    let mut size = 0;
    for i in 0..sets.len() {
        let mut seen = vec![false; universe];
        if augment(i, sets, &mut seen, &mut owner) {
            size += 1;
        }
    }
    size
}

/// Independent-prior coverage game on `n` unit-weight elements where each
/// player's type is a random subset of the universe (each element with
/// probability `p`) and the action set is that subset. The full type space
/// is replaced by `draws` seeded realizations per player, each equally
/// likely, independently across players.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BipartiteSurrogate {
    pub n: usize,
    pub draws: usize,
    pub edge_probability: f64,
    pub seed: u64,
    /// `sets[i][t]`: elements player `i` can cover under type `t`.
    pub sets: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurrogateGapReport {
    /// Monte Carlo `E_θ[max matching]`.
    pub opt_estimate: f64,
    pub opt_stderr: f64,
    pub opt_samples: u64,
    /// Exact welfare of the best locally optimal strategy profile found.
    pub str_local: f64,
    /// `str_local / opt_estimate`; trend-level only.
    pub gap_proxy: f64,
    pub seed: u64,
    pub prng: String,
}

impl BipartiteSurrogate {
    /// Edge probability `min(1, 2 ln n / n)`.
    pub fn new(n: usize, draws: usize, seed: u64) -> Result<Self> {
        let p = if n <= 1 { 1.0 } else { (2.0 * (n as f64).ln() / n as f64).min(1.0) };
        BipartiteSurrogate::with_probability(n, draws, p, seed)
    }

    pub fn with_probability(n: usize, draws: usize, p: f64, seed: u64) -> Result<Self> {
        if n == 0 || draws == 0 || !(0.0..=1.0).contains(&p) {
            return Err(Error::Invalid("bipartite surrogate needs n ≥ 1, draws ≥ 1 and p ∈ [0, 1]".into()));
        }
        let sets = (0..n)
            .map(|i| {
                let mut rng = seeded(shard_seed(seed, i as u64));
                (0..draws)
                    .map(|_| (0..n).filter(|_| p >= 1.0 || rng.random::<f64>() < p).collect())
                    .collect()
            })
            .collect();
        Ok(BipartiteSurrogate {
            n,
            draws,
            edge_probability: p,
            seed,
            sets,
        })
    }

    /// Exact expected welfare of a strategy profile (`s[i][t]` is an element
    /// of `sets[i][t]`, or `None` when the set is empty): every element is
    /// covered with probability `1 − Π_i (1 − q_i(u))`, where `q_i(u)` is the
    /// share of player `i`'s types that pick `u`.
    pub fn strategy_welfare(&self, s: &[Vec<Option<usize>>]) -> f64 {
        let q = self.shares(s);
        (0..self.n)
            .map(|u| 1.0 - q.iter().map(|qi| 1.0 - qi[u]).product::<f64>())
            .sum()
    }

    fn shares(&self, s: &[Vec<Option<usize>>]) -> Vec<Vec<f64>> {
        let step = 1.0 / self.draws as f64;
        s.iter()
            .map(|si| {
                let mut q = vec![0.0; self.n];
                for u in si.iter().flatten() {
                    q[*u] += step;
                }
                q
            })
            .collect()
    }

    /// Coordinate ascent on the exact welfare from `restarts + 1` starts.
    /// Moving one type's choice from `u` to `u'` changes welfare by
    /// `(O(u') − O(u))/m` with `O(u) = Π_{j≠i} (1 − q_j(u))`, so each cell
    /// moves to the element least covered by the others.
    pub fn str_local(&self, restarts: u32, seed: u64) -> (f64, Vec<Vec<Option<usize>>>) {
        let mut best: Option<(f64, Vec<Vec<Option<usize>>>)> = None;
        for r in 0..=restarts {
            let mut rng = seeded(shard_seed(seed, r as u64));
            let mut s: Vec<Vec<Option<usize>>> = self
                .sets
                .iter()
                .map(|si| {
                    si.iter()
                        .map(|set| match set.len() {
                            0 => None,
                            _ if r == 0 => Some(set[0]),
                            len => Some(set[rng.random_range(0..len)]),
                        })
                        .collect()
                })
                .collect();
            let mut q = self.shares(&s);
            let step = 1.0 / self.draws as f64;
            loop {
                let mut improved = false;
                for i in 0..self.n {
                    let others: Vec<f64> = (0..self.n)
                        .map(|u| (0..self.n).filter(|&j| j != i).map(|j| 1.0 - q[j][u]).product())
                        .collect();
                    for t in 0..self.draws {
                        let Some(cur) = s[i][t] else { continue };
                        let mut top = cur;
                        for &u in &self.sets[i][t] {
                            if others[u] > others[top] + 1e-12 {
                                top = u;
                            }
                        }
                        if top != cur {
                            s[i][t] = Some(top);
                            q[i][cur] -= step;
                            q[i][top] += step;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
            let value = self.strategy_welfare(&s);
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, s));
            }
        }
        best.expect("at least one start")
    }

    /// Monte Carlo `E_θ[OPT(θ)]`: each sample draws every player's type
    /// uniformly and solves the matching.
    pub fn opt_sampled(&self, samples: u64, seed: u64) -> (f64, f64) {
        let mut rng = seeded(seed);
        let mut stats = Welford::default();
        for _ in 0..samples {
            let picked: Vec<&[usize]> = self.sets.iter().map(|si| si[rng.random_range(0..self.draws)].as_slice()).collect();
            stats.push(max_matching(&picked, self.n) as f64);
        }
        (stats.mean, stats.stderr())
    }

    pub fn gap_proxy(&self, opt_samples: u64, restarts: u32, seed: u64) -> SurrogateGapReport {
        let (opt_estimate, opt_stderr) = self.opt_sampled(opt_samples, shard_seed(seed, 1));
        let (str_local, _) = self.str_local(restarts, shard_seed(seed, 2));
        SurrogateGapReport {
            opt_estimate,
            opt_stderr,
            opt_samples,
            str_local,
            gap_proxy: str_local / opt_estimate,
            seed,
            prng: PRNG_NAME.to_string(),
        }
    }

    fn spec(&self, prior: impl FnOnce(&[Vec<String>]) -> PriorSpec, label: &str) -> GameSpec {
        let players: Vec<String> = (0..self.n).map(|i| format!("p{i}")).collect();
        let types: Vec<Vec<String>> = vec![(0..self.draws).map(|t| format!("t{t}")).collect(); self.n];
        let universe: Vec<String> = (0..self.n).map(|u| format!("u{u}")).collect();
        let mut ground = Vec::new();
        let mut covers = BTreeMap::new();
        let mut actions = Vec::new();
        for (i, p) in players.iter().enumerate() {
            for t in 0..self.draws {
                let set = &self.sets[i][t];
                let ids: Vec<String> = if set.is_empty() {
                    vec![format!("{p}:t{t}:idle")]
                } else {
                    set.iter()
                        .map(|&u| {
                            let id = format!("{p}:t{t}:u{u}");
                            covers.insert(id.clone(), vec![universe[u].clone()]);
                            id
                        })
                        .collect()
                };
                ground.extend(ids.iter().cloned());
                actions.push(ActionSetSpec {
                    player: p.clone(),
                    ty: format!("t{t}"),
                    ids,
                });
            }
        }
        let nulls = null_ids(&players);
        ground.extend(nulls.iter().cloned());
        GameSpec {
            schema_version: SCHEMA_VERSION,
            name: Some(format!("bipartite(n={}, draws={}, {label})", self.n, self.draws)),
            recipe: Some(serde_json::json!({
                "recipe": "bipartite", "n": self.n, "draws": self.draws, "seed": self.seed,
                "edge_probability": self.edge_probability, "prior": label,
            })),
            prior: prior(&types),
            players,
            types,
            actions,
            null_actions: nulls,
            welfare: coverage_json(ground, universe, vec![1.0; self.n], covers),
            utilities: UtilitySpec::EqualShareCoverage,
        }
    }

    /// The surrogate as a tabular game with its independent uniform prior;
    /// needs `draws^n` support profiles within budget.
    pub fn game(&self, budget: &Budget) -> Result<GameDefinition> {
        let support = (self.draws as u128).checked_pow(self.n as u32).unwrap_or(u128::MAX);
        budget
            .require("bipartite surrogate prior (draws^n profiles)", support)
            .map_err(|e| e.with_hint("use structural_game for validation and the surrogate methods for welfare"))?;
        GameDefinition::from_spec(self.spec(uniform_product_prior, "product"), budget)
    }

    /// Same players, types, actions and welfare, with the diagonal coupling
    /// `θ = (t, …, t)` as prior. The marginals match the product prior, so
    /// every structural check applies; welfare numbers do not.
    pub fn structural_game(&self, budget: &Budget) -> Result<GameDefinition> {
        let m = self.draws;
        let diagonal = |types: &[Vec<String>]| PriorSpec {
            profiles: (0..m)
                .map(|t| PriorProfileSpec {
                    types: types.iter().map(|ts| ts[t].clone()).collect(),
                    p: 1.0 / m as f64,
                })
                .collect(),
        };
        GameDefinition::from_spec(self.spec(diagonal, "diagonal"), budget)
    }
}
