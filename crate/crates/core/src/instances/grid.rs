use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::{coverage_json, null_ids};
use crate::game::{ActionSetSpec, GameDefinition, GameSpec, PriorProfileSpec, PriorSpec, UtilitySpec, SCHEMA_VERSION};
use crate::rng::{seeded, shard_seed, Prng};
use crate::submodular::Welford;
use crate::{Budget, Error, Result};

/// Largest raw draw count `k·n^k·n!` the exact constructor will enumerate.
pub const GRID_EXACT_DRAW_LIMIT: u128 = 2_000_000;

fn raw_draws(n: usize, k: usize) -> u128 {
    let nk = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    let fact = (1..=n as u128).try_fold(1u128, |acc, x| acc.checked_mul(x)).unwrap_or(u128::MAX);
    (k as u128).saturating_mul(nk).saturating_mul(fact)
}

fn type_name(l: &[usize]) -> String {
    let parts: Vec<String> = l.iter().map(usize::to_string).collect();
    format!("l{}", parts.join("_"))
}

fn decode(mut idx: usize, n: usize, k: usize) -> Vec<usize> {
    let mut l = vec![0; k];
    for c in (0..k).rev() {
        l[c] = idx % n;
        idx /= n;
    }
    l
}

fn encode(l: &[usize], n: usize) -> usize {
    l.iter().fold(0, |acc, &x| acc * n + x)
}

/// Correlated coverage game on `U = [k] × [n]` where every player's type is
/// a vector in `[n]^k`. A draw picks a coordinate `j`, a base vector and a
/// permutation; player `p` receives the base with coordinate `j` replaced
/// by the permutation's value at `p`. Action `h` of type `ℓ` covers
/// `(h, ℓ_h)`. Identical type profiles from different draws are merged.
pub fn grid_game(n: usize, k: usize, budget: &Budget) -> Result<GameDefinition> {
    if n < 2 || k == 0 {
        return Err(Error::Invalid("the grid game needs n ≥ 2 and k ≥ 1".into()));
    }
    let draws = raw_draws(n, k);
    if draws > GRID_EXACT_DRAW_LIMIT {
        return Err(Error::budget("grid game prior (k·n^k·n! draws)", draws, GRID_EXACT_DRAW_LIMIT)
            .with_hint("use GridSampler"));
    }
    budget.require("grid game prior (k·n^k·n! draws)", draws)?;
    let types_per_player = n.pow(k as u32);
    let players: Vec<String> = (0..n).map(|p| format!("p{p}")).collect();
    let type_names: Vec<String> = (0..types_per_player).map(|t| type_name(&decode(t, n, k))).collect();
    let universe: Vec<String> = (0..k).flat_map(|h| (0..n).map(move |x| format!("({h},{x})"))).collect();

    let mut ground = Vec::new();
    let mut covers = BTreeMap::new();
    let mut actions = Vec::new();
    for p in &players {
        for (t, name) in type_names.iter().enumerate() {
            let l = decode(t, n, k);
            let ids: Vec<String> = (0..k).map(|h| format!("{p}:{name}:v{h}")).collect();
            for (h, id) in ids.iter().enumerate() {
                covers.insert(id.clone(), vec![format!("({h},{})", l[h])]);
            }
            ground.extend(ids.iter().cloned());
            actions.push(ActionSetSpec {
                player: p.clone(),
                ty: name.clone(),
                ids,
            });
        }
    }
    let nulls = null_ids(&players);
    ground.extend(nulls.iter().cloned());

    let perms = permutations(n);
    let p_draw = 1.0 / draws as f64;
    let mut mass: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for j in 0..k {
        for base in 0..types_per_player {
            let mut l = decode(base, n, k);
            for perm in &perms {
                let theta: Vec<usize> = perm
                    .iter()
                    .map(|&v| {
                        l[j] = v;
                        encode(&l, n)
                    })
                    .collect();
                *mass.entry(theta).or_default() += p_draw;
            }
        }
    }
    let prior = PriorSpec {
        profiles: mass
            .into_iter()
            .map(|(theta, p)| PriorProfileSpec {
                types: theta.iter().map(|&t| type_names[t].clone()).collect(),
                p,
            })
            .collect(),
    };
    let spec = GameSpec {
        schema_version: SCHEMA_VERSION,
        name: Some(format!("grid(n={n}, k={k})")),
        recipe: Some(serde_json::json!({"recipe": "grid", "n": n, "k": k, "raw_draws": draws as u64})),
        players,
        types: vec![type_names; n],
        prior,
        actions,
        null_actions: nulls,
        welfare: coverage_json(ground, universe, vec![1.0; k * n], covers),
        utilities: UtilitySpec::EqualShareCoverage,
    };
    GameDefinition::from_spec(spec, budget)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            let swap = if k % 2 == 0 { i } else { 0 };
            cur.swap(swap, k - 1);
        }
    }
    heap(n, &mut cur, &mut out);
    out
}

/// Implicit version of [`grid_game`] for sizes whose prior cannot be listed.
/// Strategies are tables `s[p][type index] = action index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GridSampler {
    pub n: usize,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridProfileEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl GridSampler {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 2 || k == 0 || (n as u128).checked_pow(k as u32).is_none_or(|v| v > 1 << 24) {
            return Err(Error::Invalid(format!("grid sampler needs n ≥ 2, k ≥ 1 and n^k ≤ 2^24, got n={n}, k={k}")));
        }
        Ok(GridSampler { n, k })
    }

    pub fn types_per_player(&self) -> usize {
        self.n.pow(self.k as u32)
    }

    /// The proof's ceiling `n/k + k` on any strategy profile's welfare.
    pub fn strategy_bound(&self) -> f64 {
        self.n as f64 / self.k as f64 + self.k as f64
    }

    /// One draw of the type profile, as type indices.
    pub fn draw_types(&self, rng: &mut Prng) -> Vec<usize> {
        let (n, k) = (self.n, self.k);
        let j = rng.random_range(0..k);
        let mut l: Vec<usize> = (0..k).map(|_| rng.random_range(0..n)).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        perm.iter()
            .map(|&v| {
                l[j] = v;
                encode(&l, n)
            })
            .collect()
    }

    pub fn random_strategy(&self, rng: &mut Prng) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|_| (0..self.types_per_player()).map(|_| rng.random_range(0..self.k) as u8).collect())
            .collect()
    }

    /// Welfare of a pure profile at a type profile: distinct covered cells.
    pub fn welfare(&self, strategy: &[Vec<u8>], types: &[usize]) -> f64 {
        let mut covered: Vec<(usize, usize)> = types
            .iter()
            .enumerate()
            .map(|(p, &t)| {
                let h = strategy[p][t] as usize;
                (h, decode(t, self.n, self.k)[h])
            })
            .collect();
        covered.sort_unstable();
        covered.dedup();
        covered.len() as f64
    }

    pub fn estimate(&self, strategy: &[Vec<u8>], samples: u64, seed: u64) -> GridProfileEstimate {
        let mut rng = seeded(seed);
        let mut stats = Welford::default();
        for _ in 0..samples {
            let types = self.draw_types(&mut rng);
            stats.push(self.welfare(strategy, &types));
        }
        GridProfileEstimate {
            estimate: stats.mean,
            stderr: stats.stderr(),
            samples,
            seed,
        }
    }

    /// `profiles` seeded random strategy profiles, each estimated with
    /// `samples` draws.
    pub fn random_profile_estimates(&self, profiles: u64, samples: u64, seed: u64) -> Vec<GridProfileEstimate> {
        (0..profiles)
            .map(|r| {
                let mut rng = seeded(shard_seed(seed, 2 * r));
                let s = self.random_strategy(&mut rng);
                self.estimate(&s, samples, shard_seed(seed, 2 * r + 1))
            })
            .collect()
    }
}
