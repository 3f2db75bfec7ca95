use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{coverage_json, null_ids, product_prior};
use crate::game::{ActionSetSpec, GameDefinition, GameSpec, Odometer, PriorProfileSpec, PriorSpec, UtilitySpec, SCHEMA_VERSION};
use crate::rng::{seeded, shard_seed};
use crate::{Budget, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorKind {
    /// Product of random positive marginals.
    Independent,
    /// Random positive mass on every type profile.
    Correlated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityKind {
    Basic,
    EqualShare,
}

/// Parameters of a seeded random coverage game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomGameSpec {
    pub players: usize,
    pub types: usize,
    /// Actions per `(player, type)`.
    pub actions: usize,
    pub universe: usize,
    pub prior: PriorKind,
    pub utility: UtilityKind,
    pub seed: u64,
}

impl Default for RandomGameSpec {
    fn default() -> Self {
        RandomGameSpec {
            players: 2,
            types: 2,
            actions: 2,
            universe: 4,
            prior: PriorKind::Independent,
            utility: UtilityKind::Basic,
            seed: 0,
        }
    }
}

/// Each action covers every universe element independently with probability
/// 0.4 (at least one), and weights are uniform on `[0.1, 1]`.
pub fn make_random_game(spec: &RandomGameSpec, budget: &Budget) -> Result<GameDefinition> {
    let RandomGameSpec {
        players: n,
        types: m,
        actions: k,
        universe,
        ..
    } = *spec;
    if n == 0 || m == 0 || k == 0 || universe == 0 {
        return Err(Error::Invalid("random games need positive sizes".into()));
    }
    let support = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    budget.require("random game prior (|Θ_i|^n profiles)", support)?;
    let mut rng = seeded(shard_seed(spec.seed, 0));

    let players: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let types: Vec<Vec<String>> = vec![(0..m).map(|t| format!("t{t}")).collect(); n];
    let elements: Vec<String> = (0..universe).map(|u| format!("u{u}")).collect();
    let weights: Vec<f64> = (0..universe).map(|_| rng.random_range(0.1..=1.0)).collect();

    let mut ground = Vec::new();
    let mut covers = BTreeMap::new();
    let mut actions = Vec::new();
    for p in &players {
        for t in 0..m {
            let ids: Vec<String> = (0..k).map(|a| format!("{p}:t{t}:a{a}")).collect();
            for id in &ids {
                let mut set: Vec<String> = elements.iter().filter(|_| rng.random::<f64>() < 0.4).cloned().collect();
                if set.is_empty() {
                    set.push(elements[rng.random_range(0..universe)].clone());
                }
                covers.insert(id.clone(), set);
            }
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

    let prior = match spec.prior {
        PriorKind::Independent => {
            let marginals: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..=1.0)).collect();
                    let total: f64 = raw.iter().sum();
                    raw.iter().map(|x| x / total).collect()
                })
                .collect();
            product_prior(&types, &marginals)
        }
        PriorKind::Correlated => {
            // Cubing spreads the masses so the joint is far from a product.
            let mut odo = Odometer::new(vec![m; n]);
            let mut raw = Vec::new();
            while let Some(pos) = odo.next_tuple() {
                let u: f64 = rng.random_range(0.05..=1.0);
                raw.push((pos.to_vec(), u * u * u));
            }
            let total: f64 = raw.iter().map(|(_, w)| w).sum();
            PriorSpec {
                profiles: raw
                    .into_iter()
                    .map(|(pos, w)| PriorProfileSpec {
                        types: pos.iter().map(|&t| format!("t{t}")).collect(),
                        p: w / total,
                    })
                    .collect(),
            }
        }
    };
    let game = GameSpec {
        schema_version: SCHEMA_VERSION,
        name: Some(format!("random(n={n}, types={m}, actions={k}, universe={universe}, seed={})", spec.seed)),
        recipe: Some(serde_json::to_value(spec).map(|mut v| {
            v["recipe"] = "random".into();
            v
        })?),
        players,
        types,
        prior,
        actions,
        null_actions: nulls,
        welfare: coverage_json(ground, elements, weights, covers),
        utilities: match spec.utility {
            UtilityKind::Basic => UtilitySpec::BasicDerived,
            UtilityKind::EqualShare => UtilitySpec::EqualShareCoverage,
        },
    };
    GameDefinition::from_spec(game, budget)
}
