use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{null_ids, uniform_product_prior};
use crate::game::{ActionSetSpec, GameDefinition, GameSpec, PriorSpec, UtilitySpec, SCHEMA_VERSION};
use crate::submodular::SetFunctionJson;
use crate::{Budget, Error, Result};

/// Weighted resource allocation: a type fixes a player's integer weight and
/// the resource bundles it may load; welfare is `Σ_r u_r(load_r)` with
/// concave `u_r`, shared in proportion to load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceGameSpec {
    pub resources: Vec<String>,
    /// `payoffs[r][x] = u_r(x)` for integer loads.
    pub payoffs: Vec<Vec<f64>>,
    pub players: Vec<ResourcePlayer>,
    /// Uniform product prior when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourcePlayer {
    pub name: String,
    pub types: Vec<ResourceType>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceType {
    pub name: String,
    pub weight: u32,
    /// Each choice is a bundle of resource names.
    pub choices: Vec<Vec<String>>,
}

pub fn make_resource_allocation_game(spec: &ResourceGameSpec, budget: &Budget) -> Result<GameDefinition> {
    if spec.players.is_empty() || spec.players.iter().any(|p| p.types.is_empty()) {
        return Err(Error::Invalid("every player needs at least one type".into()));
    }
    let resource_index: BTreeMap<&str, usize> = spec.resources.iter().enumerate().map(|(r, s)| (s.as_str(), r)).collect();
    let players: Vec<String> = spec.players.iter().map(|p| p.name.clone()).collect();
    let types: Vec<Vec<String>> = spec.players.iter().map(|p| p.types.iter().map(|t| t.name.clone()).collect()).collect();
    let mut ground = Vec::new();
    let mut usage = BTreeMap::new();
    let mut actions = Vec::new();
    for p in &spec.players {
        for ty in &p.types {
            if ty.weight == 0 || ty.choices.is_empty() {
                return Err(Error::Invalid(format!(
                    "type {} of {} needs a positive weight and at least one choice",
                    ty.name, p.name
                )));
            }
            let mut ids = Vec::with_capacity(ty.choices.len());
            for bundle in &ty.choices {
                if let Some(r) = bundle.iter().find(|r| !resource_index.contains_key(r.as_str())) {
                    return Err(Error::Invalid(format!("unknown resource {r}")));
                }
                let id = format!("{}:{}:{}", p.name, ty.name, bundle.join("+"));
                usage.insert(id.clone(), bundle.iter().map(|r| (r.clone(), ty.weight)).collect::<Vec<_>>());
                ids.push(id);
            }
            ground.extend(ids.iter().cloned());
            actions.push(ActionSetSpec {
                player: p.name.clone(),
                ty: ty.name.clone(),
                ids,
            });
        }
    }
    let nulls = null_ids(&players);
    for id in &nulls {
        usage.insert(id.clone(), Vec::new());
    }
    ground.extend(nulls.iter().cloned());
    let game = GameSpec {
        schema_version: SCHEMA_VERSION,
        name: Some(format!("resource allocation ({} players, {} resources)", players.len(), spec.resources.len())),
        recipe: Some(serde_json::json!({"recipe": "resource", "spec": spec})),
        prior: spec.prior.clone().unwrap_or_else(|| uniform_product_prior(&types)),
        players,
        types,
        actions,
        null_actions: nulls,
        welfare: SetFunctionJson::ConcaveLoad {
            ground,
            resources: spec.resources.clone(),
            payoffs: spec.payoffs.clone(),
            usage,
        },
        utilities: UtilitySpec::ProportionalShareWeights,
    };
    GameDefinition::from_spec(game, budget)
}

/// A routing player's types are origin–destination pairs, each equally
/// likely and independent across players.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutingPlayer {
    pub name: String,
    pub pairs: Vec<(String, String)>,
}

/// Routing on a directed graph: edges are resources named `from->to`, and
/// each origin–destination type may use any simple path, with unit weight.
pub fn make_routing_game(
    edges: &[(String, String)],
    payoffs: &[Vec<f64>],
    players: &[RoutingPlayer],
    budget: &Budget,
) -> Result<GameDefinition> {
    if edges.len() != payoffs.len() {
        return Err(Error::Invalid("one payoff table per edge is required".into()));
    }
    let names: Vec<String> = edges.iter().map(|(a, b)| format!("{a}->{b}")).collect();
    let mut resource_players = Vec::with_capacity(players.len());
    for p in players {
        let mut types = Vec::with_capacity(p.pairs.len());
        for (from, to) in &p.pairs {
            let paths = simple_paths(edges, from, to);
            if paths.is_empty() {
                return Err(Error::Invalid(format!("no path from {from} to {to} for {}", p.name)));
            }
            types.push(ResourceType {
                name: format!("{from}~{to}"),
                weight: 1,
                choices: paths.into_iter().map(|path| path.into_iter().map(|e| names[e].clone()).collect()).collect(),
            });
        }
        resource_players.push(ResourcePlayer {
            name: p.name.clone(),
            types,
        });
    }
    make_resource_allocation_game(
        &ResourceGameSpec {
            resources: names,
            payoffs: payoffs.to_vec(),
            players: resource_players,
            prior: None,
        },
        budget,
    )
}

/// Simple paths as edge-index lists, in depth-first order over the edge list.
fn simple_paths(edges: &[(String, String)], from: &str, to: &str) -> Vec<Vec<usize>> {
    fn walk<'a>(
        edges: &'a [(String, String)],
        at: &'a str,
        to: &str,
        visited: &mut Vec<&'a str>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if at == to {
            out.push(path.clone());
            return;
        }
        for (e, (a, b)) in edges.iter().enumerate() {
            if a == at && !visited.contains(&b.as_str()) {
                visited.push(b);
                path.push(e);
                walk(edges, b, to, visited, path, out);
                path.pop();
                visited.pop();
            }
        }
    }
    let mut out = Vec::new();
    if from != to {
        walk(edges, from, to, &mut vec![from], &mut Vec::new(), &mut out);
    }
    out
}
