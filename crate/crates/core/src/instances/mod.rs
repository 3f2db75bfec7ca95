//! Reference games and seeded generators.

mod bipartite;
mod figure2;
mod grid;
mod priority;
mod random;
mod recipe;
mod resource;

use std::collections::BTreeMap;

use crate::game::{Odometer, PriorProfileSpec, PriorSpec};
use crate::submodular::SetFunctionJson;

pub use bipartite::{max_matching, BipartiteSurrogate, SurrogateGapReport};
pub use figure2::figure2_game;
pub use grid::{grid_game, GridSampler, GridProfileEstimate, GRID_EXACT_DRAW_LIMIT};
pub use priority::{make_priority_game, priority_game};
pub use random::{make_random_game, PriorKind, RandomGameSpec, UtilityKind};
pub use recipe::InstanceRecipe;
pub use resource::{
    make_resource_allocation_game, make_routing_game, ResourceGameSpec, ResourcePlayer, ResourceType, RoutingPlayer,
};

/// `null:<player>` ids, one per player.
pub(crate) fn null_ids(players: &[String]) -> Vec<String> {
    players.iter().map(|p| format!("null:{p}")).collect()
}

/// Product prior over the full type grid; profiles with zero mass are left out.
pub(crate) fn product_prior(types: &[Vec<String>], marginals: &[Vec<f64>]) -> PriorSpec {
    let mut odo = Odometer::new(types.iter().map(Vec::len).collect());
    let mut profiles = Vec::new();
    while let Some(pos) = odo.next_tuple() {
        let p: f64 = pos.iter().enumerate().map(|(i, &t)| marginals[i][t]).product();
        if p > 0.0 {
            profiles.push(PriorProfileSpec {
                types: pos.iter().enumerate().map(|(i, &t)| types[i][t].clone()).collect(),
                p,
            });
        }
    }
    PriorSpec { profiles }
}

pub(crate) fn uniform_product_prior(types: &[Vec<String>]) -> PriorSpec {
    let marginals: Vec<Vec<f64>> = types.iter().map(|t| vec![1.0 / t.len() as f64; t.len()]).collect();
    product_prior(types, &marginals)
}

/// Weighted coverage welfare; elements missing from `covers` (null actions)
/// cover nothing.
pub(crate) fn coverage_json(
    ground: Vec<String>,
    universe: Vec<String>,
    weights: Vec<f64>,
    covers: BTreeMap<String, Vec<String>>,
) -> SetFunctionJson {
    SetFunctionJson::WeightedCoverage {
        ground,
        universe,
        weights,
        covers,
    }
}
