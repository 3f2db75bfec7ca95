use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    figure2_game, grid_game, make_priority_game, make_random_game, make_resource_allocation_game, BipartiteSurrogate,
    RandomGameSpec, ResourceGameSpec,
};
use crate::game::GameDefinition;
use crate::{Budget, Error, Result};

/// A named generator with its parameters. Parses from JSON or from the
/// shorthand `name:key=value,key=value` (e.g. `grid:n=4,k=2`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "snake_case")]
pub enum InstanceRecipe {
    Figure2 {
        eps: f64,
    },
    Priority {
        n: usize,
    },
    Grid {
        n: usize,
        k: usize,
    },
    Random(RandomGameSpec),
    /// `structural` swaps the product prior for the diagonal coupling.
    Bipartite {
        n: usize,
        draws: usize,
        seed: u64,
        #[serde(default)]
        structural: bool,
    },
    Resource {
        spec: ResourceGameSpec,
    },
}

impl InstanceRecipe {
    pub fn build(&self, budget: &Budget) -> Result<GameDefinition> {
        match self {
            InstanceRecipe::Figure2 { eps } => figure2_game(*eps),
            InstanceRecipe::Priority { n } => make_priority_game(*n).map(|(g, _)| g),
            InstanceRecipe::Grid { n, k } => grid_game(*n, *k, budget),
            InstanceRecipe::Random(spec) => make_random_game(spec, budget),
            InstanceRecipe::Bipartite {
                n,
                draws,
                seed,
                structural,
            } => {
                let b = BipartiteSurrogate::new(*n, *draws, *seed)?;
                if *structural {
                    b.structural_game(budget)
                } else {
                    b.game(budget)
                }
            }
            InstanceRecipe::Resource { spec } => make_resource_allocation_game(spec, budget),
        }
    }
}

impl FromStr for InstanceRecipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut obj = serde_json::Map::new();
        obj.insert("recipe".into(), name.trim().into());
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("expected key=value in recipe, got {pair:?}")))?;
            let value = serde_json::from_str(v.trim()).unwrap_or_else(|_| serde_json::Value::String(v.trim().into()));
            obj.insert(k.trim().into(), value);
        }
        serde_json::from_value(obj.into()).map_err(|e| Error::Invalid(format!("recipe {s:?}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_parses() {
        assert_eq!("grid:n=4,k=2".parse::<InstanceRecipe>().unwrap(), InstanceRecipe::Grid { n: 4, k: 2 });
        let r: InstanceRecipe = "random:players=2,types=2,actions=2,universe=3,prior=correlated,utility=basic,seed=4"
            .parse()
            .unwrap();
        assert!(matches!(r, InstanceRecipe::Random(RandomGameSpec { universe: 3, .. })));
        assert!("nope".parse::<InstanceRecipe>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let r = InstanceRecipe::Figure2 { eps: 0.25 };
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(text.parse::<InstanceRecipe>().unwrap(), r);
    }
}
