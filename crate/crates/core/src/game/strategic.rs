use std::collections::BTreeMap;

use super::model::GameDefinition;
use super::{
    ActionSetSpec, GameSpec, Odometer, PriorProfileSpec, PriorSpec, UtilityEntrySpec, UtilitySpec,
    SCHEMA_VERSION,
};
use crate::submodular::{MixtureComponentJson, SetFunctionJson};
use crate::{Budget, Result};

/// Name of the single type every player has in the strategic form.
pub const STRATEGIC_TYPE: &str = "*";

fn strategy_id(g: &GameDefinition, i: usize, s: &[usize]) -> String {
    if g.type_count(i) == 1 {
        g.action_name(s[0]).to_string()
    } else {
        format!("({})", g.action_names(s).join("|"))
    }
}

/// The complete-information game whose actions are the pure strategies
/// `S_i`, with welfare `f'(X) = E_θ[f({s_i(θ_i) : s_i ∈ X})]` and payoffs
/// `E_θ[v_i(s(θ))]`.
pub fn strategic_form(g: &GameDefinition, budget: &Budget) -> Result<GameDefinition> {
    let n = g.players();
    let profiles = g.strategy_profile_count();
    budget
        .require("strategic form (Π|S_i| strategy profiles)", profiles.saturating_mul(g.prior().len() as u128))?;
    let strategies: Vec<Vec<Vec<usize>>> = (0..n).map(|i| g.strategies(i)).collect();
    let ids: Vec<Vec<String>> = (0..n)
        .map(|i| strategies[i].iter().map(|s| strategy_id(g, i, s)).collect())
        .collect();
    let nulls: Vec<String> = (0..n).map(|i| g.action_name(g.null(i)).to_string()).collect();

    let mut ground: Vec<String> = ids.iter().flatten().cloned().collect();
    ground.extend(nulls.iter().cloned());

    let prior = g.prior();
    let components = (0..prior.len())
        .map(|k| {
            let theta = prior.profile(k);
            let mut map = BTreeMap::new();
            for i in 0..n {
                for (s, id) in strategies[i].iter().zip(&ids[i]) {
                    map.insert(id.clone(), g.action_name(s[theta[i]]).to_string());
                }
                map.insert(nulls[i].clone(), nulls[i].clone());
            }
            MixtureComponentJson {
                weight: prior.prob(k),
                map,
            }
        })
        .collect();
    let welfare = SetFunctionJson::PushforwardMixture {
        ground,
        base: Box::new(g.welfare().to_json()),
        components,
    };

    let mut entries = Vec::with_capacity(profiles as usize);
    let mut odo = Odometer::new(strategies.iter().map(Vec::len).collect());
    while let Some(pos) = odo.next_tuple() {
        let mut payoffs = vec![0.0; n];
        for k in 0..prior.len() {
            let theta = prior.profile(k);
            let a: Vec<usize> = (0..n).map(|i| strategies[i][pos[i]][theta[i]]).collect();
            for (p, v) in payoffs.iter_mut().zip(g.payoffs(&a)?) {
                *p += prior.prob(k) * v;
            }
        }
        entries.push(UtilityEntrySpec {
            actions: (0..n).map(|i| ids[i][pos[i]].clone()).collect(),
            payoffs,
        });
    }

    let spec = GameSpec {
        schema_version: SCHEMA_VERSION,
        name: Some(format!("strategic form of {}", g.name().unwrap_or("game"))),
        recipe: None,
        players: g.spec().players.clone(),
        types: vec![vec![STRATEGIC_TYPE.to_string()]; n],
        prior: PriorSpec {
            profiles: vec![PriorProfileSpec {
                types: vec![STRATEGIC_TYPE.to_string(); n],
                p: 1.0,
            }],
        },
        actions: (0..n)
            .map(|i| ActionSetSpec {
                player: g.player_name(i).to_string(),
                ty: STRATEGIC_TYPE.to_string(),
                ids: ids[i].clone(),
            })
            .collect(),
        null_actions: nulls,
        welfare,
        utilities: UtilitySpec::ExplicitTable { entries },
    };
    GameDefinition::from_spec(spec, budget)
}
