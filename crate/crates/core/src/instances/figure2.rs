use std::collections::BTreeMap;

use super::{coverage_json, null_ids, uniform_product_prior};
use crate::game::{ActionSetSpec, GameDefinition, GameSpec, UtilitySpec, SCHEMA_VERSION};
use crate::{Budget, Error, Result};

/// The two-player basic game whose unique communication equilibrium has
/// welfare `2 + ε` while `OPT = (5 + ε)/2`.
///
/// Universe weights `u1 = 2, u2 = 1, u3 = ε`. Player 1 has types `θ1`
/// (action `a1` covering `u3`) and `θ1'` (action `a1'` covering `u1`), drawn
/// uniformly. Player 2 has one type and chooses between `a2` covering
/// `{u1, u3}` and `a2'` covering `u2`. Utilities are marginal contributions.
pub fn figure2_game(eps: f64) -> Result<GameDefinition> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Invalid(format!("ε must lie in (0, 1), got {eps}")));
    }
    let players = vec!["P1".to_string(), "P2".to_string()];
    let types = vec![vec!["theta1".to_string(), "theta1'".to_string()], vec!["theta2".to_string()]];
    let nulls = null_ids(&players);
    let covers: BTreeMap<String, Vec<String>> = [
        ("a1", vec!["u3"]),
        ("a1'", vec!["u1"]),
        ("a2", vec!["u1", "u3"]),
        ("a2'", vec!["u2"]),
    ]
    .into_iter()
    .map(|(a, us)| (a.to_string(), us.into_iter().map(String::from).collect()))
    .collect();
    let mut ground: Vec<String> = ["a1", "a1'", "a2", "a2'"].map(String::from).to_vec();
    ground.extend(nulls.iter().cloned());
    let action = |player: &str, ty: &str, ids: &[&str]| ActionSetSpec {
        player: player.into(),
        ty: ty.into(),
        ids: ids.iter().map(|s| s.to_string()).collect(),
    };
    let spec = GameSpec {
        schema_version: SCHEMA_VERSION,
        name: Some(format!("figure2(eps={eps})")),
        recipe: Some(serde_json::json!({"recipe": "figure2", "eps": eps})),
        prior: uniform_product_prior(&types),
        players,
        types,
        actions: vec![
            action("P1", "theta1", &["a1"]),
            action("P1", "theta1'", &["a1'"]),
            action("P2", "theta2", &["a2", "a2'"]),
        ],
        null_actions: nulls,
        welfare: coverage_json(
            ground,
            vec!["u1".into(), "u2".into(), "u3".into()],
            vec![2.0, 1.0, eps],
            covers,
        ),
        utilities: UtilitySpec::BasicDerived,
    };
    GameDefinition::from_spec(spec, &Budget::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn player_one_has_one_action_per_type() {
        let g = figure2_game(0.2).unwrap();
        assert_eq!(g.actions(0, 0).len(), 1);
        assert_eq!(g.actions(0, 1).len(), 1);
        assert_eq!(g.actions(1, 0).len(), 2);
    }

    #[test]
    fn rejects_eps_outside_unit_interval() {
        assert!(figure2_game(0.0).is_err());
        assert!(figure2_game(1.0).is_err());
    }
}
