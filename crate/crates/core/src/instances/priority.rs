use std::collections::BTreeMap;

use super::{coverage_json, null_ids, uniform_product_prior};
use crate::equilibria::TypeDependentDistribution;
use crate::game::{ActionSetSpec, GameDefinition, GameSpec, UtilitySpec, SCHEMA_VERSION};
use crate::{Budget, Error, Result};

/// Two-priority coverage game over `universe` unit-weight elements.
///
/// Low-priority players come first; each has one type per element, drawn
/// uniformly and independently, with the single action covering it.
/// High-priority players have one type and may cover any element. An
/// element's weight goes to its high-priority coverers if there are any,
/// otherwise to its low-priority coverers, split equally.
///
/// The second value is the mediator that assigns each high-priority player a
/// uniformly random distinct low-priority player and recommends that
/// player's element; it exists when `high ≤ low`.
pub fn priority_game(
    low: usize,
    high: usize,
    universe: usize,
) -> Result<(GameDefinition, Option<TypeDependentDistribution>)> {
    if low == 0 || high == 0 || universe == 0 {
        return Err(Error::Invalid("priority game needs at least one player of each kind and one element".into()));
    }
    let players: Vec<String> = (0..low)
        .map(|i| format!("low{i}"))
        .chain((0..high).map(|j| format!("high{j}")))
        .collect();
    let elements: Vec<String> = (0..universe).map(|u| format!("u{u}")).collect();
    let mut types = Vec::new();
    let mut actions = Vec::new();
    let mut covers = BTreeMap::new();
    let mut ground = Vec::new();
    for p in &players[..low] {
        types.push(elements.clone());
        for u in &elements {
            let id = format!("{p}@{u}");
            covers.insert(id.clone(), vec![u.clone()]);
            ground.push(id.clone());
            actions.push(ActionSetSpec {
                player: p.clone(),
                ty: u.clone(),
                ids: vec![id],
            });
        }
    }
    for p in &players[low..] {
        types.push(vec!["any".to_string()]);
        let ids: Vec<String> = elements.iter().map(|u| format!("{p}@{u}")).collect();
        for (id, u) in ids.iter().zip(&elements) {
            covers.insert(id.clone(), vec![u.clone()]);
        }
        ground.extend(ids.iter().cloned());
        actions.push(ActionSetSpec {
            player: p.clone(),
            ty: "any".into(),
            ids,
        });
    }
    let nulls = null_ids(&players);
    ground.extend(nulls.iter().cloned());
    let high_priority: Vec<bool> = (0..low + high).map(|i| i >= low).collect();
    let spec = GameSpec {
        schema_version: SCHEMA_VERSION,
        name: Some(format!("priority(low={low}, high={high}, universe={universe})")),
        recipe: Some(serde_json::json!({"recipe": "priority", "low": low, "high": high, "universe": universe})),
        prior: uniform_product_prior(&types),
        players,
        types,
        actions,
        null_actions: nulls,
        welfare: coverage_json(ground, elements, vec![1.0; universe], covers),
        utilities: UtilitySpec::PriorityShareCoverage { high_priority },
    };
    let g = GameDefinition::from_spec(spec, &Budget::default())?;
    let mediator = if high <= low { Some(matching_mediator(&g, low, high)?) } else { None };
    Ok((g, mediator))
}

/// The reference instance with `n/2` players of each priority and `n`
/// elements.
pub fn make_priority_game(n: usize) -> Result<(GameDefinition, TypeDependentDistribution)> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Invalid(format!("the priority game needs an even number of players, got {n}")));
    }
    let (g, mediator) = priority_game(n / 2, n / 2, n)?;
    Ok((g, mediator.expect("equal group sizes admit a matching")))
}

fn matching_mediator(g: &GameDefinition, low: usize, high: usize) -> Result<TypeDependentDistribution> {
    let injections = injections(low, high);
    let weight = 1.0 / injections.len() as f64;
    let prior = g.prior();
    let mut slices = Vec::with_capacity(prior.len());
    for theta in prior.profiles() {
        let mut law: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for map in &injections {
            let mut a: Vec<usize> = (0..low).map(|i| g.actions(i, theta[i])[0]).collect();
            for (j, &i) in map.iter().enumerate() {
                // Low player i plays its type's element; high player j copies it.
                a.push(g.actions(low + j, 0)[theta[i]]);
            }
            *law.entry(a).or_default() += weight;
        }
        slices.push((theta.clone(), law.into_iter().collect()));
    }
    TypeDependentDistribution::new(g, slices)
}

/// All injective maps `[high] → [low]`, lexicographic.
fn injections(low: usize, high: usize) -> Vec<Vec<usize>> {
    fn extend(low: usize, high: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == high {
            out.push(cur.clone());
            return;
        }
        for i in 0..low {
            if !cur.contains(&i) {
                cur.push(i);
                extend(low, high, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(low, high, &mut Vec::new(), &mut out);
    out
}
