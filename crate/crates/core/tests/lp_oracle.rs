mod common;

use bayes_welfare::equilibria::{optimize_welfare, ConceptId, Sense};
use bayes_welfare::game::GameDefinition;
use bayes_welfare::instances::{figure2_game, priority_game, PriorKind, UtilityKind};
use bayes_welfare::Budget;

fn small_games() -> Vec<(String, GameDefinition)> {
    let mut games = vec![
        ("figure2(0.01)".to_string(), figure2_game(0.01).unwrap()),
        ("figure2(0.3)".to_string(), figure2_game(0.3).unwrap()),
        ("priority(1,1,2)".to_string(), priority_game(1, 1, 2).unwrap().0),
    ];
    for seed in 0..24u64 {
        let players = 2 + (seed % 2) as usize;
        let types = 1 + (seed / 2 % 2) as usize;
        let prior = if seed % 3 == 0 { PriorKind::Correlated } else { PriorKind::Independent };
        let utility = if seed % 4 < 2 { UtilityKind::Basic } else { UtilityKind::EqualShare };
        let g = common::random_game(seed, players, types, 2, prior, utility);
        games.push((format!("random#{seed}"), g));
    }
    games
}

#[test]
fn epigraph_lps_match_explicit_enumeration() {
    let budget = Budget::default();
    for (name, g) in small_games() {
        for concept in [ConceptId::ComEq, ConceptId::Sfcbs, ConceptId::Sfcce] {
            for sense in [Sense::Min, Sense::Max] {
                let ours = optimize_welfare(&g, concept, sense, &budget).unwrap().value.unwrap();
                let oracle = common::explicit_lp(&g, concept, sense);
                assert!(
                    (ours - oracle).abs() <= 1e-9,
                    "{name} {concept} {sense}: epigraph {ours} vs explicit {oracle}"
                );
            }
        }
    }
}

#[test]
fn brute_force_optimum_matches() {
    let budget = Budget::default();
    for (name, g) in small_games() {
        let opt = bayes_welfare::welfare::compute_opt(&g, &budget).unwrap().value;
        assert!((opt - common::brute_opt(&g)).abs() <= 1e-12, "{name}");
        let s = bayes_welfare::welfare::compute_str_exact(&g, &budget).unwrap().value;
        assert!((s - common::brute_str(&g).0).abs() <= 1e-12, "{name}");
    }
}
