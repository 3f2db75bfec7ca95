mod common;

use proptest::prelude::*;
use rand::Rng;

use bayes_welfare::equilibria::{check_equilibrium, lattice_check, optimize_welfare, ConceptId, Sense, VERIFY_TOL};
use bayes_welfare::game::{check_valid_conditions, strategic_form, validate_game, GameDefinition, StrategyProfile};
use bayes_welfare::instances::{
    figure2_game, grid_game, make_priority_game, make_random_game, make_resource_allocation_game, make_routing_game,
    BipartiteSurrogate, GridSampler, PriorKind, RandomGameSpec, ResourceGameSpec, ResourcePlayer, ResourceType,
    RoutingPlayer, UtilityKind,
};
use bayes_welfare::rng::seeded;
use bayes_welfare::submodular::{
    check_monotone_submodular, correlation_gap_check, multilinear_exact, multilinear_gradient, multilinear_sampled,
    partition_product_check, CheckMode, DensityVector, PartitionProductDistribution, SetFunctionSpec,
    SubsetDistribution,
};
use bayes_welfare::welfare::{
    compute_opt, compute_str_exact, compute_str_local, heavy_light_split, marginal_profile, sr_bound_audit,
    str_sampling_lower_bound, StrMode,
};
use bayes_welfare::{one_minus_inv_e, Budget};

fn coverage(seed: u64, ground: usize, universe: usize) -> SetFunctionSpec {
    let mut rng = seeded(seed);
    let ids: Vec<String> = (0..ground).map(|e| format!("e{e}")).collect();
    let elems: Vec<String> = (0..universe).map(|u| format!("u{u}")).collect();
    let weights: Vec<f64> = (0..universe).map(|_| rng.random_range(0.0..3.0)).collect();
    let covers: Vec<(String, Vec<String>)> = ids
        .iter()
        .map(|id| (id.clone(), elems.iter().filter(|_| rng.random::<f64>() < 0.4).cloned().collect()))
        .collect();
    SetFunctionSpec::coverage(&ids, &elems, &weights, &covers).unwrap()
}

fn density(seed: u64, len: usize) -> DensityVector {
    let mut rng = seeded(seed ^ 0x9e37);
    DensityVector::new((0..len).map(|_| rng.random::<f64>()).collect()).unwrap()
}

fn game_params() -> impl Strategy<Value = (u64, usize, usize, usize, bool, bool)> {
    (any::<u64>(), 2usize..=3, 1usize..=2, 2usize..=3, any::<bool>(), any::<bool>())
}

fn game_from((seed, players, types, actions, correlated, basic): (u64, usize, usize, usize, bool, bool)) -> GameDefinition {
    let prior = if correlated { PriorKind::Correlated } else { PriorKind::Independent };
    let utility = if basic { UtilityKind::Basic } else { UtilityKind::EqualShare };
    common::random_game(seed, players, types, actions, prior, utility)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // submodular

    #[test]
    fn coverage_is_monotone_submodular(seed in any::<u64>(), ground in 1usize..=10, universe in 1usize..=8) {
        let f = coverage(seed, ground, universe);
        let r = check_monotone_submodular(&f, CheckMode::Exhaustive, &Budget::default()).unwrap();
        prop_assert!(r.non_negative && r.is_monotone && r.is_submodular, "{}", r.evidence());
    }

    #[test]
    fn gradient_matches_central_differences(seed in any::<u64>(), ground in 1usize..=8) {
        let f = coverage(seed, ground, 6);
        let x = density(seed, ground);
        let clamp = |v: f64| v.clamp(1e-3, 1.0 - 1e-3);
        let x = DensityVector::new(x.values().iter().map(|&v| clamp(v)).collect()).unwrap();
        let h = 1e-4;
        for u in 0..ground {
            let xu = x.values()[u];
            let up = multilinear_exact(&f, &x.with(u, xu + h).unwrap()).unwrap();
            let down = multilinear_exact(&f, &x.with(u, xu - h).unwrap()).unwrap();
            let fd = (up - down) / (2.0 * h);
            let grad = multilinear_gradient(&f, &x, u).unwrap();
            prop_assert!((grad - fd).abs() <= 1e-6 * grad.abs().max(1.0), "u={u}: {grad} vs {fd}");
        }
    }

    #[test]
    fn multilinear_is_concave_along_rays(seed in any::<u64>(), ground in 1usize..=8) {
        let f = coverage(seed, ground, 6);
        let x = density(seed, ground);
        let g: Vec<f64> = (0..=10).map(|t| multilinear_exact(&f, &x.scaled(t as f64 / 10.0).unwrap()).unwrap()).collect();
        for t in 1..10 {
            prop_assert!(g[t + 1] - 2.0 * g[t] + g[t - 1] <= 1e-9);
        }
    }

    #[test]
    fn scaling_bound(seed in any::<u64>(), ground in 1usize..=8, k in prop::sample::select(vec![1.5, 2.0, 4.0])) {
        let f = coverage(seed, ground, 6);
        let x = density(seed, ground);
        let fx = multilinear_exact(&f, &x).unwrap();
        let fk = multilinear_exact(&f, &x.scaled(1.0 / k).unwrap()).unwrap();
        prop_assert!(fx <= k * fk + 1e-9);
    }

    #[test]
    fn correlation_gap_floor(seed in any::<u64>(), ground in 1usize..=8, sets in 1usize..=6) {
        let f = coverage(seed, ground, 6);
        let mut rng = seeded(seed.wrapping_add(1));
        let raw: Vec<(Vec<usize>, f64)> = (0..sets)
            .map(|_| ((0..ground).filter(|_| rng.random::<f64>() < 0.5).collect(), rng.random_range(0.1..1.0)))
            .collect();
        let total: f64 = raw.iter().map(|(_, p)| p).sum();
        let d = SubsetDistribution::new(ground, raw.into_iter().map(|(s, p)| (s, p / total)).collect()).unwrap();
        let r = correlation_gap_check(&f, &d).unwrap();
        prop_assert!(r.ratio.at_least(one_minus_inv_e(), 1e-9));
    }

    #[test]
    fn partition_product_inequality(seed in any::<u64>(), ground in 1usize..=8, blocks in 1usize..=4) {
        let f = coverage(seed, ground, 6);
        let mut rng = seeded(seed.wrapping_add(2));
        let mut parts: Vec<Vec<(usize, f64)>> = vec![Vec::new(); blocks];
        for e in 0..ground {
            parts[rng.random_range(0..blocks)].push((e, rng.random_range(0.05..1.0)));
        }
        parts.retain(|b| !b.is_empty());
        for b in &mut parts {
            let total: f64 = b.iter().map(|(_, p)| p).sum();
            b.iter_mut().for_each(|(_, p)| *p /= total);
        }
        let d = PartitionProductDistribution::new(ground, parts).unwrap();
        let r = partition_product_check(&f, &d, &Budget::default()).unwrap();
        prop_assert!(r.holds, "{} < {}", r.e_partition, r.e_indep);
    }

    #[test]
    fn evaluation_and_sampling_are_deterministic(seed in any::<u64>(), ground in 1usize..=8) {
        let f = coverage(seed, ground, 6);
        let all: Vec<usize> = (0..ground).collect();
        prop_assert_eq!(f.value(&all).to_bits(), f.value(&all).to_bits());
        let x = density(seed, ground);
        let a = multilinear_sampled(&f, &x, 200, seed).unwrap();
        let b = multilinear_sampled(&f, &x, 200, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    // bayesgame

    #[test]
    fn basic_derived_games_are_valid_and_basic(seed in any::<u64>(), players in 2usize..=3, types in 1usize..=2) {
        let g = common::random_game(seed, players, types, 2, PriorKind::Correlated, UtilityKind::Basic);
        let r = check_valid_conditions(&g, &Budget::default()).unwrap();
        prop_assert!(r.valid && r.basic);
    }

    #[test]
    fn strategic_form_preserves_welfare(params in game_params()) {
        let g = game_from(params);
        let sf = strategic_form(&g, &Budget::default()).unwrap();
        prop_assert!(sf.is_complete_information());
        let per_player: Vec<Vec<Vec<usize>>> = (0..g.players()).map(|i| g.strategies(i)).collect();
        let index: Vec<Vec<usize>> = per_player.iter().map(|s| (0..s.len()).collect()).collect();
        for pick in common::cartesian(&index) {
            let s: Vec<Vec<usize>> = pick.iter().enumerate().map(|(i, &k)| per_player[i][k].clone()).collect();
            let original = g.expected_welfare(&StrategyProfile { actions: s });
            let a: Vec<usize> = pick.iter().enumerate().map(|(i, &k)| sf.actions(i, 0)[k]).collect();
            prop_assert!((sf.sw(&a) - original).abs() <= 1e-12, "{} vs {original}", sf.sw(&a));
        }
    }

    #[test]
    fn strategic_form_of_basic_game_is_basic(seed in any::<u64>(), correlated in any::<bool>()) {
        let prior = if correlated { PriorKind::Correlated } else { PriorKind::Independent };
        let g = common::random_game(seed, 2, 2, 2, prior, UtilityKind::Basic);
        let sf = strategic_form(&g, &Budget::default()).unwrap();
        prop_assert!(check_valid_conditions(&sf, &Budget::default()).unwrap().basic);
    }

    #[test]
    fn conditionals_reconstruct_the_joint(params in game_params()) {
        let g = game_from(params);
        let p = g.prior();
        for i in 0..g.players() {
            let mut rebuilt = vec![0.0; p.len()];
            for t in 0..g.type_count(i) {
                for (k, q) in p.conditional(i, t) {
                    rebuilt[k] += p.marginal(i, t) * q;
                }
            }
            for k in 0..p.len() {
                prop_assert!((rebuilt[k] - p.prob(k)).abs() <= 1e-12);
            }
        }
    }

    // welfare

    #[test]
    fn welfare_chain(params in game_params()) {
        let g = game_from(params);
        let b = Budget::default();
        let cert = compute_opt(&g, &b).unwrap();
        let exact = compute_str_exact(&g, &b).unwrap().value;
        let local = compute_str_local(&g, 4, params.0).value;
        let lb = str_sampling_lower_bound(&g, &marginal_profile(&g, &cert), 2000, params.0).unwrap();
        prop_assert!(cert.value >= exact - 1e-12);
        prop_assert!(exact >= local - 1e-12);
        prop_assert!(local >= lb.estimate - 4.0 * lb.stderr - 1e-12);
    }

    #[test]
    fn marginal_profile_and_split_are_well_formed(params in game_params()) {
        let g = game_from(params);
        let mp = marginal_profile(&g, &compute_opt(&g, &Budget::default()).unwrap());
        for per_type in &mp.w {
            for w in per_type {
                prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
        }
        let split = heavy_light_split(&g, &mp);
        for (h_i, y_i) in split.heavy.iter().zip(&split.y) {
            for (h, y) in h_i.iter().zip(y_i) {
                prop_assert!(h.len() as f64 <= split.sqrt_n + 1e-12);
                prop_assert!(y.iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
    }

    // equilibria

    #[test]
    fn witnesses_reverify(params in game_params(), concept in prop::sample::select(ConceptId::ALL.to_vec()), max in any::<bool>()) {
        let g = game_from(params);
        let sense = if max { Sense::Max } else { Sense::Min };
        let r = optimize_welfare(&g, concept, sense, &Budget::default()).unwrap();
        if let (Some(v), Some(w)) = (r.value, &r.witness) {
            prop_assert!(check_equilibrium(&g, concept, w, VERIFY_TOL).unwrap().is_empty());
            prop_assert!((w.expected_welfare(&g) - v).abs() <= VERIFY_TOL);
        }
    }

    #[test]
    fn strategy_concepts_stay_below_str(params in game_params()) {
        let g = game_from(params);
        let b = Budget::default();
        let str_value = compute_str_exact(&g, &b).unwrap().value;
        for c in [ConceptId::BnePure, ConceptId::Sfce, ConceptId::Anfce, ConceptId::Anfcce, ConceptId::Sfcce] {
            if let Some(v) = optimize_welfare(&g, c, Sense::Max, &b).unwrap().value {
                prop_assert!(v <= str_value + 1e-6, "{c}: {v} > {str_value}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn lattice_holds_on_random_games(params in game_params()) {
        let g = game_from(params);
        let r = lattice_check(&g, &Budget::default()).unwrap();
        prop_assert!(r.holds(), "{:?}", r.failures());
    }

    #[test]
    fn correlated_bound_audit_holds(seed in any::<u64>(), basic in any::<bool>()) {
        let utility = if basic { UtilityKind::Basic } else { UtilityKind::EqualShare };
        let g = common::random_game(seed, 4, 2, 2, PriorKind::Correlated, utility);
        let audit = sr_bound_audit(&g, StrMode::Exact, 5000, seed, &Budget::default()).unwrap();
        prop_assert!(audit.holds(), "{:?}", audit.inequalities);
    }

    // instances

    #[test]
    fn random_games_validate_with_their_classification(params in game_params()) {
        let g = game_from(params);
        let b = Budget::default();
        prop_assert!(validate_game(g.spec(), &b).passed());
        let r = check_valid_conditions(&g, &b).unwrap();
        prop_assert!(r.valid);
        if params.5 {
            prop_assert!(r.basic);
        }
        let independent = g.prior().is_independent().independent;
        prop_assert_eq!(independent, !params.4 || params.2 == 1);
    }

    #[test]
    fn generators_are_reproducible(seed in any::<u64>()) {
        let spec = RandomGameSpec { seed, ..RandomGameSpec::default() };
        let b = Budget::default();
        prop_assert_eq!(make_random_game(&spec, &b).unwrap().to_json_string(), make_random_game(&spec, &b).unwrap().to_json_string());
        let s = BipartiteSurrogate::new(6, 3, seed).unwrap();
        prop_assert_eq!(s.gap_proxy(200, 2, seed), BipartiteSurrogate::new(6, 3, seed).unwrap().gap_proxy(200, 2, seed));
        let grid = GridSampler::new(4, 2).unwrap();
        prop_assert_eq!(grid.random_profile_estimates(3, 50, seed), grid.random_profile_estimates(3, 50, seed));
    }
}

#[test]
fn reference_games_match_their_classification() {
    let b = Budget::default();
    let classify = |g: &GameDefinition| {
        assert!(validate_game(g.spec(), &b).passed());
        let r = check_valid_conditions(g, &b).unwrap();
        (r.valid, r.basic, g.prior().is_independent().independent)
    };
    assert_eq!(classify(&figure2_game(0.01).unwrap()), (true, true, true));
    assert_eq!(classify(&make_priority_game(4).unwrap().0), (true, false, true));
    assert_eq!(classify(&grid_game(4, 2, &b).unwrap()), (true, false, false));
    let s = BipartiteSurrogate::new(3, 2, 1).unwrap();
    let (valid, _, independent) = classify(&s.game(&b).unwrap());
    assert!(valid && independent);
    let (valid, _, independent) = classify(&s.structural_game(&b).unwrap());
    assert!(valid && !independent);
}

#[test]
fn full_bipartite_sets_match_everyone() {
    let s = BipartiteSurrogate::with_probability(5, 2, 1.0, 3).unwrap();
    let (opt, stderr) = s.opt_sampled(50, 0);
    assert_eq!((opt, stderr), (5.0, 0.0));
}

#[test]
fn resource_allocation_is_valid() {
    let ty = |name: &str, weight| ResourceType {
        name: name.into(),
        weight,
        choices: vec![vec!["r0".into()], vec!["r1".into()], vec!["r0".into(), "r1".into()]],
    };
    let spec = ResourceGameSpec {
        resources: vec!["r0".into(), "r1".into()],
        payoffs: vec![vec![0.0, 1.0, 1.8, 2.4, 2.8, 3.0, 3.1]; 2],
        players: (0..2)
            .map(|i| ResourcePlayer {
                name: format!("p{i}"),
                types: vec![ty("light", 1), ty("heavy", 2)],
            })
            .collect(),
        prior: None,
    };
    let g = make_resource_allocation_game(&spec, &Budget::default()).unwrap();
    assert!(validate_game(g.spec(), &Budget::default()).passed());
    assert!(check_valid_conditions(&g, &Budget::default()).unwrap().valid);
}

#[test]
fn routing_on_four_nodes_is_valid() {
    let e = |a: &str, b: &str| (a.to_string(), b.to_string());
    let edges = vec![e("s", "a"), e("s", "b"), e("a", "t"), e("b", "t"), e("a", "b")];
    let players = vec![
        RoutingPlayer { name: "p0".into(), pairs: vec![e("s", "t"), e("s", "b")] },
        RoutingPlayer { name: "p1".into(), pairs: vec![e("a", "t"), e("s", "t")] },
    ];
    let payoffs = vec![vec![0.0, 2.0, 3.0]; edges.len()];
    let g = make_routing_game(&edges, &payoffs, &players, &Budget::default()).unwrap();
    assert_eq!(g.actions(0, 0).len(), 3);
    assert!(validate_game(g.spec(), &Budget::default()).passed());
    assert!(check_valid_conditions(&g, &Budget::default()).unwrap().valid);
}
