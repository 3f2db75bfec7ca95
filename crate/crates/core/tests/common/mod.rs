//! Independent oracles: brute-force welfare optima and equilibrium LPs that
//! list every deviation map and deviation strategy explicitly.
#![allow(dead_code)]

use std::collections::BTreeSet;

use bayes_welfare::equilibria::{solve_lp, Cmp, ConceptId, LinearProgram, Sense};
use bayes_welfare::game::GameDefinition;
use bayes_welfare::instances::{make_random_game, PriorKind, RandomGameSpec, UtilityKind};
use bayes_welfare::Budget;

pub fn cartesian(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    sets.iter().fold(vec![Vec::new()], |acc, set| {
        acc.iter()
            .flat_map(|prefix| {
                set.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect()
    })
}

fn support(g: &GameDefinition) -> Vec<(Vec<usize>, f64)> {
    let p = g.prior();
    (0..p.len()).map(|k| (p.profile(k).to_vec(), p.prob(k))).collect()
}

fn feasible(g: &GameDefinition, theta: &[usize]) -> Vec<Vec<usize>> {
    let sets: Vec<Vec<usize>> = theta.iter().enumerate().map(|(i, &t)| g.actions(i, t).to_vec()).collect();
    cartesian(&sets)
}

pub fn strategies(g: &GameDefinition, i: usize) -> Vec<Vec<usize>> {
    let sets: Vec<Vec<usize>> = (0..g.type_count(i)).map(|t| g.actions(i, t).to_vec()).collect();
    cartesian(&sets)
}

/// `E_θ[max_a SW(a)]` by exhaustive search.
pub fn brute_opt(g: &GameDefinition) -> f64 {
    support(g)
        .iter()
        .map(|(theta, p)| p * feasible(g, theta).iter().map(|a| g.sw(a)).fold(f64::NEG_INFINITY, f64::max))
        .sum()
}

pub fn expected_sw(g: &GameDefinition, s: &[Vec<usize>]) -> f64 {
    support(g)
        .iter()
        .map(|(theta, p)| {
            let a: Vec<usize> = theta.iter().enumerate().map(|(i, &t)| s[i][t]).collect();
            p * g.sw(&a)
        })
        .sum()
}

/// STR and every strategy profile attaining it (within 1e-12).
pub fn brute_str(g: &GameDefinition) -> (f64, Vec<Vec<Vec<usize>>>) {
    let per_player: Vec<Vec<Vec<usize>>> = (0..g.players()).map(|i| strategies(g, i)).collect();
    let index: Vec<Vec<usize>> = per_player.iter().map(|s| (0..s.len()).collect()).collect();
    let mut best = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    for pick in cartesian(&index) {
        let s: Vec<Vec<usize>> = pick.iter().enumerate().map(|(i, &k)| per_player[i][k].clone()).collect();
        let v = expected_sw(g, &s);
        if v > best + 1e-12 {
            best = v;
            argmax = vec![s];
        } else if (v - best).abs() <= 1e-12 {
            argmax.push(s);
        }
    }
    (best, argmax)
}

fn payoff(g: &GameDefinition, i: usize, a: &[usize]) -> f64 {
    g.payoff(i, a).expect("profile is feasible")
}

fn with_action(a: &[usize], i: usize, d: usize) -> Vec<usize> {
    let mut b = a.to_vec();
    b[i] = d;
    b
}

/// Optimal welfare over ComEq, SFCBS or SFCCE, with every incentive
/// constraint written out: one row per deviation map `A_i^r → A_i^t` or per
/// deviation strategy.
pub fn explicit_lp(g: &GameDefinition, concept: ConceptId, sense: Sense) -> f64 {
    let mut lp = LinearProgram::new(format!("explicit {concept} {sense}"), sense);
    let n = g.players();
    let supp = support(g);
    match concept {
        ConceptId::ComEq | ConceptId::Sfcbs => {
            let mut slices: BTreeSet<Vec<usize>> = supp.iter().map(|(t, _)| t.clone()).collect();
            if concept == ConceptId::ComEq {
                for (theta, _) in &supp {
                    for i in 0..n {
                        for r in 0..g.type_count(i) {
                            slices.insert(with_action(theta, i, r));
                        }
                    }
                }
            }
            // var index per (slice, profile)
            let mut vars: Vec<(Vec<usize>, Vec<(Vec<usize>, usize)>)> = Vec::new();
            for theta in &slices {
                let weight = g.prior().prob_of(theta);
                let profiles: Vec<(Vec<usize>, usize)> = feasible(g, theta)
                    .into_iter()
                    .map(|a| {
                        let v = lp.add_var("pi", 0.0, 1.0, weight * g.sw(&a));
                        (a, v)
                    })
                    .collect();
                lp.add_row("sum", profiles.iter().map(|&(_, v)| (v, 1.0)).collect(), Cmp::Eq, 1.0);
                vars.push((theta.clone(), profiles));
            }
            let slice = |theta: &[usize]| &vars.iter().find(|(t, _)| t == theta).expect("slice exists").1;
            for i in 0..n {
                if concept == ConceptId::Sfcbs {
                    for s in strategies(g, i) {
                        let mut terms = Vec::new();
                        for (theta, p) in &supp {
                            for (a, v) in slice(theta) {
                                let gain = payoff(g, i, a) - payoff(g, i, &with_action(a, i, s[theta[i]]));
                                terms.push((*v, p * gain));
                            }
                        }
                        lp.add_row("sfcbs", terms, Cmp::Ge, 0.0);
                    }
                    continue;
                }
                for t in 0..g.type_count(i) {
                    let own: Vec<&(Vec<usize>, f64)> = supp.iter().filter(|(th, _)| th[i] == t).collect();
                    if own.is_empty() {
                        continue;
                    }
                    for r in 0..g.type_count(i) {
                        let rec = g.actions(i, r);
                        let maps = cartesian(&vec![g.actions(i, t).to_vec(); rec.len()]);
                        for phi in maps {
                            let mut terms = Vec::new();
                            for (theta, p) in &own {
                                for (a, v) in slice(theta) {
                                    terms.push((*v, p * payoff(g, i, a)));
                                }
                                for (a, v) in slice(&with_action(theta, i, r)) {
                                    let k = rec.iter().position(|&x| x == a[i]).unwrap();
                                    terms.push((*v, -p * payoff(g, i, &with_action(a, i, phi[k]))));
                                }
                            }
                            lp.add_row("comeq", terms, Cmp::Ge, 0.0);
                        }
                    }
                }
            }
        }
        ConceptId::Sfcce => {
            let per_player: Vec<Vec<Vec<usize>>> = (0..n).map(|i| strategies(g, i)).collect();
            let index: Vec<Vec<usize>> = per_player.iter().map(|s| (0..s.len()).collect()).collect();
            let profiles: Vec<Vec<Vec<usize>>> = cartesian(&index)
                .into_iter()
                .map(|pick| pick.iter().enumerate().map(|(i, &k)| per_player[i][k].clone()).collect())
                .collect();
            let vars: Vec<usize> = profiles.iter().map(|s| lp.add_var("sigma", 0.0, 1.0, expected_sw(g, s))).collect();
            lp.add_row("sum", vars.iter().map(|&v| (v, 1.0)).collect(), Cmp::Eq, 1.0);
            for i in 0..n {
                for dev in &per_player[i] {
                    let terms = profiles
                        .iter()
                        .zip(&vars)
                        .map(|(s, &v)| {
                            let gain: f64 = supp
                                .iter()
                                .map(|(theta, p)| {
                                    let a: Vec<usize> = theta.iter().enumerate().map(|(j, &t)| s[j][t]).collect();
                                    p * (payoff(g, i, &a) - payoff(g, i, &with_action(&a, i, dev[theta[i]])))
                                })
                                .sum();
                            (v, gain)
                        })
                        .collect();
                    lp.add_row("sfcce", terms, Cmp::Ge, 0.0);
                }
            }
        }
        other => panic!("no explicit oracle for {other}"),
    }
    solve_lp(&lp, 1e-7).expect("explicit LP solves").objective
}

/// Small seeded random coverage game.
pub fn random_game(
    seed: u64,
    players: usize,
    types: usize,
    actions: usize,
    prior: PriorKind,
    utility: UtilityKind,
) -> GameDefinition {
    let spec = RandomGameSpec {
        players,
        types,
        actions,
        universe: 3 + (seed % 3) as usize,
        prior,
        utility,
        seed,
    };
    make_random_game(&spec, &Budget::default()).expect("random game builds")
}
