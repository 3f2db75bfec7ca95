//! Browser bindings. Every export returns a JSON string so the page needs
//! no glue beyond `JSON.parse`.

use bayes_welfare::equilibria::{check_equilibrium, optimize_welfare, ConceptId, Sense, Witness, VERIFY_TOL};
use bayes_welfare::instances::{figure2_game, make_priority_game};
use bayes_welfare::submodular::{multilinear_exact, DensityVector, SetFunctionSpec};
use bayes_welfare::welfare::compute_opt;
use bayes_welfare::Budget;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn value(g: &bayes_welfare::game::GameDefinition, c: ConceptId, s: Sense) -> Result<Option<f64>, String> {
    optimize_welfare(g, c, s, &Budget::default()).map(|r| r.value).map_err(|e| e.to_string())
}

/// OPT, the communication-equilibrium welfare and the best Bayesian
/// solution for each ε of the two-player example.
pub fn figure2_sweep_value(eps: &[f64]) -> Result<Value, String> {
    let mut rows = Vec::new();
    for &e in eps {
        let g = figure2_game(e).map_err(|err| err.to_string())?;
        let opt = compute_opt(&g, &Budget::default()).map_err(|err| err.to_string())?.value;
        let comeq = value(&g, ConceptId::ComEq, Sense::Max)?;
        let bs = value(&g, ConceptId::Bs, Sense::Max)?;
        rows.push(json!({
            "eps": e,
            "opt": opt,
            "comeq": comeq,
            "bs_max": bs,
            "pos_comeq": comeq.map(|w| w / opt),
        }));
    }
    Ok(Value::Array(rows))
}

/// Min and max welfare of every concept in the priority game, plus the
/// mediator's verification outcome.
pub fn priority_concepts_value(n: usize) -> Result<Value, String> {
    let (g, mediator) = make_priority_game(n).map_err(|e| e.to_string())?;
    let opt = compute_opt(&g, &Budget::default()).map_err(|e| e.to_string())?.value;
    let mut concepts = Vec::new();
    for c in ConceptId::ALL {
        let lo = optimize_welfare(&g, c, Sense::Min, &Budget::default());
        let hi = optimize_welfare(&g, c, Sense::Max, &Budget::default());
        concepts.push(match (lo, hi) {
            (Ok(lo), Ok(hi)) => json!({ "concept": c.to_string(), "min": lo.value, "max": hi.value }),
            (Err(e), _) | (_, Err(e)) => json!({ "concept": c.to_string(), "error": e.to_string() }),
        });
    }
    let w = Witness::TypeDependent(mediator.clone());
    let verdict = |c| -> Result<Value, String> {
        let v = check_equilibrium(&g, c, &w, VERIFY_TOL).map_err(|e| e.to_string())?;
        Ok(json!({ "passes": v.is_empty(), "first_violation": v.first().map(|x| x.describe(&g)) }))
    };
    Ok(json!({
        "n": n,
        "opt": opt,
        "mediator_welfare": mediator.expected_welfare(&g),
        "mediator_bs": verdict(ConceptId::Bs)?,
        "mediator_comeq": verdict(ConceptId::ComEq)?,
        "concepts": concepts,
    }))
}

/// `t ↦ F(t·x)` on `[0, 1]` for a coverage function where element `e`
/// covers universe items `covers[e]` of unit weight.
pub fn multilinear_ray_value(covers: &[Vec<usize>], x: &[f64], steps: usize) -> Result<Value, String> {
    let universe = covers.iter().flatten().copied().max().map_or(0, |m| m + 1);
    let ids: Vec<String> = (0..covers.len()).map(|e| format!("e{e}")).collect();
    let elems: Vec<String> = (0..universe).map(|u| format!("u{u}")).collect();
    let pairs: Vec<(String, Vec<String>)> =
        covers.iter().enumerate().map(|(e, c)| (ids[e].clone(), c.iter().map(|u| elems[*u].clone()).collect())).collect();
    let f = SetFunctionSpec::coverage(&ids, &elems, &vec![1.0; universe], &pairs).map_err(|e| e.to_string())?;
    let x = DensityVector::new(x.to_vec()).map_err(|e| e.to_string())?;
    let steps = steps.max(1);
    let mut points = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let v = multilinear_exact(&f, &x.scaled(t).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        points.push(json!([t, v]));
    }
    let full = multilinear_exact(&f, &x).map_err(|e| e.to_string())?;
    let bound = |k: f64| -> Result<f64, String> {
        Ok(k * multilinear_exact(&f, &x.scaled(1.0 / k).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?)
    };
    Ok(json!({ "points": points, "f_x": full, "two_f_half": bound(2.0)?, "four_f_quarter": bound(4.0)? }))
}

fn respond(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn figure2_sweep(eps: Vec<f64>) -> Result<String, JsValue> {
    respond(figure2_sweep_value(&eps))
}

#[wasm_bindgen]
pub fn priority_concepts(n: usize) -> Result<String, JsValue> {
    respond(priority_concepts_value(n))
}

/// `covers_json` is an array of integer arrays.
#[wasm_bindgen]
pub fn multilinear_ray(covers_json: &str, x: Vec<f64>, steps: usize) -> Result<String, JsValue> {
    let covers: Vec<Vec<usize>> = serde_json::from_str(covers_json).map_err(|e| JsValue::from_str(&e.to_string()))?;
    respond(multilinear_ray_value(&covers, &x, steps))
}
