use serde::Serialize;

use super::{Check, Exit, GameArgs, Outcome, Row, RunConfig, SenseArg, StrModeArg};
use crate::equilibria::{lattice_check, optimize_welfare, ConceptId, EquilibriumReport, Sense};
use crate::game::{check_valid_conditions, validate_game, GameDefinition, GameSpec, ValidConditionsReport, ValidationReport};
use crate::instances::InstanceRecipe;
use crate::submodular::{check_monotone_submodular, CheckMode};
use crate::welfare::{compute_opt, sr_bound_audit, sr_gap, StrMode};
use crate::{Budget, Error, Result};

fn game_label(g: &GameDefinition) -> String {
    g.name().unwrap_or("game").to_string()
}

pub(crate) fn str_mode(arg: StrModeArg, restarts: u32, seed: u64) -> StrMode {
    match arg {
        StrModeArg::Exact => StrMode::Exact,
        StrModeArg::Local => StrMode::Local { restarts, seed },
        StrModeArg::Auto => StrMode::Auto { restarts, seed },
    }
}

#[derive(Serialize)]
struct ValidateResult {
    validation: ValidationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    conditions: Option<ValidConditionsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conditions_refused: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    independent_prior: Option<bool>,
}

pub(crate) fn validate(args: &GameArgs, budget: &Budget) -> Result<Outcome> {
    let spec: GameSpec = match (&args.game, &args.recipe) {
        (Some(path), _) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        (None, Some(recipe)) => recipe.parse::<InstanceRecipe>()?.build(budget)?.spec().clone(),
        (None, None) => return Err(Error::Invalid("pass --game <file> or --recipe <recipe>".into())),
    };
    let subject = spec.name.clone().unwrap_or_else(|| "game".into());
    let validation = validate_game(&spec, budget);
    let mut rows: Vec<Row> = validation
        .checks
        .iter()
        .map(|c| Row::check(&subject, &Check::new(&c.name, c.ok, &c.evidence)))
        .collect();
    if !validation.passed() {
        let result = ValidateResult {
            validation,
            conditions: None,
            conditions_refused: None,
            independent_prior: None,
        };
        return Outcome::new(result, rows, Exit::Input);
    }
    let g = GameDefinition::from_spec(spec, budget)?;
    let independent = g.prior().is_independent().independent;
    rows.push(Row::num(&subject, "independent_prior", independent as u8 as f64));
    let (conditions, refused, exit) = match check_valid_conditions(&g, budget) {
        Ok(r) => {
            rows.push(Row::num(&subject, "valid", r.valid as u8 as f64));
            rows.push(Row::num(&subject, "basic", r.basic as u8 as f64));
            let exit = if r.valid { Exit::Success } else { Exit::Violation };
            (Some(r), None, exit)
        }
        Err(e) if e.is_budget() => (None, Some(e.to_string()), Exit::Budget),
        Err(e) => return Err(e),
    };
    let result = ValidateResult {
        validation,
        conditions,
        conditions_refused: refused,
        independent_prior: Some(independent),
    };
    Outcome::new(result, rows, exit)
}

/// The generated game, with the run configuration recorded next to the
/// generator parameters.
pub(crate) fn generate(args: &GameArgs, config: &RunConfig, budget: &Budget) -> Result<Outcome> {
    let Some(recipe) = &args.recipe else {
        return Err(Error::Invalid("generate needs --recipe".into()));
    };
    let g = recipe.parse::<InstanceRecipe>()?.build(budget)?;
    let mut spec = g.spec().clone();
    let mut meta = spec.recipe.take().unwrap_or_else(|| serde_json::json!({}));
    meta["run_config"] = serde_json::to_value(config)?;
    spec.recipe = Some(meta);
    let subject = game_label(&g);
    let rows = vec![
        Row::num(&subject, "players", g.players() as f64),
        Row::num(&subject, "prior_support", g.prior().len() as f64),
        Row::num(&subject, "ground_size", g.welfare().ground().len() as f64),
    ];
    Outcome::new(spec, rows, Exit::Success)
}

pub(crate) fn welfare(g: &GameDefinition, mode: StrModeArg, restarts: u32, seed: u64, budget: &Budget) -> Result<Outcome> {
    let report = sr_gap(g, str_mode(mode, restarts, seed), budget)?;
    let subject = game_label(g);
    let independent = g.prior().is_independent().independent;
    let rows = vec![
        Row::num(&subject, "OPT", report.opt),
        Row::opt(&subject, "STR", Some(report.str_value), report.str_mode),
        Row::opt(&subject, "SR_gap", report.gap.value(), if report.lower_bound { "lower bound" } else { "" }),
        Row::num(&subject, "independent_prior", independent as u8 as f64),
    ];
    let result = serde_json::json!({
        "game": subject,
        "independent_prior": independent,
        "report": report,
    });
    Outcome::new(result, rows, Exit::Success)
}

#[derive(Serialize)]
struct ConceptEntry {
    concept: ConceptId,
    sense: Sense,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<EquilibriumReport>,
    /// Welfare over OPT: PoA for `min`, PoS for `max`.
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refused: Option<String>,
}

pub(crate) fn equilibrium(g: &GameDefinition, concepts: &[ConceptId], sense: SenseArg, budget: &Budget) -> Result<Outcome> {
    let concepts: Vec<ConceptId> = if concepts.is_empty() { ConceptId::ALL.to_vec() } else { concepts.to_vec() };
    let senses: &[Sense] = match sense {
        SenseArg::Min => &[Sense::Min],
        SenseArg::Max => &[Sense::Max],
        SenseArg::Both => &[Sense::Min, Sense::Max],
    };
    let opt = compute_opt(g, budget)?.value;
    let subject = game_label(g);
    let mut rows = vec![Row::num(&subject, "OPT", opt)];
    let mut entries = Vec::new();
    let mut exit = Exit::Success;
    for &c in &concepts {
        for &s in senses {
            let entry = match optimize_welfare(g, c, s, budget) {
                Ok(r) => {
                    let ratio = r.value.filter(|_| opt > 0.0).map(|v| v / opt);
                    rows.push(Row::opt(&subject, format!("{c}.{s}"), r.value, format!("{:?}", r.status)));
                    if let Some(q) = ratio {
                        rows.push(Row::num(&subject, format!("{}.{c}", if s == Sense::Min { "PoA" } else { "PoS" }), q));
                    }
                    ConceptEntry {
                        concept: c,
                        sense: s,
                        report: Some(r.report(g)),
                        ratio,
                        refused: None,
                    }
                }
                Err(e) if e.is_budget() => {
                    exit = Exit::Budget;
                    rows.push(Row::opt(&subject, format!("{c}.{s}"), None, e.to_string()));
                    ConceptEntry {
                        concept: c,
                        sense: s,
                        report: None,
                        ratio: None,
                        refused: Some(e.to_string()),
                    }
                }
                Err(e) => return Err(e),
            };
            entries.push(entry);
        }
    }
    let result = serde_json::json!({"game": subject, "opt": opt, "results": entries});
    Outcome::new(result, rows, exit)
}

pub(crate) fn audit_sr_bound(g: &GameDefinition, samples: u64, restarts: u32, seed: u64, budget: &Budget) -> Result<Outcome> {
    let audit = sr_bound_audit(g, StrMode::Auto { restarts, seed }, samples, seed, budget)?;
    let subject = game_label(g);
    let mut rows = vec![
        Row::num(&subject, "OPT", audit.opt),
        Row::opt(&subject, "STR", Some(audit.str_value), audit.str_mode),
    ];
    for (name, term) in [("a", &audit.term_a), ("b", &audit.term_b), ("c", &audit.term_c), ("d", &audit.term_d)] {
        rows.push(Row::opt(&subject, format!("term_{name}"), Some(term.value), format!("stderr={}", term.stderr)));
    }
    for q in &audit.inequalities {
        rows.push(Row::check(&subject, &Check::new(&q.name, q.holds, format!("slack={} band={}", q.slack, q.band))));
    }
    let exit = if audit.holds() { Exit::Success } else { Exit::Violation };
    Outcome::new(audit, rows, exit)
}

pub(crate) fn audit_lattice(g: &GameDefinition, budget: &Budget) -> Result<Outcome> {
    let report = lattice_check(g, budget)?;
    let subject = game_label(g);
    let mut rows = Vec::new();
    for (c, range) in &report.ranges {
        let note = range.skipped.clone().unwrap_or_default();
        rows.push(Row::opt(&subject, format!("{c}.min"), range.min, note.clone()));
        rows.push(Row::opt(&subject, format!("{c}.max"), range.max, note));
    }
    for a in &report.arrows {
        let name = format!("arrow {}->{}", a.arrow.sub, a.arrow.sup);
        let ok = !a.computable || (a.min_ok && a.max_ok);
        let detail = if a.computable { "" } else { "endpoint not computable" };
        rows.push(Row::check(&subject, &Check::new(name, ok, detail)));
    }
    for e in &report.embeddings {
        let name = format!("embedding {}->{} ({})", e.arrow.sub, e.arrow.sup, e.sense);
        rows.push(Row::check(&subject, &Check::new(name, e.passes, format!("max_gain={}", e.max_gain))));
    }
    let exit = if report.holds() { Exit::Success } else { Exit::Violation };
    Outcome::new(report, rows, exit)
}

pub(crate) fn audit_submodular(g: &GameDefinition, checks: u64, seed: u64, budget: &Budget) -> Result<Outcome> {
    let f = g.welfare();
    let report = match check_monotone_submodular(f, CheckMode::Exhaustive, budget) {
        Err(e) if e.is_budget() => check_monotone_submodular(f, CheckMode::Sampled { checks, seed }, budget)?,
        other => other?,
    };
    let subject = game_label(g);
    let rows = vec![
        Row::num(&subject, "checks", report.checks as f64),
        Row::check(&subject, &Check::new("non_negative", report.non_negative, "")),
        Row::check(&subject, &Check::new("monotone", report.is_monotone, report.evidence())),
        Row::check(&subject, &Check::new("submodular", report.is_submodular, report.evidence())),
    ];
    let exit = if report.passed() { Exit::Success } else { Exit::Violation };
    Outcome::new(report, rows, exit)
}
