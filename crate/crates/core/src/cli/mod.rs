//! Command-line front end.
//!
//! Every run writes one document: the full [`RunConfig`] next to the result,
//! as pretty JSON or as a tidy CSV table (one measurement per row) preceded
//! by a `# run_config=` comment line. Identical configurations produce
//! byte-identical output.
//!
//! Exit codes: 0 success, 1 property violation, 2 input error, 3 budget
//! refusal.

mod commands;
mod reproduce;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::equilibria::ConceptId;
use crate::game::GameDefinition;
use crate::instances::InstanceRecipe;
use crate::{Budget, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Violation = 1,
    Input = 2,
    Budget = 3,
}

impl Exit {
    fn of_error(e: &Error) -> Exit {
        match e {
            Error::Budget { .. } => Exit::Budget,
            // a solver failure on a well-formed game means a checked property broke
            Error::Lp { .. } => Exit::Violation,
            Error::Domain(_) | Error::Invalid(_) | Error::Io(_) | Error::Json(_) => Exit::Input,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Exit::Success => "ok",
            Exit::Violation => "violation",
            Exit::Input => "input_error",
            Exit::Budget => "budget_refusal",
        }
    }
}

#[derive(Parser, Debug, Clone, Serialize)]
#[command(name = "bayes-welfare", version, about = "Welfare and equilibrium computations for Bayesian games with submodular welfare")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Seed for every sampled computation.
    #[arg(long, global = true, env = "BAYES_WELFARE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Maximum enumerated objects per exhaustive computation.
    #[arg(long = "budget-enum", global = true, env = "BAYES_WELFARE_BUDGET_ENUM", default_value_t = Budget::default().enumerations)]
    pub budget_enum: u64,
    /// Maximum LP variables.
    #[arg(long = "budget-lp", global = true, env = "BAYES_WELFARE_BUDGET_LP", default_value_t = Budget::default().lp_variables)]
    pub budget_lp: usize,
    /// Tolerance for reported property checks.
    #[arg(long, global = true, env = "BAYES_WELFARE_TOL", default_value_t = 1e-6)]
    pub tol: f64,
    /// Output file (stdout when absent).
    #[arg(long, global = true, env = "BAYES_WELFARE_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "BAYES_WELFARE_FORMAT", value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Where the game comes from: a JSON game file or a generator recipe such as
/// `figure2:eps=0.01` or `grid:n=4,k=2`.
#[derive(Args, Debug, Clone, Serialize)]
pub struct GameArgs {
    #[arg(long, env = "BAYES_WELFARE_GAME", conflicts_with = "recipe")]
    pub game: Option<PathBuf>,
    #[arg(long, env = "BAYES_WELFARE_RECIPE")]
    pub recipe: Option<String>,
}

impl GameArgs {
    fn load(&self, budget: &Budget) -> Result<GameDefinition> {
        match (&self.game, &self.recipe) {
            (Some(path), _) => GameDefinition::from_json_str(&std::fs::read_to_string(path)?, budget),
            (None, Some(recipe)) => recipe.parse::<InstanceRecipe>()?.build(budget),
            (None, None) => Err(Error::Invalid("pass --game <file> or --recipe <recipe>".into())),
        }
    }
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Structural validation plus the valid/basic utility conditions.
    Validate(GameArgs),
    /// Emit a generated game as JSON.
    Generate(GameArgs),
    /// OPT, STR and their ratio.
    Welfare {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long = "str-mode", env = "BAYES_WELFARE_STR_MODE", value_enum, default_value_t = StrModeArg::Auto)]
        str_mode: StrModeArg,
        /// Random restarts of the local search.
        #[arg(long, env = "BAYES_WELFARE_RESTARTS", default_value_t = 8)]
        restarts: u32,
    },
    /// Worst/best equilibrium welfare per concept.
    Equilibrium {
        #[command(flatten)]
        game: GameArgs,
        /// Comma-separated concepts; all when absent.
        #[arg(long, env = "BAYES_WELFARE_CONCEPT", value_delimiter = ',')]
        concept: Vec<ConceptId>,
        #[arg(long, env = "BAYES_WELFARE_SENSE", value_enum, default_value_t = SenseArg::Both)]
        sense: SenseArg,
    },
    /// Reference experiments.
    Reproduce {
        #[command(subcommand)]
        experiment: Experiment,
    },
    /// Bound and consistency audits of one game.
    Audit {
        #[command(subcommand)]
        which: AuditKind,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrModeArg {
    Exact,
    Local,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SenseArg {
    Min,
    Max,
    Both,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum Experiment {
    /// Two-player game where communication equilibria lose welfare.
    Figure2 {
        #[arg(long, value_delimiter = ',', default_value = "0.01")]
        eps: Vec<f64>,
    },
    /// Priority game separating Bayesian solutions from communication
    /// equilibria.
    BayesianSolutionGap {
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// STR/OPT on random independent games and on the bipartite surrogate.
    SrIndependent {
        #[arg(long, default_value_t = 30)]
        games: u64,
        #[arg(long = "surrogate-n", default_value_t = 16)]
        surrogate_n: usize,
        #[arg(long, default_value_t = 8)]
        draws: usize,
        #[arg(long = "opt-samples", default_value_t = 4000)]
        opt_samples: u64,
        #[arg(long, default_value_t = 8)]
        restarts: u32,
    },
    /// Correlated grid games.
    SrGrid {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Random strategy profiles in sampler mode.
        #[arg(long, default_value_t = 1000)]
        profiles: u64,
        /// Monte Carlo draws per estimate.
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
    /// Inclusion-lattice monotonicity on the reference games and random ones.
    Lattice {
        #[arg(long, default_value_t = 20)]
        games: u64,
    },
    /// Equilibrium welfare floors on random valid games.
    Smoothness {
        #[arg(long, default_value_t = 20)]
        games: u64,
        #[arg(long, default_value_t = 10)]
        correlated: u64,
    },
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "audit", rename_all = "kebab-case")]
pub enum AuditKind {
    /// Heavy/light decomposition bound chain (needs a square player count).
    SrBound {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 20_000)]
        samples: u64,
        #[arg(long, default_value_t = 8)]
        restarts: u32,
    },
    Lattice {
        #[command(flatten)]
        game: GameArgs,
    },
    /// Monotonicity and submodularity of the welfare function.
    Submodular {
        #[command(flatten)]
        game: GameArgs,
        /// Sampled checks when exhaustive tabulation is over budget.
        #[arg(long, default_value_t = 20_000)]
        checks: u64,
    },
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    #[serde(flatten)]
    pub common: Common,
}

/// One tidy-table measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub subject: String,
    pub metric: String,
    pub value: Option<f64>,
    pub note: String,
}

impl Row {
    pub(crate) fn num(subject: impl Into<String>, metric: impl Into<String>, value: f64) -> Self {
        Row {
            subject: subject.into(),
            metric: metric.into(),
            value: Some(value),
            note: String::new(),
        }
    }

    pub(crate) fn opt(subject: impl Into<String>, metric: impl Into<String>, value: Option<f64>, note: impl Into<String>) -> Self {
        Row {
            subject: subject.into(),
            metric: metric.into(),
            value,
            note: note.into(),
        }
    }

    pub(crate) fn check(subject: impl Into<String>, check: &Check) -> Self {
        Row {
            subject: subject.into(),
            metric: format!("check:{}", check.name),
            value: Some(if check.ok { 1.0 } else { 0.0 }),
            note: check.detail.clone(),
        }
    }
}

/// A named property with its outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    pub(crate) fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            ok,
            detail: detail.into(),
        }
    }
}

/// A command's result before rendering.
pub(crate) struct Outcome {
    pub result: serde_json::Value,
    pub rows: Vec<Row>,
    pub exit: Exit,
}

impl Outcome {
    pub(crate) fn new(result: impl Serialize, rows: Vec<Row>, exit: Exit) -> Result<Self> {
        Ok(Outcome {
            result: serde_json::to_value(result)?,
            rows,
            exit,
        })
    }
}

#[derive(Serialize)]
struct Document<'a> {
    run_config: &'a RunConfig,
    status: &'static str,
    exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<&'a serde_json::Value>,
}

impl Cli {
    pub fn budget(&self) -> Budget {
        Budget {
            enumerations: self.common.budget_enum,
            lp_variables: self.common.budget_lp,
        }
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: self.command.clone(),
            common: self.common.clone(),
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let budget = cli.budget();
    let c = &cli.common;
    if c.budget_enum == 0 || c.budget_lp == 0 {
        return Err(Error::Invalid("budgets must be positive".into()));
    }
    if !(c.tol >= 0.0 && c.tol.is_finite()) {
        return Err(Error::Invalid("--tol must be a finite non-negative number".into()));
    }
    match &cli.command {
        Command::Validate(game) => commands::validate(game, &budget),
        Command::Generate(game) => commands::generate(game, &cli.run_config(), &budget),
        Command::Welfare {
            game,
            str_mode,
            restarts,
        } => commands::welfare(&game.load(&budget)?, *str_mode, *restarts, c.seed, &budget),
        Command::Equilibrium { game, concept, sense } => {
            commands::equilibrium(&game.load(&budget)?, concept, *sense, &budget)
        }
        Command::Reproduce { experiment } => reproduce::run(experiment, c, &budget),
        Command::Audit { which } => match which {
            AuditKind::SrBound {
                game,
                samples,
                restarts,
            } => commands::audit_sr_bound(&game.load(&budget)?, *samples, *restarts, c.seed, &budget),
            AuditKind::Lattice { game } => commands::audit_lattice(&game.load(&budget)?, &budget),
            AuditKind::Submodular { game, checks } => {
                commands::audit_submodular(&game.load(&budget)?, *checks, c.seed, &budget)
            }
        },
    }
}

/// Renders a finished run; `generate` writes the bare game file instead of
/// an envelope.
fn render(cli: &Cli, config: &RunConfig, outcome: &std::result::Result<Outcome, Error>) -> Result<Vec<u8>> {
    let (exit, error, result) = match outcome {
        Ok(o) => (o.exit, None, Some(&o.result)),
        Err(e) => (Exit::of_error(e), Some(e.to_string()), None),
    };
    if let (Command::Generate(_), Some(game), Format::Json) = (&cli.command, result, cli.common.format) {
        let mut text = serde_json::to_vec_pretty(game)?;
        text.push(b'\n');
        return Ok(text);
    }
    match cli.common.format {
        Format::Json => {
            let doc = Document {
                run_config: config,
                status: exit.label(),
                exit_code: exit as i32,
                error,
                result,
            };
            let mut text = serde_json::to_vec_pretty(&doc)?;
            text.push(b'\n');
            Ok(text)
        }
        Format::Csv => {
            let mut out = format!("# run_config={}\n", serde_json::to_string(config)?).into_bytes();
            if let Some(e) = &error {
                out.extend(format!("# error={e}\n").bytes());
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            // header even when there are no rows
            w.write_record(["subject", "metric", "value", "note"]).map_err(csv_error)?;
            w.write_record(["run", "exit_code", &(exit as i32).to_string(), exit.label()])
                .map_err(csv_error)?;
            if let Ok(o) = outcome {
                for row in &o.rows {
                    let value = row.value.map(|v| format!("{v}")).unwrap_or_default();
                    w.write_record([row.subject.as_str(), row.metric.as_str(), value.as_str(), row.note.as_str()])
                        .map_err(csv_error)?;
                }
            }
            out.extend(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?);
            Ok(out)
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Invalid(format!("csv: {e}"))
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let config = cli.run_config();
    let outcome = dispatch(cli);
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
    }
    let exit = match &outcome {
        Ok(o) => o.exit,
        Err(e) => Exit::of_error(e),
    };
    let written = render(cli, &config, &outcome).and_then(|bytes| match &cli.common.out {
        Some(path) => std::fs::write(path, bytes).map_err(Error::from),
        None => std::io::stdout().write_all(&bytes).map_err(Error::from),
    });
    match written {
        Ok(()) => exit as i32,
        Err(e) => {
            eprintln!("error: could not write output: {e}");
            Exit::Input as i32
        }
    }
}

pub fn main() -> i32 {
    run(&Cli::parse())
}
