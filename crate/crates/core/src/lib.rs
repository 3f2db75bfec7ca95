//! Bayesian games whose social welfare is a monotone submodular set function.
//!
//! The crate covers the whole pipeline for desk-scale instances:
//!
//! * [`submodular`]: set functions (weighted coverage, explicit tables, concave
//!   load functions), marginals, the multilinear extension and the
//!   correlation-gap style inequalities.
//! * [`game`]: the game model (tabular priors, type-dependent action sets,
//!   utility rules), validators for the valid/basic utility conditions and the
//!   strategic-form construction.
//! * [`welfare`]: the optimal welfare, the best strategy-profile welfare, their
//!   ratio and the heavy/light bound audit.
//! * [`equilibria`]: linear programs for every Bayes (coarse) correlated
//!   equilibrium concept, witness verification, pure Bayes–Nash enumeration and
//!   the inclusion-lattice check.
//! * [`instances`]: the reference games and seeded random generators.
//! * `cli` (feature `cli`): the command-line front end.

pub mod error;
pub mod rng;
pub mod submodular;
pub mod game;
pub mod welfare;
pub mod equilibria;
pub mod instances;
#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};

/// Evaluation budget shared by every exhaustive computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Budget {
    /// Maximum number of set-function evaluations / enumerated objects.
    pub enumerations: u64,
    /// Maximum number of LP variables.
    pub lp_variables: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            enumerations: 10_000_000,
            lp_variables: 250_000,
        }
    }
}

impl Budget {
    pub(crate) fn require(&self, what: &str, required: u128) -> Result<()> {
        if required > self.enumerations as u128 {
            Err(Error::budget(what, required, self.enumerations as u128))
        } else {
            Ok(())
        }
    }
}

/// Absolute tolerance for comparisons along exact (+, ·) computation paths.
pub const EXACT_TOL: f64 = 1e-9;

/// `1 - 1/e`.
pub fn one_minus_inv_e() -> f64 {
    1.0 - (-1.0f64).exp()
}
