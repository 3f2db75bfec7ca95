//! Optimal welfare, the best strategy-profile welfare, the strategy
//! representability gap and the heavy/light bound audit for correlated priors.

mod audit;
mod opt;
mod strategy;

pub use audit::{
    heavy_light_split, marginal_profile, sr_bound_audit, str_sampling_lower_bound, AuditInequality, AuditTerm,
    HeavyLightSplit, MarginalProfile, SrBoundAudit,
};
pub use opt::{compute_opt, OptimalProfile, OptimalProfileCertificate};
pub use strategy::{compute_str_exact, compute_str_local, sr_gap, SrGapReport, StrMode, StrResult};
