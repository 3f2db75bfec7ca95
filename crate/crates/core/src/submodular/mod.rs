//! Monotone submodular set functions and the toolkit built on them.

mod check;
mod distribution;
mod function;
mod ground;
mod multilinear;

pub use check::{
    check_monotone_submodular, CheckMode, MonotoneViolation, SubmodularReport,
    SubmodularViolation,
};
pub use distribution::{
    correlation_gap_check, independent_counterpart, partition_product_check,
    CorrelationGapReport, PartitionProductDistribution, PartitionProductReport, Ratio,
    SubsetDistribution,
};
pub use function::{
    ConcaveLoad, Coverage, MixtureComponent, MixtureComponentJson, PushforwardMixture, SetFunctionJson, SetFunctionKind,
    SetFunctionSpec, TableEntry, MAX_TABLE_GROUND,
};
pub use ground::GroundSet;
pub use multilinear::{
    multilinear_exact, multilinear_gradient, multilinear_sampled, DensityVector,
    SampledEstimate, MAX_EXACT_FRACTIONAL,
};
pub(crate) use multilinear::{exact_expectation, Welford};
