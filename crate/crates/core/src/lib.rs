//! Bi-objective solver library for the reliable capacitated
//! location-inventory problem with probabilistic facility disruptions and
//! lost-customer penalties.
//!
//! The crate is organized around a plain data model and pure functions:
//!
//! * [`model`] — instances, solutions, exact objective evaluation and
//!   feasibility checking,
//! * [`decoder`] — deterministic genotype-to-solution decoding under
//!   capacity, with cardinality repair,
//! * [`nsga2`] / [`moss`] — the two Pareto metaheuristics,
//! * [`oracle`] — exhaustive exact fronts for tiny instances,
//! * [`metrics`] — spacing/diversity/coverage front metrics,
//! * [`instance`] — synthetic generation and CSV round-trips,
//! * [`rsm`] — response-surface parameter tuning.
//!
//! Everything downstream of an RNG draw is deterministic for a fixed seed.
//! Population evaluation, oracle enumeration and tuner design points run on
//! rayon when the `parallel` feature (default) is enabled and fall back to
//! sequential loops otherwise; results are identical either way.

pub mod archive;
pub mod decoder;
pub mod instance;
pub mod metrics;
pub mod model;
pub mod moss;
pub mod nsga2;
pub mod oracle;
pub mod parallel;
pub mod population;
pub mod rsm;

pub use archive::{ArchiveEntry, ParetoArchive};
pub use decoder::{decode, decode_strict, repair, DecodeConfig, DecodeError, Genotype};
pub use instance::{generate, CsvError, GenRecipe};
pub use metrics::{coverage_fraction, diversity, filter_non_dominated, spacing};
pub use model::{
    check_feasibility, customer_expected_cost, evaluate, evaluate_obj1, evaluate_obj2,
    expected_demand, CustomerRecord, DistanceKind, FeasibilityReport, InstanceError, ModelError,
    ObjectiveVector, ProblemInstance, SiteRecord, Solution, Violation,
};
pub use moss::{build_reference_set, run_moss, subset_generation, MossConfig};
pub use nsga2::{crowding_distance, non_dominated_sort, run_nsga2, NsgaConfig};
pub use oracle::{exact_front_decoder_reachable, exact_front_full, OracleError, OracleLimits};
pub use population::{Individual, SolveError};

#[cfg(test)]
pub(crate) mod testutil;
