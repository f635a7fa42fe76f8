//! Exhaustive optimum search and the 3-CNF hardness instances.

mod brute_force;
mod reduction;

pub use brute_force::{
    brute_force_optimum, brute_force_optimum_with, separable_threshold_optimum, Mode,
    OptimumReport, OracleOptions, DEFAULT_MAX_POINTS,
};
pub use reduction::{
    baseline_payoff, instance_baseline, sat_to_game, verify_reduction, CnfFormula,
    ReductionInstance, ReductionReport,
};
