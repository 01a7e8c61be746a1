//! The incentive ratio: how much an agent can gain, measured by its true
//! utility, by announcing a different utility function.

mod bounds;
mod closed_form;
mod optimizer;
mod witness;

pub use bounds::{
    check_power_inequality, power_samples, verify_upper_bound_m, BoundReport, PowerReport,
    SampleOutcome, SamplerConfig, E_TO_ONE_OVER_E,
};
pub use closed_form::{
    check_two_by_two_facts, ratio_closed_form_2x2, ratio_from_equilibria_2x2, FactsReport,
    TwoByTwoRatio,
};
pub use optimizer::{
    evaluate_deviation, incentive_ratio_cd, DeviationOutcome, OptimizerConfig, RatioQuery,
    RatioResult, TraceEntry,
};
pub use witness::{witness_cd, witness_leontief, witness_linear, Witness};
