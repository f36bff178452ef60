//! Exact values of common sense, perception, prediction and communication
//! for finite Bayesian decision problems.
//!
//! A [`DecisionProblem`] pairs a joint distribution over an observable `X`
//! and an unobservable `Y` with a loss over `X x Y x U`. The [`solver`]
//! finds the best constant actions and policies under each information
//! structure, [`values`] turns their risks into operation values,
//! [`infotheory`] checks the log-loss case against Shannon measures,
//! [`properties`] verifies the concavity and convexity results numerically,
//! and [`multiagent`] ranks and orders agents by decision value.

pub mod error;
pub mod fixtures;
pub mod infotheory;
pub mod model;
pub mod multiagent;
pub mod properties;
pub mod solver;
pub mod values;

pub use error::{Error, Result};
pub use infotheory::{
    log_loss_realization_check, shannon_measures, LogBase, RealizationCheck, ShannonMeasures,
};
pub use model::{
    mix, validate_problem, ConditionalKernel, DecisionProblem, Distribution, FiniteSpace,
    JointDistribution, JointPolicy, LossTensor, Mix, Policy,
};
pub use multiagent::{
    condition_on_observations, first_agent_value, greedy_order, leave_one_out_value,
    subset_policy_risk, MultiAgentProblem, OrderingReport, SubsetPolicy,
};
pub use properties::{
    check_segment, run_property_suite, sample_coupling, sample_simplex, CouplingFamily, Direction,
    PropertyVerdict, SegmentCheck,
};
pub use solver::{
    best_blind_policy, best_constant_action, best_omniscient_policy, best_predictive_policy,
    evaluate_risk, Decision, SolvedAction, SolvedPolicy,
};
pub use values::{generalized_divergence, value_report, DivergenceInput, ValueReport};
