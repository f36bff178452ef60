//! Fixtures shared by the benchmarks.

use opvalue_core::multiagent::sample_multi_agent_problem;
use opvalue_core::properties::sample_problem;
use opvalue_core::{DecisionProblem, MultiAgentProblem};

/// Square single-agent problems of increasing size.
pub fn problems(sizes: &[usize], seed: u64) -> Vec<(usize, DecisionProblem)> {
    sizes
        .iter()
        .map(|&n| (n, sample_problem(n, n, n, seed)))
        .collect()
}

/// `n` agents with binary observables and unobservables and three actions.
pub fn agents(n: usize, seed: u64) -> MultiAgentProblem {
    sample_multi_agent_problem(&vec![2; n], &vec![2; n], 3, seed)
        .expect("benchmark sizes stay under the cell cap")
}
