//! Multi-agent operations checked against brute-force policy enumeration.

use std::collections::BTreeMap;

use opvalue_core::multiagent::{exhaustive_order_diagnostic, sample_multi_agent_problem};
use opvalue_core::{
    condition_on_observations, first_agent_value, greedy_order, leave_one_out_value,
    subset_policy_risk, value_report, MultiAgentProblem,
};

const EPS: f64 = 1e-12;

/// Minimum expected loss over every deterministic policy of the observed
/// coordinates, evaluated cell by cell on the full joint.
fn enumerated_risk(p: &MultiAgentProblem, subset: &[usize]) -> f64 {
    let xs = p.x_sizes();
    let ny: usize = p.y_sizes().iter().product();
    let nx: usize = xs.iter().product();
    let nu = p.u_size();
    let na: usize = subset.iter().map(|&i| xs[i]).product();

    // observed assignment index of every X cell
    let assignment: Vec<usize> = (0..nx)
        .map(|mut xi| {
            let mut coords = vec![0; xs.len()];
            for (c, &s) in coords.iter_mut().zip(xs).rev() {
                *c = xi % s;
                xi /= s;
            }
            subset.iter().fold(0, |a, &i| a * xs[i] + coords[i])
        })
        .collect();

    let policies = nu.pow(na as u32);
    let mut best = f64::INFINITY;
    for code in 0..policies {
        let mut actions = vec![0; na];
        let mut c = code;
        for a in actions.iter_mut() {
            *a = c % nu;
            c /= nu;
        }
        let mut risk = 0.0;
        for xi in 0..nx {
            let u = actions[assignment[xi]];
            for yi in 0..ny {
                let cell = xi * ny + yi;
                risk += p.joint()[cell] * p.loss()[cell * nu + u];
            }
        }
        best = best.min(risk);
    }
    best
}

#[test]
fn subset_risk_matches_enumeration() {
    for seed in 0..50 {
        let p = sample_multi_agent_problem(&[2, 2], &[2, 2], 3, seed).unwrap();
        for s in [&[][..], &[0], &[1], &[0, 1]] {
            let got = subset_policy_risk(&p, s).unwrap().risk;
            assert!(
                (got - enumerated_risk(&p, s)).abs() < EPS,
                "seed {seed} subset {s:?}"
            );
        }
    }
}

#[test]
fn agent_values_match_enumeration() {
    for seed in 0..30 {
        let p = sample_multi_agent_problem(&[2, 2, 2], &[2, 1, 3], 3, 1000 + seed).unwrap();
        let all = [0, 1, 2];
        let r_all = enumerated_risk(&p, &all);
        let r_none = enumerated_risk(&p, &[]);
        for i in 0..3 {
            let fav = first_agent_value(&p, i).unwrap();
            assert!((fav - (r_none - enumerated_risk(&p, &[i]))).abs() < EPS);
            assert!(fav >= -EPS);
            let rest: Vec<usize> = all.iter().copied().filter(|&j| j != i).collect();
            let loo = leave_one_out_value(&p, i).unwrap();
            assert!((loo - (enumerated_risk(&p, &rest) - r_all)).abs() < EPS);
            assert!(loo >= -EPS);
        }
    }
}

#[test]
fn greedy_steps_match_enumeration() {
    for seed in 0..20 {
        let p = sample_multi_agent_problem(&[2, 2, 2], &[2, 2, 2], 3, 2000 + seed).unwrap();
        let r = greedy_order(&p).unwrap();
        assert_eq!(r.step_risks.len(), 4);
        assert!((r.step_risks[0] - enumerated_risk(&p, &[])).abs() < EPS);
        let mut chosen = Vec::new();
        for k in 0..3 {
            // best single addition according to the oracle, smallest index on ties
            let mut best: Option<(usize, f64)> = None;
            for i in (0..3).filter(|i| !chosen.contains(i)) {
                let mut s = chosen.clone();
                s.push(i);
                s.sort_unstable();
                let risk = enumerated_risk(&p, &s);
                if best.is_none_or(|(_, b)| risk < b - EPS) {
                    best = Some((i, risk));
                }
            }
            let (agent, risk) = best.unwrap();
            assert!(
                (r.step_risks[k + 1] - risk).abs() < EPS,
                "seed {seed} step {k}"
            );
            if r.order[k] != agent {
                // only acceptable when the two candidates tie within rounding
                let theirs = r.candidates[k]
                    .iter()
                    .find(|c| c.agent == agent)
                    .unwrap()
                    .risk;
                assert!((theirs - r.step_risks[k + 1]).abs() < EPS);
            }
            assert!(r.step_values[k] >= -EPS);
            assert_eq!(r.step_values[k], r.step_risks[k] - r.step_risks[k + 1]);
            chosen.push(r.order[k]);
        }
        for i in 0..3 {
            let first = r.candidates[0].iter().find(|c| c.agent == i).unwrap();
            assert_eq!(first.value, first_agent_value(&p, i).unwrap());
        }
    }
}

#[test]
fn observing_more_never_hurts() {
    for seed in 0..40 {
        let p = sample_multi_agent_problem(&[2, 3, 2], &[3, 2, 1], 4, 3000 + seed).unwrap();
        let mut risk = std::collections::HashMap::new();
        for mask in 0u32..8 {
            let s: Vec<usize> = (0..3).filter(|&i| mask & (1 << i) != 0).collect();
            risk.insert(mask, subset_policy_risk(&p, &s).unwrap().risk);
        }
        for s in 0u32..8 {
            for t in 0u32..8 {
                if s & t == s {
                    assert!(risk[&t] <= risk[&s] + EPS);
                }
            }
        }
    }
}

#[test]
fn single_agent_problem_matches_value_report() {
    for seed in 0..50 {
        let p = sample_multi_agent_problem(&[3], &[4], 3, 4000 + seed).unwrap();
        let report = value_report(&p.to_decision_problem());
        assert_eq!(
            subset_policy_risk(&p, &[]).unwrap().risk,
            report.risks.r_u_star
        );
        assert_eq!(
            subset_policy_risk(&p, &[0]).unwrap().risk,
            report.risks.r_predictive
        );
        let fav = first_agent_value(&p, 0).unwrap();
        assert_eq!(fav, report.risks.r_u_star - report.risks.r_predictive);
        assert_eq!(fav, leave_one_out_value(&p, 0).unwrap());
    }
}

#[test]
fn redundant_copy_has_no_leave_one_out_value() {
    // agent 1 observes an exact copy of agent 0; the loss depends on that value
    let mut joint = vec![0.0; 4 * 2];
    let mut loss = vec![0.0; 4 * 2 * 2];
    for v in 0..2 {
        let xi = v * 2 + v;
        for y in 0..2 {
            let cell = xi * 2 + y;
            joint[cell] = if v == 0 { 0.3 } else { 0.2 };
            loss[cell * 2] = if v == 0 { 1.0 } else { 0.0 };
            loss[cell * 2 + 1] = if v == 0 { 0.0 } else { 1.0 };
        }
    }
    let p = MultiAgentProblem::new(vec![2, 2], vec![2], 2, joint, loss).unwrap();
    assert!(leave_one_out_value(&p, 0).unwrap().abs() < EPS);
    assert!(leave_one_out_value(&p, 1).unwrap().abs() < EPS);
    assert!(first_agent_value(&p, 1).unwrap() > 0.1);
}

#[test]
fn conditioning_on_every_observable() {
    for seed in 0..20 {
        let p = sample_multi_agent_problem(&[2, 3], &[2, 2], 3, 5000 + seed).unwrap();
        let (x0, x1) = (seed as usize % 2, seed as usize % 3);
        let c = condition_on_observations(&p, &BTreeMap::from([(0, x0), (1, x1)])).unwrap();
        assert_eq!(c.n(), 0);
        // direct conditional expectation on the rows with X = (x0, x1)
        let xi = x0 * 3 + x1;
        let row = &p.joint()[xi * 4..(xi + 1) * 4];
        let mass: f64 = row.iter().sum();
        let best = (0..3)
            .map(|u| {
                row.iter()
                    .enumerate()
                    .map(|(y, &w)| w / mass * p.loss()[(xi * 4 + y) * 3 + u])
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((subset_policy_risk(&c, &[]).unwrap().risk - best).abs() < EPS);
        let ordering = greedy_order(&c).unwrap();
        assert!(ordering.order.is_empty());
    }
}

#[test]
fn greedy_is_compared_with_all_orders() {
    let mut greedy_best = 0;
    for seed in 0..20 {
        let p = sample_multi_agent_problem(&[2, 2, 2], &[2, 2, 2], 3, 6000 + seed).unwrap();
        let d = exhaustive_order_diagnostic(&p).unwrap();
        assert!(d.best_score <= d.greedy_score + EPS);
        greedy_best += d.greedy_is_best as usize;
    }
    assert!(greedy_best > 0);
}
