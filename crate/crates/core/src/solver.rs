//! Exhaustive optimizers for the five information structures.
//!
//! All argmins scan actions in index order and keep the first minimum, so
//! ties always resolve to the smallest action index.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DecisionProblem, JointDistribution, JointPolicy, Policy};

/// Index of the first minimum; `values` must be non-empty.
pub(crate) fn argmin(values: impl IntoIterator<Item = f64>) -> (usize, f64) {
    let mut it = values.into_iter().enumerate();
    let (mut best, mut best_v) = it.next().expect("argmin over an empty action set");
    for (i, v) in it {
        if v < best_v {
            best = i;
            best_v = v;
        }
    }
    (best, best_v)
}

/// Expected loss of every action under `measure`, summed x-major then y.
fn action_objectives(p: &DecisionProblem, measure: &JointDistribution) -> Vec<f64> {
    let loss = p.loss();
    let mut acc = vec![0.0; p.nu()];
    for x in 0..p.nx() {
        for y in 0..p.ny() {
            let w = measure.get(x, y);
            for (a, &l) in acc.iter_mut().zip(loss.actions(x, y)) {
                *a += w * l;
            }
        }
    }
    acc
}

/// Expected loss of every action at a fixed `x` under a distribution over `Y`.
fn row_objectives(p: &DecisionProblem, x: usize, py: &[f64]) -> Vec<f64> {
    let loss = p.loss();
    let mut acc = vec![0.0; p.nu()];
    for (y, &w) in py.iter().enumerate() {
        for (a, &l) in acc.iter_mut().zip(loss.actions(x, y)) {
            *a += w * l;
        }
    }
    acc
}

/// A constant action with its optimization objective and its true risk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolvedAction {
    pub action: usize,
    pub objective_risk: f64,
    pub true_risk: f64,
}

/// A policy together with its expected loss under the true joint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvedPolicy<P> {
    pub policy: P,
    pub true_risk: f64,
}

/// Any decision whose expected loss can be evaluated.
#[derive(Debug, Clone, Copy)]
pub enum Decision<'a> {
    Action(usize),
    Policy(&'a Policy),
    JointPolicy(&'a JointPolicy),
}

/// Best constant action when expectations are taken under `measure`.
///
/// With `measure` set to the product of the marginals this is the action
/// chosen while ignoring the dependence between `X` and `Y`; with the
/// problem's own joint it is the best constant action.
pub fn best_constant_action(
    p: &DecisionProblem,
    measure: &JointDistribution,
) -> Result<SolvedAction> {
    if (measure.nx(), measure.ny()) != (p.nx(), p.ny()) {
        return Err(Error::ShapeMismatch(format!(
            "measure is {}x{}, problem is {}x{}",
            measure.nx(),
            measure.ny(),
            p.nx(),
            p.ny()
        )));
    }
    let (action, objective_risk) = argmin(action_objectives(p, measure));
    let true_risk = if measure == p.joint() {
        objective_risk
    } else {
        action_objectives(p, p.joint())[action]
    };
    Ok(SolvedAction {
        action,
        objective_risk,
        true_risk,
    })
}

/// Per-x best action against the marginal of `Y`, ignoring its dependence on `X`.
///
/// The risk uses the same per-x decomposition as [`best_predictive_policy`],
/// so the two policies get identical risks whenever they agree.
pub fn best_blind_policy(p: &DecisionProblem) -> SolvedPolicy<Policy> {
    let (px, py) = p.joint().marginals();
    let kernel = p.joint().conditional_kernel();
    let mut map = Vec::with_capacity(p.nx());
    let mut true_risk = 0.0;
    for x in 0..p.nx() {
        let u = argmin(row_objectives(p, x, py.probs())).0;
        map.push(u);
        true_risk += px.get(x) * row_objectives(p, x, kernel.row(x))[u];
    }
    SolvedPolicy {
        policy: Policy::from_raw(map),
        true_risk,
    }
}

/// Per-x best action against the posterior `P(Y | X = x)`.
///
/// The risk is accumulated as `sum_x P(x) min_u E[loss(x, Y, u) | X = x]`.
pub fn best_predictive_policy(p: &DecisionProblem) -> SolvedPolicy<Policy> {
    let px = p.joint().marginal_x();
    let kernel = p.joint().conditional_kernel();
    let mut map = Vec::with_capacity(p.nx());
    let mut true_risk = 0.0;
    for x in 0..p.nx() {
        let (u, v) = argmin(row_objectives(p, x, kernel.row(x)));
        map.push(u);
        true_risk += px.get(x) * v;
    }
    SolvedPolicy {
        policy: Policy::from_raw(map),
        true_risk,
    }
}

/// Per-cell best action when both `X` and `Y` are known.
pub fn best_omniscient_policy(p: &DecisionProblem) -> SolvedPolicy<JointPolicy> {
    let mut map = Vec::with_capacity(p.nx() * p.ny());
    let mut true_risk = 0.0;
    for x in 0..p.nx() {
        for y in 0..p.ny() {
            let (u, v) = argmin(p.loss().actions(x, y).iter().copied());
            map.push(u);
            true_risk += p.joint().get(x, y) * v;
        }
    }
    SolvedPolicy {
        policy: JointPolicy::from_raw(p.nx(), p.ny(), map),
        true_risk,
    }
}

fn risk_of_policy(p: &DecisionProblem, policy: &Policy) -> f64 {
    let mut risk = 0.0;
    for x in 0..p.nx() {
        let u = policy.action(x);
        for y in 0..p.ny() {
            risk += p.joint().get(x, y) * p.loss().get(x, y, u);
        }
    }
    risk
}

/// Expected loss of `decision` under the problem's joint.
pub fn evaluate_risk(p: &DecisionProblem, decision: Decision<'_>) -> Result<f64> {
    let nu = p.nu();
    let check = |u: usize| {
        if u < nu {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                what: "action",
                index: u,
                size: nu,
            })
        }
    };
    match decision {
        Decision::Action(u) => {
            check(u)?;
            Ok(action_objectives(p, p.joint())[u])
        }
        Decision::Policy(policy) => {
            if policy.len() != p.nx() {
                return Err(Error::ShapeMismatch(format!(
                    "policy covers {} observations, problem has {}",
                    policy.len(),
                    p.nx()
                )));
            }
            policy.actions().iter().try_for_each(|&u| check(u))?;
            Ok(risk_of_policy(p, policy))
        }
        Decision::JointPolicy(policy) => {
            if (policy.nx(), policy.ny()) != (p.nx(), p.ny()) {
                return Err(Error::ShapeMismatch(format!(
                    "joint policy is {}x{}, problem is {}x{}",
                    policy.nx(),
                    policy.ny(),
                    p.nx(),
                    p.ny()
                )));
            }
            policy.actions().iter().try_for_each(|&u| check(u))?;
            let mut risk = 0.0;
            for x in 0..p.nx() {
                for y in 0..p.ny() {
                    risk += p.joint().get(x, y) * p.loss().get(x, y, policy.action(x, y));
                }
            }
            Ok(risk)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::lane_change;
    use crate::properties::sample_problem;

    const EPS: f64 = 1e-12;

    fn product_measure(p: &DecisionProblem) -> JointDistribution {
        let (px, py) = p.joint().marginals();
        JointDistribution::product(&px, &py)
    }

    #[test]
    fn worked_example_constant_actions() {
        let p = lane_change();
        let star = best_constant_action(&p, p.joint()).unwrap();
        assert_eq!(star.action, 0);
        assert!(star.true_risk.abs() < EPS);
        assert_eq!(star.objective_risk, star.true_risk);

        let bar = best_constant_action(&p, &product_measure(&p)).unwrap();
        assert_eq!(bar.action, 0);
        assert!(bar.true_risk.abs() < EPS);
    }

    #[test]
    fn ubar_alternative_scores_083() {
        // Action 1 under the product measure: -0.085 + 0.015 + 0.765 + 0.135.
        let p = lane_change();
        let objs = action_objectives(&p, &product_measure(&p));
        assert!((objs[1] - 0.83).abs() < EPS);
    }

    #[test]
    fn constant_loss_ties_to_action_zero() {
        let p = DecisionProblem::from_tables(2, 2, 3, vec![0.25; 4], vec![2.5; 12]).unwrap();
        let s = best_constant_action(&p, p.joint()).unwrap();
        assert_eq!(s.action, 0);
        assert!((s.true_risk - 2.5).abs() < EPS);
        assert_eq!(best_blind_policy(&p).policy.actions(), &[0, 0]);
        assert_eq!(best_omniscient_policy(&p).policy.actions(), &[0; 4]);
    }

    #[test]
    fn measure_shape_is_checked() {
        let p = lane_change();
        let m = JointDistribution::new(1, 4, vec![0.25; 4]).unwrap();
        assert!(matches!(
            best_constant_action(&p, &m),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn worked_example_policies() {
        let p = lane_change();
        let blind = best_blind_policy(&p);
        assert_eq!(blind.policy.actions(), &[1, 0]);
        assert!((blind.true_risk - 0.02).abs() < EPS);

        let pred = best_predictive_policy(&p);
        assert_eq!(pred.policy.actions(), &[0, 0]);
        assert!(pred.true_risk.abs() < EPS);

        let omni = best_omniscient_policy(&p);
        assert_eq!(omni.policy.actions(), &[1, 0, 0, 0]);
        assert!((omni.true_risk + 0.04).abs() < EPS);
    }

    #[test]
    fn blind_policy_ignores_y_when_loss_does() {
        // loss(x, y, u) = c(x, u) for all y
        let c = [[3.0, 1.0, 2.0], [0.5, 0.7, 0.1]];
        let mut loss = Vec::new();
        for row in &c {
            for _ in 0..2 {
                loss.extend_from_slice(row);
            }
        }
        let p = DecisionProblem::from_tables(2, 2, 3, vec![0.1, 0.2, 0.3, 0.4], loss).unwrap();
        assert_eq!(best_blind_policy(&p).policy.actions(), &[1, 2]);
    }

    #[test]
    fn blind_policy_matches_exhaustive_scan() {
        let p = sample_problem(3, 4, 5, 11);
        let py = p.joint().marginal_y();
        let blind = best_blind_policy(&p);
        for x in 0..3 {
            let mut best = (0, f64::INFINITY);
            for u in 0..5 {
                let v: f64 = (0..4).map(|y| py.get(y) * p.loss().get(x, y, u)).sum();
                if v < best.1 {
                    best = (u, v);
                }
            }
            assert_eq!(blind.policy.action(x), best.0);
        }
    }

    #[test]
    fn predictive_decomposition_matches_joint_sum() {
        for seed in 0..50 {
            let p = sample_problem(4, 4, 3, seed);
            let pred = best_predictive_policy(&p);
            let direct = evaluate_risk(&p, Decision::Policy(&pred.policy)).unwrap();
            assert!((pred.true_risk - direct).abs() < EPS);
            assert!(pred.true_risk <= best_blind_policy(&p).true_risk + EPS);
        }
    }

    #[test]
    fn independent_joint_predictive_equals_blind() {
        let px = crate::model::Distribution::new(vec![0.3, 0.7]).unwrap();
        let py = crate::model::Distribution::new(vec![0.2, 0.5, 0.3]).unwrap();
        let base = sample_problem(2, 3, 4, 5);
        let p = base
            .with_joint(JointDistribution::product(&px, &py))
            .unwrap();
        assert_eq!(
            best_predictive_policy(&p).policy,
            best_blind_policy(&p).policy
        );
    }

    #[test]
    fn single_action_omniscient() {
        let p = sample_problem(3, 2, 1, 3);
        let omni = best_omniscient_policy(&p);
        assert!(omni.policy.actions().iter().all(|&u| u == 0));
        let r0 = evaluate_risk(&p, Decision::Action(0)).unwrap();
        assert!((omni.true_risk - r0).abs() < EPS);
    }

    #[test]
    fn omniscient_is_lowest() {
        for seed in 0..50 {
            let p = sample_problem(3, 3, 4, 100 + seed);
            let omni = best_omniscient_policy(&p).true_risk;
            let direct: f64 = (0..3)
                .flat_map(|x| (0..3).map(move |y| (x, y)))
                .map(|(x, y)| {
                    let m = p
                        .loss()
                        .actions(x, y)
                        .iter()
                        .copied()
                        .fold(f64::INFINITY, f64::min);
                    p.joint().get(x, y) * m
                })
                .sum();
            assert!((omni - direct).abs() < EPS);
            assert!(omni <= best_predictive_policy(&p).true_risk + EPS);
            assert!(omni <= best_blind_policy(&p).true_risk + EPS);
            assert!(omni <= best_constant_action(&p, p.joint()).unwrap().true_risk + EPS);
        }
    }

    #[test]
    fn evaluate_risk_on_worked_example() {
        let p = lane_change();
        assert!(evaluate_risk(&p, Decision::Action(0)).unwrap().abs() < EPS);
        let pol = Policy::new(vec![1, 0], 2).unwrap();
        assert!((evaluate_risk(&p, Decision::Policy(&pol)).unwrap() - 0.02).abs() < EPS);
        assert!(matches!(
            evaluate_risk(&p, Decision::Action(2)),
            Err(Error::IndexOutOfRange { .. })
        ));
        let bad = Policy::from_raw(vec![0, 5]);
        assert!(matches!(
            evaluate_risk(&p, Decision::Policy(&bad)),
            Err(Error::IndexOutOfRange { .. })
        ));
        let omni = best_omniscient_policy(&p);
        let r = evaluate_risk(&p, Decision::JointPolicy(&omni.policy)).unwrap();
        assert_eq!(r, omni.true_risk);
    }

    #[test]
    fn solvers_are_deterministic() {
        let a = sample_problem(4, 3, 3, 77);
        let b = sample_problem(4, 3, 3, 77);
        assert_eq!(best_blind_policy(&a), best_blind_policy(&b));
        assert_eq!(best_predictive_policy(&a), best_predictive_policy(&b));
        assert_eq!(best_omniscient_policy(&a), best_omniscient_policy(&b));
    }
}
