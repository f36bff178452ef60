//! Decision values when the world is made of several agents.
//!
//! Agent `i` contributes an observable `X_i` and an unobservable `Y_i`. The
//! joint lives on `X_1 x .. x X_n x Y_1 x .. x Y_m` as one flat row-major
//! table, all `X` axes first, and the loss adds the action axis last.
//!
//! Observing a subset `S` of the agents means acting with a policy of
//! `(X_i)_{i in S}`. Its risk is computed by regrouping the table into a
//! two-axis problem (observed part, everything else) and solving that with
//! the single-agent predictive policy.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{normalize, DecisionProblem, FiniteSpace, JointDistribution, LossTensor};
use crate::properties::sample_simplex;
use crate::solver::{best_constant_action, best_predictive_policy};

/// Default bound on the number of loss cells, `prod(x) * prod(y) * |U|`.
pub const DEFAULT_CELL_CAP: usize = 1_000_000;

/// Largest agent count accepted by [`exhaustive_order_diagnostic`].
pub const EXHAUSTIVE_ORDER_LIMIT: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct MultiAgentProblem {
    x_sizes: Vec<usize>,
    y_sizes: Vec<usize>,
    u_size: usize,
    /// Caller-facing id of each observable slot; `0..n` unless conditioned.
    agent_ids: Vec<usize>,
    joint: Vec<f64>,
    loss: Vec<f64>,
    cap: usize,
}

fn cell_count(x_sizes: &[usize], y_sizes: &[usize], u_size: usize) -> u128 {
    x_sizes
        .iter()
        .chain(y_sizes)
        .fold(u_size as u128, |acc, &s| acc.saturating_mul(s as u128))
}

impl MultiAgentProblem {
    pub fn new(
        x_sizes: Vec<usize>,
        y_sizes: Vec<usize>,
        u_size: usize,
        joint: Vec<f64>,
        loss: Vec<f64>,
    ) -> Result<Self> {
        Self::with_cap(x_sizes, y_sizes, u_size, joint, loss, DEFAULT_CELL_CAP)
    }

    pub fn with_cap(
        x_sizes: Vec<usize>,
        y_sizes: Vec<usize>,
        u_size: usize,
        mut joint: Vec<f64>,
        loss: Vec<f64>,
        cap: usize,
    ) -> Result<Self> {
        if u_size == 0 {
            return Err(Error::BadSpace("action space is empty".into()));
        }
        if let Some(i) = x_sizes.iter().position(|&s| s == 0) {
            return Err(Error::BadSpace(format!("x_sizes[{i}] is zero")));
        }
        if let Some(i) = y_sizes.iter().position(|&s| s == 0) {
            return Err(Error::BadSpace(format!("y_sizes[{i}] is zero")));
        }
        let cells = cell_count(&x_sizes, &y_sizes, u_size);
        if cells > cap as u128 {
            return Err(Error::CapExceeded { cells, cap });
        }
        let nx: usize = x_sizes.iter().product();
        let ny: usize = y_sizes.iter().product();
        if joint.len() != nx * ny {
            return Err(Error::ShapeMismatch(format!(
                "joint has {} entries, expected {}",
                joint.len(),
                nx * ny
            )));
        }
        if loss.len() != nx * ny * u_size {
            return Err(Error::ShapeMismatch(format!(
                "loss has {} entries, expected {}",
                loss.len(),
                nx * ny * u_size
            )));
        }
        if let Some(i) = loss.iter().position(|v| !v.is_finite()) {
            return Err(Error::BadLoss(format!("entry {i} is {}", loss[i])));
        }
        normalize(&mut joint, "joint")?;
        Ok(Self {
            agent_ids: (0..x_sizes.len()).collect(),
            x_sizes,
            y_sizes,
            u_size,
            joint,
            loss,
            cap,
        })
    }

    /// Number of observable agents.
    pub fn n(&self) -> usize {
        self.x_sizes.len()
    }

    pub fn x_sizes(&self) -> &[usize] {
        &self.x_sizes
    }

    pub fn y_sizes(&self) -> &[usize] {
        &self.y_sizes
    }

    pub fn u_size(&self) -> usize {
        self.u_size
    }

    pub fn agent_ids(&self) -> &[usize] {
        &self.agent_ids
    }

    pub fn joint(&self) -> &[f64] {
        &self.joint
    }

    pub fn loss(&self) -> &[f64] {
        &self.loss
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn nx_total(&self) -> usize {
        self.x_sizes.iter().product()
    }

    fn ny_total(&self) -> usize {
        self.y_sizes.iter().product()
    }

    fn check_cap(&self) -> Result<()> {
        let cells = cell_count(&self.x_sizes, &self.y_sizes, self.u_size);
        if cells > self.cap as u128 {
            return Err(Error::CapExceeded {
                cells,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Slot of the agent with caller-facing id `id`.
    pub fn slot_of(&self, id: usize) -> Result<usize> {
        self.agent_ids
            .iter()
            .position(|&a| a == id)
            .ok_or(Error::BadAgent {
                agent: id,
                n: self.n(),
            })
    }

    fn check_agent(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::BadAgent {
                agent: i,
                n: self.n(),
            });
        }
        Ok(())
    }

    /// The single-agent problem with `X = X^n` and `Y = Y^m`. The tables are
    /// shared verbatim, so no renormalization takes place.
    pub fn to_decision_problem(&self) -> DecisionProblem {
        let (nx, ny) = (self.nx_total(), self.ny_total());
        DecisionProblem::new(
            FiniteSpace::new(nx).expect("sizes are positive"),
            FiniteSpace::new(ny).expect("sizes are positive"),
            FiniteSpace::new(self.u_size).expect("u_size is positive"),
            JointDistribution::from_raw(nx, ny, self.joint.clone()),
            LossTensor::new(nx, ny, self.u_size, self.loss.clone()).expect("loss is finite"),
        )
        .expect("shapes agree")
    }

    /// Decodes a flat `X^n` index into per-agent coordinates.
    fn decode_x(&self, mut xi: usize, coords: &mut [usize]) {
        for (c, &s) in coords.iter_mut().zip(&self.x_sizes).rev() {
            *c = xi % s;
            xi /= s;
        }
    }

    /// Regroups the table as (observed agents) x (other agents' X, all Y).
    fn regroup(&self, subset: &[usize]) -> DecisionProblem {
        let n = self.n();
        let mut observed = vec![false; n];
        for &i in subset {
            observed[i] = true;
        }
        let na: usize = subset.iter().map(|&i| self.x_sizes[i]).product();
        let nrest: usize = (0..n)
            .filter(|&i| !observed[i])
            .map(|i| self.x_sizes[i])
            .product();
        let ny = self.ny_total();
        let nb = nrest * ny;
        let nu = self.u_size;

        let mut joint = vec![0.0; na * nb];
        let mut loss = vec![0.0; na * nb * nu];
        let mut coords = vec![0; n];
        for xi in 0..self.nx_total() {
            self.decode_x(xi, &mut coords);
            let (mut a, mut r) = (0, 0);
            for i in 0..n {
                if observed[i] {
                    a = a * self.x_sizes[i] + coords[i];
                } else {
                    r = r * self.x_sizes[i] + coords[i];
                }
            }
            for yi in 0..ny {
                let src = xi * ny + yi;
                let dst = a * nb + r * ny + yi;
                joint[dst] = self.joint[src];
                loss[dst * nu..(dst + 1) * nu]
                    .copy_from_slice(&self.loss[src * nu..(src + 1) * nu]);
            }
        }
        DecisionProblem::new(
            FiniteSpace::new(na).expect("positive"),
            FiniteSpace::new(nb).expect("positive"),
            FiniteSpace::new(nu).expect("positive"),
            JointDistribution::from_raw(na, nb, joint),
            LossTensor::new(na, nb, nu, loss).expect("loss is finite"),
        )
        .expect("shapes agree")
    }
}

/// Best policy of the observables of a subset of agents, and its risk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetPolicy {
    /// Observed slots, ascending.
    pub agents: Vec<usize>,
    /// Action per joint assignment of the observed `X`s, row-major in
    /// `agents` order. A single entry when nothing is observed.
    pub actions: Vec<usize>,
    pub risk: f64,
}

/// Risk of the best policy that acts on `(X_i)_{i in subset}`.
///
/// The empty subset gives the best constant action. Assignments of zero
/// probability act against the marginal of everything unobserved.
pub fn subset_policy_risk(p: &MultiAgentProblem, subset: &[usize]) -> Result<SubsetPolicy> {
    p.check_cap()?;
    let mut agents = subset.to_vec();
    agents.sort_unstable();
    if let Some(&bad) = agents.iter().find(|&&i| i >= p.n()) {
        return Err(Error::BadSubset(format!(
            "agent {bad} out of range ({} observable agents)",
            p.n()
        )));
    }
    if agents.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::BadSubset("agent listed twice".into()));
    }
    if agents.is_empty() {
        let flat = p.to_decision_problem();
        let s = best_constant_action(&flat, flat.joint())?;
        return Ok(SubsetPolicy {
            agents,
            actions: vec![s.action],
            risk: s.true_risk,
        });
    }
    let solved = best_predictive_policy(&p.regroup(&agents));
    Ok(SubsetPolicy {
        agents,
        actions: solved.policy.actions().to_vec(),
        risk: solved.true_risk,
    })
}

/// Risk drop from observing agent `i` alone, before any other agent.
pub fn first_agent_value(p: &MultiAgentProblem, i: usize) -> Result<f64> {
    p.check_agent(i)?;
    Ok(subset_policy_risk(p, &[])?.risk - subset_policy_risk(p, &[i])?.risk)
}

/// Risk increase from dropping agent `i` when all others are observed.
pub fn leave_one_out_value(p: &MultiAgentProblem, i: usize) -> Result<f64> {
    p.check_agent(i)?;
    let all: Vec<usize> = (0..p.n()).collect();
    let rest: Vec<usize> = all.iter().copied().filter(|&j| j != i).collect();
    Ok(subset_policy_risk(p, &rest)?.risk - subset_policy_risk(p, &all)?.risk)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub agent: usize,
    pub risk: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingReport {
    /// Slots in the order they are taken into account.
    pub order: Vec<usize>,
    /// `step_risks[0]` is the best constant action's risk; `step_risks[k]`
    /// the risk after observing the first `k` agents of `order`.
    pub step_risks: Vec<f64>,
    /// `step_values[k - 1] = step_risks[k - 1] - step_risks[k]`.
    pub step_values: Vec<f64>,
    /// All candidates considered at each step, by slot.
    pub candidates: Vec<Vec<Candidate>>,
}

/// Greedy perception order: at each step add the agent whose observation
/// gives the lowest risk together with the agents already chosen. Ties go
/// to the smallest slot.
pub fn greedy_order(p: &MultiAgentProblem) -> Result<OrderingReport> {
    p.check_cap()?;
    let n = p.n();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut step_risks = vec![subset_policy_risk(p, &[])?.risk];
    let mut step_values = Vec::with_capacity(n);
    let mut candidates = Vec::with_capacity(n);

    while chosen.len() < n {
        let prev = *step_risks.last().expect("starts non-empty");
        let mut step = Vec::new();
        for i in (0..n).filter(|i| !chosen.contains(i)) {
            let mut s = chosen.clone();
            s.push(i);
            let risk = subset_policy_risk(p, &s)?.risk;
            step.push(Candidate {
                agent: i,
                risk,
                value: prev - risk,
            });
        }
        let best = step
            .iter()
            .fold(None::<&Candidate>, |best, c| match best {
                Some(b) if b.risk <= c.risk => Some(b),
                _ => Some(c),
            })
            .expect("at least one candidate remains");
        chosen.push(best.agent);
        step_risks.push(best.risk);
        step_values.push(best.value);
        candidates.push(step);
    }

    Ok(OrderingReport {
        order: chosen,
        step_risks,
        step_values,
        candidates,
    })
}

/// Conditions on observed values of some agents' `X`.
///
/// `observed` maps slots to values. The result keeps the remaining
/// observables (with their ids) and every `Y`; the joint is renormalized on
/// the event and the loss is sliced at the observed values.
pub fn condition_on_observations(
    p: &MultiAgentProblem,
    observed: &BTreeMap<usize, usize>,
) -> Result<MultiAgentProblem> {
    for (&i, &v) in observed {
        p.check_agent(i)?;
        if v >= p.x_sizes[i] {
            return Err(Error::IndexOutOfRange {
                what: "observed value",
                index: v,
                size: p.x_sizes[i],
            });
        }
    }
    if observed.is_empty() {
        return Ok(p.clone());
    }

    let n = p.n();
    let ny = p.ny_total();
    let nu = p.u_size;
    let keep: Vec<usize> = (0..n).filter(|i| !observed.contains_key(i)).collect();
    let mut joint = Vec::new();
    let mut loss = Vec::new();
    let mut coords = vec![0; n];
    for xi in 0..p.nx_total() {
        p.decode_x(xi, &mut coords);
        if observed.iter().any(|(&i, &v)| coords[i] != v) {
            continue;
        }
        // Matching rows arrive in row-major order of the kept coordinates.
        joint.extend_from_slice(&p.joint[xi * ny..(xi + 1) * ny]);
        loss.extend_from_slice(&p.loss[xi * ny * nu..(xi + 1) * ny * nu]);
    }
    let mass: f64 = joint.iter().sum();
    if mass <= 0.0 {
        return Err(Error::ZeroProbabilityEvent);
    }
    joint.iter_mut().for_each(|v| *v /= mass);
    normalize(&mut joint, "conditioned joint")?;

    Ok(MultiAgentProblem {
        x_sizes: keep.iter().map(|&i| p.x_sizes[i]).collect(),
        y_sizes: p.y_sizes.clone(),
        u_size: nu,
        agent_ids: keep.iter().map(|&i| p.agent_ids[i]).collect(),
        joint,
        loss,
        cap: p.cap,
    })
}

/// Exhaustive comparison of all perception orders, for small `n`.
///
/// Orders are scored by the sum of their step risks after each inclusion
/// (lower is better). The greedy order need not be optimal under this
/// score; this diagnostic reports whether it is.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderDiagnostic {
    pub greedy_order: Vec<usize>,
    pub greedy_score: f64,
    pub best_orders: Vec<Vec<usize>>,
    pub best_score: f64,
    pub greedy_is_best: bool,
}

pub fn exhaustive_order_diagnostic(p: &MultiAgentProblem) -> Result<OrderDiagnostic> {
    let n = p.n();
    if n > EXHAUSTIVE_ORDER_LIMIT {
        return Err(Error::BadSubset(format!(
            "exhaustive order comparison is limited to {EXHAUSTIVE_ORDER_LIMIT} agents, got {n}"
        )));
    }
    let mut risk_of: HashMap<u32, f64> = HashMap::new();
    for mask in 0u32..(1 << n) {
        let s: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        risk_of.insert(mask, subset_policy_risk(p, &s)?.risk);
    }
    let score = |order: &[usize]| {
        let mut mask = 0u32;
        order
            .iter()
            .map(|&i| {
                mask |= 1 << i;
                risk_of[&mask]
            })
            .sum::<f64>()
    };

    let greedy = greedy_order(p)?.order;
    let greedy_score = score(&greedy);
    let mut best_score = f64::INFINITY;
    let mut best_orders = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let s = score(&perm);
        if s < best_score - 1e-12 {
            best_score = s;
            best_orders.clear();
        }
        if s <= best_score + 1e-12 {
            best_orders.push(perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(OrderDiagnostic {
        greedy_is_best: greedy_score <= best_score + 1e-12,
        greedy_order: greedy,
        greedy_score,
        best_orders,
        best_score,
    })
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Random multi-agent problem: uniform-simplex joint, losses uniform in `[-1, 1)`.
pub fn sample_multi_agent_problem(
    x_sizes: &[usize],
    y_sizes: &[usize],
    u_size: usize,
    seed: u64,
) -> Result<MultiAgentProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells: usize = x_sizes.iter().chain(y_sizes).product();
    let joint = sample_simplex(cells, rng.random())?.probs().to_vec();
    let loss = (0..cells * u_size)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    MultiAgentProblem::new(x_sizes.to_vec(), y_sizes.to_vec(), u_size, joint, loss)
}
