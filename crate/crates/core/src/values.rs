//! The five operation values and the loss-induced divergence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DecisionProblem, Distribution, JointDistribution, JointPolicy, Policy};
use crate::solver::{
    argmin, best_blind_policy, best_constant_action, best_omniscient_policy, best_predictive_policy,
};

/// Minimum expected losses under each information structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Risks {
    /// Best constant action chosen under `P_X P_Y`, scored under the true joint.
    pub r_bar_u: f64,
    /// Best constant action under the true joint.
    pub r_u_star: f64,
    /// Per-x policy that ignores the dependence of `Y` on `X`.
    pub r_blind: f64,
    /// Per-x policy using the posterior of `Y`.
    pub r_predictive: f64,
    /// Per-(x, y) policy.
    pub r_omniscient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Values {
    pub common_sense: f64,
    pub perception: f64,
    pub prediction: f64,
    pub perception_and_prediction: f64,
    pub communication: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimizers {
    pub u_bar: usize,
    pub u_star: usize,
    pub blind: Policy,
    pub predictive: Policy,
    pub omniscient: JointPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueReport {
    pub risks: Risks,
    pub values: Values,
    pub optimizers: Optimizers,
}

impl Risks {
    /// Values as risk differences. The combined perception-and-prediction
    /// value is stored as the sum of its two parts so that the sum identity
    /// holds bit for bit; it differs from `r_u_star - r_predictive` by at
    /// most one rounding.
    pub fn values(&self) -> Values {
        let perception = self.r_u_star - self.r_blind;
        let prediction = self.r_blind - self.r_predictive;
        Values {
            common_sense: self.r_bar_u - self.r_u_star,
            perception,
            prediction,
            perception_and_prediction: perception + prediction,
            communication: self.r_predictive - self.r_omniscient,
        }
    }
}

pub fn value_report(p: &DecisionProblem) -> ValueReport {
    let (px, py) = p.joint().marginals();
    let product = JointDistribution::product(&px, &py);
    let bar = best_constant_action(p, &product).expect("product has the problem's shape");
    let star = best_constant_action(p, p.joint()).expect("joint has the problem's shape");
    let blind = best_blind_policy(p);
    let predictive = best_predictive_policy(p);
    let omniscient = best_omniscient_policy(p);

    let risks = Risks {
        r_bar_u: bar.true_risk,
        r_u_star: star.true_risk,
        r_blind: blind.true_risk,
        r_predictive: predictive.true_risk,
        r_omniscient: omniscient.true_risk,
    };
    ValueReport {
        values: risks.values(),
        risks,
        optimizers: Optimizers {
            u_bar: bar.action,
            u_star: star.action,
            blind: blind.policy,
            predictive: predictive.policy,
            omniscient: omniscient.policy,
        },
    }
}

/// A loss over `Z x U` and two distributions over `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceInput {
    nz: usize,
    nu: usize,
    loss: Vec<f64>,
    p: Distribution,
    q: Distribution,
}

impl DivergenceInput {
    /// `loss` is row-major over `(z, u)`.
    pub fn new(nu: usize, loss: Vec<f64>, p: Distribution, q: Distribution) -> Result<Self> {
        let nz = p.len();
        if q.len() != nz {
            return Err(Error::ShapeMismatch(format!(
                "P has {nz} entries, Q has {}",
                q.len()
            )));
        }
        if nu == 0 || loss.len() != nz * nu {
            return Err(Error::ShapeMismatch(format!(
                "loss has {} entries, expected {nz} x {nu}",
                loss.len()
            )));
        }
        if let Some(i) = loss.iter().position(|v| !v.is_finite()) {
            return Err(Error::BadLoss(format!("entry {i} is {}", loss[i])));
        }
        Ok(Self { nz, nu, loss, p, q })
    }

    /// Views a decision problem's loss over `Z = X x Y`, which is the same
    /// flat table since `(x, y, u)` is row-major.
    pub fn on_product_space(
        problem: &DecisionProblem,
        p: &JointDistribution,
        q: &JointDistribution,
    ) -> Result<Self> {
        Self::new(
            problem.nu(),
            problem.loss().table().to_vec(),
            p.flatten(),
            q.flatten(),
        )
    }

    pub fn p(&self) -> &Distribution {
        &self.p
    }

    pub fn q(&self) -> &Distribution {
        &self.q
    }

    /// Replaces `P`, keeping the loss and `Q`.
    pub fn with_p(&self, p: Distribution) -> Result<Self> {
        Self::new(self.nu, self.loss.clone(), p, self.q.clone())
    }

    fn objectives(&self, d: &Distribution) -> Vec<f64> {
        let mut acc = vec![0.0; self.nu];
        for z in 0..self.nz {
            let w = d.get(z);
            let row = &self.loss[z * self.nu..(z + 1) * self.nu];
            for (a, &l) in acc.iter_mut().zip(row) {
                *a += w * l;
            }
        }
        acc
    }
}

/// `E_P[loss(Z, u_Q)] - E_P[loss(Z, u_P)]` where `u_D` minimizes the
/// expected loss under `D`. Nonnegative, zero when `P == Q`, and equal to
/// the KL divergence under log loss.
pub fn generalized_divergence(d: &DivergenceInput) -> f64 {
    let under_p = d.objectives(&d.p);
    let (u_p, best) = argmin(under_p.iter().copied());
    let (u_q, _) = argmin(d.objectives(&d.q));
    if u_p == u_q {
        0.0
    } else {
        under_p[u_q] - best
    }
}
