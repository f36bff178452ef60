//! Shannon measures and the log-loss realization of the five values.
//!
//! Under the loss `-log u(x, y)`, where each action `u` is itself a joint
//! distribution, the optimizers have closed forms and the risks become
//! entropies: `H(X)+H(Y)`, `H(X,Y)`, `H(Y)`, `H(Y|X)` and `0`. The values
//! then read `I(X;Y)`, `H(X|Y)`, `I(X;Y)`, `H(X)` and `H(Y|X)`.

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Distribution, JointDistribution};
use crate::properties::sample_simplex;

/// Number of random candidates each closed-form optimizer is checked against.
pub const OPTIMALITY_CANDIDATES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Nats,
    Bits,
}

impl LogBase {
    /// Converts a quantity measured in nats.
    pub fn from_nats(self, v: f64) -> f64 {
        match self {
            LogBase::Nats => v,
            LogBase::Bits => v / LN_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShannonMeasures {
    pub base: LogBase,
    pub hx: f64,
    pub hy: f64,
    pub hxy: f64,
    pub hy_given_x: f64,
    pub hx_given_y: f64,
    pub mi: f64,
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.ln())
        .sum::<f64>()
}

pub fn shannon_measures(d: &JointDistribution, base: LogBase) -> ShannonMeasures {
    let (px, py) = d.marginals();
    let hx = entropy(px.probs());
    let hy = entropy(py.probs());
    let hxy = entropy(d.table());

    let kernel = d.conditional_kernel();
    let hy_given_x: f64 = (0..d.nx())
        .map(|x| px.get(x) * entropy(kernel.row(x)))
        .sum();
    let hx_given_y: f64 = (0..d.ny())
        .filter(|&y| py.get(y) > 0.0)
        .map(|y| {
            let col: Vec<f64> = (0..d.nx()).map(|x| d.get(x, y) / py.get(y)).collect();
            py.get(y) * entropy(&col)
        })
        .sum();
    let mut mi = 0.0;
    for x in 0..d.nx() {
        for y in 0..d.ny() {
            let p = d.get(x, y);
            if p > 0.0 {
                mi += p * (p / (px.get(x) * py.get(y))).ln();
            }
        }
    }

    ShannonMeasures {
        base,
        hx: base.from_nats(hx),
        hy: base.from_nats(hy),
        hxy: base.from_nats(hxy),
        hy_given_x: base.from_nats(hy_given_x),
        hx_given_y: base.from_nats(hx_given_y),
        mi: base.from_nats(mi),
    }
}

/// One identity: a decision-theoretic quantity next to its Shannon analogue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub decision: f64,
    pub shannon: f64,
    pub difference: f64,
}

impl IdentityCheck {
    fn new(name: &'static str, decision: f64, shannon: f64) -> Self {
        Self {
            name,
            decision,
            shannon,
            difference: (decision - shannon).abs(),
        }
    }
}

/// Gap between the best of the random candidates and a closed-form optimizer.
/// A negative margin would mean a candidate beat the closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityCheck {
    pub name: &'static str,
    pub optimum: f64,
    pub best_candidate: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizationCheck {
    pub base: LogBase,
    pub risks: Vec<IdentityCheck>,
    pub values: Vec<IdentityCheck>,
    pub optimality: Vec<OptimalityCheck>,
}

impl RealizationCheck {
    pub fn max_difference(&self) -> f64 {
        self.risks
            .iter()
            .chain(&self.values)
            .map(|c| c.difference)
            .fold(0.0, f64::max)
    }

    pub fn min_margin(&self) -> f64 {
        self.optimality
            .iter()
            .map(|c| c.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

/// `E_measure[-log action(x, y)]` for a constant joint-distribution action.
fn cross_entropy(measure: &JointDistribution, action: &[f64]) -> f64 {
    measure
        .table()
        .iter()
        .zip(action)
        .filter(|(&m, _)| m > 0.0)
        .map(|(&m, &a)| -m * a.ln())
        .sum()
}

/// Evaluates the five closed-form optimizers under log loss and compares
/// the resulting risks and values with the Shannon measures of `d`.
///
/// Each optimizer is also scored against [`OPTIMALITY_CANDIDATES`] random
/// actions or policies drawn from `seed`.
pub fn log_loss_realization_check(
    d: &JointDistribution,
    base: LogBase,
    seed: u64,
) -> Result<RealizationCheck> {
    let (nx, ny) = (d.nx(), d.ny());
    for x in 0..nx {
        for y in 0..ny {
            if d.get(x, y) <= 0.0 {
                return Err(Error::ZeroSupport { x, y });
            }
        }
    }
    let (px, py) = d.marginals();
    let kernel = d.conditional_kernel();
    let product = JointDistribution::product(&px, &py);

    // Closed-form risks, in nats. The policy actions place all their mass on
    // row x, so only `u(x, y)` at the realized x matters: delta_x(x) = 1.
    let r_bar_u = cross_entropy(d, product.table());
    let r_u_star = cross_entropy(d, d.table());
    let r_blind: f64 = (0..nx)
        .flat_map(|x| (0..ny).map(move |y| (x, y)))
        .map(|(x, y)| -d.get(x, y) * py.get(y).ln())
        .sum();
    let r_predictive: f64 = (0..nx)
        .flat_map(|x| (0..ny).map(move |y| (x, y)))
        .map(|(x, y)| -d.get(x, y) * kernel.get(x, y).ln())
        .sum();
    let r_omniscient = 0.0;

    let m = shannon_measures(d, LogBase::Nats);
    let conv = |v: f64| base.from_nats(v);
    let risks = vec![
        IdentityCheck::new("r_bar_u = H(X)+H(Y)", conv(r_bar_u), conv(m.hx + m.hy)),
        IdentityCheck::new("r_u_star = H(X,Y)", conv(r_u_star), conv(m.hxy)),
        IdentityCheck::new("r_blind = H(Y)", conv(r_blind), conv(m.hy)),
        IdentityCheck::new(
            "r_predictive = H(Y|X)",
            conv(r_predictive),
            conv(m.hy_given_x),
        ),
        IdentityCheck::new("r_omniscient = 0", conv(r_omniscient), 0.0),
    ];
    let values = vec![
        IdentityCheck::new(
            "common_sense = I(X;Y)",
            conv(r_bar_u - r_u_star),
            conv(m.mi),
        ),
        IdentityCheck::new(
            "perception = H(X|Y)",
            conv(r_u_star - r_blind),
            conv(m.hx_given_y),
        ),
        IdentityCheck::new(
            "prediction = I(X;Y)",
            conv(r_blind - r_predictive),
            conv(m.mi),
        ),
        IdentityCheck::new(
            "perception_and_prediction = H(X)",
            conv(r_u_star - r_predictive),
            conv(m.hx),
        ),
        IdentityCheck::new(
            "communication = H(Y|X)",
            conv(r_predictive - r_omniscient),
            conv(m.hy_given_x),
        ),
    ];

    let optimality = spot_check_optimality(d, &px, &py, &kernel, seed)?
        .into_iter()
        .map(|(name, optimum, best)| OptimalityCheck {
            name,
            optimum: conv(optimum),
            best_candidate: conv(best),
            margin: conv(best - optimum),
        })
        .collect();

    Ok(RealizationCheck {
        base,
        risks,
        values,
        optimality,
    })
}

type Spot = (&'static str, f64, f64);

/// Scores each closed-form optimizer against random candidates under its
/// own objective. Candidate actions are random joints on `X x Y`; candidate
/// policies pick one random joint per observation.
fn spot_check_optimality(
    d: &JointDistribution,
    px: &Distribution,
    py: &Distribution,
    kernel: &crate::model::ConditionalKernel,
    seed: u64,
) -> Result<Vec<Spot>> {
    let (nx, ny) = (d.nx(), d.ny());
    let cells = nx * ny;
    let product = JointDistribution::product(px, py);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |dim: usize| sample_simplex(dim, rng.random::<u64>());

    // u_bar minimizes E_{PxPy}[-log u]; u_star minimizes E_P[-log u].
    let bar_opt = cross_entropy(&product, product.table());
    let star_opt = cross_entropy(d, d.table());
    // blind: sum_x px(x) E_{PY}[-log psi(x)(x, Y)]
    let blind_opt: f64 = (0..nx)
        .map(|x| px.get(x) * -(0..ny).map(|y| py.get(y) * py.get(y).ln()).sum::<f64>())
        .sum();
    let pred_opt: f64 = (0..nx)
        .flat_map(|x| (0..ny).map(move |y| (x, y)))
        .map(|(x, y)| -d.get(x, y) * kernel.get(x, y).ln())
        .sum();
    let omni_opt = 0.0;

    let mut best = [f64::INFINITY; 5];
    for _ in 0..OPTIMALITY_CANDIDATES {
        let u = draw(cells)?;
        best[0] = best[0].min(cross_entropy(&product, u.probs()));
        let u = draw(cells)?;
        best[1] = best[1].min(cross_entropy(d, u.probs()));

        let mut blind = 0.0;
        for x in 0..nx {
            let u = draw(cells)?;
            for y in 0..ny {
                blind -= px.get(x) * py.get(y) * u.get(x * ny + y).ln();
            }
        }
        best[2] = best[2].min(blind);

        let mut pred = 0.0;
        for x in 0..nx {
            let u = draw(cells)?;
            for y in 0..ny {
                pred -= d.get(x, y) * u.get(x * ny + y).ln();
            }
        }
        best[3] = best[3].min(pred);

        let mut omni = 0.0;
        for (z, &p) in d.table().iter().enumerate() {
            let u = draw(cells)?;
            omni -= p * u.get(z).ln();
        }
        best[4] = best[4].min(omni);
    }

    Ok(vec![
        ("u_bar", bar_opt, best[0]),
        ("u_star", star_opt, best[1]),
        ("blind", blind_opt, best[2]),
        ("predictive", pred_opt, best[3]),
        ("omniscient", omni_opt, best[4]),
    ])
}
