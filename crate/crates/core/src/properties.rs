//! Numerical verification of the concavity, convexity and linearity
//! properties of the risks and values.
//!
//! Every check samples two endpoints, walks the segment between them at a
//! few interior weights and measures the Jensen slack
//! `f(mix) - lambda f(a) - (1 - lambda) f(b)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    ConditionalKernel, DecisionProblem, Distribution, FiniteSpace, JointDistribution, LossTensor,
    Mix,
};
use crate::solver::{best_constant_action, best_omniscient_policy, best_predictive_policy};
use crate::values::{generalized_divergence, value_report, DivergenceInput};

/// Interior weights used on every sampled segment.
pub const SUITE_LAMBDAS: [f64; 3] = [0.25, 0.5, 0.75];
/// Slack tolerance of the property suite.
pub const SUITE_TOLERANCE: f64 = 1e-9;
/// Coupling fit stops once the column marginals are this close.
pub const COUPLING_TOLERANCE: f64 = 1e-12;
pub const COUPLING_MAX_SWEEPS: usize = 10_000;
/// Membership tolerance for [`CouplingFamily::contains`].
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// SplitMix64 finalizer, used to derive independent per-trial seeds.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    mix64(mix64(mix64(seed) ^ stream) ^ index)
}

fn positive_exp(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v: f64 = rng.sample(Exp1);
        if v > 0.0 {
            return v;
        }
    }
}

/// Uniform draw from the open simplex of dimension `dim` (Dirichlet with all
/// concentrations one), by normalizing standard exponential draws.
pub fn sample_simplex(dim: usize, seed: u64) -> Result<Distribution> {
    if dim == 0 {
        return Err(Error::BadDim);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<f64> = (0..dim).map(|_| positive_exp(&mut rng)).collect();
    let total: f64 = draws.iter().sum();
    Distribution::new(draws.into_iter().map(|v| v / total).collect())
}

/// Random kernel with each row drawn uniformly from the simplex.
pub fn sample_kernel(nx: usize, ny: usize, seed: u64) -> Result<ConditionalKernel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k = Vec::with_capacity(nx * ny);
    for _ in 0..nx {
        k.extend_from_slice(sample_simplex(ny, rng.random())?.probs());
    }
    ConditionalKernel::new(nx, ny, k)
}

pub fn sample_joint(nx: usize, ny: usize, seed: u64) -> Result<JointDistribution> {
    JointDistribution::from_flat(nx, ny, &sample_simplex(nx * ny, seed)?)
}

/// Random problem with a uniform-simplex joint and losses uniform in `[-1, 1)`.
pub fn sample_problem(nx: usize, ny: usize, nu: usize, seed: u64) -> DecisionProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let joint = sample_joint(nx, ny, rng.random()).expect("dimensions are positive");
    let loss: Vec<f64> = (0..nx * ny * nu)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let loss = LossTensor::new(nx, ny, nu, loss).expect("dimensions are positive");
    DecisionProblem::new(
        FiniteSpace::new(nx).expect("nx > 0"),
        FiniteSpace::new(ny).expect("ny > 0"),
        FiniteSpace::new(nu).expect("nu > 0"),
        joint,
        loss,
    )
    .expect("shapes agree")
}

/// Kernels `k` with `sum_x px(x) k(x, y) = py(y)`: every way of coupling
/// the fixed pair of marginals. The set is convex.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingFamily {
    px: Distribution,
    py: Distribution,
}

impl CouplingFamily {
    pub fn new(px: Distribution, py: Distribution) -> Result<Self> {
        if let Some(index) = px.probs().iter().position(|&v| v <= 0.0) {
            return Err(Error::ZeroMarginal { index });
        }
        Ok(Self { px, py })
    }

    pub fn px(&self) -> &Distribution {
        &self.px
    }

    pub fn py(&self) -> &Distribution {
        &self.py
    }

    /// Largest deviation of `k`'s output marginal from `py`.
    pub fn membership_residual(&self, k: &ConditionalKernel) -> Result<f64> {
        if k.ny() != self.py.len() {
            return Err(Error::ShapeMismatch(format!(
                "kernel has {} columns, family has {}",
                k.ny(),
                self.py.len()
            )));
        }
        let out = k.push_forward(&self.px)?;
        Ok(out
            .probs()
            .iter()
            .zip(self.py.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn contains(&self, k: &ConditionalKernel) -> bool {
        self.membership_residual(k)
            .is_ok_and(|r| r <= MEMBERSHIP_TOLERANCE)
    }

    /// The kernel that ignores `x`; always a member.
    pub fn independent(&self) -> ConditionalKernel {
        ConditionalKernel::independent(self.px.len(), &self.py)
    }
}

/// Random member of the coupling family.
///
/// Starts from a strictly positive random matrix and alternately rescales
/// columns to `py` and rows to `px` until the column sums are within
/// [`COUPLING_TOLERANCE`]. Rows end exact, so dividing them by `px` gives a
/// kernel whose output marginal error is the final column error.
pub fn sample_coupling(f: &CouplingFamily, seed: u64) -> Result<ConditionalKernel> {
    let (nx, ny) = (f.px.len(), f.py.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m: Vec<f64> = (0..nx * ny).map(|_| positive_exp(&mut rng)).collect();
    let mut col = vec![0.0; ny];

    let column_sums = |m: &[f64], col: &mut [f64]| {
        col.iter_mut().for_each(|c| *c = 0.0);
        for row in m.chunks(ny) {
            for (c, &v) in col.iter_mut().zip(row) {
                *c += v;
            }
        }
    };

    let mut residual = f64::INFINITY;
    for _ in 0..COUPLING_MAX_SWEEPS {
        column_sums(&m, &mut col);
        for row in m.chunks_mut(ny) {
            for (y, v) in row.iter_mut().enumerate() {
                *v = if col[y] > 0.0 {
                    *v * (f.py.get(y) / col[y])
                } else {
                    0.0
                };
            }
        }
        for (x, row) in m.chunks_mut(ny).enumerate() {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v *= f.px.get(x) / s);
        }
        column_sums(&m, &mut col);
        residual = col
            .iter()
            .zip(f.py.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual < COUPLING_TOLERANCE {
            let k = m
                .chunks(ny)
                .enumerate()
                .flat_map(|(x, row)| row.iter().map(move |&v| v / f.px.get(x)))
                .collect();
            return ConditionalKernel::new(nx, ny, k);
        }
    }
    Err(Error::NoConvergence {
        sweeps: COUPLING_MAX_SWEEPS,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Concave,
    Convex,
    Linear,
}

/// Worst slack along one segment.
///
/// For concave and convex checks `worst_slack` is the smallest slack
/// oriented so that negative means a violation (the raw slack for concave,
/// its negation for convex). For linear checks it is the largest absolute
/// slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentCheck {
    pub worst_slack: f64,
    pub pass: bool,
}

fn within(direction: Direction, worst: f64, tol: f64) -> bool {
    match direction {
        Direction::Concave | Direction::Convex => worst >= -tol,
        Direction::Linear => worst <= tol,
    }
}

fn worse(direction: Direction, a: f64, b: f64) -> f64 {
    match direction {
        Direction::Concave | Direction::Convex => a.min(b),
        Direction::Linear => a.max(b),
    }
}

fn identity(direction: Direction) -> f64 {
    match direction {
        Direction::Concave | Direction::Convex => f64::INFINITY,
        Direction::Linear => 0.0,
    }
}

pub fn check_segment<T, F>(
    mut f: F,
    a: &T,
    b: &T,
    direction: Direction,
    lambdas: &[f64],
    tol: f64,
) -> Result<SegmentCheck>
where
    T: Mix,
    F: FnMut(&T) -> Result<f64>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    let mut worst = identity(direction);
    for &lambda in lambdas {
        let fm = f(&a.mix(b, lambda)?)?;
        let slack = fm - lambda * fa - (1.0 - lambda) * fb;
        let oriented = match direction {
            Direction::Concave => slack,
            Direction::Convex => -slack,
            Direction::Linear => slack.abs(),
        };
        worst = worse(direction, worst, oriented);
    }
    Ok(SegmentCheck {
        worst_slack: worst,
        pass: within(direction, worst, tol),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyVerdict {
    pub property: &'static str,
    pub statement: &'static str,
    pub direction: Direction,
    pub trials: usize,
    /// Trials dropped because a coupling fit did not converge.
    pub skipped_trials: usize,
    pub worst_slack: f64,
    pub pass: bool,
    pub seed: u64,
}

/// The ten checked clauses, in report order.
pub const CLAUSES: [(&str, &str, Direction); 10] = [
    (
        "constant_risk_concave",
        "risk of the best constant action is concave in the joint",
        Direction::Concave,
    ),
    (
        "predictive_risk_concave_in_kernel",
        "risk of the predictive policy is concave in P(Y|X) for fixed P(X)",
        Direction::Concave,
    ),
    (
        "predictive_risk_linear_in_px",
        "risk of the predictive policy is linear in P(X) for fixed P(Y|X)",
        Direction::Linear,
    ),
    (
        "omniscient_risk_linear",
        "risk of the omniscient policy is linear in the joint",
        Direction::Linear,
    ),
    (
        "divergence_convex",
        "generalized divergence D(P, Q) is convex in P for fixed Q",
        Direction::Convex,
    ),
    (
        "perception_prediction_concave_in_px",
        "value of perception with prediction is concave in P(X) for fixed P(Y|X)",
        Direction::Concave,
    ),
    (
        "communication_concave_in_kernel",
        "value of communication is concave in P(Y|X) for fixed P(X)",
        Direction::Concave,
    ),
    (
        "communication_linear_in_px",
        "value of communication is linear in P(X) for fixed P(Y|X)",
        Direction::Linear,
    ),
    (
        "common_sense_convex_over_couplings",
        "value of common sense is convex in P(Y|X) over couplings of fixed marginals",
        Direction::Convex,
    ),
    (
        "prediction_convex_over_couplings",
        "value of prediction is convex in P(Y|X) over couplings of fixed marginals",
        Direction::Convex,
    ),
];

/// Sampled objects for one trial; seeds for every draw come from `rng`.
struct Trial<'a> {
    base: &'a DecisionProblem,
    rng: ChaCha8Rng,
}

impl Trial<'_> {
    fn seed(&mut self) -> u64 {
        self.rng.random()
    }

    fn joint(&mut self) -> Result<JointDistribution> {
        let s = self.seed();
        sample_joint(self.base.nx(), self.base.ny(), s)
    }

    fn px(&mut self) -> Result<Distribution> {
        let s = self.seed();
        sample_simplex(self.base.nx(), s)
    }

    fn py(&mut self) -> Result<Distribution> {
        let s = self.seed();
        sample_simplex(self.base.ny(), s)
    }

    fn kernel(&mut self) -> Result<ConditionalKernel> {
        let s = self.seed();
        sample_kernel(self.base.nx(), self.base.ny(), s)
    }

    fn problem(&self, joint: JointDistribution) -> Result<DecisionProblem> {
        self.base.with_joint(joint)
    }

    fn composed(&self, px: &Distribution, k: &ConditionalKernel) -> Result<DecisionProblem> {
        self.problem(JointDistribution::compose(px, k)?)
    }
}

fn run_clause(index: usize, trial: &mut Trial<'_>) -> Result<SegmentCheck> {
    let (_, _, direction) = CLAUSES[index];
    let seg = |f: &dyn Fn(&JointDistribution) -> Result<f64>, a, b| {
        check_segment(f, &a, &b, direction, &SUITE_LAMBDAS, SUITE_TOLERANCE)
    };
    match index {
        // constant action over two joints
        0 => {
            let (a, b) = (trial.joint()?, trial.joint()?);
            let t = &*trial;
            seg(
                &|j| Ok(best_constant_action(&t.problem(j.clone())?, j)?.true_risk),
                a,
                b,
            )
        }
        // fixed marginal, two kernels
        1 | 6 => {
            let px = trial.px()?;
            let (a, b) = (trial.kernel()?, trial.kernel()?);
            let t = &*trial;
            check_segment(
                |k: &ConditionalKernel| {
                    let p = t.composed(&px, k)?;
                    Ok(if index == 1 {
                        best_predictive_policy(&p).true_risk
                    } else {
                        value_report(&p).values.communication
                    })
                },
                &a,
                &b,
                direction,
                &SUITE_LAMBDAS,
                SUITE_TOLERANCE,
            )
        }
        // fixed kernel, two marginals
        2 | 5 | 7 => {
            let k = trial.kernel()?;
            let (a, b) = (trial.px()?, trial.px()?);
            let t = &*trial;
            check_segment(
                |px: &Distribution| {
                    let p = t.composed(px, &k)?;
                    Ok(match index {
                        2 => best_predictive_policy(&p).true_risk,
                        5 => value_report(&p).values.perception_and_prediction,
                        _ => value_report(&p).values.communication,
                    })
                },
                &a,
                &b,
                direction,
                &SUITE_LAMBDAS,
                SUITE_TOLERANCE,
            )
        }
        // omniscient policy over two joints
        3 => {
            let (a, b) = (trial.joint()?, trial.joint()?);
            let t = &*trial;
            seg(
                &|j| Ok(best_omniscient_policy(&t.problem(j.clone())?).true_risk),
                a,
                b,
            )
        }
        // loss viewed on Z = X x Y
        4 => {
            let q = trial.joint()?;
            let (a, b) = (trial.joint()?.flatten(), trial.joint()?.flatten());
            let input = DivergenceInput::on_product_space(trial.base, &q, &q)?;
            check_segment(
                |p: &Distribution| Ok(generalized_divergence(&input.with_p(p.clone())?)),
                &a,
                &b,
                direction,
                &SUITE_LAMBDAS,
                SUITE_TOLERANCE,
            )
        }
        // two couplings of the same marginals
        8 | 9 => {
            let family = CouplingFamily::new(trial.px()?, trial.py()?)?;
            let a = sample_coupling(&family, trial.seed())?;
            let b = sample_coupling(&family, trial.seed())?;
            let t = &*trial;
            check_segment(
                |k: &ConditionalKernel| {
                    let v = value_report(&t.composed(family.px(), k)?).values;
                    Ok(if index == 8 {
                        v.common_sense
                    } else {
                        v.prediction
                    })
                },
                &a,
                &b,
                direction,
                &SUITE_LAMBDAS,
                SUITE_TOLERANCE,
            )
        }
        _ => unreachable!("there are ten clauses"),
    }
}

/// Runs every clause of [`CLAUSES`] for `trials` sampled segments each.
///
/// The loss is held fixed while the distributions are sampled. Results are
/// a pure function of `(loss, trials, seed)`.
pub fn run_property_suite(
    loss: &LossTensor,
    trials: usize,
    seed: u64,
) -> Result<Vec<PropertyVerdict>> {
    if trials == 0 {
        return Err(Error::BadTrials);
    }
    let (nx, ny, nu) = (loss.nx(), loss.ny(), loss.nu());
    let base = DecisionProblem::new(
        FiniteSpace::new(nx)?,
        FiniteSpace::new(ny)?,
        FiniteSpace::new(nu)?,
        JointDistribution::new(nx, ny, vec![1.0 / (nx * ny) as f64; nx * ny])?,
        loss.clone(),
    )?;

    let mut verdicts = Vec::with_capacity(CLAUSES.len());
    for (index, &(property, statement, direction)) in CLAUSES.iter().enumerate() {
        let mut worst = identity(direction);
        let mut skipped = 0;
        for t in 0..trials {
            let mut trial = Trial {
                base: &base,
                rng: ChaCha8Rng::seed_from_u64(derive_seed(seed, index as u64, t as u64)),
            };
            match run_clause(index, &mut trial) {
                Ok(check) => worst = worse(direction, worst, check.worst_slack),
                Err(Error::NoConvergence { .. }) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
        verdicts.push(PropertyVerdict {
            property,
            statement,
            direction,
            trials,
            skipped_trials: skipped,
            worst_slack: worst,
            pass: within(direction, worst, SUITE_TOLERANCE),
            seed,
        });
    }
    Ok(verdicts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::lane_change;
    use crate::model::mix;

    #[test]
    fn simplex_of_dim_one() {
        assert_eq!(sample_simplex(1, 9).unwrap().probs(), &[1.0]);
        assert_eq!(sample_simplex(0, 9).unwrap_err(), Error::BadDim);
    }

    #[test]
    fn simplex_is_deterministic_and_positive() {
        let a = sample_simplex(7, 42).unwrap();
        assert_eq!(a, sample_simplex(7, 42).unwrap());
        assert_ne!(a, sample_simplex(7, 43).unwrap());
        assert!(a.probs().iter().all(|&v| v > 0.0));
        assert_eq!(a.probs().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn simplex_mean_is_uniform() {
        let n = 10_000;
        let mut mean = [0.0; 3];
        for s in 0..n {
            let d = sample_simplex(3, derive_seed(5, 0, s)).unwrap();
            for (m, &v) in mean.iter_mut().zip(d.probs()) {
                *m += v / n as f64;
            }
        }
        for m in mean {
            assert!((m - 1.0 / 3.0).abs() < 0.02, "{mean:?}");
        }
    }

    fn uniform_family(n: usize) -> CouplingFamily {
        CouplingFamily::new(
            Distribution::uniform(n).unwrap(),
            Distribution::uniform(n).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn coupling_is_member() {
        let f = uniform_family(2);
        for seed in 0..20 {
            let k = sample_coupling(&f, seed).unwrap();
            for x in 0..2 {
                assert!((k.row(x).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            assert!(f.membership_residual(&k).unwrap() < 1e-12);
        }
    }

    #[test]
    fn independent_kernel_is_member() {
        let f = CouplingFamily::new(sample_simplex(4, 1).unwrap(), sample_simplex(3, 2).unwrap())
            .unwrap();
        assert!(f.membership_residual(&f.independent()).unwrap() < 1e-15);
    }

    #[test]
    fn mixed_couplings_stay_members() {
        for seed in 0..20 {
            let f = CouplingFamily::new(
                sample_simplex(3, seed).unwrap(),
                sample_simplex(4, seed + 100).unwrap(),
            )
            .unwrap();
            let a = sample_coupling(&f, seed + 1).unwrap();
            let b = sample_coupling(&f, seed + 2).unwrap();
            let m = mix(&a, &b, 0.37).unwrap();
            assert!(f.membership_residual(&m).unwrap() < 1e-11);
            assert!(f.contains(&m));
        }
    }

    #[test]
    fn mixed_couplings_have_the_family_marginals() {
        let f = CouplingFamily::new(sample_simplex(3, 8).unwrap(), sample_simplex(2, 9).unwrap())
            .unwrap();
        let ja = JointDistribution::compose(f.px(), &sample_coupling(&f, 1).unwrap()).unwrap();
        let jb = JointDistribution::compose(f.px(), &sample_coupling(&f, 2).unwrap()).unwrap();
        let (px, py) = mix(&ja, &jb, 0.6).unwrap().marginals();
        for (a, b) in px.probs().iter().zip(f.px().probs()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in py.probs().iter().zip(f.py().probs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn coupling_rejects_zero_marginal() {
        let err = CouplingFamily::new(
            Distribution::new(vec![0.0, 1.0]).unwrap(),
            Distribution::uniform(2).unwrap(),
        )
        .unwrap_err();
        assert_eq!(err, Error::ZeroMarginal { index: 0 });
    }

    #[test]
    fn linear_function_has_no_slack() {
        let p = lane_change();
        let a = sample_joint(2, 2, 1).unwrap();
        let b = sample_joint(2, 2, 2).unwrap();
        let c = check_segment(
            |j: &JointDistribution| {
                crate::solver::evaluate_risk(
                    &p.with_joint(j.clone())?,
                    crate::solver::Decision::Action(1),
                )
            },
            &a,
            &b,
            Direction::Linear,
            &[0.1, 0.25, 0.5, 0.75, 0.9],
            1e-12,
        )
        .unwrap();
        assert!(c.pass);
        assert!(c.worst_slack < 1e-12);
    }

    #[test]
    fn min_of_linear_functions_is_concave() {
        let a = Distribution::new(vec![0.9, 0.1]).unwrap();
        let b = Distribution::new(vec![0.1, 0.9]).unwrap();
        let f = |d: &Distribution| Ok(d.get(0).min(d.get(1)));
        let c = check_segment(f, &a, &b, Direction::Concave, &SUITE_LAMBDAS, 1e-12).unwrap();
        assert!(c.pass);
        assert!(c.worst_slack > 0.0);
    }

    #[test]
    fn endpoints_have_zero_slack() {
        let a = sample_joint(2, 3, 1).unwrap();
        let b = sample_joint(2, 3, 2).unwrap();
        let p = sample_problem(2, 3, 3, 4);
        let f = |j: &JointDistribution| {
            Ok(best_constant_action(&p.with_joint(j.clone())?, j)?.true_risk)
        };
        let c = check_segment(f, &a, &b, Direction::Linear, &[0.0, 1.0], 0.0).unwrap();
        assert_eq!(c.worst_slack, 0.0);
    }

    #[test]
    fn wrong_direction_is_caught() {
        // Point mass on (0, 0) makes the lane change optimal; the worked
        // joint keeps the lane. The midpoint sits past the argmin switch.
        let p = lane_change();
        let a = p.joint().clone();
        let b = JointDistribution::new(2, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let f = |j: &JointDistribution| {
            Ok(best_constant_action(&p.with_joint(j.clone())?, j)?.true_risk)
        };
        let convex = check_segment(f, &a, &b, Direction::Convex, &SUITE_LAMBDAS, 1e-9).unwrap();
        assert!(!convex.pass);
        assert!(convex.worst_slack < -1e-9);
        let concave = check_segment(f, &a, &b, Direction::Concave, &SUITE_LAMBDAS, 1e-9).unwrap();
        assert!(concave.pass);
    }

    #[test]
    fn suite_passes_on_worked_loss() {
        let v = run_property_suite(lane_change().loss(), 200, 7).unwrap();
        assert_eq!(v.len(), 10);
        for verdict in &v {
            assert!(verdict.pass, "{verdict:?}");
            assert_eq!(verdict.skipped_trials, 0);
        }
    }

    #[test]
    fn suite_on_zero_loss_has_zero_slack() {
        let loss = LossTensor::new(3, 2, 2, vec![0.0; 12]).unwrap();
        for v in run_property_suite(&loss, 20, 1).unwrap() {
            assert_eq!(v.worst_slack, 0.0, "{}", v.property);
        }
    }

    #[test]
    fn suite_is_reproducible() {
        let loss = sample_problem(3, 3, 4, 9).loss().clone();
        assert_eq!(
            run_property_suite(&loss, 30, 5).unwrap(),
            run_property_suite(&loss, 30, 5).unwrap()
        );
        assert_eq!(
            run_property_suite(&loss, 0, 5).unwrap_err(),
            Error::BadTrials
        );
    }
}
