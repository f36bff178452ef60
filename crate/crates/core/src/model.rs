//! Finite probability and loss tables.
//!
//! Every table is dense and row-major. Joint tables use axis order `(x, y)`
//! and loss tables use `(x, y, u)`, so the last axis varies fastest.
//! Probability tables are accepted when they sum to one within
//! [`INPUT_TOLERANCE`] and are then divided by their sum, which makes all
//! downstream identities exact instead of tolerance-chained.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// Allowed deviation of an input probability table's total from one.
pub const INPUT_TOLERANCE: f64 = 1e-9;

/// Validates a probability vector and rescales it so the sequential sum is one.
pub(crate) fn normalize(p: &mut [f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::BadProbability(format!("{what} is empty")));
    }
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::BadProbability(format!(
                "{what}[{i}] = {v} is not a nonnegative finite number"
            )));
        }
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > INPUT_TOLERANCE {
        return Err(Error::BadProbability(format!(
            "{what} sums to {total}, expected 1 within {INPUT_TOLERANCE:e}"
        )));
    }
    if (total - 1.0).abs() > 2.0 * p.len() as f64 * f64::EPSILON {
        p.iter_mut().for_each(|v| *v /= total);
        // Push the last few ulps of residue into the largest entry.
        let largest = argmax(p);
        for _ in 0..4 {
            let s: f64 = p.iter().sum();
            if s == 1.0 {
                return Ok(());
            }
            p[largest] = (p[largest] + (1.0 - s)).max(0.0);
        }
        for _ in 0..64 {
            let s: f64 = p.iter().sum();
            if s == 1.0 {
                break;
            }
            p[largest] = if s > 1.0 {
                p[largest].next_down()
            } else {
                p[largest].next_up()
            };
        }
    }
    Ok(())
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Pointwise `lambda * a + (1 - lambda) * b`. Entries that agree are copied
/// through so that mixing a table with itself, or at an endpoint, is exact.
fn mix_tables(a: &[f64], b: &[f64], lambda: f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            if x == y {
                x
            } else {
                lambda * x + (1.0 - lambda) * y
            }
        })
        .collect()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::BadLambda(lambda))
    }
}

/// Convex combination of two objects of the same kind and shape.
pub trait Mix: Sized {
    fn mix(&self, other: &Self, lambda: f64) -> Result<Self>;
}

/// Free-function form of [`Mix::mix`].
pub fn mix<T: Mix>(a: &T, b: &T, lambda: f64) -> Result<T> {
    a.mix(b, lambda)
}

/// A finite set `{0, .., size-1}` with optional labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteSpace {
    size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl FiniteSpace {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::BadSpace("size must be at least 1".into()));
        }
        Ok(Self { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::BadSpace("label list is empty".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::BadSpace(format!("duplicate label {l:?}")));
            }
        }
        Ok(Self {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

/// A probability distribution over `{0, .., len-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Distribution {
    p: Vec<f64>,
}

impl Distribution {
    pub fn new(mut p: Vec<f64>) -> Result<Self> {
        normalize(&mut p, "distribution")?;
        Ok(Self { p })
    }

    /// Wraps a table that is already a distribution up to rounding.
    pub(crate) fn from_raw(p: Vec<f64>) -> Self {
        Self { p }
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadDim);
        }
        Ok(Self {
            p: vec![1.0 / n as f64; n],
        })
    }

    pub fn one_hot(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(Error::IndexOutOfRange {
                what: "one-hot",
                index: at,
                size: n,
            });
        }
        let mut p = vec![0.0; n];
        p[at] = 1.0;
        Ok(Self { p })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, i: usize) -> f64 {
        self.p[i]
    }
}

impl Mix for Distribution {
    fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch(format!(
                "cannot mix distributions of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Self::from_raw(mix_tables(&self.p, &other.p, lambda)))
    }
}

/// Joint distribution over `X x Y`, stored row-major (`x` major, `y` minor).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    nx: usize,
    ny: usize,
    p: Vec<f64>,
}

impl JointDistribution {
    pub fn new(nx: usize, ny: usize, mut p: Vec<f64>) -> Result<Self> {
        check_len(nx * ny, p.len(), "joint table")?;
        if nx == 0 || ny == 0 {
            return Err(Error::ShapeMismatch("joint table has an empty axis".into()));
        }
        normalize(&mut p, "joint")?;
        Ok(Self { nx, ny, p })
    }

    /// Wraps a table already known to be normalized; no rescaling happens.
    pub(crate) fn from_raw(nx: usize, ny: usize, p: Vec<f64>) -> Self {
        debug_assert_eq!(p.len(), nx * ny);
        Self { nx, ny, p }
    }

    /// Outer product `px(x) * py(y)`, without any rescaling.
    pub fn product(px: &Distribution, py: &Distribution) -> Self {
        let p = px
            .probs()
            .iter()
            .flat_map(|&a| py.probs().iter().map(move |&b| a * b))
            .collect();
        Self::from_raw(px.len(), py.len(), p)
    }

    /// Joint `px(x) * k(x, y)` induced by a marginal and a kernel.
    pub fn compose(px: &Distribution, kernel: &ConditionalKernel) -> Result<Self> {
        if px.len() != kernel.nx() {
            return Err(Error::ShapeMismatch(format!(
                "marginal has {} entries, kernel has {} rows",
                px.len(),
                kernel.nx()
            )));
        }
        let ny = kernel.ny();
        let p = (0..px.len())
            .flat_map(|x| kernel.row(x).iter().map(move |&k| px.get(x) * k))
            .collect();
        Self::new(px.len(), ny, p)
    }

    /// Reinterprets a distribution over `nx * ny` cells as a joint table.
    pub fn from_flat(nx: usize, ny: usize, d: &Distribution) -> Result<Self> {
        check_len(nx * ny, d.len(), "joint table")?;
        Ok(Self::from_raw(nx, ny, d.probs().to_vec()))
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn table(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.ny + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.p[x * self.ny..(x + 1) * self.ny]
    }

    /// The joint viewed as one distribution over the `nx * ny` cells.
    pub fn flatten(&self) -> Distribution {
        Distribution::from_raw(self.p.clone())
    }

    pub fn marginal_x(&self) -> Distribution {
        Distribution::from_raw((0..self.nx).map(|x| self.row(x).iter().sum()).collect())
    }

    pub fn marginal_y(&self) -> Distribution {
        let mut py = vec![0.0; self.ny];
        for x in 0..self.nx {
            for (acc, &v) in py.iter_mut().zip(self.row(x)) {
                *acc += v;
            }
        }
        Distribution::from_raw(py)
    }

    pub fn marginals(&self) -> (Distribution, Distribution) {
        (self.marginal_x(), self.marginal_y())
    }

    /// `P(y | x)`. Rows with `P(x) = 0` fall back to the marginal of `Y`;
    /// they carry zero weight in every risk.
    pub fn conditional_kernel(&self) -> ConditionalKernel {
        let (px, py) = self.marginals();
        let mut k = Vec::with_capacity(self.p.len());
        for x in 0..self.nx {
            let mass = px.get(x);
            if mass > 0.0 {
                k.extend(self.row(x).iter().map(|&v| v / mass));
            } else {
                k.extend_from_slice(py.probs());
            }
        }
        ConditionalKernel {
            nx: self.nx,
            ny: self.ny,
            k,
        }
    }

    pub fn has_full_support(&self) -> bool {
        self.p.iter().all(|&v| v > 0.0)
    }
}

impl Mix for JointDistribution {
    fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if (self.nx, self.ny) != (other.nx, other.ny) {
            return Err(Error::ShapeMismatch(format!(
                "cannot mix {}x{} and {}x{} joints",
                self.nx, self.ny, other.nx, other.ny
            )));
        }
        Ok(Self::from_raw(
            self.nx,
            self.ny,
            mix_tables(&self.p, &other.p, lambda),
        ))
    }
}

/// Transition table `P(y | x)`; every row is a distribution over `Y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalKernel {
    nx: usize,
    ny: usize,
    k: Vec<f64>,
}

impl ConditionalKernel {
    pub fn new(nx: usize, ny: usize, mut k: Vec<f64>) -> Result<Self> {
        check_len(nx * ny, k.len(), "kernel table")?;
        if nx == 0 || ny == 0 {
            return Err(Error::ShapeMismatch(
                "kernel table has an empty axis".into(),
            ));
        }
        for (x, row) in k.chunks_mut(ny).enumerate() {
            normalize(row, &format!("kernel row {x}"))?;
        }
        Ok(Self { nx, ny, k })
    }

    /// The kernel whose every row equals `py`.
    pub fn independent(nx: usize, py: &Distribution) -> Self {
        let k = (0..nx).flat_map(|_| py.probs().iter().copied()).collect();
        Self {
            nx,
            ny: py.len(),
            k,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn table(&self) -> &[f64] {
        &self.k
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.k[x * self.ny + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.k[x * self.ny..(x + 1) * self.ny]
    }

    /// The output marginal `sum_x px(x) k(x, y)`.
    pub fn push_forward(&self, px: &Distribution) -> Result<Distribution> {
        if px.len() != self.nx {
            return Err(Error::ShapeMismatch(format!(
                "marginal has {} entries, kernel has {} rows",
                px.len(),
                self.nx
            )));
        }
        let mut out = vec![0.0; self.ny];
        for x in 0..self.nx {
            for (acc, &k) in out.iter_mut().zip(self.row(x)) {
                *acc += px.get(x) * k;
            }
        }
        Ok(Distribution::from_raw(out))
    }
}

impl Mix for ConditionalKernel {
    fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if (self.nx, self.ny) != (other.nx, other.ny) {
            return Err(Error::ShapeMismatch(format!(
                "cannot mix {}x{} and {}x{} kernels",
                self.nx, self.ny, other.nx, other.ny
            )));
        }
        Ok(Self {
            nx: self.nx,
            ny: self.ny,
            k: mix_tables(&self.k, &other.k, lambda),
        })
    }
}

/// Loss table over `X x Y x U`, row-major with axis order `(x, y, u)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossTensor {
    nx: usize,
    ny: usize,
    nu: usize,
    l: Vec<f64>,
}

impl LossTensor {
    pub fn new(nx: usize, ny: usize, nu: usize, l: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 || nu == 0 {
            return Err(Error::ShapeMismatch("loss table has an empty axis".into()));
        }
        check_len(nx * ny * nu, l.len(), "loss table")?;
        if let Some(i) = l.iter().position(|v| !v.is_finite()) {
            return Err(Error::BadLoss(format!(
                "entry {i} (x={}, y={}, u={}) is {}",
                i / (ny * nu),
                (i / nu) % ny,
                i % nu,
                l[i]
            )));
        }
        Ok(Self { nx, ny, nu, l })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn table(&self) -> &[f64] {
        &self.l
    }

    pub fn get(&self, x: usize, y: usize, u: usize) -> f64 {
        self.l[(x * self.ny + y) * self.nu + u]
    }

    /// Losses of all actions at cell `(x, y)`.
    pub fn actions(&self, x: usize, y: usize) -> &[f64] {
        let start = (x * self.ny + y) * self.nu;
        &self.l[start..start + self.nu]
    }
}

/// A finite decision problem: spaces, the true joint, and the loss.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionProblem {
    x_space: FiniteSpace,
    y_space: FiniteSpace,
    u_space: FiniteSpace,
    joint: JointDistribution,
    loss: LossTensor,
}

impl DecisionProblem {
    pub fn new(
        x_space: FiniteSpace,
        y_space: FiniteSpace,
        u_space: FiniteSpace,
        joint: JointDistribution,
        loss: LossTensor,
    ) -> Result<Self> {
        let (nx, ny, nu) = (x_space.size(), y_space.size(), u_space.size());
        if (joint.nx(), joint.ny()) != (nx, ny) {
            return Err(Error::ShapeMismatch(format!(
                "joint is {}x{}, spaces are {nx}x{ny}",
                joint.nx(),
                joint.ny()
            )));
        }
        if (loss.nx(), loss.ny(), loss.nu()) != (nx, ny, nu) {
            return Err(Error::ShapeMismatch(format!(
                "loss is {}x{}x{}, spaces are {nx}x{ny}x{nu}",
                loss.nx(),
                loss.ny(),
                loss.nu()
            )));
        }
        Ok(Self {
            x_space,
            y_space,
            u_space,
            joint,
            loss,
        })
    }

    /// Unlabelled problem from raw row-major tables.
    pub fn from_tables(
        nx: usize,
        ny: usize,
        nu: usize,
        joint: Vec<f64>,
        loss: Vec<f64>,
    ) -> Result<Self> {
        validate_problem(
            FiniteSpace::new(nx)?,
            FiniteSpace::new(ny)?,
            FiniteSpace::new(nu)?,
            joint,
            loss,
        )
    }

    /// The same spaces and loss under a different joint.
    pub fn with_joint(&self, joint: JointDistribution) -> Result<Self> {
        Self::new(
            self.x_space.clone(),
            self.y_space.clone(),
            self.u_space.clone(),
            joint,
            self.loss.clone(),
        )
    }

    pub fn x_space(&self) -> &FiniteSpace {
        &self.x_space
    }

    pub fn y_space(&self) -> &FiniteSpace {
        &self.y_space
    }

    pub fn u_space(&self) -> &FiniteSpace {
        &self.u_space
    }

    pub fn nx(&self) -> usize {
        self.x_space.size()
    }

    pub fn ny(&self) -> usize {
        self.y_space.size()
    }

    pub fn nu(&self) -> usize {
        self.u_space.size()
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub fn loss(&self) -> &LossTensor {
        &self.loss
    }
}

/// Checks shapes, normalizes the joint and checks the loss is finite.
pub fn validate_problem(
    x_space: FiniteSpace,
    y_space: FiniteSpace,
    u_space: FiniteSpace,
    joint: Vec<f64>,
    loss: Vec<f64>,
) -> Result<DecisionProblem> {
    let (nx, ny, nu) = (x_space.size(), y_space.size(), u_space.size());
    check_len(nx * ny, joint.len(), "joint table")?;
    check_len(nx * ny * nu, loss.len(), "loss table")?;
    let joint = JointDistribution::new(nx, ny, joint)?;
    let loss = LossTensor::new(nx, ny, nu, loss)?;
    DecisionProblem::new(x_space, y_space, u_space, joint, loss)
}

/// Deterministic policy `X -> U`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Policy {
    map: Vec<usize>,
}

impl Policy {
    pub fn new(map: Vec<usize>, nu: usize) -> Result<Self> {
        check_actions(&map, nu)?;
        Ok(Self { map })
    }

    pub(crate) fn from_raw(map: Vec<usize>) -> Self {
        Self { map }
    }

    pub fn actions(&self) -> &[usize] {
        &self.map
    }

    pub fn action(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Deterministic policy `X x Y -> U`, row-major over `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JointPolicy {
    nx: usize,
    ny: usize,
    map: Vec<usize>,
}

impl JointPolicy {
    pub fn new(nx: usize, ny: usize, map: Vec<usize>, nu: usize) -> Result<Self> {
        check_len(nx * ny, map.len(), "joint policy")?;
        check_actions(&map, nu)?;
        Ok(Self { nx, ny, map })
    }

    pub(crate) fn from_raw(nx: usize, ny: usize, map: Vec<usize>) -> Self {
        Self { nx, ny, map }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn actions(&self) -> &[usize] {
        &self.map
    }

    pub fn action(&self, x: usize, y: usize) -> usize {
        self.map[x * self.ny + y]
    }
}

fn check_actions(map: &[usize], nu: usize) -> Result<()> {
    match map.iter().find(|&&u| u >= nu) {
        Some(&u) => Err(Error::IndexOutOfRange {
            what: "action",
            index: u,
            size: nu,
        }),
        None => Ok(()),
    }
}

fn check_len(expected: usize, got: usize, what: &str) -> Result<()> {
    if expected != got {
        return Err(Error::ShapeMismatch(format!(
            "{what} has {got} entries, expected {expected}"
        )));
    }
    Ok(())
}
