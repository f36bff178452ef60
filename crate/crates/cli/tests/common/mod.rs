//! Independent oracles and helpers shared by the integration tests.
#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub struct Run {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

/// Runs the binary, optionally feeding `stdin`.
pub fn opvalue(args: &[&str], stdin: Option<&[u8]>) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_opvalue"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(bytes) = stdin {
            pipe.write_all(bytes).unwrap();
        }
    }
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Everything a brute-force scan of a small problem produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Brute {
    pub u_bar: usize,
    pub u_star: usize,
    pub blind: Vec<usize>,
    pub predictive: Vec<usize>,
    pub omniscient: Vec<usize>,
    pub r_bar_u: f64,
    pub r_u_star: f64,
    pub r_blind: f64,
    pub r_predictive: f64,
    pub r_omniscient: f64,
}

impl Brute {
    pub fn values(&self) -> [f64; 5] {
        [
            self.r_bar_u - self.r_u_star,
            self.r_u_star - self.r_blind,
            self.r_blind - self.r_predictive,
            self.r_u_star - self.r_predictive,
            self.r_predictive - self.r_omniscient,
        ]
    }
}

/// Digits of `code` in base `base`, most significant first.
fn decode(mut code: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for d in out.iter_mut().rev() {
        *d = code % base;
        code /= base;
    }
    out
}

/// Scans every constant action, every policy `X -> U` and every policy
/// `X x Y -> U`, keeping the first minimizer in lexicographic order.
pub fn brute_force(nx: usize, ny: usize, nu: usize, joint: &[f64], loss: &[f64]) -> Brute {
    let l = |x: usize, y: usize, u: usize| loss[(x * ny + y) * nu + u];
    let px: Vec<f64> = (0..nx)
        .map(|x| (0..ny).map(|y| joint[x * ny + y]).sum())
        .collect();
    let py: Vec<f64> = (0..ny)
        .map(|y| (0..nx).map(|x| joint[x * ny + y]).sum())
        .collect();

    let true_risk = |f: &dyn Fn(usize, usize) -> usize| {
        let mut r = 0.0;
        for x in 0..nx {
            for y in 0..ny {
                r += joint[x * ny + y] * l(x, y, f(x, y));
            }
        }
        r
    };
    let product_risk = |f: &dyn Fn(usize, usize) -> usize| {
        let mut r = 0.0;
        for (x, &wx) in px.iter().enumerate() {
            for (y, &wy) in py.iter().enumerate() {
                r += wx * wy * l(x, y, f(x, y));
            }
        }
        r
    };
    let first_min = |count: usize, score: &dyn Fn(usize) -> f64| {
        let mut best = (0, f64::INFINITY);
        for c in 0..count {
            let s = score(c);
            if s < best.1 {
                best = (c, s);
            }
        }
        best.0
    };

    let u_bar = first_min(nu, &|u| product_risk(&|_, _| u));
    let u_star = first_min(nu, &|u| true_risk(&|_, _| u));
    let policies = nu.pow(nx as u32);
    let blind = decode(
        first_min(policies, &|c| {
            let p = decode(c, nu, nx);
            product_risk(&|x, _| p[x])
        }),
        nu,
        nx,
    );
    let predictive = decode(
        first_min(policies, &|c| {
            let p = decode(c, nu, nx);
            true_risk(&|x, _| p[x])
        }),
        nu,
        nx,
    );
    let omniscient = decode(
        first_min(nu.pow((nx * ny) as u32), &|c| {
            let p = decode(c, nu, nx * ny);
            true_risk(&|x, y| p[x * ny + y])
        }),
        nu,
        nx * ny,
    );
    Brute {
        r_bar_u: true_risk(&|_, _| u_bar),
        r_u_star: true_risk(&|_, _| u_star),
        r_blind: true_risk(&|x, _| blind[x]),
        r_predictive: true_risk(&|x, _| predictive[x]),
        r_omniscient: true_risk(&|x, y| omniscient[x * ny + y]),
        u_bar,
        u_star,
        blind,
        predictive,
        omniscient,
    }
}

/// `(H(X), H(Y), H(X,Y))` in nats from a row-major joint.
pub fn entropies(nx: usize, ny: usize, joint: &[f64]) -> (f64, f64, f64) {
    let h = |v: &mut dyn Iterator<Item = f64>| -> f64 {
        v.filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
    };
    let hx = h(&mut (0..nx).map(|x| (0..ny).map(|y| joint[x * ny + y]).sum::<f64>()));
    let hy = h(&mut (0..ny).map(|y| (0..nx).map(|x| joint[x * ny + y]).sum::<f64>()));
    let hxy = h(&mut joint.iter().copied());
    (hx, hy, hxy)
}

/// Risk of the best policy seeing the agents in `subset`, computed per
/// observed assignment straight from the flat tables.
pub fn subset_risk(
    x_sizes: &[usize],
    y_sizes: &[usize],
    nu: usize,
    joint: &[f64],
    loss: &[f64],
    subset: &[usize],
) -> f64 {
    let nx: usize = x_sizes.iter().product();
    let ny: usize = y_sizes.iter().product();
    let na: usize = subset.iter().map(|&i| x_sizes[i]).product();
    // expected loss of each action on each observed assignment
    let mut acc = vec![0.0; na * nu];
    for xi in 0..nx {
        let mut rest = xi;
        let mut coords = vec![0; x_sizes.len()];
        for (c, &s) in coords.iter_mut().zip(x_sizes).rev() {
            *c = rest % s;
            rest /= s;
        }
        let a = subset.iter().fold(0, |a, &i| a * x_sizes[i] + coords[i]);
        for yi in 0..ny {
            let cell = xi * ny + yi;
            for u in 0..nu {
                acc[a * nu + u] += joint[cell] * loss[cell * nu + u];
            }
        }
    }
    acc.chunks(nu)
        .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
        .sum()
}
