//! Problem files.
//!
//! A problem file is a JSON object whose `format` field selects the kind:
//!
//! ```json
//! {
//!   "format": "single-agent-problem/1",
//!   "layout": "joint[x*ny + y]; loss[(x*ny + y)*nu + u]",
//!   "nx": 2, "ny": 2, "nu": 2,
//!   "joint": [0.04, 0.06, 0.81, 0.09],
//!   "loss": [0, -1, 0, 1, 0, 1, 0, 1]
//! }
//! ```
//!
//! `x_labels`, `y_labels` and `u_labels` are optional. Multi-agent files use
//! `"format": "multi-agent-problem/1"` with `x_sizes`, `y_sizes`, `u_size`
//! and flat `joint` and `loss` tables whose axes are all observables in
//! order, then all unobservables, then (for the loss) the action. `layout`
//! is informational; when present it must equal the canonical string.
//! Unknown fields are rejected.

use opvalue_core::{DecisionProblem, FiniteSpace, MultiAgentProblem};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SINGLE_FORMAT: &str = "single-agent-problem/1";
pub const MULTI_FORMAT: &str = "multi-agent-problem/1";
pub const SINGLE_LAYOUT: &str = "joint[x*ny + y]; loss[(x*ny + y)*nu + u]";
pub const MULTI_LAYOUT: &str =
    "row-major over (x_1..x_n, y_1..y_m); loss appends the action as the fastest axis";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleAgentFile {
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<String>,
    pub nx: usize,
    pub ny: usize,
    pub nu: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_labels: Option<Vec<String>>,
    pub joint: Vec<f64>,
    pub loss: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiAgentFile {
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<String>,
    pub x_sizes: Vec<usize>,
    pub y_sizes: Vec<usize>,
    pub u_size: usize,
    pub joint: Vec<f64>,
    pub loss: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemFile {
    Single(SingleAgentFile),
    Multi(MultiAgentFile),
}

#[derive(Deserialize)]
struct Header {
    format: Option<String>,
}

fn json_error(e: serde_json::Error) -> CliError {
    CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: {
            let full = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            full.strip_suffix(&suffix).unwrap_or(&full).to_string()
        },
    }
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

fn check_len(field: &str, expected: usize, shape: String, found: usize) -> Result<()> {
    if expected != found {
        return Err(invalid(
            field,
            format!("expected {expected} numbers ({shape}), found {found}"),
        ));
    }
    Ok(())
}

fn check_layout(layout: &Option<String>, canonical: &str) -> Result<()> {
    match layout {
        Some(l) if l != canonical => Err(invalid(
            "layout",
            format!("unsupported layout {l:?}; expected {canonical:?}"),
        )),
        _ => Ok(()),
    }
}

fn space(field: &str, size: usize, labels: &Option<Vec<String>>) -> Result<FiniteSpace> {
    let wrap = |e: opvalue_core::Error| invalid(field, e.to_string());
    match labels {
        None => FiniteSpace::new(size).map_err(wrap),
        Some(l) if l.len() != size => Err(invalid(
            field,
            format!("expected {size} labels, found {}", l.len()),
        )),
        Some(l) => FiniteSpace::with_labels(l.clone()).map_err(wrap),
    }
}

/// Parses a problem file without validating its tables.
pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let header: Header = serde_json::from_str(text).map_err(json_error)?;
    match header.format.as_deref() {
        Some(SINGLE_FORMAT) => Ok(ProblemFile::Single(
            serde_json::from_str(text).map_err(json_error)?,
        )),
        Some(MULTI_FORMAT) => Ok(ProblemFile::Multi(
            serde_json::from_str(text).map_err(json_error)?,
        )),
        Some(other) => Err(invalid(
            "format",
            format!("unknown format {other:?}; expected {SINGLE_FORMAT:?} or {MULTI_FORMAT:?}"),
        )),
        None => Err(invalid("format", "missing field")),
    }
}

/// Pretty JSON with a trailing newline.
pub fn emit_problem(file: &ProblemFile) -> String {
    let mut s = match file {
        ProblemFile::Single(f) => serde_json::to_string_pretty(f),
        ProblemFile::Multi(f) => serde_json::to_string_pretty(f),
    }
    .expect("problem files always serialize");
    s.push('\n');
    s
}

impl SingleAgentFile {
    pub fn validate(&self) -> Result<DecisionProblem> {
        check_layout(&self.layout, SINGLE_LAYOUT)?;
        let x = space("x_labels", self.nx, &self.x_labels)?;
        let y = space("y_labels", self.ny, &self.y_labels)?;
        let u = space("u_labels", self.nu, &self.u_labels)?;
        let cells = self
            .nx
            .checked_mul(self.ny)
            .and_then(|c| c.checked_mul(self.nu).map(|l| (c, l)));
        let (cells, loss_cells) = cells.ok_or_else(|| invalid("nx", "table size overflows"))?;
        check_len(
            "joint",
            cells,
            format!("nx*ny = {}*{}", self.nx, self.ny),
            self.joint.len(),
        )?;
        check_len(
            "loss",
            loss_cells,
            format!("nx*ny*nu = {}*{}*{}", self.nx, self.ny, self.nu),
            self.loss.len(),
        )?;
        opvalue_core::validate_problem(x, y, u, self.joint.clone(), self.loss.clone()).map_err(
            |e| match e {
                opvalue_core::Error::BadProbability(m) => invalid("joint", m),
                opvalue_core::Error::BadLoss(m) => invalid("loss", m),
                other => CliError::Core(other),
            },
        )
    }

    /// File holding the validated tables of `p`, with its labels.
    pub fn from_problem(p: &DecisionProblem) -> Self {
        let labels = |s: &FiniteSpace| s.labels().map(<[String]>::to_vec);
        Self {
            format: SINGLE_FORMAT.into(),
            layout: Some(SINGLE_LAYOUT.into()),
            nx: p.nx(),
            ny: p.ny(),
            nu: p.nu(),
            x_labels: labels(p.x_space()),
            y_labels: labels(p.y_space()),
            u_labels: labels(p.u_space()),
            joint: p.joint().table().to_vec(),
            loss: p.loss().table().to_vec(),
        }
    }
}

impl MultiAgentFile {
    pub fn validate(&self) -> Result<MultiAgentProblem> {
        check_layout(&self.layout, MULTI_LAYOUT)?;
        if self.x_sizes.contains(&0) {
            return Err(invalid("x_sizes", "every size must be at least 1"));
        }
        if self.y_sizes.contains(&0) {
            return Err(invalid("y_sizes", "every size must be at least 1"));
        }
        if self.u_size == 0 {
            return Err(invalid("u_size", "must be at least 1"));
        }
        let cells = self
            .x_sizes
            .iter()
            .chain(&self.y_sizes)
            .try_fold(1usize, |a, &s| a.checked_mul(s));
        let cells = cells.ok_or_else(|| invalid("x_sizes", "table size overflows"))?;
        check_len(
            "joint",
            cells,
            "product of x_sizes and y_sizes".into(),
            self.joint.len(),
        )?;
        let loss_cells = cells
            .checked_mul(self.u_size)
            .ok_or_else(|| invalid("u_size", "table size overflows"))?;
        check_len(
            "loss",
            loss_cells,
            "joint cells times u_size".into(),
            self.loss.len(),
        )?;
        MultiAgentProblem::new(
            self.x_sizes.clone(),
            self.y_sizes.clone(),
            self.u_size,
            self.joint.clone(),
            self.loss.clone(),
        )
        .map_err(|e| match e {
            opvalue_core::Error::BadProbability(m) => invalid("joint", m),
            opvalue_core::Error::BadLoss(m) => invalid("loss", m),
            other => CliError::Core(other),
        })
    }

    pub fn from_problem(p: &MultiAgentProblem) -> Self {
        Self {
            format: MULTI_FORMAT.into(),
            layout: Some(MULTI_LAYOUT.into()),
            x_sizes: p.x_sizes().to_vec(),
            y_sizes: p.y_sizes().to_vec(),
            u_size: p.u_size(),
            joint: p.joint().to_vec(),
            loss: p.loss().to_vec(),
        }
    }
}

impl ProblemFile {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemFile::Single(_) => SINGLE_FORMAT,
            ProblemFile::Multi(_) => MULTI_FORMAT,
        }
    }

    pub fn single(&self) -> Result<DecisionProblem> {
        match self {
            ProblemFile::Single(f) => f.validate(),
            ProblemFile::Multi(_) => Err(invalid(
                "format",
                format!("this command needs a {SINGLE_FORMAT:?} file"),
            )),
        }
    }

    pub fn multi(&self) -> Result<MultiAgentProblem> {
        match self {
            ProblemFile::Multi(f) => f.validate(),
            ProblemFile::Single(_) => Err(invalid(
                "format",
                format!("this command needs a {MULTI_FORMAT:?} file"),
            )),
        }
    }
}
