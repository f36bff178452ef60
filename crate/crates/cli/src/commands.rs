//! The three subcommands, as pure functions from input bytes to reports.

use std::collections::BTreeMap;

use opvalue_core::infotheory::{IdentityCheck, OptimalityCheck};
use opvalue_core::multiagent::{exhaustive_order_diagnostic, EXHAUSTIVE_ORDER_LIMIT};
use opvalue_core::values::{Optimizers, Risks, Values};
use opvalue_core::{
    condition_on_observations, first_agent_value, greedy_order, leave_one_out_value,
    log_loss_realization_check, run_property_suite, shannon_measures, LogBase, MultiAgentProblem,
    PropertyVerdict, ShannonMeasures,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::format::{parse_problem, ProblemFile};

pub const REPORT_FORMAT: &str = "opvalue-report/1";
pub const TOOL: &str = "opvalue";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AgentMode {
    /// Value of observing each agent alone.
    RankFirst,
    /// Loss of dropping each agent from full observation.
    RankLoo,
    /// Greedy observation order.
    Order,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Options {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<AgentMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<BTreeMap<usize, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report<T> {
    pub format: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub input_digest: String,
    pub input_format: &'static str,
    pub options: Options,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

/// A rendered report with the exit code it should produce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub exit_code: i32,
    /// One line per failed property verdict.
    pub failures: Vec<String>,
}

/// Lowercase hex SHA-256 of the raw input bytes.
pub fn input_digest(input: &[u8]) -> String {
    hex::encode(Sha256::digest(input))
}

fn load(input: &[u8]) -> Result<ProblemFile> {
    let text = std::str::from_utf8(input).map_err(|_| CliError::Encoding)?;
    parse_problem(text)
}

fn envelope<T>(
    command: &'static str,
    seed: u64,
    input: &[u8],
    file: &ProblemFile,
    options: Options,
    result: T,
) -> Report<T> {
    Report {
        format: REPORT_FORMAT,
        tool: TOOL,
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed,
        input_digest: input_digest(input),
        input_format: file.kind(),
        options,
        result,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogLossSummary {
    pub max_difference: f64,
    pub min_margin: f64,
    pub risks: Vec<IdentityCheck>,
    pub values: Vec<IdentityCheck>,
    pub optimality: Vec<OptimalityCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValuesResult {
    pub risks: Risks,
    pub values: Values,
    pub optimizers: Optimizers,
    /// Present when the joint has full support.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shannon: Option<ShannonMeasures>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_loss: Option<LogLossSummary>,
}

pub fn values_report(input: &[u8], bits: bool, seed: u64) -> Result<Report<ValuesResult>> {
    let file = load(input)?;
    let p = file.single()?;
    let r = opvalue_core::value_report(&p);
    let base = if bits { LogBase::Bits } else { LogBase::Nats };
    let (shannon, log_loss) = if p.joint().has_full_support() {
        let c = log_loss_realization_check(p.joint(), base, seed)?;
        let summary = LogLossSummary {
            max_difference: c.max_difference(),
            min_margin: c.min_margin(),
            risks: c.risks,
            values: c.values,
            optimality: c.optimality,
        };
        (Some(shannon_measures(p.joint(), base)), Some(summary))
    } else {
        (None, None)
    };
    let result = ValuesResult {
        risks: r.risks,
        values: r.values,
        optimizers: r.optimizers,
        shannon,
        log_loss,
    };
    let options = Options {
        bits: Some(bits),
        ..Options::default()
    };
    Ok(envelope("values", seed, input, &file, options, result))
}

pub fn cmd_values(input: &[u8], bits: bool, seed: u64) -> Result<Outcome> {
    Ok(Outcome {
        report: values_report(input, bits, seed)?.to_json(),
        exit_code: crate::error::EXIT_OK,
        failures: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentValue {
    pub agent: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdCandidate {
    pub agent: usize,
    pub risk: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ordering {
    pub order: Vec<usize>,
    pub step_risks: Vec<f64>,
    pub step_values: Vec<f64>,
    pub candidates: Vec<Vec<IdCandidate>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderCheck {
    pub best_orders: Vec<Vec<usize>>,
    pub best_score: f64,
    pub greedy_score: f64,
    pub greedy_is_best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentsResult {
    /// Ids of the agents still unobserved, in slot order.
    pub agents: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<AgentValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ordering: Option<Ordering>,
    /// Comparison with every order, for small agent counts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_check: Option<OrderCheck>,
}

/// Parses `i=x[,j=y...]` into agent id to observed value.
pub fn parse_observed(s: &str) -> Result<BTreeMap<usize, usize>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (i, x) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected agent=value, got {part:?}")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{t:?} is not a nonnegative integer")))
        };
        if out.insert(num(i)?, num(x)?).is_some() {
            return Err(CliError::Usage(format!("agent {i} observed twice")));
        }
    }
    Ok(out)
}

fn ranked(
    p: &MultiAgentProblem,
    f: fn(&MultiAgentProblem, usize) -> opvalue_core::Result<f64>,
) -> Result<Vec<AgentValue>> {
    let mut out = (0..p.n())
        .map(|i| {
            Ok(AgentValue {
                agent: p.agent_ids()[i],
                value: f(p, i)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.agent.cmp(&b.agent)));
    Ok(out)
}

fn ordering(p: &MultiAgentProblem) -> Result<(Ordering, Option<OrderCheck>)> {
    let ids = p.agent_ids();
    let r = greedy_order(p)?;
    let ord = Ordering {
        order: r.order.iter().map(|&s| ids[s]).collect(),
        step_risks: r.step_risks,
        step_values: r.step_values,
        candidates: r
            .candidates
            .iter()
            .map(|step| {
                step.iter()
                    .map(|c| IdCandidate {
                        agent: ids[c.agent],
                        risk: c.risk,
                        value: c.value,
                    })
                    .collect()
            })
            .collect(),
    };
    let check = if p.n() <= EXHAUSTIVE_ORDER_LIMIT {
        let d = exhaustive_order_diagnostic(p)?;
        Some(OrderCheck {
            best_orders: d
                .best_orders
                .iter()
                .map(|o| o.iter().map(|&s| ids[s]).collect())
                .collect(),
            best_score: d.best_score,
            greedy_score: d.greedy_score,
            greedy_is_best: d.greedy_is_best,
        })
    } else {
        None
    };
    Ok((ord, check))
}

pub fn agents_report(
    input: &[u8],
    mode: AgentMode,
    observed: &BTreeMap<usize, usize>,
    seed: u64,
) -> Result<Report<AgentsResult>> {
    let file = load(input)?;
    let mut p = file.multi()?;
    if !observed.is_empty() {
        let slots = observed
            .iter()
            .map(|(&id, &v)| Ok((p.slot_of(id)?, v)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        p = condition_on_observations(&p, &slots)?;
    }
    let mut result = AgentsResult {
        agents: p.agent_ids().to_vec(),
        ranking: None,
        ordering: None,
        order_check: None,
    };
    match mode {
        AgentMode::RankFirst => result.ranking = Some(ranked(&p, first_agent_value)?),
        AgentMode::RankLoo => result.ranking = Some(ranked(&p, leave_one_out_value)?),
        AgentMode::Order => {
            let (o, c) = ordering(&p)?;
            result.ordering = Some(o);
            result.order_check = c;
        }
    }
    let options = Options {
        mode: Some(mode),
        observed: Some(observed.clone()),
        ..Options::default()
    };
    Ok(envelope("agents", seed, input, &file, options, result))
}

pub fn cmd_agents(
    input: &[u8],
    mode: AgentMode,
    observed: &BTreeMap<usize, usize>,
    seed: u64,
) -> Result<Outcome> {
    Ok(Outcome {
        report: agents_report(input, mode, observed, seed)?.to_json(),
        exit_code: crate::error::EXIT_OK,
        failures: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub all_pass: bool,
    pub verdicts: Vec<PropertyVerdict>,
}

pub fn check_report(input: &[u8], trials: usize, seed: u64) -> Result<Report<CheckResult>> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let file = load(input)?;
    let p = file.single()?;
    let verdicts = run_property_suite(p.loss(), trials, seed)?;
    let result = CheckResult {
        all_pass: verdicts.iter().all(|v| v.pass),
        verdicts,
    };
    let options = Options {
        trials: Some(trials),
        ..Options::default()
    };
    Ok(envelope("check", seed, input, &file, options, result))
}

pub fn cmd_check(input: &[u8], trials: usize, seed: u64) -> Result<Outcome> {
    let report = check_report(input, trials, seed)?;
    let failures: Vec<String> = report
        .result
        .verdicts
        .iter()
        .filter(|v| !v.pass)
        .map(|v| {
            format!(
                "{} ({:?}) failed: worst slack {:e} over {} trials",
                v.property, v.direction, v.worst_slack, v.trials
            )
        })
        .collect();
    Ok(Outcome {
        report: report.to_json(),
        exit_code: if failures.is_empty() {
            crate::error::EXIT_OK
        } else {
            crate::error::EXIT_PROPERTY
        },
        failures,
    })
}
