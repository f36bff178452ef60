//! File formats and subcommands behind the `opvalue` binary.

pub mod commands;
pub mod error;
pub mod format;

pub use commands::{
    agents_report, check_report, cmd_agents, cmd_check, cmd_values, input_digest, parse_observed,
    values_report, AgentMode, Outcome, Report,
};
pub use error::{CliError, Result, EXIT_INPUT, EXIT_OK, EXIT_OUTPUT, EXIT_PROPERTY};
pub use format::{emit_problem, parse_problem, MultiAgentFile, ProblemFile, SingleAgentFile};
