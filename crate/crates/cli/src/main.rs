use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opvalue_cli::{
    cmd_agents, cmd_check, cmd_values, parse_observed, AgentMode, CliError, Outcome,
};

/// Values of common sense, perception, prediction and communication for
/// finite decision problems.
#[derive(Parser)]
#[command(name = "opvalue", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Problem file, or "-" for stdin.
    path: String,
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Risks, values and optimizers of a single-agent problem.
    Values {
        #[command(flatten)]
        common: Common,
        /// Report Shannon measures in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Rank or order the agents of a multi-agent problem.
    Agents {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = AgentMode::RankFirst)]
        mode: AgentMode,
        /// Condition on observed agents first, as id=value[,id=value...].
        #[arg(long)]
        observed: Option<String>,
    },
    /// Run the concavity and convexity suite on a problem's loss.
    Check {
        #[command(flatten)]
        common: Common,
        /// Trials per property (at least 1).
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

fn read_input(path: &str) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    let res = if path == "-" {
        std::io::stdin().read_to_end(&mut buf).map(|_| ())
    } else {
        std::fs::read(path).map(|b| buf = b)
    };
    res.map_err(|source| CliError::Read {
        path: path.to_string(),
        source,
    })?;
    Ok(buf)
}

fn write_output(out: &Option<PathBuf>, report: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, report).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(report.as_bytes())
            .map_err(|source| CliError::Write {
                path: "stdout".into(),
                source,
            }),
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (common, outcome): (Common, Outcome) = match cli.command {
        Command::Values { common, bits } => {
            let input = read_input(&common.path)?;
            let o = cmd_values(&input, bits, common.seed)?;
            (common, o)
        }
        Command::Agents {
            common,
            mode,
            observed,
        } => {
            let observed = parse_observed(observed.as_deref().unwrap_or(""))?;
            let input = read_input(&common.path)?;
            let o = cmd_agents(&input, mode, &observed, common.seed)?;
            (common, o)
        }
        Command::Check { common, trials } => {
            if trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            let input = read_input(&common.path)?;
            let o = cmd_check(&input, trials, common.seed)?;
            (common, o)
        }
    };
    write_output(&common.out, &outcome.report)?;
    for f in &outcome.failures {
        eprintln!("opvalue: {f}");
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("opvalue: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
