use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mif_cli::commands::{self, ExportMode, SolveOptions};
use mif_cli::{files, CliError, ExitStatus};

/// Maximum independent flow of correlated sources through a capacitated
/// network.
#[derive(Parser)]
#[command(name = "mif", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a maximum independent flow.
    Solve {
        instance: PathBuf,
        /// Unit augmentations; requires integer capacities and entropies.
        #[arg(long)]
        integral: bool,
        /// Write the iteration trace to this file.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        /// Run the message-passing simulation instead of the central solver.
        #[arg(long)]
        distributed: bool,
        /// Write the final flow to this file.
        #[arg(long, value_name = "FILE")]
        flow_out: Option<PathBuf>,
    },
    /// Check a flow (or the final flow of a trace) against an instance.
    Verify {
        instance: PathBuf,
        flow: PathBuf,
        /// Treat unmet Slepian-Wolf constraints as a failure.
        #[arg(long)]
        require_slepian_wolf: bool,
    },
    /// Value of the intersection bound and a minimizing subset.
    MaxValue { instance: PathBuf },
    /// Render the instance, optionally with a flow.
    Export {
        instance: PathBuf,
        #[arg(long, value_name = "FILE")]
        flow: Option<PathBuf>,
        /// Graphviz output (the default).
        #[arg(long, conflicts_with_all = ["json", "aux"])]
        dot: bool,
        /// Graphviz output of the auxiliary digraph at the given flow.
        #[arg(long, conflicts_with = "json")]
        aux: bool,
        /// Canonical instance JSON.
        #[arg(long)]
        json: bool,
    },
    /// Rank candidate sinks by how much information each could collect.
    SinkSelect {
        instance: PathBuf,
        /// Comma-separated node labels; overrides the instance's list.
        #[arg(long, value_delimiter = ',')]
        candidates: Vec<String>,
    },
}

fn run(cli: Cli) -> Result<(String, ExitStatus), CliError> {
    match cli.command {
        Command::Solve {
            instance,
            integral,
            trace,
            distributed,
            flow_out,
        } => {
            let inst = commands::load_instance(&instance)?;
            let opts = SolveOptions {
                integral,
                distributed,
                record_log: trace.is_some(),
            };
            let solved = commands::solve(&inst, &opts)?;
            if let Some(path) = trace {
                commands::write_file(&path, &files::trace_to_json(&solved.trace))?;
            }
            if let Some(path) = flow_out {
                commands::write_file(&path, &files::flow_to_json(&inst.graph, &solved.result.flow))?;
            }
            Ok((solved.report, ExitStatus::Success))
        }
        Command::Verify {
            instance,
            flow,
            require_slepian_wolf,
        } => {
            let inst = commands::load_instance(&instance)?;
            let text = commands::read_file(&flow)?;
            let v = commands::verify(&inst, &text, require_slepian_wolf)?;
            Ok((v.report, v.status))
        }
        Command::MaxValue { instance } => {
            let inst = commands::load_instance(&instance)?;
            Ok((commands::max_value(&inst)?, ExitStatus::Success))
        }
        Command::Export {
            instance,
            flow,
            aux,
            json,
            ..
        } => {
            let inst = commands::load_instance(&instance)?;
            let text = flow.as_deref().map(commands::read_file).transpose()?;
            let mode = if json {
                ExportMode::Json
            } else if aux {
                ExportMode::Auxiliary
            } else {
                ExportMode::Dot
            };
            Ok((commands::export(&inst, text.as_deref(), mode)?, ExitStatus::Success))
        }
        Command::SinkSelect { instance, candidates } => {
            let inst = commands::load_instance(&instance)?;
            Ok((commands::sink_select(&inst, &candidates)?, ExitStatus::Success))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ExitStatus::Input.code() as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok((out, status)) => {
            print!("{out}");
            ExitCode::from(status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status.code() as u8)
        }
    }
}
