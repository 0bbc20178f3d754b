use std::path::PathBuf;

use clap::{Parser, Subcommand};
use dictgreedy::cli;

/// Dictionary-restricted greedy descent: experiment runner.
#[derive(Parser)]
#[command(version, about)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config; writes the trace CSV and report JSON.
    Run {
        config: PathBuf,
        /// Base directory for relative output paths (default: the config's directory).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run every *.json config in a directory and write sweep_summary.csv.
    Sweep {
        dir: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Render a trace CSV as SVG.
    Plot { trace: PathBuf, out: PathBuf },
}

fn main() {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { cli::EXIT_USAGE } else { cli::EXIT_PASS };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match args.command {
        Command::Run { config, out_dir } => cli::cmd_run(&config, out_dir.as_deref()),
        Command::Sweep { dir, out_dir } => cli::cmd_sweep(&dir, out_dir.as_deref()),
        Command::Plot { trace, out } => cli::cmd_plot(&trace, &out),
    };
    std::process::exit(code);
}
