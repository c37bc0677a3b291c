use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use goodweights_cli::builtins::Catalog;
use goodweights_cli::{run_path, RunError, RunOptions};

#[derive(Parser)]
#[command(
    name = "goodweights",
    version,
    about = "Weighted ergodic average experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run {
        config: PathBuf,
        /// output directory for CSV traces and summary.json
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// worker threads (affects speed only)
        #[arg(long)]
        threads: Option<usize>,
        /// replace the largest horizon of the experiment
        #[arg(long)]
        horizon_override: Option<u64>,
    },
    /// Print built-in systems, weight families and example configs.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{Catalog}");
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            out,
            threads,
            horizon_override,
        } => {
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(n) = threads {
                if n == 0 {
                    eprintln!(
                        "error: {}",
                        RunError::Validation("--threads must be at least 1".into())
                    );
                    return ExitCode::from(2);
                }
                pool = pool.num_threads(n);
            }
            let pool = match pool.build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {}", RunError::Internal(format!("thread pool: {e}")));
                    return ExitCode::from(1);
                }
            };
            let opts = RunOptions { horizon_override };
            match pool.install(|| run_path(&config, &out, &opts)) {
                Ok(report) => {
                    for p in &report.outputs {
                        println!("{}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
