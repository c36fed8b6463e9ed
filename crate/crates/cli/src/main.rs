use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use splitq_cli::{parse_config, run_experiment, RunOptions};

#[derive(Parser)]
#[command(name = "splitq", version, about = "Split Q-learning experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use the full run counts instead of the config's.
        #[arg(long)]
        full_scale: bool,
        /// Also write per-step reward streams.
        #[arg(long)]
        export_trajectories: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            full_scale,
            export_trajectories,
        } => {
            let cfg = match parse_config(&config, seed, full_scale) {
                Ok(cfg) => cfg,
                Err(e) => {
                    for m in e.messages() {
                        eprintln!("error: {m}");
                    }
                    return ExitCode::from(1);
                }
            };
            let out = out.or_else(|| cfg.output.clone()).expect("materialized");
            match run_experiment(&cfg, &out, RunOptions { export_trajectories }) {
                Ok(manifest) => {
                    println!("wrote {} files to {}", manifest.files.len(), out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    eprintln!("partial results in {}", out.display());
                    ExitCode::from(2)
                }
            }
        }
    }
}
