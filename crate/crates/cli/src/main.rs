use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use codevo::Execution;
use codevo_cli::{analyze, run, sweep_alphabet, CliError, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "codevo",
    version,
    about = "Evolve and analyse population codes"
)]
struct Cli {
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one scenario and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the scenario once per output alphabet size.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 2)]
        xmin: usize,
        #[arg(long, default_value_t = 9)]
        xmax: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute metrics and figures from a saved codes.json.
    Analyze {
        #[arg(long)]
        codes: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn execution(threads: Option<usize>) -> Result<Execution, CliError> {
    match threads {
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(1) => Ok(Execution::Sequential),
        Some(_n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new()
                .num_threads(_n)
                .build_global()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::default()),
    }
}

fn load(path: &Path, seed: Option<u64>) -> Result<ScenarioConfig, CliError> {
    let mut config = ScenarioConfig::load(path)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    Ok(config)
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    let exec = execution(cli.threads)?;
    match cli.command {
        Command::Run { config, seed, out } => {
            let config = load(&config, seed)?;
            let output = run(&config, exec, out.as_deref())?;
            let m = &output.report.metrics;
            println!(
                "code similarity {:.6} (bound {:.6}, initial {:.6}); best restart {} of {}; {} clusters",
                m.final_code_similarity,
                m.similarity_bound,
                m.initial_code_similarity,
                output.report.best_restart,
                output.report.restarts.len(),
                m.clusters.len()
            );
            if let Some(b) = m.blind_info {
                println!("blind information {b:.6}");
            }
            println!(
                "wrote {} files to {} in {:.1} s",
                output.report.artifacts.len() + 1,
                output.directory.display(),
                output.wall_seconds
            );
        }
        Command::Sweep {
            config,
            xmin,
            xmax,
            seed,
            out,
        } => {
            let config = load(&config, seed)?;
            let rows = sweep_alphabet(&config, xmin..=xmax, exec, out.as_deref())?;
            println!("|X|  blind_info  code_similarity");
            for r in rows {
                println!(
                    "{:>3}  {:.6}    {:.6}",
                    r.output_states, r.blind_info, r.code_similarity
                );
            }
        }
        Command::Analyze { codes, out } => {
            let report = analyze(&codes, &out)?;
            let m = &report.metrics;
            println!(
                "code similarity {:.6} (bound {:.6}); {} clusters; wrote {}",
                m.final_code_similarity,
                m.similarity_bound,
                m.clusters.len(),
                out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
