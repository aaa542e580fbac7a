use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dunklkit::config::ExperimentConfig;
use dunklkit::runner::{self, Route, RunOptions, RunResult};
use dunklkit::DunklError;

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "dunklkit", version, about = "Dunkl analysis for Z2^d: experiments and verification")]
struct Cli {
    /// TOML experiment configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "DUNKLKIT_THREADS")]
    threads: Option<usize>,
    /// Add wall-clock columns (outputs are then not reproducible).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the acceptance checks.
    Verify {
        /// Run only checks whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Transform the test function onto the frequency grid.
    Transform,
    /// Compare translation routes at sample points.
    Translate {
        #[arg(long, default_value = "all")]
        route: Route,
    },
    /// Convolve the test function with the configured kernel.
    Convolve,
    /// Convergence table of the configured summability method.
    Summability,
    /// Weak-type table and majorization of the maximal function.
    Maximal,
    /// Print the default configuration as TOML.
    DefaultConfig,
}

fn load(path: Option<&PathBuf>) -> Result<ExperimentConfig, String> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            ExperimentConfig::from_toml(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cfg = match load(cli.config.as_ref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("config error: threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let dir = cli.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    let mut opts = RunOptions { timings: cli.timings, ..RunOptions::default() };
    let outcome: dunklkit::Result<RunResult> = match &cli.command {
        Command::Verify { filter } => {
            opts.filter = filter.clone();
            runner::cmd_verify(&cfg, &opts)
        }
        Command::Transform => runner::cmd_transform(&cfg),
        Command::Translate { route } => {
            opts.route = *route;
            runner::cmd_translate(&cfg, &opts)
        }
        Command::Convolve => runner::cmd_convolve(&cfg),
        Command::Summability => runner::cmd_summability(&cfg, &opts),
        Command::Maximal => runner::cmd_maximal(&cfg),
        Command::DefaultConfig => {
            return match cfg.to_toml() {
                Ok(t) => {
                    print!("{t}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(EXIT_FAIL)
                }
            };
        }
    };
    match outcome {
        Ok(res) => {
            for line in &res.summary {
                println!("{line}");
            }
            if let Err(e) = runner::write_artifacts(&dir, &res.artifacts) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_FAIL);
            }
            print!("{}", runner::describe(&dir, &res.artifacts));
            if res.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(e @ DunklError::Format(_)) => {
            eprintln!("config error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}
