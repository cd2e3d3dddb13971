use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use risbeam::experiment::{compare_summary, run_experiment, ExperimentConfig, Method};

#[derive(Parser)]
#[command(version, about = "Run RIS sum-power minimization experiments")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug, -vvv trace).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration and write results.csv and summary.txt.
    Run {
        config: PathBuf,
        /// Output directory; overrides the config's `output` key.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Comma-separated subset of DM, SDR, MRT, ZF.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
    },
    /// Print per-method medians and pairwise savings of a results.csv.
    Summary { csv: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match cli.command {
        Command::Run {
            config,
            output,
            seed,
            trials,
            methods,
        } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    return ExitCode::from(2);
                }
            };
            let mut cfg = match ExperimentConfig::parse(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    return ExitCode::from(2);
                }
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(m) = methods {
                cfg.methods = m;
            }
            let out = output.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("results"));
            match run_experiment(&cfg, &out) {
                Ok(outcome) => {
                    print!("{}", std::fs::read_to_string(&outcome.summary_path).unwrap_or_default());
                    println!("wrote {} rows to {}", outcome.rows.len(), outcome.csv_path.display());
                    if outcome.numerical_failures > 0 {
                        eprintln!("{} rows ended in numerical failure", outcome.numerical_failures);
                    }
                    ExitCode::from(outcome.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Summary { csv } => match compare_summary(&csv) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
