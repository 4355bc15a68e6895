use std::path::PathBuf;
use std::process::ExitCode;

use adapara_core::engine::{ResourcePaths, Resources};
use adapara_sim::replay::replay_check;
use adapara_sim::simulate::moving_average;
use adapara_sim::{eval_ndcg_file, simulate, SimConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adapara", about = "Simulation and evaluation tools for the adaptive paraphrasing service")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run oracle users against the in-process service and write the NDCG curve.
    Simulate {
        #[arg(long, default_value_t = 9)]
        iterations: u32,
        #[arg(long, default_value_t = 50)]
        sentences: usize,
        #[arg(long, default_value_t = 3)]
        oracles: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        noise_temp: f64,
        #[arg(long, default_value_t = 1_000_000)]
        batch_size: u64,
        #[arg(long, default_value = "data/fixtures")]
        resources_dir: PathBuf,
        #[arg(long)]
        sentences_path: Option<PathBuf>,
        /// Comma-separated oracle preference weights, one per ranking feature.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        true_weights: Option<Vec<f64>>,
        #[arg(long, default_value = "out/sim")]
        out_dir: PathBuf,
    },
    /// Score a ranking dump against a gold file.
    EvalNdcg {
        #[arg(long)]
        dump: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Inspect the loaded resources.
    Resources {
        #[command(subcommand)]
        command: ResourcesCommand,
    },
    /// Replay a run's event log and compare iterations and model checksums with its manifest.
    ReplayCheck {
        #[arg(long, default_value = "out/sim")]
        run_dir: PathBuf,
        #[arg(long)]
        resources_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ResourcesCommand {
    Stats {
        #[arg(long, default_value = "data/fixtures")]
        resources_dir: PathBuf,
    },
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Simulate { iterations, sentences, oracles, seed, noise_temp, batch_size, resources_dir, sentences_path, true_weights, out_dir } => {
            let mut config = SimConfig {
                iterations,
                sentences,
                oracles,
                seed,
                noise_temp,
                batch_size,
                resources_dir,
                sentences_path,
                ..SimConfig::default()
            };
            if let Some(w) = true_weights {
                config.true_weights = w
                    .try_into()
                    .map_err(|w: Vec<f64>| format!("--true-weights needs {} values, got {}", config.true_weights.len(), w.len()))?;
            }
            let run = simulate(&config, Some(&out_dir))?;
            print!("{}", run.curve_csv());
            let values: Vec<f64> = run.curve.iter().map(|c| c.1).collect();
            let smooth = moving_average(&values);
            let monotone = smooth.windows(2).all(|w| w[1] >= w[0]);
            let checks = &run.manifest.checks;
            eprintln!(
                "hygiene violations: {}, trained ranker in iteration 1: {}, smoothed curve non-decreasing: {monotone}",
                checks.hygiene_violations.len(),
                checks.iteration_one_trained_ranker.len()
            );
            eprintln!("wrote {}", out_dir.display());
            Ok(checks.passed())
        }
        Command::EvalNdcg { dump, gold, k } => {
            let report = eval_ndcg_file(&dump, &gold, k)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(true)
        }
        Command::Resources { command: ResourcesCommand::Stats { resources_dir } } => {
            let res = Resources::load(&ResourcePaths::fixture_dir(resources_dir))?;
            let stats = serde_json::json!({
                "providers": res.providers.stats,
                "frequency_entries": res.freq.len(),
                "mwe_entries": res.mwe.len(),
                "seed_targets": res.seed_targets.len(),
                "lm_vocabulary": res.lm.vocab_size(),
                "lm_tokens": res.lm.total_unigrams(),
            });
            println!("{}", serde_json::to_string_pretty(&stats)?);
            Ok(true)
        }
        Command::ReplayCheck { run_dir, resources_dir } => {
            let report = replay_check(&run_dir, resources_dir.as_deref())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
