//! `cf4cf`: command-line front end for CF algorithm selection experiments.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::CommonArgs;

#[derive(Debug, Parser)]
#[command(
    name = "cf4cf",
    version,
    about = "Select collaborative filtering algorithms with collaborative filtering"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate input tables and write normalized copies (optionally subsampled rating files).
    Ingest {
        /// Fraction of each rating file to keep in `subsamples/` (requires --ratings-dir).
        #[arg(long)]
        subsample_fraction: Option<f64>,
    },
    /// Extract metafeatures from every rating file in --ratings-dir.
    Metafeatures {
        /// Emit the full systematic set instead of the selected twelve.
        #[arg(long)]
        full: bool,
    },
    /// Build the meta rating matrix and write the CF model.
    Train,
    /// Predict algorithm rankings from landmarks with a trained model.
    Predict {
        #[arg(long)]
        model: std::path::PathBuf,
        /// Datasets to predict (default: every dataset in --landmarks).
        #[arg(long, value_delimiter = ',')]
        dataset: Vec<String>,
    },
    /// Leave-one-out evaluation of one or more methods.
    Evaluate,
    /// Leave-one-out evaluation across values of n_ratings or n_sl.
    Sweep {
        #[arg(long)]
        axis: Option<String>,
        #[arg(long, value_delimiter = ',')]
        values: Vec<usize>,
    },
    /// Generate a synthetic clustered meta-experiment.
    Synth {
        #[arg(long)]
        datasets: usize,
        #[arg(long)]
        algorithms: usize,
        #[arg(long, default_value_t = 2)]
        clusters: usize,
        #[arg(long, default_value_t = 0.05)]
        landmark_noise: f64,
        #[arg(long, default_value_t = 0.02)]
        score_noise: f64,
        #[arg(long, default_value_t = 0.3)]
        feature_noise: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result =
        config::ExperimentConfig::from_args(&cli.common).and_then(|cfg| match cli.command {
            Command::Ingest { subsample_fraction } => commands::ingest(&cfg, subsample_fraction),
            Command::Metafeatures { full } => commands::metafeatures(&cfg, full),
            Command::Train => commands::train(&cfg),
            Command::Predict { model, dataset } => commands::predict(&cfg, &model, &dataset),
            Command::Evaluate => commands::evaluate(&cfg),
            Command::Sweep { axis, values } => commands::sweep(&cfg, axis.as_deref(), &values),
            Command::Synth {
                datasets,
                algorithms,
                clusters,
                landmark_noise,
                score_noise,
                feature_noise,
            } => commands::synth(
                &cfg,
                cf4cf_core::SyntheticSpec {
                    n_datasets: datasets,
                    n_algorithms: algorithms,
                    n_clusters: clusters,
                    landmark_noise,
                    score_noise,
                    feature_noise,
                    seed: 0,
                },
            ),
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body =
                serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
