//! Command-line front end: dataset generation, training, evaluation,
//! comparison and beam-pattern export.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use beamlearn::codebook::{quantize, PhaseCodebook, QuantizerSpec};
use beamlearn::dataset::DEFAULT_TRAIN_FRACTION;
use beamlearn::evaluation::{compare_split, egc_metrics, evaluate_codebook, EvalConfig};
use beamlearn::forward::write_pattern_csv;
use beamlearn::prelude::*;
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "beamlearn", version, about = "Learn phase-shifter beamforming codebooks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a channel dataset from a scenario file.
    Generate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train a codebook on the training split of a dataset.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        beams: usize,
        /// Training config (TOML).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_codebook: PathBuf,
        /// Per-epoch report CSV.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TRAIN_FRACTION)]
        train_fraction: f64,
        #[arg(long, default_value_t = 0)]
        split_seed: u64,
    },
    /// Evaluate a codebook on a dataset.
    Eval {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        codebook: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "5")]
        snr_db: Vec<f64>,
        /// Quantize the codebook to this many bits before evaluating.
        #[arg(long)]
        bits: Option<u8>,
    },
    /// Train and compare learned and DFT codebooks across sizes.
    Compare {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        beams: Vec<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,5")]
        snr_db: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        bits: Vec<u8>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_TRAIN_FRACTION)]
        train_fraction: f64,
        #[arg(long, default_value_t = 0)]
        split_seed: u64,
        /// Comparison CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the gain pattern of one beam as CSV.
    Pattern {
        #[arg(long)]
        codebook: PathBuf,
        #[arg(long)]
        beam: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        step_deg: f64,
        #[arg(long, default_value_t = 0.5)]
        antenna_spacing: f64,
    },
}

fn load_train_config(path: Option<&PathBuf>, seed: Option<u64>) -> Result<TrainConfig> {
    let mut cfg = match path {
        Some(p) => TrainConfig::load(p)?,
        None => TrainConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

/// Train/holdout pair. A single-user dataset is used for both.
fn train_test(dataset: &ChannelDataset, fraction: f64, seed: u64) -> Result<(ChannelDataset, ChannelDataset)> {
    if dataset.len() < 2 {
        let ds = if dataset.is_normalized() {
            dataset.clone()
        } else {
            dataset.clone().normalize()?
        };
        return Ok((ds.clone(), ds));
    }
    dataset.split(fraction, seed)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { scenario, out, seed } => {
            let mut cfg = ScenarioConfig::load(&scenario)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let dataset = ChannelDataset::from_channels(generate_population(&cfg)?)?;
            dataset.save(&out)?;
            println!("wrote {} users, M = {}", dataset.len(), dataset.num_antennas());
        }
        Command::Train {
            data,
            beams,
            config,
            out_codebook,
            report,
            seed,
            epochs,
            learning_rate,
            train_fraction,
            split_seed,
        } => {
            if beams == 0 {
                return Err(Error::InvalidConfig("--beams must be >= 1".into()));
            }
            let mut cfg = load_train_config(config.as_ref(), seed)?;
            if let Some(e) = epochs {
                cfg.num_epochs = e;
            }
            if let Some(lr) = learning_rate {
                cfg.learning_rate = lr;
            }
            let dataset = ChannelDataset::load(&data)?;
            let (train_set, test_set) = train_test(&dataset, train_fraction, split_seed)?;
            let result = train(&train_set, Some(&test_set), beams, &cfg)?;
            result.codebook.wrapped().save(&out_codebook)?;
            if let Some(path) = report {
                result.save_csv(path)?;
            }
            let metrics = evaluate_codebook(&result.codebook, &test_set, &[])?;
            let bound = egc_metrics(&test_set, &[])?.mean_gain;
            println!(
                "holdout mean gain {:.6} ({:.2}% of EGC bound {:.6}) after {} epochs",
                metrics.mean_gain,
                100.0 * metrics.mean_gain / bound,
                bound,
                result.epochs_run
            );
        }
        Command::Eval {
            data,
            codebook,
            snr_db,
            bits,
        } => {
            let dataset = ChannelDataset::load(&data)?;
            let mut cb = PhaseCodebook::load(&codebook)?;
            if let Some(b) = bits {
                cb = quantize(&cb, QuantizerSpec::new(b)?);
            }
            let metrics = evaluate_codebook(&cb, &dataset, &snr_db)?;
            let egc = egc_metrics(&dataset, &snr_db)?;
            println!(
                "mean gain {:.6} ({:.2}% of EGC bound {:.6})",
                metrics.mean_gain,
                100.0 * metrics.mean_gain / egc.mean_gain,
                egc.mean_gain
            );
            for ((s, r), e) in snr_db.iter().zip(&metrics.rates).zip(&egc.rates) {
                println!("rate @ {s} dB: {r:.6} bit/s/Hz (EGC {e:.6}, {:.2}%)", 100.0 * r / e);
            }
        }
        Command::Compare {
            data,
            beams,
            snr_db,
            bits,
            config,
            seed,
            train_fraction,
            split_seed,
            out,
        } => {
            let train_cfg = load_train_config(config.as_ref(), seed)?;
            let eval_cfg = EvalConfig {
                snr_db,
                codebook_sizes: beams,
                quantizer_bits: bits,
                train_fraction,
                split_seed,
            };
            eval_cfg.validate()?;
            let dataset = ChannelDataset::load(&data)?;
            let (train_set, test_set) = train_test(&dataset, train_fraction, split_seed)?;
            let report = compare_split(&train_set, &test_set, &eval_cfg, &train_cfg)?;
            print!("{report}");
            if let Some(path) = out {
                let mut buf = Vec::new();
                report.write_csv(&mut buf)?;
                std::fs::write(path, buf)?;
            }
        }
        Command::Pattern {
            codebook,
            beam,
            out,
            step_deg,
            antenna_spacing,
        } => {
            let cb = PhaseCodebook::load(&codebook)?;
            if beam >= cb.num_beams() {
                return Err(Error::BeamOutOfRange {
                    index: beam,
                    len: cb.num_beams(),
                });
            }
            let array = ArrayConfig::new(cb.num_antennas(), antenna_spacing)?;
            let w = cb.to_complex();
            let pattern = beam_pattern(w.beam(beam), &array, &angle_grid(step_deg)?)?;
            let mut buf = Vec::new();
            write_pattern_csv(&mut buf, &pattern)?;
            std::fs::write(&out, buf)?;
            let (phi, peak) = pattern.iter().copied().fold((0.0, f64::MIN), |a, p| if p.1 > a.1 { p } else { a });
            println!("beam {beam}: peak gain {peak:.6} at {:.2} deg", phi.to_degrees());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
