//! Train a 16-beam codebook for a 60-degree LOS sector with both optimizers
//! and watch the holdout gain approach the equal-gain-combining bound.
//!
//! ```text
//! cargo run --release --example train_codebook
//! ```

use beamlearn::evaluation::egc_metrics;
use beamlearn::prelude::*;

fn main() -> Result<()> {
    let cfg = ScenarioConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/los_sector.toml"))?;
    let dataset = ChannelDataset::from_channels(generate_population(&cfg)?)?;
    let (train_set, test_set) = dataset.split(0.7, 1)?;
    // normalized units: the holdout gains in the report are comparable to this
    let bound = egc_upper_bound(test_set.channels())?;

    for (optimizer, learning_rate) in [(OptimizerKind::Adam, 0.01), (OptimizerKind::GradientDescent, 0.3)] {
        let train_cfg = TrainConfig {
            optimizer,
            learning_rate,
            num_epochs: 100,
            seed: 1,
            ..TrainConfig::default()
        };
        let report = train(&train_set, Some(&test_set), 16, &train_cfg)?;
        println!("{optimizer:?}, lr {learning_rate}");
        for e in (0..report.epochs_run).step_by(20).chain([report.epochs_run - 1]) {
            println!(
                "  epoch {:>3}  loss {:.5}  holdout gain {:.1}% of bound",
                e + 1,
                report.epoch_loss[e],
                100.0 * report.holdout_gain[e] / bound
            );
        }
    }

    let egc = egc_metrics(&test_set, &[5.0])?;
    println!("EGC rate @ 5 dB: {:.3} bit/s/Hz", egc.rates[0]);
    Ok(())
}
