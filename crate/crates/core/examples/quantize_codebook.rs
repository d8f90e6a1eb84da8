//! Phase-shifter resolution: snap a trained codebook to b-bit phases, and
//! compare with training that keeps the codebook quantized throughout.
//!
//! ```text
//! cargo run --release --example quantize_codebook
//! ```

use beamlearn::prelude::*;

fn main() -> Result<()> {
    let cfg = ScenarioConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/los_sector.toml"))?;
    let dataset = ChannelDataset::from_channels(generate_population(&cfg)?)?;
    let (train_set, test_set) = dataset.split(0.7, 1)?;
    let train_cfg = TrainConfig {
        seed: 1,
        ..TrainConfig::default()
    };
    let learned = train(&train_set, Some(&test_set), 16, &train_cfg)?.codebook;
    let full = evaluate_codebook(&learned, &test_set, &[])?.mean_gain;
    println!("unquantized mean gain {full:.3}");

    for bits in [1u8, 2, 3, 4, 6, 16] {
        let q = quantize(&learned, QuantizerSpec::new(bits)?);
        let after = evaluate_codebook(&q, &test_set, &[])?.mean_gain;

        let aware = TrainConfig {
            quantize_every_step: Some(bits),
            ..train_cfg.clone()
        };
        let trained_q = train(&train_set, Some(&test_set), 16, &aware)?.codebook;
        let during = evaluate_codebook(&trained_q, &test_set, &[])?.mean_gain;
        println!(
            "{bits:>2} bits: quantized after training {:>6.2}%, quantized during training {:>6.2}%",
            100.0 * after / full,
            100.0 * during / full
        );
    }
    Ok(())
}
