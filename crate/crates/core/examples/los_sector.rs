//! Line-of-sight users confined to a 60° sector: a learned 16-beam codebook
//! against the 16-beam DFT codebook and the EGC bound.
//!
//! ```text
//! cargo run --release --example los_sector -- [seed]
//! ```

use beamlearn::prelude::*;

fn main() -> Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let scenario = ScenarioConfig {
        array: ArrayConfig::half_wavelength(32)?,
        num_paths: 1,
        aoa: AoaDistribution::Sector { lo_deg: -30.0, hi_deg: 30.0 },
        gain: GainDistribution::Gaussian { variances: vec![1.0] },
        num_users: 2000,
        seed,
    };
    let dataset = ChannelDataset::from_channels(generate_population(&scenario)?)?;
    let eval = EvalConfig {
        snr_db: vec![5.0],
        codebook_sizes: vec![16],
        quantizer_bits: vec![3],
        split_seed: seed,
        ..EvalConfig::default()
    };
    let train_cfg = TrainConfig {
        num_epochs: 100,
        batch_size: 32,
        seed,
        ..TrainConfig::default()
    };
    let report = compare(&dataset, &eval, &train_cfg)?;
    print!("{report}");
    Ok(())
}
