//! Non-line-of-sight users whose three paths arrive from three fixed
//! scattering clusters. A learned 16-beam codebook forms multi-lobe beams and
//! is compared with a 64-beam DFT codebook.
//!
//! ```text
//! cargo run --release --example nlos_clusters -- [seed] [cluster spread, degrees]
//! ```

use beamlearn::codebook::dft_codebook;
use beamlearn::dataset::DEFAULT_TRAIN_FRACTION;
use beamlearn::evaluation::evaluate_codebook;
use beamlearn::forward::best_gain;
use beamlearn::prelude::*;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let spread_deg: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.25);
    let array = ArrayConfig::half_wavelength(64)?;
    let scenario = ScenarioConfig {
        array,
        num_paths: 3,
        aoa: AoaDistribution::Clusters {
            centers_deg: vec![-42.0, 7.0, 38.0],
            spread_deg,
        },
        gain: GainDistribution::Gaussian { variances: vec![1.0] },
        num_users: 2000,
        seed,
    };
    let dataset = ChannelDataset::from_channels(generate_population(&scenario)?)?;
    let (train_set, test_set) = dataset.split(DEFAULT_TRAIN_FRACTION, seed)?;

    let cfg = TrainConfig {
        num_epochs: 150,
        seed,
        ..TrainConfig::default()
    };
    let report = train(&train_set, Some(&test_set), 16, &cfg)?;
    let snr = [0.0, 5.0];
    let learned = evaluate_codebook(&report.codebook, &test_set, &snr)?;
    let dft64 = evaluate_codebook(&dft_codebook(&array, 64)?, &test_set, &snr)?;
    let bound = egc_upper_bound(test_set.channels())? * test_set.normalization_factor();

    println!("EGC bound           mean gain {:>9.3}", bound);
    println!("learned, 16 beams   mean gain {:>9.3}  rates {:?}", learned.mean_gain, learned.rates);
    println!("DFT, 64 beams       mean gain {:>9.3}  rates {:?}", dft64.mean_gain, dft64.rates);

    let w = report.codebook.to_complex();
    let mut served = vec![0usize; w.num_beams()];
    for h in test_set.channels() {
        served[best_gain(&w, h)?.0] += 1;
    }
    let grid = angle_grid(0.25)?;
    for n in 0..w.num_beams() {
        let pattern = beam_pattern(w.beam(n), &array, &grid)?;
        let lobes: Vec<String> = pattern_lobes(&pattern, 0.5)
            .into_iter()
            .map(|i| format!("{:.1}°", pattern[i].0.to_degrees()))
            .collect();
        println!("beam {n:>2} ({:>3} users): lobes above half peak at {}", served[n], lobes.join(", "));
    }
    Ok(())
}
