//! Export beam patterns of a DFT codebook and a learned codebook as CSV and
//! draw a coarse text plot of each.
//!
//! ```text
//! cargo run --release --example beam_patterns -- [out_dir]
//! ```

use std::path::PathBuf;

use beamlearn::forward::write_pattern_csv;
use beamlearn::prelude::*;

fn sketch(pattern: &[(f64, f64)], peak: f64) {
    // one column per 4 degrees
    let row: String = pattern
        .chunks(4)
        .map(|c| c.iter().map(|p| p.1).fold(0.0, f64::max))
        .map(|g| match g / peak {
            r if r > 0.75 => '#',
            r if r > 0.5 => '+',
            r if r > 0.25 => '.',
            _ => ' ',
        })
        .collect();
    println!("  |{row}|");
}

fn main() -> Result<()> {
    let out_dir: PathBuf = std::env::args().nth(1).map_or_else(std::env::temp_dir, PathBuf::from);
    let cfg = ScenarioConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/nlos_clusters.toml"))?;
    let array = cfg.array;
    let dataset = ChannelDataset::from_channels(generate_population(&cfg)?)?;
    let (train_set, test_set) = dataset.split(0.7, 1)?;
    let train_cfg = TrainConfig {
        num_epochs: 150,
        seed: 1,
        ..TrainConfig::default()
    };
    let learned = train(&train_set, Some(&test_set), 16, &train_cfg)?.codebook;
    let grid = angle_grid(1.0)?;

    for (name, book) in [("dft", dft_codebook(&array, 16)?), ("learned", learned)] {
        println!("{name} codebook, -90..90 degrees");
        let w = book.to_complex();
        for n in 0..w.num_beams() {
            let pattern = beam_pattern(w.beam(n), &array, &grid)?;
            let peak = pattern.iter().map(|p| p.1).fold(0.0, f64::max);
            sketch(&pattern, peak);
            let path = out_dir.join(format!("{name}_beam{n:02}.csv"));
            let mut file = std::fs::File::create(&path)?;
            write_pattern_csv(&mut file, &pattern)?;
        }
    }
    println!("patterns written to {}", out_dir.display());
    Ok(())
}
