//! Draw a user population from a scenario file and save it as a dataset.
//!
//! ```text
//! cargo run --release --example generate_dataset -- [scenario.toml] [out.csv]
//! ```

use beamlearn::prelude::*;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let scenario = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/los_sector.toml").into());
    let out = args.next().unwrap_or_else(|| std::env::temp_dir().join("los_sector.csv").display().to_string());

    let cfg = ScenarioConfig::load(&scenario)?;
    let dataset = ChannelDataset::from_channels(generate_population(&cfg)?)?;
    dataset.save(&out)?;

    let labels: Vec<f64> = dataset.labels().collect();
    let mean = labels.iter().sum::<f64>() / labels.len() as f64;
    println!("{} users, M = {}, {} path(s) each", dataset.len(), dataset.num_antennas(), cfg.num_paths);
    println!("mean EGC label {mean:.3}, max element power {:.3}", dataset.max_element_power());

    // normalization takes its scale from the training split only
    let (train_set, test_set) = dataset.split(0.7, cfg.seed)?;
    println!(
        "split {} / {} users, delta = {:.4}",
        train_set.len(),
        test_set.len(),
        train_set.normalization_factor()
    );
    println!("wrote {out}");
    Ok(())
}
