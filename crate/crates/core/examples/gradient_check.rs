//! Compare the analytic phase gradient with central finite differences on a
//! small random problem, and show that only each sample's best beam moves.
//!
//! ```text
//! cargo run --release --example gradient_check
//! ```

use std::f64::consts::TAU;

use beamlearn::prelude::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn loss(phases: &PhaseCodebook, batch: &[Sample]) -> Result<f64> {
    Ok(loss_gradient(phases, batch)?.loss)
}

fn main() -> Result<()> {
    let (m, n) = (6, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let phases = PhaseCodebook::new(m, n, (0..m * n).map(|_| rng.random_range(0.0..TAU)).collect())?;
    let channels = (0..4)
        .map(|_| ChannelVector::new((0..m).map(|_| Complex64::new(rng.random(), rng.random())).collect()))
        .collect::<Result<Vec<_>>>()?;
    let batch = compute_labels(channels);

    let grad = loss_gradient(&phases, &batch)?;
    println!("loss {:.6}, best beams per sample {:?}", grad.loss, grad.best_indices);

    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for k in 0..n {
        print!("beam {k}:");
        for i in 0..m {
            let p = k * m + i;
            let mut plus = phases.clone();
            plus.as_mut_slice()[p] += h;
            let mut minus = phases.clone();
            minus.as_mut_slice()[p] -= h;
            let fd = (loss(&plus, &batch)? - loss(&minus, &batch)?) / (2.0 * h);
            worst = worst.max((fd - grad.gradient[p]).abs());
            print!(" {:+.5}", grad.gradient[p]);
        }
        println!();
    }
    println!("largest |analytic - finite difference| = {worst:.2e}");
    Ok(())
}
