//! Mini-batch training of phase codebooks.
//!
//! The loss for a batch is `L = (1/B) Σ_b (g_b − p_b)²`, with `g_b` the
//! best-beam power and `p_b` the EGC label. Max-pooling routes each sample's
//! error only to its best beam (lowest index on ties), and `|z|²` is
//! differentiated as a real function of the real phases. With
//! `z_n = (1/√M) Σ_m e^{−jθ_mn} h_m`:
//!
//! ```text
//! ∂(g − p)²/∂θ_mn* = 2(g − p) · (2/√M) · Im( conj(z_n*) · e^{−jθ_mn*} · h_m )
//! ```
//!
//! and zero for every other column.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::array_channel::ArrayConfig;
use crate::codebook::{init_codebook, quantize, to_complex, InitStrategy, PhaseCodebook, QuantizerSpec};
use crate::dataset::{ChannelDataset, Sample};
use crate::error::{Error, Result};
use crate::fmt_f64;
use crate::forward::{argmax, inner, population_gain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    /// `θ ← θ − η ∂L/∂θ`.
    #[serde(alias = "sgd")]
    GradientDescent,
    /// Bias-corrected first/second moment estimates (Adam).
    #[serde(alias = "adaptive-moment")]
    Adam,
}

/// Training hyperparameters. Loadable from TOML; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub num_epochs: usize,
    pub optimizer: OptimizerKind,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub shuffle: bool,
    pub init: InitStrategy,
    /// Spacing used when building a DFT warm start.
    pub antenna_spacing: f64,
    /// Train through a `b`-bit quantizer: the forward pass and gradient use
    /// quantized phases while updates accumulate on the continuous phases.
    pub quantize_every_step: Option<u8>,
    /// Stop once the epoch loss changes by less than `1e-6` (relative) over
    /// 10 epochs.
    pub plateau_stop: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 32,
            learning_rate: 0.01,
            num_epochs: 100,
            optimizer: OptimizerKind::Adam,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
            shuffle: true,
            init: InitStrategy::UniformRandom,
            antenna_spacing: 0.5,
            quantize_every_step: None,
            plateau_stop: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.batch_size == 0 {
            return invalid("batch_size must be >= 1");
        }
        // zero is accepted: a frozen run is a useful baseline
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return invalid("learning_rate must be finite and >= 0");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return invalid("beta1 and beta2 must lie in [0, 1)");
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return invalid("epsilon must be > 0");
        }
        if !(self.antenna_spacing.is_finite() && self.antenna_spacing > 0.0) {
            return invalid("antenna_spacing must be > 0");
        }
        if let Some(b) = self.quantize_every_step {
            QuantizerSpec::new(b)?;
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

/// `(1/B) Σ (g_b − p_b)²`.
pub fn mse_loss(gains: &[f64], labels: &[f64]) -> Result<f64> {
    if gains.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: gains.len(),
            found: labels.len(),
        });
    }
    if gains.is_empty() {
        return Err(Error::Empty("loss batch"));
    }
    let sum: f64 = gains.iter().zip(labels).map(|(g, p)| (g - p).powi(2)).sum();
    Ok(sum / gains.len() as f64)
}

/// Batch gradient together with the quantities computed on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchGradient {
    /// `∂L/∂Θ`, same layout as [`PhaseCodebook::as_slice`].
    pub gradient: Vec<f64>,
    pub loss: f64,
    pub best_indices: Vec<usize>,
    pub gains: Vec<f64>,
}

/// `∂L/∂Θ` for a batch under max-routing.
pub fn loss_gradient<'a, I>(phases: &PhaseCodebook, batch: I) -> Result<BatchGradient>
where
    I: IntoIterator<Item = &'a Sample>,
    I::IntoIter: ExactSizeIterator,
{
    let batch = batch.into_iter();
    if batch.len() == 0 {
        return Err(Error::Empty("gradient batch"));
    }
    let m_count = phases.num_antennas();
    let w = to_complex(phases);
    let b = batch.len() as f64;
    let sqrt_m = (m_count as f64).sqrt();
    let mut gradient = vec![0.0; phases.as_slice().len()];
    let mut best_indices = Vec::with_capacity(batch.len());
    let mut gains = Vec::with_capacity(batch.len());
    let mut powers = vec![0.0; phases.num_beams()];
    let mut combined = vec![Complex64::new(0.0, 0.0); phases.num_beams()];
    let mut loss = 0.0;

    for sample in batch {
        let h = sample.channel.as_slice();
        if h.len() != m_count {
            return Err(Error::DimensionMismatch {
                expected: m_count,
                found: h.len(),
            });
        }
        for (n, beam) in w.beams().enumerate() {
            combined[n] = inner(beam, h);
            powers[n] = combined[n].norm_sqr();
        }
        let (best, g) = argmax(&powers);
        let err = g - sample.label;
        loss += err * err;
        best_indices.push(best);
        gains.push(g);

        // conj(w_mn)·√M = e^{−jθ_mn}
        let coeff = 2.0 * err * 2.0 / sqrt_m / b;
        let z_conj = combined[best].conj();
        let column = &mut gradient[best * m_count..(best + 1) * m_count];
        for ((gm, wm), hm) in column.iter_mut().zip(w.beam(best)).zip(h) {
            *gm += coeff * (z_conj * wm.conj() * sqrt_m * hm).im;
        }
    }
    Ok(BatchGradient {
        gradient,
        loss: loss / b,
        best_indices,
        gains,
    })
}

/// Optimizer memory carried between steps.
#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerState {
    GradientDescent,
    Adam {
        first: Vec<f64>,
        second: Vec<f64>,
        steps: i32,
    },
}

impl OptimizerState {
    pub fn new(kind: OptimizerKind, num_params: usize) -> Self {
        match kind {
            OptimizerKind::GradientDescent => Self::GradientDescent,
            OptimizerKind::Adam => Self::Adam {
                first: vec![0.0; num_params],
                second: vec![0.0; num_params],
                steps: 0,
            },
        }
    }
}

/// One optimizer update. Returns the new phases and optimizer state.
pub fn step(
    phases: &PhaseCodebook,
    gradient: &[f64],
    state: OptimizerState,
    cfg: &TrainConfig,
) -> Result<(PhaseCodebook, OptimizerState)> {
    let mut next = phases.clone();
    let state = step_in_place(&mut next, gradient, state, cfg)?;
    Ok((next, state))
}

fn step_in_place(
    phases: &mut PhaseCodebook,
    gradient: &[f64],
    state: OptimizerState,
    cfg: &TrainConfig,
) -> Result<OptimizerState> {
    if gradient.len() != phases.as_slice().len() {
        return Err(Error::DimensionMismatch {
            expected: phases.as_slice().len(),
            found: gradient.len(),
        });
    }
    let lr = cfg.learning_rate;
    let theta = phases.as_mut_slice();
    match state {
        OptimizerState::GradientDescent => {
            for (t, g) in theta.iter_mut().zip(gradient) {
                *t -= lr * g;
            }
            Ok(OptimizerState::GradientDescent)
        }
        OptimizerState::Adam {
            mut first,
            mut second,
            steps,
        } => {
            if first.len() != gradient.len() || second.len() != gradient.len() {
                return Err(Error::DimensionMismatch {
                    expected: gradient.len(),
                    found: first.len(),
                });
            }
            let steps = steps + 1;
            let (b1, b2) = (cfg.beta1, cfg.beta2);
            let c1 = 1.0 - b1.powi(steps);
            let c2 = 1.0 - b2.powi(steps);
            for i in 0..gradient.len() {
                let g = gradient[i];
                first[i] = b1 * first[i] + (1.0 - b1) * g;
                second[i] = b2 * second[i] + (1.0 - b2) * g * g;
                let m_hat = first[i] / c1;
                let v_hat = second[i] / c2;
                theta[i] -= lr * m_hat / (v_hat.sqrt() + cfg.epsilon);
            }
            Ok(OptimizerState::Adam {
                first,
                second,
                steps,
            })
        }
    }
}

/// Per-epoch trajectory and the final codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean per-sample squared error over each epoch.
    pub epoch_loss: Vec<f64>,
    /// Mean best-beam gain on the holdout set after each epoch.
    pub holdout_gain: Vec<f64>,
    pub codebook: PhaseCodebook,
    pub epochs_run: usize,
    pub steps_run: usize,
}

impl TrainReport {
    /// CSV with header `epoch,loss,holdout_gain`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "epoch,loss,holdout_gain")?;
        for (e, (l, g)) in self.epoch_loss.iter().zip(&self.holdout_gain).enumerate() {
            writeln!(out, "{},{},{}", e + 1, fmt_f64(*l), fmt_f64(*g))?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }
}

/// Trains an `N`-beam codebook initialized per `cfg.init` from `cfg.seed`.
/// Holdout gains are measured on `holdout`, or on `train` when absent.
pub fn train(
    train_set: &ChannelDataset,
    holdout: Option<&ChannelDataset>,
    num_beams: usize,
    cfg: &TrainConfig,
) -> Result<TrainReport> {
    cfg.validate()?;
    let array = ArrayConfig::new(train_set.num_antennas(), cfg.antenna_spacing)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let init = init_codebook(&array, num_beams, cfg.init, &mut rng)?;
    run(train_set, holdout, init, cfg, &mut rng)
}

/// Trains starting from an explicit codebook. Batch order is drawn from
/// `cfg.seed`.
pub fn train_from(
    train_set: &ChannelDataset,
    holdout: Option<&ChannelDataset>,
    init: PhaseCodebook,
    cfg: &TrainConfig,
) -> Result<TrainReport> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    run(train_set, holdout, init, cfg, &mut rng)
}

fn run(
    train_set: &ChannelDataset,
    holdout: Option<&ChannelDataset>,
    mut phases: PhaseCodebook,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<TrainReport> {
    if train_set.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let eval_set = holdout.unwrap_or(train_set);
    for ds in [train_set, eval_set] {
        if ds.num_antennas() != phases.num_antennas() {
            return Err(Error::DimensionMismatch {
                expected: phases.num_antennas(),
                found: ds.num_antennas(),
            });
        }
    }
    let quantizer = cfg.quantize_every_step.map(QuantizerSpec::new).transpose()?;
    let mut state = OptimizerState::new(cfg.optimizer, phases.as_slice().len());
    let samples = train_set.samples();
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut epoch_loss = Vec::with_capacity(cfg.num_epochs);
    let mut holdout_gain = Vec::with_capacity(cfg.num_epochs);
    let mut steps_run = 0;

    let effective = |p: &PhaseCodebook| match quantizer {
        Some(q) => quantize(p, q),
        None => p.clone(),
    };

    for epoch in 0..cfg.num_epochs {
        if cfg.shuffle {
            order.shuffle(rng);
        }
        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch = chunk.iter().map(|&i| &samples[i]);
            let grad = loss_gradient(&effective(&phases), batch)?;
            loss_sum += grad.loss * chunk.len() as f64;
            state = step_in_place(&mut phases, &grad.gradient, state, cfg)?;
            steps_run += 1;
        }
        epoch_loss.push(loss_sum / samples.len() as f64);
        holdout_gain.push(population_gain(&to_complex(&effective(&phases)), eval_set.channels())?);

        if cfg.plateau_stop && epoch >= 10 {
            let now = epoch_loss[epoch];
            let then = epoch_loss[epoch - 10];
            if (now - then).abs() <= 1e-6 * then.abs().max(f64::MIN_POSITIVE) {
                break;
            }
        }
    }

    let epochs_run = epoch_loss.len();
    Ok(TrainReport {
        epoch_loss,
        holdout_gain,
        codebook: effective(&phases),
        epochs_run,
        steps_run,
    })
}
