//! Codebook comparison metrics: mean best-beam gain, achievable rate, and the
//! EGC upper bound.
//!
//! Gains and rates in reports are in raw channel units: gains measured on a
//! normalized dataset are multiplied by its `Δ` before use. The rate of a
//! user is `log2(1 + snr · g)`; reported rates average this over users.

use std::fmt;
use std::io::Write;

use crate::array_channel::{ArrayConfig, ChannelVector};
use crate::codebook::{dft_codebook, quantize, to_complex, PhaseCodebook, QuantizerSpec};
use crate::dataset::{egc_label, ChannelDataset, DEFAULT_TRAIN_FRACTION};
use crate::error::{Error, Result};
use crate::fmt_f64;
use crate::forward::best_gains;
use crate::trainer::{train, TrainConfig};

/// Mean of `‖h_u‖₁² / M` over the population.
pub fn egc_upper_bound<'a, I>(channels: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a ChannelVector>,
{
    let labels: Vec<f64> = channels.into_iter().map(egc_label).collect();
    if labels.is_empty() {
        return Err(Error::Empty("channel list"));
    }
    Ok(labels.iter().sum::<f64>() / labels.len() as f64)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Mean over users of `log2(1 + snr · scale · g_u)`.
pub fn mean_rate(gains: &[f64], snr_db: f64, gain_scale: f64) -> Result<f64> {
    if gains.is_empty() {
        return Err(Error::Empty("gain list"));
    }
    let snr = db_to_linear(snr_db);
    let total: f64 = gains.iter().map(|g| (1.0 + snr * gain_scale * g).log2()).sum();
    Ok(total / gains.len() as f64)
}

/// Achievable rate of a codebook on a dataset at one receive SNR.
pub fn achievable_rate(phases: &PhaseCodebook, dataset: &ChannelDataset, snr_db: f64) -> Result<f64> {
    let gains = best_gains(&to_complex(phases), dataset.channels())?;
    mean_rate(&gains, snr_db, dataset.normalization_factor())
}

/// Gain and per-SNR rate of one codebook on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct CodebookMetrics {
    /// Mean best-beam gain, raw units.
    pub mean_gain: f64,
    /// One rate per requested SNR, same order.
    pub rates: Vec<f64>,
}

pub fn evaluate_codebook(phases: &PhaseCodebook, dataset: &ChannelDataset, snr_db: &[f64]) -> Result<CodebookMetrics> {
    let gains = best_gains(&to_complex(phases), dataset.channels())?;
    metrics_from_gains(&gains, dataset.normalization_factor(), snr_db)
}

fn metrics_from_gains(gains: &[f64], scale: f64, snr_db: &[f64]) -> Result<CodebookMetrics> {
    if gains.is_empty() {
        return Err(Error::Empty("gain list"));
    }
    let mean_gain = scale * gains.iter().sum::<f64>() / gains.len() as f64;
    let rates = snr_db
        .iter()
        .map(|&s| mean_rate(gains, s, scale))
        .collect::<Result<_>>()?;
    Ok(CodebookMetrics { mean_gain, rates })
}

/// EGC benchmark metrics: every user served by its own EGC beam.
pub fn egc_metrics(dataset: &ChannelDataset, snr_db: &[f64]) -> Result<CodebookMetrics> {
    let gains: Vec<f64> = dataset.labels().collect();
    metrics_from_gains(&gains, dataset.normalization_factor(), snr_db)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub snr_db: Vec<f64>,
    pub codebook_sizes: Vec<usize>,
    pub quantizer_bits: Vec<u8>,
    pub train_fraction: f64,
    pub split_seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            snr_db: vec![0.0, 5.0],
            codebook_sizes: vec![16, 64],
            quantizer_bits: Vec::new(),
            train_fraction: DEFAULT_TRAIN_FRACTION,
            split_seed: 0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::InvalidConfig("snr list is empty".into()));
        }
        if self.codebook_sizes.is_empty() || self.codebook_sizes.contains(&0) {
            return Err(Error::InvalidConfig("codebook sizes must be nonempty and >= 1".into()));
        }
        for &b in &self.quantizer_bits {
            QuantizerSpec::new(b)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodebookKind {
    Learned,
    Dft,
    Egc,
}

impl fmt::Display for CodebookKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Learned => "learned",
            Self::Dft => "dft",
            Self::Egc => "egc",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub kind: CodebookKind,
    /// `None` for the EGC bound, whose size equals the user count.
    pub beams: Option<usize>,
    pub bits: Option<u8>,
    pub metrics: CodebookMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub snr_db: Vec<f64>,
    pub rows: Vec<ComparisonRow>,
    /// Learned codebooks, one per requested size, unquantized.
    pub learned: Vec<PhaseCodebook>,
}

impl ComparisonReport {
    pub fn egc(&self) -> &ComparisonRow {
        self.rows
            .iter()
            .find(|r| r.kind == CodebookKind::Egc)
            .expect("report always carries an EGC row")
    }

    pub fn find(&self, kind: CodebookKind, beams: usize, bits: Option<u8>) -> Option<&ComparisonRow> {
        self.rows
            .iter()
            .find(|r| r.kind == kind && r.beams == Some(beams) && r.bits == bits)
    }

    /// Gain of `row` as a fraction of the EGC bound.
    pub fn gain_ratio(&self, row: &ComparisonRow) -> f64 {
        row.metrics.mean_gain / self.egc().metrics.mean_gain
    }

    /// Rates of `row` as fractions of the EGC rates.
    pub fn rate_ratios(&self, row: &ComparisonRow) -> Vec<f64> {
        row.metrics
            .rates
            .iter()
            .zip(&self.egc().metrics.rates)
            .map(|(r, e)| r / e)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = vec!["codebook".to_string(), "beams".into(), "bits".into(), "mean_gain".into(), "gain_ratio".into()];
        for s in &self.snr_db {
            header.push(format!("rate_{}db", s));
            header.push(format!("rate_ratio_{}db", s));
        }
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let mut fields = vec![
                row.kind.to_string(),
                row.beams.map_or_else(String::new, |n| n.to_string()),
                row.bits.map_or_else(String::new, |b| b.to_string()),
                fmt_f64(row.metrics.mean_gain),
                fmt_f64(self.gain_ratio(row)),
            ];
            for (r, ratio) in row.metrics.rates.iter().zip(self.rate_ratios(row)) {
                fields.push(fmt_f64(*r));
                fields.push(fmt_f64(ratio));
            }
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<8} {:>6} {:>5} {:>12} {:>7}", "codebook", "beams", "bits", "mean_gain", "%egc")?;
        for s in &self.snr_db {
            write!(f, " {:>13}", format!("rate@{s}dB"))?;
        }
        writeln!(f)?;
        for row in &self.rows {
            write!(
                f,
                "{:<8} {:>6} {:>5} {:>12.4} {:>6.1}%",
                row.kind.to_string(),
                row.beams.map_or_else(|| "-".to_string(), |n| n.to_string()),
                row.bits.map_or_else(|| "-".to_string(), |b| b.to_string()),
                row.metrics.mean_gain,
                100.0 * self.gain_ratio(row),
            )?;
            for (r, ratio) in row.metrics.rates.iter().zip(self.rate_ratios(row)) {
                write!(f, " {:>6.3} ({:>3.0}%)", r, 100.0 * ratio)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Splits `dataset`, then runs [`compare_split`].
pub fn compare(dataset: &ChannelDataset, eval_cfg: &EvalConfig, train_cfg: &TrainConfig) -> Result<ComparisonReport> {
    eval_cfg.validate()?;
    let (train_set, test_set) = dataset.split(eval_cfg.train_fraction, eval_cfg.split_seed)?;
    compare_split(&train_set, &test_set, eval_cfg, train_cfg)
}

/// For every codebook size: trains a learned codebook on `train_set`, builds
/// the DFT codebook of the same size, and evaluates both (plus quantized
/// learned variants) on `test_set`. A final row holds the EGC bound.
pub fn compare_split(
    train_set: &ChannelDataset,
    test_set: &ChannelDataset,
    eval_cfg: &EvalConfig,
    train_cfg: &TrainConfig,
) -> Result<ComparisonReport> {
    eval_cfg.validate()?;
    let array = ArrayConfig::new(train_set.num_antennas(), train_cfg.antenna_spacing)?;
    let snr = &eval_cfg.snr_db;
    let mut rows = Vec::new();
    let mut learned = Vec::new();
    for &n in &eval_cfg.codebook_sizes {
        let report = train(train_set, Some(test_set), n, train_cfg)?;
        let cb = report.codebook;
        rows.push(ComparisonRow {
            kind: CodebookKind::Learned,
            beams: Some(n),
            bits: cb.bits(),
            metrics: evaluate_codebook(&cb, test_set, snr)?,
        });
        for &b in &eval_cfg.quantizer_bits {
            let q = quantize(&cb, QuantizerSpec::new(b)?);
            rows.push(ComparisonRow {
                kind: CodebookKind::Learned,
                beams: Some(n),
                bits: Some(b),
                metrics: evaluate_codebook(&q, test_set, snr)?,
            });
        }
        rows.push(ComparisonRow {
            kind: CodebookKind::Dft,
            beams: Some(n),
            bits: None,
            metrics: evaluate_codebook(&dft_codebook(&array, n)?, test_set, snr)?,
        });
        learned.push(cb);
    }
    rows.push(ComparisonRow {
        kind: CodebookKind::Egc,
        beams: None,
        bits: None,
        metrics: egc_metrics(test_set, snr)?,
    });
    Ok(ComparisonReport {
        snr_db: snr.clone(),
        rows,
        learned,
    })
}
