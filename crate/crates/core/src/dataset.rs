//! Labelled channel datasets.
//!
//! Each sample pairs a channel with its equal-gain-combining label
//! `p = |f_EGCᴴ h|² = ‖h‖₁² / M`. Labels are always derived from the stored
//! channel, so they are recomputed after normalization and on load.
//!
//! # File format
//!
//! ```text
//! # M=4
//! # normalized=true delta=2.5e0
//! m0_re,m0_im,m1_re,m1_im,m2_re,m2_im,m3_re,m3_im
//! 1.0e0,0.0e0,...
//! ```
//!
//! One row per user, `2M` columns. The `normalized` line is present only for
//! normalized datasets.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::array_channel::ChannelVector;
use crate::error::{Error, Result};
use crate::fmt_f64;

/// Default fraction of users assigned to the training split.
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub channel: ChannelVector,
    pub label: f64,
}

/// `‖h‖₁² / M`.
pub fn egc_label(h: &ChannelVector) -> f64 {
    let l1 = h.l1_norm();
    l1 * l1 / h.len() as f64
}

pub fn compute_labels(channels: Vec<ChannelVector>) -> Vec<Sample> {
    channels
        .into_iter()
        .map(|channel| Sample {
            label: egc_label(&channel),
            channel,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDataset {
    samples: Vec<Sample>,
    num_antennas: usize,
    normalization_factor: f64,
    is_normalized: bool,
}

impl ChannelDataset {
    /// Unnormalized dataset with EGC labels.
    pub fn from_channels(channels: Vec<ChannelVector>) -> Result<Self> {
        let num_antennas = channels.first().ok_or(Error::Empty("channel list"))?.len();
        if let Some(bad) = channels.iter().find(|h| h.len() != num_antennas) {
            return Err(Error::DimensionMismatch {
                expected: num_antennas,
                found: bad.len(),
            });
        }
        Ok(Self {
            samples: compute_labels(channels),
            num_antennas,
            normalization_factor: 1.0,
            is_normalized: false,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    /// `Δ`; stored channels are the raw channels divided by `√Δ`.
    pub fn normalization_factor(&self) -> f64 {
        self.normalization_factor
    }

    pub fn is_normalized(&self) -> bool {
        self.is_normalized
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn channels(&self) -> impl ExactSizeIterator<Item = &ChannelVector> + Clone {
        self.samples.iter().map(|s| &s.channel)
    }

    pub fn labels(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.label)
    }

    /// Maps a gain measured on stored channels back to raw channel units.
    pub fn denormalize_gain(&self, gain: f64) -> f64 {
        gain * self.normalization_factor
    }

    /// `Δ = max_u,m |[h_u]_m|²` over this dataset.
    pub fn max_element_power(&self) -> f64 {
        self.channels().map(ChannelVector::max_power).fold(0.0, f64::max)
    }

    /// Scales channels so the largest element magnitude is 1.
    pub fn normalize(self) -> Result<Self> {
        if self.is_normalized {
            return Err(Error::AlreadyNormalized);
        }
        let delta = self.max_element_power();
        self.normalize_with(delta)
    }

    /// Scales channels by `1/√Δ` for an externally supplied `Δ`.
    pub fn normalize_with(self, delta: f64) -> Result<Self> {
        if self.is_normalized {
            return Err(Error::AlreadyNormalized);
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::AllZeroDataset);
        }
        let scale = Complex64::new(1.0 / delta.sqrt(), 0.0);
        let channels = self.samples.into_iter().map(|s| s.channel.scaled(scale)).collect();
        Ok(Self {
            samples: compute_labels(channels),
            num_antennas: self.num_antennas,
            normalization_factor: delta,
            is_normalized: true,
        })
    }

    /// Deterministic shuffled split. An unnormalized dataset is normalized
    /// with `Δ` taken from the training part only; a normalized one keeps
    /// its `Δ`.
    pub fn split(&self, train_fraction: f64, seed: u64) -> Result<(Self, Self)> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::InvalidSplit(format!(
                "train fraction {train_fraction} must be in (0, 1)"
            )));
        }
        let n = self.len();
        let n_train = (n as f64 * train_fraction).round() as usize;
        if n_train == 0 || n_train == n {
            return Err(Error::InvalidSplit(format!(
                "{n} samples at fraction {train_fraction} leaves an empty side"
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let pick = |idx: &[usize]| Self {
            samples: idx.iter().map(|&i| self.samples[i].clone()).collect(),
            ..self.clone_header()
        };
        let train = pick(&order[..n_train]);
        let test = pick(&order[n_train..]);
        if self.is_normalized {
            return Ok((train, test));
        }
        let delta = train.max_element_power();
        if delta == 0.0 {
            return Err(Error::AllZeroDataset);
        }
        Ok((train.normalize_with(delta)?, test.normalize_with(delta)?))
    }

    fn clone_header(&self) -> Self {
        Self {
            samples: Vec::new(),
            num_antennas: self.num_antennas,
            normalization_factor: self.normalization_factor,
            is_normalized: self.is_normalized,
        }
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# M={}", self.num_antennas)?;
        if self.is_normalized {
            writeln!(out, "# normalized=true delta={}", fmt_f64(self.normalization_factor))?;
        }
        let header: Vec<String> = (0..self.num_antennas)
            .map(|m| format!("m{m}_re,m{m}_im"))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for s in &self.samples {
            let row: Vec<String> = s
                .channel
                .as_slice()
                .iter()
                .flat_map(|z| [fmt_f64(z.re), fmt_f64(z.im)])
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read<R: Read>(mut input: R) -> Result<Self> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;

        let mut declared_m = None;
        let mut delta = None;
        for (i, line) in text.lines().enumerate() {
            let Some(meta) = line.trim().strip_prefix('#') else {
                continue;
            };
            for token in meta.split_whitespace() {
                let bad = |e: String| Error::Parse { line: i + 1, msg: e };
                match token.split_once('=') {
                    Some(("M", v)) => {
                        declared_m = Some(v.parse::<usize>().map_err(|e| bad(format!("bad M: {e}")))?)
                    }
                    Some(("delta", v)) => {
                        delta = Some(v.parse::<f64>().map_err(|e| bad(format!("bad delta: {e}")))?)
                    }
                    _ => {}
                }
            }
        }

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader.headers()?.clone();
        if header.is_empty() || header.iter().all(str::is_empty) {
            return Err(Error::Empty("channel file"));
        }
        if header.len() % 2 != 0 {
            return Err(Error::Parse {
                line: reader.position().line() as usize,
                msg: format!("header has {} columns; expected an even count", header.len()),
            });
        }
        let num_antennas = header.len() / 2;
        if let Some(m) = declared_m {
            if m != num_antennas {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: num_antennas,
                });
            }
        }

        let mut channels = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            if record.len() != 2 * num_antennas {
                return Err(Error::Parse {
                    line,
                    msg: format!("row has {} fields, expected {}", record.len(), 2 * num_antennas),
                });
            }
            let values = record
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|e| Error::Parse {
                        line,
                        msg: format!("bad number `{f}`: {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            let h = values
                .chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect();
            channels.push(ChannelVector::new(h).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?);
        }
        if channels.is_empty() {
            return Err(Error::Empty("channel file has no rows"));
        }
        let mut ds = Self::from_channels(channels)?;
        if let Some(d) = delta {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::InvalidConfig(format!("stored delta {d} must be > 0")));
            }
            ds.normalization_factor = d;
            ds.is_normalized = true;
        }
        Ok(ds)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(std::fs::File::open(path)?)
    }
}
