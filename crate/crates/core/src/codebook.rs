//! Phase codebooks and their constant-modulus complex embedding.
//!
//! The trainable object is an `M × N` matrix of phases `Θ`; beam `n` is
//! `w_n = (1/√M)·exp(jθ_n)`. Every complex codebook in this crate is produced
//! from phases, so `|w_mn| = 1/√M` holds by construction.

use std::f64::consts::{PI, TAU};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::array_channel::{ArrayConfig, ChannelVector};
use crate::error::{Error, Result};
use crate::fmt_f64;

/// `M × N` phase matrix, stored beam-major (`phases[n * M + m]`).
///
/// Phases are kept unwrapped while training; [`PhaseCodebook::wrapped`] maps
/// them into `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCodebook {
    num_antennas: usize,
    num_beams: usize,
    phases: Vec<f64>,
    bits: Option<u8>,
}

impl PhaseCodebook {
    pub fn new(num_antennas: usize, num_beams: usize, phases: Vec<f64>) -> Result<Self> {
        if num_antennas == 0 || num_beams == 0 {
            return Err(Error::InvalidConfig(
                "codebook needs at least one antenna and one beam".into(),
            ));
        }
        if phases.len() != num_antennas * num_beams {
            return Err(Error::DimensionMismatch {
                expected: num_antennas * num_beams,
                found: phases.len(),
            });
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("codebook phases"));
        }
        Ok(Self {
            num_antennas,
            num_beams,
            phases,
            bits: None,
        })
    }

    pub fn zeros(num_antennas: usize, num_beams: usize) -> Result<Self> {
        Self::new(num_antennas, num_beams, vec![0.0; num_antennas * num_beams])
    }

    /// Builds a codebook from per-beam phase vectors.
    pub fn from_beams(beams: &[Vec<f64>]) -> Result<Self> {
        let m = beams.first().map(Vec::len).ok_or(Error::Empty("beam list"))?;
        if let Some(bad) = beams.iter().find(|b| b.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.len(),
            });
        }
        Self::new(m, beams.len(), beams.concat())
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    pub fn num_beams(&self) -> usize {
        self.num_beams
    }

    /// Quantizer resolution, if these phases came out of [`quantize`].
    pub fn bits(&self) -> Option<u8> {
        self.bits
    }

    pub fn phase(&self, m: usize, n: usize) -> f64 {
        self.phases[n * self.num_antennas + m]
    }

    pub fn beam(&self, n: usize) -> &[f64] {
        &self.phases[n * self.num_antennas..(n + 1) * self.num_antennas]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.phases
    }

    /// Mutable phase access. Clears the quantization tag.
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        self.bits = None;
        &mut self.phases
    }

    /// Same codebook with every phase mapped into `[0, 2π)`.
    pub fn wrapped(&self) -> Self {
        Self {
            phases: self.phases.iter().map(|&p| wrap_phase(p)).collect(),
            ..self.clone()
        }
    }

    pub fn to_complex(&self) -> ComplexCodebook {
        to_complex(self)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "M,N,bits")?;
        let bits = self.bits.map_or_else(|| "none".to_string(), |b| b.to_string());
        writeln!(out, "{},{},{}", self.num_antennas, self.num_beams, bits)?;
        for m in 0..self.num_antennas {
            let row: Vec<String> = (0..self.num_beams)
                .map(|n| fmt_f64(wrap_phase(self.phase(m, n))))
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read<R: Read>(input: R) -> Result<Self> {
        let mut lines = BufReader::new(input).lines().enumerate();
        let mut next_line = || -> Result<Option<(usize, String)>> {
            for (i, line) in lines.by_ref() {
                let line = line?;
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    continue;
                }
                return Ok(Some((i + 1, trimmed.to_string())));
            }
            Ok(None)
        };
        let parse_err = |line, msg: String| Error::Parse { line, msg };

        let (line, header) = next_line()?.ok_or(Error::Empty("codebook file"))?;
        if header.replace(' ', "") != "M,N,bits" {
            return Err(parse_err(line, format!("expected header `M,N,bits`, got `{header}`")));
        }
        let (line, dims) = next_line()?.ok_or(parse_err(line + 1, "missing dimension row".into()))?;
        let fields: Vec<&str> = dims.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(line, "dimension row needs 3 fields".into()));
        }
        let num_antennas: usize = fields[0]
            .parse()
            .map_err(|e| parse_err(line, format!("bad M: {e}")))?;
        let num_beams: usize = fields[1]
            .parse()
            .map_err(|e| parse_err(line, format!("bad N: {e}")))?;
        let bits = match fields[2] {
            "none" => None,
            b => Some(QuantizerSpec::new(
                b.parse().map_err(|e| parse_err(line, format!("bad bits: {e}")))?,
            )?),
        };

        let mut phases = vec![0.0; num_antennas * num_beams];
        for m in 0..num_antennas {
            let (line, row) = next_line()?
                .ok_or_else(|| parse_err(line, format!("expected {num_antennas} phase rows, found {m}")))?;
            let values: Vec<&str> = row.split(',').collect();
            if values.len() != num_beams {
                return Err(parse_err(
                    line,
                    format!("phase row has {} fields, expected {num_beams}", values.len()),
                ));
            }
            for (n, v) in values.iter().enumerate() {
                phases[n * num_antennas + m] = v
                    .trim()
                    .parse()
                    .map_err(|e| parse_err(line, format!("bad phase `{v}`: {e}")))?;
            }
        }
        if let Some((line, _)) = next_line()? {
            return Err(parse_err(line, "trailing data after phase rows".into()));
        }
        let mut cb = Self::new(num_antennas, num_beams, phases)?;
        cb.bits = bits.map(|q| q.bits());
        Ok(cb)
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

/// Maps a phase into `[0, 2π)`.
pub fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly 2π
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Complex codebook `W`, beam-major. Only obtainable from phases.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexCodebook {
    num_antennas: usize,
    num_beams: usize,
    weights: Vec<Complex64>,
}

impl ComplexCodebook {
    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    pub fn num_beams(&self) -> usize {
        self.num_beams
    }

    pub fn beam(&self, n: usize) -> &[Complex64] {
        &self.weights[n * self.num_antennas..(n + 1) * self.num_antennas]
    }

    pub fn weight(&self, m: usize, n: usize) -> Complex64 {
        self.weights[n * self.num_antennas + m]
    }

    pub fn beams(&self) -> impl Iterator<Item = &[Complex64]> {
        self.weights.chunks_exact(self.num_antennas)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.weights
    }
}

/// `W = (1/√M)(cos Θ + j sin Θ)`.
pub fn to_complex(phases: &PhaseCodebook) -> ComplexCodebook {
    let scale = 1.0 / (phases.num_antennas as f64).sqrt();
    ComplexCodebook {
        num_antennas: phases.num_antennas,
        num_beams: phases.num_beams,
        weights: phases
            .phases
            .iter()
            .map(|&t| Complex64::from_polar(scale, t))
            .collect(),
    }
}

/// Resolution of a uniform phase shifter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizerSpec(u8);

impl QuantizerSpec {
    pub const MAX_BITS: u8 = 16;

    pub fn new(bits: u8) -> Result<Self> {
        if !(1..=Self::MAX_BITS).contains(&bits) {
            return Err(Error::InvalidConfig(format!(
                "quantizer bits must be in 1..=16, got {bits}"
            )));
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> u8 {
        self.0
    }

    pub fn levels(&self) -> u32 {
        1 << self.0
    }

    /// Grid spacing `2π / 2^b`.
    pub fn step(&self) -> f64 {
        TAU / self.levels() as f64
    }

    /// Grid index nearest to `phase` in circular distance; exact ties go to
    /// the smaller index.
    pub fn index_of(&self, phase: f64) -> u32 {
        let levels = self.levels();
        let x = wrap_phase(phase) / self.step();
        let floor = x.floor();
        let frac = x - floor;
        let mut k = floor as u32;
        // a tie between the last level and 2π resolves to level 0
        if frac > 0.5 || (frac == 0.5 && k == levels - 1) {
            k += 1;
        }
        k % levels
    }

    pub fn snap(&self, phase: f64) -> f64 {
        self.index_of(phase) as f64 * self.step()
    }
}

/// Snaps every phase to the `b`-bit grid `{2πk/2^b}`.
pub fn quantize(phases: &PhaseCodebook, spec: QuantizerSpec) -> PhaseCodebook {
    PhaseCodebook {
        phases: phases.phases.iter().map(|&p| spec.snap(p)).collect(),
        bits: Some(spec.bits()),
        ..phases.clone()
    }
}

/// `sin φ_n` of the `N` DFT beams: `2n/N` wrapped into `[-1, 1)`.
pub fn dft_sines(num_beams: usize) -> Vec<f64> {
    (0..num_beams)
        .map(|n| {
            let u = 2.0 * n as f64 / num_beams as f64;
            if u >= 1.0 {
                u - 2.0
            } else {
                u
            }
        })
        .collect()
}

/// Steering angles (radians) of the `N` DFT beams.
pub fn dft_angles(num_beams: usize) -> Vec<f64> {
    dft_sines(num_beams).into_iter().map(f64::asin).collect()
}

/// Beamspace-uniform steering codebook. Column `n` is `a(φ_n)/√M`, so for
/// `d = 1/2` and `M = N` it is the unitary DFT matrix.
pub fn dft_codebook(array: &ArrayConfig, num_beams: usize) -> Result<PhaseCodebook> {
    array.validate()?;
    let m_count = array.num_antennas;
    let mut phases = Vec::with_capacity(m_count * num_beams);
    for u in dft_sines(num_beams) {
        phases.extend((0..m_count).map(|m| TAU * array.antenna_spacing * m as f64 * u));
    }
    PhaseCodebook::new(m_count, num_beams, phases)
}

/// Per-antenna phases of `h`; zero entries get phase 0.
pub fn egc_phases(h: &ChannelVector) -> Vec<f64> {
    h.as_slice()
        .iter()
        .map(|z| if z.norm_sqr() == 0.0 { 0.0 } else { z.arg() })
        .collect()
}

/// Equal-gain combiner `(1/√M)·exp(j∠h)`.
pub fn egc_beam(h: &ChannelVector) -> Vec<Complex64> {
    let scale = 1.0 / (h.len() as f64).sqrt();
    egc_phases(h)
        .into_iter()
        .map(|t| Complex64::from_polar(scale, t))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitStrategy {
    /// Independent phases uniform on `[0, 2π)`.
    UniformRandom,
    /// The DFT codebook of the same size.
    DftWarmStart,
}

impl FromStr for InitStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-random" | "uniform_random" | "random" => Ok(Self::UniformRandom),
            "dft-warm-start" | "dft_warm_start" | "dft" => Ok(Self::DftWarmStart),
            other => Err(Error::UnknownStrategy(other.to_string())),
        }
    }
}

pub fn init_codebook<R: Rng + ?Sized>(
    array: &ArrayConfig,
    num_beams: usize,
    strategy: InitStrategy,
    rng: &mut R,
) -> Result<PhaseCodebook> {
    array.validate()?;
    if num_beams == 0 {
        return Err(Error::InvalidConfig("codebook size must be >= 1".into()));
    }
    match strategy {
        InitStrategy::DftWarmStart => dft_codebook(array, num_beams),
        InitStrategy::UniformRandom => {
            let phases = (0..array.num_antennas * num_beams)
                .map(|_| rng.random_range(0.0..TAU))
                .collect();
            PhaseCodebook::new(array.num_antennas, num_beams, phases)
        }
    }
}

/// `|a - b|` measured around the circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = wrap_phase(a - b);
    d.min(TAU - d).min(PI)
}
