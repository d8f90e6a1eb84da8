//! Forward pass of the codebook network: combine, take per-beam power, pick
//! the best beam.

use std::io::Write;

use num_complex::Complex64;

use crate::array_channel::{array_response, ArrayConfig, ChannelVector};
use crate::codebook::ComplexCodebook;
use crate::error::{Error, Result};
use crate::fmt_f64;

/// Output of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamResponse {
    /// Combined signal per beam, `z = Wᴴh`.
    pub combined: Vec<Complex64>,
    /// Per-beam received power `|z_n|²`.
    pub power: Vec<f64>,
    /// Smallest index attaining the maximum power.
    pub best_index: usize,
    pub best_gain: f64,
}

/// `wᴴh`.
#[inline]
pub fn inner(w: &[Complex64], h: &[Complex64]) -> Complex64 {
    w.iter().zip(h).map(|(a, b)| a.conj() * b).sum()
}

/// Index and value of the maximum, lowest index on ties.
pub(crate) fn argmax(values: &[f64]) -> (usize, f64) {
    let mut best = (0, values[0]);
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

fn check_dims(w: &ComplexCodebook, h: &ChannelVector) -> Result<()> {
    if w.num_antennas() != h.len() {
        return Err(Error::DimensionMismatch {
            expected: w.num_antennas(),
            found: h.len(),
        });
    }
    Ok(())
}

pub fn forward(w: &ComplexCodebook, h: &ChannelVector) -> Result<BeamResponse> {
    check_dims(w, h)?;
    let combined: Vec<Complex64> = w.beams().map(|beam| inner(beam, h.as_slice())).collect();
    let power: Vec<f64> = combined.iter().map(|z| z.norm_sqr()).collect();
    let (best_index, best_gain) = argmax(&power);
    Ok(BeamResponse {
        combined,
        power,
        best_index,
        best_gain,
    })
}

/// Best-beam gain only; avoids the per-beam allocations of [`forward`].
pub fn best_gain(w: &ComplexCodebook, h: &ChannelVector) -> Result<(usize, f64)> {
    check_dims(w, h)?;
    let mut best = (0, f64::NEG_INFINITY);
    for (n, beam) in w.beams().enumerate() {
        let q = inner(beam, h.as_slice()).norm_sqr();
        if q > best.1 {
            best = (n, q);
        }
    }
    Ok(best)
}

/// Best-beam gain of every channel, in input order.
pub fn best_gains<'a, I>(w: &ComplexCodebook, channels: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a ChannelVector>,
{
    channels
        .into_iter()
        .map(|h| best_gain(w, h).map(|(_, g)| g))
        .collect()
}

/// `(1/|H|) Σ_u max_n |w_nᴴ h_u|²`, summed sequentially in input order.
pub fn population_gain<'a, I>(w: &ComplexCodebook, channels: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a ChannelVector>,
{
    let gains = best_gains(w, channels)?;
    if gains.is_empty() {
        return Err(Error::Empty("channel list"));
    }
    Ok(gains.iter().sum::<f64>() / gains.len() as f64)
}

/// Uniform angle grid over `[-90°, 90°]` with the given step in degrees,
/// returned in radians.
pub fn angle_grid(step_deg: f64) -> Result<Vec<f64>> {
    if !(step_deg.is_finite() && step_deg > 0.0) {
        return Err(Error::InvalidConfig("grid step must be > 0".into()));
    }
    let count = (180.0 / step_deg).floor() as usize;
    Ok((0..=count)
        .map(|i| (-90.0 + i as f64 * step_deg).min(90.0).to_radians())
        .collect())
}

/// `(φ, |wᴴa(φ)|²)` at every grid angle.
pub fn beam_pattern(w: &[Complex64], array: &ArrayConfig, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if w.len() != array.num_antennas {
        return Err(Error::DimensionMismatch {
            expected: array.num_antennas,
            found: w.len(),
        });
    }
    grid.iter()
        .map(|&phi| {
            let a = array_response(array, phi)?;
            Ok((phi, inner(w, a.as_slice()).norm_sqr()))
        })
        .collect()
}

/// Writes a pattern as CSV with header `angle_rad,gain`.
pub fn write_pattern_csv<W: Write>(mut out: W, pattern: &[(f64, f64)]) -> Result<()> {
    writeln!(out, "angle_rad,gain")?;
    for (phi, g) in pattern {
        writeln!(out, "{},{}", fmt_f64(*phi), fmt_f64(*g))?;
    }
    Ok(())
}

/// Indices of interior local maxima whose gain is at least
/// `rel_threshold × peak`. Plateaus count once.
pub fn pattern_lobes(pattern: &[(f64, f64)], rel_threshold: f64) -> Vec<usize> {
    let gains: Vec<f64> = pattern.iter().map(|p| p.1).collect();
    if gains.is_empty() {
        return Vec::new();
    }
    let peak = gains.iter().copied().fold(f64::MIN, f64::max);
    let mut lobes = Vec::new();
    let mut i = 0;
    while i < gains.len() {
        // extent of the plateau starting at i
        let mut j = i;
        while j + 1 < gains.len() && gains[j + 1] == gains[i] {
            j += 1;
        }
        let left_ok = i == 0 || gains[i - 1] < gains[i];
        let right_ok = j + 1 == gains.len() || gains[j + 1] < gains[i];
        if left_ok && right_ok && gains[i] >= rel_threshold * peak {
            lobes.push(i);
        }
        i = j + 1;
    }
    lobes
}
