//! Geometric multipath channels for a uniform linear array.
//!
//! A user's uplink channel is the superposition of `L` plane waves,
//! `h = Σ α_ℓ a(φ_ℓ)`, where `a(φ)` is the array response of a broadside ULA
//! with the first element as phase reference:
//!
//! ```text
//! a_m(φ) = exp(j·2π·d·m·sin φ),   m = 0..M-1
//! ```
//!
//! Angles are radians in `[-π/2, π/2]`; `0` is broadside. Scenario files give
//! angles in degrees (see [`ScenarioConfig`]).

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform linear array geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub num_antennas: usize,
    /// Element spacing in wavelengths.
    #[serde(default = "default_spacing")]
    pub antenna_spacing: f64,
}

fn default_spacing() -> f64 {
    0.5
}

impl ArrayConfig {
    pub fn new(num_antennas: usize, antenna_spacing: f64) -> Result<Self> {
        let cfg = Self {
            num_antennas,
            antenna_spacing,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Half-wavelength array with `num_antennas` elements.
    pub fn half_wavelength(num_antennas: usize) -> Result<Self> {
        Self::new(num_antennas, 0.5)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_antennas == 0 {
            return Err(Error::InvalidConfig("num_antennas must be >= 1".into()));
        }
        if !(self.antenna_spacing.is_finite() && self.antenna_spacing > 0.0) {
            return Err(Error::InvalidConfig(
                "antenna_spacing must be finite and > 0".into(),
            ));
        }
        Ok(())
    }
}

/// One propagation path: complex amplitude and angle of arrival (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    pub gain: Complex64,
    pub aoa: f64,
}

impl PathComponent {
    pub fn new(gain: Complex64, aoa: f64) -> Result<Self> {
        if !(gain.re.is_finite() && gain.im.is_finite()) {
            return Err(Error::NonFinite("path gain"));
        }
        check_angle(aoa)?;
        Ok(Self { gain, aoa })
    }
}

/// A single user's channel: one complex gain per antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector(Vec<Complex64>);

impl ChannelVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty("channel vector"));
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("channel vector"));
        }
        Ok(Self(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// `Σ |h_m|`.
    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).sum()
    }

    /// Largest per-antenna power `max |h_m|²`.
    pub fn max_power(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * c).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }
}

impl AsRef<[Complex64]> for ChannelVector {
    fn as_ref(&self) -> &[Complex64] {
        &self.0
    }
}

fn check_angle(phi: f64) -> Result<()> {
    if !phi.is_finite() {
        return Err(Error::NonFinite("angle of arrival"));
    }
    // small slack so that deg->rad conversions of ±90° are accepted
    if phi.abs() > FRAC_PI_2 + 1e-12 {
        return Err(Error::InvalidConfig(format!(
            "angle {phi} rad outside [-pi/2, pi/2]"
        )));
    }
    Ok(())
}

/// Array response `a(φ)`; every entry has unit modulus.
pub fn array_response(cfg: &ArrayConfig, phi: f64) -> Result<ChannelVector> {
    cfg.validate()?;
    check_angle(phi)?;
    Ok(ChannelVector(steering(cfg, phi)))
}

fn steering(cfg: &ArrayConfig, phi: f64) -> Vec<Complex64> {
    let step = 2.0 * PI * cfg.antenna_spacing * phi.sin();
    (0..cfg.num_antennas)
        .map(|m| Complex64::from_polar(1.0, step * m as f64))
        .collect()
}

/// `h = Σ α_ℓ a(φ_ℓ)` for an explicit path list.
pub fn channel_from_paths(cfg: &ArrayConfig, paths: &[PathComponent]) -> Result<ChannelVector> {
    cfg.validate()?;
    let mut h = vec![Complex64::new(0.0, 0.0); cfg.num_antennas];
    for path in paths {
        check_angle(path.aoa)?;
        for (hm, am) in h.iter_mut().zip(steering(cfg, path.aoa)) {
            *hm += path.gain * am;
        }
    }
    ChannelVector::new(h)
}

/// How path angles are drawn. Angles are in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AoaDistribution {
    /// Every path independently uniform over `[lo_deg, hi_deg]`.
    Sector { lo_deg: f64, hi_deg: f64 },
    /// Path `ℓ` always arrives from `angles_deg[ℓ]`.
    Fixed { angles_deg: Vec<f64> },
    /// Path `ℓ` is uniform within `±spread_deg` of `centers_deg[ℓ mod K]`,
    /// clipped to `[-90°, 90°]`.
    Clusters { centers_deg: Vec<f64>, spread_deg: f64 },
}

/// How path amplitudes are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GainDistribution {
    /// Circularly-symmetric complex Gaussian. `variances` holds either one
    /// value shared by all paths or one value per path.
    Gaussian { variances: Vec<f64> },
    /// Path `ℓ` has gain `gains[ℓ] = [re, im]`.
    Fixed { gains: Vec<[f64; 2]> },
}

/// Generative description of a synthetic propagation scenario.
///
/// Loadable from TOML:
///
/// ```toml
/// num_users = 2000
/// num_paths = 1
/// seed = 7
///
/// [array]
/// num_antennas = 32
/// antenna_spacing = 0.5
///
/// [aoa]
/// kind = "sector"
/// lo_deg = -30.0
/// hi_deg = 30.0
///
/// [gain]
/// kind = "gaussian"
/// variances = [1.0]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub array: ArrayConfig,
    pub num_paths: usize,
    pub aoa: AoaDistribution,
    pub gain: GainDistribution,
    pub num_users: usize,
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.array.validate()?;
        let invalid = |msg: String| Err(Error::InvalidConfig(msg));
        if self.num_paths == 0 {
            return invalid("num_paths must be >= 1".into());
        }
        if self.num_users == 0 {
            return invalid("num_users must be >= 1".into());
        }
        let in_range = |deg: f64| deg.is_finite() && deg.abs() <= 90.0;
        match &self.aoa {
            AoaDistribution::Sector { lo_deg, hi_deg } => {
                if !(in_range(*lo_deg) && in_range(*hi_deg)) {
                    return invalid("sector bounds must lie in [-90, 90] degrees".into());
                }
                if lo_deg >= hi_deg {
                    return invalid(format!("sector lo {lo_deg} must be < hi {hi_deg}"));
                }
            }
            AoaDistribution::Fixed { angles_deg } => {
                if angles_deg.len() != self.num_paths {
                    return invalid(format!(
                        "fixed aoa list has {} entries, num_paths is {}",
                        angles_deg.len(),
                        self.num_paths
                    ));
                }
                if !angles_deg.iter().all(|a| in_range(*a)) {
                    return invalid("fixed angles must lie in [-90, 90] degrees".into());
                }
            }
            AoaDistribution::Clusters {
                centers_deg,
                spread_deg,
            } => {
                if centers_deg.is_empty() {
                    return invalid("cluster list is empty".into());
                }
                if !centers_deg.iter().all(|a| in_range(*a)) {
                    return invalid("cluster centers must lie in [-90, 90] degrees".into());
                }
                if !(spread_deg.is_finite() && *spread_deg >= 0.0) {
                    return invalid("cluster spread must be finite and >= 0".into());
                }
            }
        }
        match &self.gain {
            GainDistribution::Gaussian { variances } => {
                if variances.len() != 1 && variances.len() != self.num_paths {
                    return invalid(format!(
                        "gaussian variances must have 1 or {} entries, got {}",
                        self.num_paths,
                        variances.len()
                    ));
                }
                if !variances.iter().all(|v| v.is_finite() && *v >= 0.0) {
                    return invalid("variances must be finite and >= 0".into());
                }
            }
            GainDistribution::Fixed { gains } => {
                if gains.len() != self.num_paths {
                    return invalid(format!(
                        "fixed gain list has {} entries, num_paths is {}",
                        gains.len(),
                        self.num_paths
                    ));
                }
                if !gains.iter().flatten().all(|g| g.is_finite()) {
                    return Err(Error::NonFinite("fixed path gain"));
                }
            }
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

    /// Draws one user's path list.
    pub fn draw_paths<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<PathComponent> {
        (0..self.num_paths)
            .map(|l| {
                let aoa_deg = match &self.aoa {
                    AoaDistribution::Sector { lo_deg, hi_deg } => rng.random_range(*lo_deg..=*hi_deg),
                    AoaDistribution::Fixed { angles_deg } => angles_deg[l],
                    AoaDistribution::Clusters {
                        centers_deg,
                        spread_deg,
                    } => {
                        let c = centers_deg[l % centers_deg.len()];
                        let offset = if *spread_deg > 0.0 {
                            rng.random_range(-spread_deg..=*spread_deg)
                        } else {
                            0.0
                        };
                        (c + offset).clamp(-90.0, 90.0)
                    }
                };
                let gain = match &self.gain {
                    GainDistribution::Gaussian { variances } => {
                        let var = if variances.len() == 1 {
                            variances[0]
                        } else {
                            variances[l]
                        };
                        let s = (var / 2.0).sqrt();
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(s * re, s * im)
                    }
                    GainDistribution::Fixed { gains } => Complex64::new(gains[l][0], gains[l][1]),
                };
                PathComponent {
                    gain,
                    aoa: aoa_deg.to_radians(),
                }
            })
            .collect()
    }
}

/// One channel realization drawn from `rng` according to `cfg`.
pub fn synthesize_channel<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> Result<ChannelVector> {
    cfg.validate()?;
    let paths = cfg.draw_paths(rng);
    channel_from_paths(&cfg.array, &paths)
}

/// `num_users` i.i.d. channels, reproducible from `cfg.seed`.
pub fn generate_population(cfg: &ScenarioConfig) -> Result<Vec<ChannelVector>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.num_users)
        .map(|_| synthesize_channel(cfg, &mut rng))
        .collect()
}
