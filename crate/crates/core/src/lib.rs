//! Learning analog beamforming codebooks for phase-shifter arrays.
//!
//! A codebook of `N` beams for an `M`-antenna array is parameterized by an
//! `M × N` phase matrix. Training runs mini-batch gradient descent on the
//! squared gap between each user's best-beam power and its equal-gain
//! combining (EGC) gain, with the gradient routed only to the winning beam.
//! Learned codebooks are compared against DFT codebooks and the EGC bound on
//! synthetic multipath channels.
//!
//! ```
//! use beamlearn::prelude::*;
//!
//! let array = ArrayConfig::half_wavelength(8).unwrap();
//! let h = array_response(&array, 0.3).unwrap();
//! let dataset = ChannelDataset::from_channels(vec![h]).unwrap().normalize().unwrap();
//! let cfg = TrainConfig { num_epochs: 1000, batch_size: 1, ..TrainConfig::default() };
//! let report = train(&dataset, None, 1, &cfg).unwrap();
//! let label = dataset.samples()[0].label;
//! assert!(report.holdout_gain.last().unwrap() / label > 0.99);
//! ```

pub mod array_channel;
pub mod codebook;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod forward;
pub mod trainer;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::array_channel::{
        array_response, channel_from_paths, generate_population, synthesize_channel, AoaDistribution, ArrayConfig,
        ChannelVector, GainDistribution, PathComponent, ScenarioConfig,
    };
    pub use crate::codebook::{
        dft_angles, dft_codebook, egc_beam, egc_phases, init_codebook, quantize, to_complex, ComplexCodebook,
        InitStrategy, PhaseCodebook, QuantizerSpec,
    };
    pub use crate::dataset::{compute_labels, egc_label, ChannelDataset, Sample};
    pub use crate::error::{Error, Result};
    pub use crate::evaluation::{
        achievable_rate, compare, compare_split, egc_upper_bound, evaluate_codebook, CodebookKind, ComparisonReport,
        EvalConfig,
    };
    pub use crate::forward::{angle_grid, beam_pattern, forward, pattern_lobes, population_gain, BeamResponse};
    pub use crate::trainer::{loss_gradient, mse_loss, step, train, train_from, OptimizerKind, OptimizerState, TrainConfig, TrainReport};
}

/// Decimal text for `f64` with 17 significant digits, enough to round-trip
/// every value exactly.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
