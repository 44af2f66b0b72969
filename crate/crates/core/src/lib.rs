//! Heart-rate-variability analysis on a frequency-ordered wavelet packet tree.
//!
//! The chain is: parse RR intervals ([`ingest`]), resample the tachogram on a
//! uniform grid, decompose it with a Daubechies packet transform
//! ([`wavelet`]), split the LF and HF band coefficients into background
//! variability and significant changes with an adaptive MAD threshold
//! ([`threshold`]), summarise the background components ([`features`]) and
//! compare subject groups with a balanced two-way ANOVA ([`stats`]).
//! [`pipeline`] and [`report`] drive the whole thing over a manifest of
//! recordings.

pub mod error;
pub mod features;
pub mod ingest;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod threshold;
pub mod wavelet;

pub use error::{Error, Result};
pub use features::{band_energy, extract_features, FeatureVector};
pub use ingest::{
    parse_rr_file, resample_cubic_spline, rr_to_tachogram, Group, RrFormat, RrSeries, UniformSignal,
};
pub use pipeline::{run_pipeline, ManifestEntry, PipelineConfig, RecordingResult, RunReport};
pub use stats::{anova_two_way, f_tail_probability, AnovaTable, FactorialData};
pub use threshold::{compute_threshold, mad, noise_scale, split_coefficients, BandSplit};
pub use wavelet::{
    band_nodes, daubechies_filters, node_frequency_range, wpt_decompose, wpt_reconstruct_nodes,
    Band, QuadFilterBank, WpTree,
};
