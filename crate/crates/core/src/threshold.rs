//! Adaptive local threshold and the background/significant split of a band.
//!
//! For a band with `n` coefficients, `h = MAD / 0.6745` and
//! `lambda = h * sqrt(2 ln n)`. Coefficients with `|c| <= lambda` are
//! background variability, the rest are significant changes. Values are kept
//! as they are; nothing is shrunk.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavelet::Band;

/// Upper quartile of the standard normal; turns a MAD into a standard deviation estimate.
pub const MAD_TO_SIGMA: f64 = 0.6745;

/// Where the noise scale `h` is estimated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MadSource {
    /// The band's own concatenated coefficients.
    #[default]
    PerBand,
    /// The finest-scale detail node (1, 1) of the packet tree.
    FirstLevel,
}

/// Position of a band coefficient in the packet tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffSource {
    pub node: usize,
    pub offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub lambda: f64,
    pub h: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSplit {
    pub band: Band,
    pub lambda: f64,
    pub h: f64,
    pub n: usize,
    pub background: Vec<f64>,
    pub significant: Vec<f64>,
    pub background_sources: Vec<CoeffSource>,
    pub significant_sources: Vec<CoeffSource>,
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    median_of_sorted(&v)
}

/// Median absolute deviation from the median.
pub fn mad(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::validation("MAD of an empty vector"));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::validation(format!("MAD input contains {v}")));
    }
    let center = median(values);
    let deviations: Vec<f64> = values.iter().map(|v| (v - center).abs()).collect();
    Ok(median(&deviations))
}

pub fn noise_scale(coeffs: &[f64]) -> Result<f64> {
    Ok(mad(coeffs)? / MAD_TO_SIGMA)
}

/// Universal threshold from `h` and the band length `n`.
pub fn universal_threshold(h: f64, n: usize) -> f64 {
    h * (2.0 * (n as f64).ln()).sqrt()
}

/// Threshold for `coeffs`, with `n` its length and `h` estimated from it.
pub fn compute_threshold(coeffs: &[f64]) -> Result<Threshold> {
    let h = noise_scale(coeffs)?;
    let n = coeffs.len();
    Ok(Threshold {
        lambda: universal_threshold(h, n),
        h,
        n,
    })
}

/// Partitions `band_coeffs` by magnitude against `lambda`; ties go to background.
/// `h` is recorded in the split as-is.
pub fn split_coefficients(
    band: Band,
    band_coeffs: &[f64],
    threshold: Threshold,
    sources: &[CoeffSource],
) -> Result<BandSplit> {
    let Threshold { lambda, h, .. } = threshold;
    if !(lambda >= 0.0) {
        return Err(Error::validation(format!(
            "threshold must be non-negative, got {lambda}"
        )));
    }
    if sources.len() != band_coeffs.len() {
        return Err(Error::validation(format!(
            "{} coefficients but {} source positions",
            band_coeffs.len(),
            sources.len()
        )));
    }
    let mut split = BandSplit {
        band,
        lambda,
        h,
        n: band_coeffs.len(),
        background: Vec::new(),
        significant: Vec::new(),
        background_sources: Vec::new(),
        significant_sources: Vec::new(),
    };
    for (&c, &src) in band_coeffs.iter().zip(sources) {
        if c.abs() <= lambda {
            split.background.push(c);
            split.background_sources.push(src);
        } else {
            split.significant.push(c);
            split.significant_sources.push(src);
        }
    }
    Ok(split)
}
