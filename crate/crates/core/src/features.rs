//! Per-recording features computed on the background-variability components.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Group;
use crate::threshold::BandSplit;

/// Feature names in column order for the coefficient-statistics design.
pub const COEFFICIENT_FEATURES: [&str; 4] = ["STDLF", "MEANLF", "STDHF", "MEANHF"];
/// Feature names in column order for the energy design.
pub const ENERGY_FEATURES: [&str; 3] = ["E_LF", "E_HF", "R_E"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub subject_id: String,
    pub group: Group,
    pub std_lf: f64,
    pub mean_lf: f64,
    pub std_hf: f64,
    pub mean_hf: f64,
    pub e_lf: f64,
    pub e_hf: f64,
    pub r_e: f64,
}

impl FeatureVector {
    /// `[STDLF, MEANLF, STDHF, MEANHF]`.
    pub fn coefficient_stats(&self) -> [f64; 4] {
        [self.std_lf, self.mean_lf, self.std_hf, self.mean_hf]
    }

    /// `[E_LF, E_HF, R_E]`.
    pub fn energies(&self) -> [f64; 3] {
        [self.e_lf, self.e_hf, self.r_e]
    }
}

/// Mean, population standard deviation and energy of one coefficient component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub energy: f64,
}

impl ComponentStats {
    /// `None` for an empty component.
    pub fn of(values: &[f64]) -> Option<Self> {
        let (mean, std) = mean_std(values)?;
        Some(Self {
            count: values.len(),
            mean,
            std,
            energy: band_energy(values),
        })
    }
}

/// Sum of squared coefficients.
pub fn band_energy(coeffs: &[f64]) -> f64 {
    coeffs.iter().fold(0.0, |acc, c| acc + c * c)
}

/// Welford mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    Some((mean, (m2 / values.len() as f64).sqrt()))
}

pub fn extract_features(
    lf_split: &BandSplit,
    hf_split: &BandSplit,
    subject_id: &str,
    group: Group,
) -> Result<FeatureVector> {
    let lf = ComponentStats::of(&lf_split.background)
        .ok_or_else(|| Error::Feature("LF background component is empty".into()))?;
    let hf = ComponentStats::of(&hf_split.background)
        .ok_or_else(|| Error::Feature("HF background component is empty".into()))?;
    if hf.energy == 0.0 {
        return Err(Error::Feature(
            "HF background energy is zero, energy ratio undefined".into(),
        ));
    }
    Ok(FeatureVector {
        subject_id: subject_id.to_string(),
        group,
        std_lf: lf.std,
        mean_lf: lf.mean,
        std_hf: hf.std,
        mean_hf: hf.mean,
        e_lf: lf.energy,
        e_hf: hf.energy,
        r_e: lf.energy / hf.energy,
    })
}
