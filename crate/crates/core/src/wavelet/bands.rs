//! Node frequency ranges and LF/HF band membership.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Band {
    #[serde(rename = "LF")]
    Lf,
    #[serde(rename = "HF")]
    Hf,
}

impl Band {
    /// Band edges in Hz covered by the depth-6, 4 Hz leaves (6,1)..(6,4) and (6,5)..(6,12).
    pub fn default_range(self) -> FrequencyRange {
        match self {
            Band::Lf => FrequencyRange::new(0.03125, 0.15625),
            Band::Hf => FrequencyRange::new(0.15625, 0.40625),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Band::Lf => "LF",
            Band::Hf => "HF",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRange {
    pub lo_hz: f64,
    pub hi_hz: f64,
}

impl FrequencyRange {
    pub const fn new(lo_hz: f64, hi_hz: f64) -> Self {
        Self { lo_hz, hi_hz }
    }
}

/// `[index * F_s / 2^(level+1), (index + 1) * F_s / 2^(level+1)]`.
pub fn node_frequency_range(level: usize, index: usize, rate_hz: f64) -> Result<(f64, f64)> {
    if level >= usize::BITS as usize - 1 || index >= 1 << level {
        return Err(Error::validation(format!(
            "node index {index} out of range for level {level}"
        )));
    }
    let width = rate_hz / (1u64 << (level + 1)) as f64;
    Ok((index as f64 * width, (index + 1) as f64 * width))
}

/// Frequency-ordered leaves at `level` for one of the standard bands.
pub fn band_nodes(band: Band, level: usize, rate_hz: f64) -> Result<Vec<usize>> {
    nodes_within(band.default_range(), level, rate_hz)
}

/// Every leaf at `level` whose frequency range lies inside `range`.
pub fn nodes_within(range: FrequencyRange, level: usize, rate_hz: f64) -> Result<Vec<usize>> {
    if !(rate_hz.is_finite() && rate_hz > 0.0) {
        return Err(Error::validation(format!(
            "sampling rate must be positive, got {rate_hz}"
        )));
    }
    if !(range.lo_hz >= 0.0 && range.hi_hz > range.lo_hz) {
        return Err(Error::validation(format!(
            "band [{}, {}] Hz is empty or negative",
            range.lo_hz, range.hi_hz
        )));
    }
    let slack = rate_hz * 1e-12;
    let mut nodes = Vec::new();
    for index in 0..1usize << level {
        let (lo, hi) = node_frequency_range(level, index, rate_hz)?;
        if lo >= range.lo_hz - slack && hi <= range.hi_hz + slack {
            nodes.push(index);
        }
    }
    if nodes.is_empty() {
        return Err(Error::validation(format!(
            "no level-{level} node at {rate_hz} Hz fits inside [{}, {}] Hz",
            range.lo_hz, range.hi_hz
        )));
    }
    Ok(nodes)
}
