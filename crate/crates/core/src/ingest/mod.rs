//! RR-interval input: file parsing, tachogram construction and uniform resampling.

mod spline;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use spline::NaturalSpline;

/// Clinical group a recording belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    Control,
    #[serde(rename = "VT")]
    Vt,
    #[serde(rename = "VF")]
    Vf,
    Unlabeled,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Control => "Control",
            Group::Vt => "VT",
            Group::Vf => "VF",
            Group::Unlabeled => "Unlabeled",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "control" => Ok(Group::Control),
            "vt" => Ok(Group::Vt),
            "vf" => Ok(Group::Vf),
            "" | "unlabeled" => Ok(Group::Unlabeled),
            other => Err(Error::validation(format!("unknown group {other:?}"))),
        }
    }
}

/// Layout of an RR text file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrFormat {
    /// One RR interval in milliseconds per line.
    OneColumnMs,
    /// `time RR_ms` per line; the time column is checked but not used.
    TwoColumnTimeMs,
}

/// Ordered RR intervals of one recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RrSeries {
    intervals_ms: Vec<f64>,
    pub subject_id: String,
    pub group: Group,
}

impl RrSeries {
    pub fn new(
        intervals_ms: Vec<f64>,
        subject_id: impl Into<String>,
        group: Group,
    ) -> Result<Self> {
        if intervals_ms.len() < 2 {
            return Err(Error::validation(format!(
                "an RR series needs at least 2 intervals, got {}",
                intervals_ms.len()
            )));
        }
        if let Some((i, v)) = intervals_ms
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::validation(format!(
                "RR interval {} is not positive: {v}",
                i + 1
            )));
        }
        Ok(Self {
            intervals_ms,
            subject_id: subject_id.into(),
            group,
        })
    }

    pub fn intervals_ms(&self) -> &[f64] {
        &self.intervals_ms
    }

    pub fn len(&self) -> usize {
        self.intervals_ms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals_ms.is_empty()
    }

    pub fn with_labels(mut self, subject_id: impl Into<String>, group: Group) -> Self {
        self.subject_id = subject_id.into();
        self.group = group;
        self
    }
}

/// Evenly sampled tachogram.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSignal {
    samples: Vec<f64>,
    rate_hz: f64,
    t0_s: f64,
}

impl UniformSignal {
    pub fn new(samples: Vec<f64>, rate_hz: f64, t0_s: f64) -> Result<Self> {
        if !(rate_hz.is_finite() && rate_hz > 0.0) {
            return Err(Error::validation(format!(
                "sampling rate must be positive, got {rate_hz}"
            )));
        }
        if samples.len() < 2 {
            return Err(Error::validation(format!(
                "a uniform signal needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        Ok(Self {
            samples,
            rate_hz,
            t0_s,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn rate_hz(&self) -> f64 {
        self.rate_hz
    }

    pub fn t0_s(&self) -> f64 {
        self.t0_s
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Drops the tail so the length is the largest multiple of `block`.
    pub fn truncate_to_multiple(mut self, block: usize) -> Result<Self> {
        let keep = self
            .samples
            .len()
            .checked_div(block)
            .map_or(0, |q| q * block);
        if keep == 0 {
            return Err(Error::validation(format!(
                "signal of {} samples is shorter than one block of {block}",
                self.samples.len()
            )));
        }
        self.samples.truncate(keep);
        Ok(self)
    }

    /// Subtracts the sample mean.
    pub fn remove_mean(mut self) -> Self {
        let mean = self.samples.iter().sum::<f64>() / self.samples.len() as f64;
        self.samples.iter_mut().for_each(|s| *s -= mean);
        self
    }

    /// Multiplies every sample by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.samples.iter_mut().for_each(|s| *s *= factor);
        self
    }
}

/// Parses an RR file. Blank lines and lines starting with `#` are skipped;
/// columns may be separated by whitespace or commas.
pub fn parse_rr_file(text: &[u8], format: RrFormat) -> Result<RrSeries> {
    let text = std::str::from_utf8(text)
        .map_err(|e| Error::validation(format!("input is not valid UTF-8: {e}")))?;
    let expected_cols = match format {
        RrFormat::OneColumnMs => 1,
        RrFormat::TwoColumnTimeMs => 2,
    };

    let mut intervals = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.len() != expected_cols {
            return Err(Error::validation(format!(
                "line {line_no}: expected {expected_cols} column(s), found {}",
                tokens.len()
            )));
        }
        let mut values = tokens.iter().map(|tok| {
            tok.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                token: (*tok).to_string(),
            })
        });
        let value = match format {
            RrFormat::OneColumnMs => values.next().unwrap()?,
            RrFormat::TwoColumnTimeMs => {
                values.next().unwrap()?;
                values.next().unwrap()?
            }
        };
        if !value.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                token: tokens[expected_cols - 1].to_string(),
            });
        }
        if value <= 0.0 {
            return Err(Error::validation(format!(
                "line {line_no}: RR interval must be positive, got {value}"
            )));
        }
        intervals.push(value);
    }
    RrSeries::new(intervals, "", Group::Unlabeled)
}

/// Beat times (cumulative interval sum, seconds) paired with the interval ending at each beat.
pub fn rr_to_tachogram(series: &RrSeries) -> Vec<(f64, f64)> {
    let mut elapsed_ms = 0.0;
    series
        .intervals_ms()
        .iter()
        .map(|&rr| {
            elapsed_ms += rr;
            (elapsed_ms / 1000.0, rr)
        })
        .collect()
}

/// Resamples `points` at `rate_hz` with a natural cubic spline, from the first
/// knot up to (and not past) the last one.
pub fn resample_cubic_spline(points: &[(f64, f64)], rate_hz: f64) -> Result<UniformSignal> {
    if !(rate_hz.is_finite() && rate_hz > 0.0) {
        return Err(Error::validation(format!(
            "sampling rate must be positive, got {rate_hz}"
        )));
    }
    let spline = NaturalSpline::new(points)?;
    let t0 = spline.start();
    let span = spline.end() - t0;
    // tolerate round-off so a knot landing on the grid is kept
    let count = (span * rate_hz * (1.0 + 1e-12)).floor() as usize + 1;
    if count < 2 {
        return Err(Error::validation(format!(
            "rate {rate_hz} Hz fits fewer than 2 samples in a {span} s span"
        )));
    }
    let samples = (0..count)
        .map(|k| spline.eval(t0 + k as f64 / rate_hz))
        .collect();
    UniformSignal::new(samples, rate_hz, t0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_one_column() {
        let s = parse_rr_file(b"800\n810\n790\n805\n", RrFormat::OneColumnMs).unwrap();
        assert_eq!(s.intervals_ms(), &[800.0, 810.0, 790.0, 805.0]);
    }

    #[test]
    fn parses_two_column() {
        let s = parse_rr_file(b"0.800 800\n1.610 810\n", RrFormat::TwoColumnTimeMs).unwrap();
        assert_eq!(s.intervals_ms(), &[800.0, 810.0]);
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let s = parse_rr_file(b"# header\n\n800\n  \n# mid\n810\n", RrFormat::OneColumnMs).unwrap();
        assert_eq!(s.intervals_ms(), &[800.0, 810.0]);
    }

    #[test]
    fn reports_line_of_bad_token() {
        let err = parse_rr_file(b"800\nabc\n", RrFormat::OneColumnMs).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                token: "abc".into()
            }
        );
    }

    #[test]
    fn rejects_nonpositive_and_short() {
        assert!(matches!(
            parse_rr_file(b"800\n0\n", RrFormat::OneColumnMs),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_rr_file(b"800\n-5\n", RrFormat::OneColumnMs),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_rr_file(b"800\n", RrFormat::OneColumnMs),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_rr_file(&[0xff, 0xfe], RrFormat::OneColumnMs),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn tachogram_is_cumulative() {
        let s = RrSeries::new(vec![1000.0; 3], "a", Group::Control).unwrap();
        assert_eq!(
            rr_to_tachogram(&s),
            vec![(1.0, 1000.0), (2.0, 1000.0), (3.0, 1000.0)]
        );
        let s = RrSeries::new(vec![800.0, 810.0], "a", Group::Control).unwrap();
        assert_eq!(rr_to_tachogram(&s), vec![(0.8, 800.0), (1.61, 810.0)]);
        assert!(RrSeries::new(vec![500.0], "a", Group::Control).is_err());
    }

    #[test]
    fn resample_reproduces_line_and_constant() {
        let line: Vec<(f64, f64)> = [0.3, 1.1, 1.7, 2.9, 4.0, 4.45]
            .iter()
            .map(|&t| (t, 2.0 * t))
            .collect();
        let sig = resample_cubic_spline(&line, 4.0).unwrap();
        assert_eq!(sig.len(), 17);
        for (k, v) in sig.samples().iter().enumerate() {
            let t = 0.3 + k as f64 / 4.0;
            assert!((v - 2.0 * t).abs() < 1e-9 * (2.0 * t).abs().max(1.0));
        }

        let flat: Vec<(f64, f64)> = (0..7).map(|i| (i as f64 * 0.9, 7.0)).collect();
        let sig = resample_cubic_spline(&flat, 4.0).unwrap();
        assert!(sig.samples().iter().all(|v| (v - 7.0).abs() < 1e-12));
    }

    #[test]
    fn resample_hits_knots_on_grid() {
        let pts = [(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 0.0)];
        let sig = resample_cubic_spline(&pts, 1.0).unwrap();
        assert_eq!(sig.samples(), &[0.0, 1.0, 0.0, 1.0, 0.0]);
        let sig = resample_cubic_spline(&pts, 4.0).unwrap();
        assert_eq!(sig.len(), 17);
        for (i, &(_, v)) in pts.iter().enumerate() {
            assert!((sig.samples()[4 * i] - v).abs() < 1e-12);
        }
    }

    #[test]
    fn resample_errors() {
        assert!(resample_cubic_spline(&[(0.0, 1.0), (1.0, 2.0)], 0.5).is_err());
        assert!(resample_cubic_spline(&[(0.0, 1.0), (1.0, 2.0)], 0.0).is_err());
        assert!(resample_cubic_spline(&[(1.0, 1.0), (0.5, 2.0)], 4.0).is_err());
    }

    #[test]
    fn truncation_drops_tail() {
        let sig = UniformSignal::new((0..130).map(f64::from).collect(), 4.0, 0.0).unwrap();
        let sig = sig.truncate_to_multiple(64).unwrap();
        assert_eq!(sig.len(), 128);
        assert_eq!(sig.samples()[127], 127.0);
        let short = UniformSignal::new(vec![1.0; 10], 4.0, 0.0).unwrap();
        assert!(short.truncate_to_multiple(64).is_err());
    }

    #[test]
    fn group_names() {
        assert_eq!("vt".parse::<Group>().unwrap(), Group::Vt);
        assert_eq!(" Control ".parse::<Group>().unwrap(), Group::Control);
        assert!("afib".parse::<Group>().is_err());
    }
}
