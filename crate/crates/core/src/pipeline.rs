//! Batch orchestration: manifest -> per-recording analysis -> group ANOVA.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{
    band_energy, extract_features, ComponentStats, FeatureVector, COEFFICIENT_FEATURES,
    ENERGY_FEATURES,
};
use crate::ingest::{
    parse_rr_file, resample_cubic_spline, rr_to_tachogram, Group, RrFormat, RrSeries, UniformSignal,
};
use crate::stats::{anova_two_way, AnovaTable, FactorialData};
use crate::threshold::{
    compute_threshold, noise_scale, split_coefficients, universal_threshold, BandSplit,
    CoeffSource, MadSource, Threshold,
};
use crate::wavelet::{
    daubechies_filters, nodes_within, wpt_decompose, Band, FrequencyRange, WpTree,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// How coefficients exactly at the threshold are assigned. Only one policy exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    #[default]
    Background,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub rate_hz: f64,
    pub wavelet_order: usize,
    pub depth: usize,
    pub lf_band: FrequencyRange,
    pub hf_band: FrequencyRange,
    pub tie_policy: TiePolicy,
    pub mad_source: MadSource,
    /// Subtract the mean of the resampled signal before the transform.
    pub detrend: bool,
    /// z-score each feature column before the ANOVA.
    pub standardize_anova: bool,
    pub output_format: OutputFormat,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            rate_hz: 4.0,
            wavelet_order: 4,
            depth: 6,
            lf_band: Band::Lf.default_range(),
            hf_band: Band::Hf.default_range(),
            tie_policy: TiePolicy::Background,
            mad_source: MadSource::PerBand,
            detrend: false,
            standardize_anova: false,
            output_format: OutputFormat::Csv,
            output_dir: PathBuf::from("."),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate_hz.is_finite() && self.rate_hz > 0.0) {
            return Err(Error::validation(format!(
                "rate must be positive, got {}",
                self.rate_hz
            )));
        }
        daubechies_filters(self.wavelet_order)?;
        if self.depth == 0 || self.depth > 16 {
            return Err(Error::validation(format!(
                "depth must be in 1..=16, got {}",
                self.depth
            )));
        }
        nodes_within(self.lf_band, self.depth, self.rate_hz)?;
        nodes_within(self.hf_band, self.depth, self.rate_hz)?;
        Ok(())
    }

    fn band_range(&self, band: Band) -> FrequencyRange {
        match band {
            Band::Lf => self.lf_band,
            Band::Hf => self.hf_band,
        }
    }
}

/// Threshold outcome for one band, without the coefficients themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSummary {
    pub band: Band,
    pub nodes: Vec<usize>,
    pub lambda: f64,
    pub h: f64,
    pub n: usize,
    pub background_count: usize,
    pub significant_count: usize,
    pub background_energy: f64,
    pub significant_energy: f64,
    /// Statistics of the significant component; absent when it is empty.
    pub significant: Option<ComponentStats>,
}

impl BandSummary {
    fn of(split: &BandSplit, nodes: Vec<usize>) -> Self {
        Self {
            band: split.band,
            nodes,
            lambda: split.lambda,
            h: split.h,
            n: split.n,
            background_count: split.background.len(),
            significant_count: split.significant.len(),
            background_energy: band_energy(&split.background),
            significant_energy: band_energy(&split.significant),
            significant: ComponentStats::of(&split.significant),
        }
    }
}

/// Full analysis of one recording.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordingAnalysis {
    pub features: FeatureVector,
    pub lf: BandSplit,
    pub hf: BandSplit,
    pub lf_summary: BandSummary,
    pub hf_summary: BandSummary,
    pub samples_used: usize,
}

/// Concatenated leaf coefficients of a band with their positions.
fn gather_band(tree: &WpTree, nodes: &[usize]) -> Result<(Vec<f64>, Vec<CoeffSource>)> {
    let mut coeffs = Vec::new();
    let mut sources = Vec::new();
    for &node in nodes {
        let leaf = tree.node(tree.depth(), node)?;
        coeffs.extend_from_slice(leaf.coeffs);
        sources.extend((0..leaf.coeffs.len()).map(|offset| CoeffSource { node, offset }));
    }
    Ok((coeffs, sources))
}

/// Runs transform, thresholding and feature extraction on a conditioned signal.
pub fn analyze_signal(
    signal: &UniformSignal,
    config: &PipelineConfig,
    subject_id: &str,
    group: Group,
) -> Result<RecordingAnalysis> {
    let bank = daubechies_filters(config.wavelet_order)?;
    let tree = wpt_decompose(signal, config.depth, &bank)?;

    let first_level_h = match config.mad_source {
        MadSource::PerBand => None,
        MadSource::FirstLevel => Some(noise_scale(tree.node(1, 1)?.coeffs)?),
    };

    let mut splits = Vec::with_capacity(2);
    let mut summaries = Vec::with_capacity(2);
    for band in [Band::Lf, Band::Hf] {
        let nodes = nodes_within(config.band_range(band), config.depth, config.rate_hz)?;
        let (coeffs, sources) = gather_band(&tree, &nodes)?;
        let threshold = match first_level_h {
            None => compute_threshold(&coeffs)?,
            Some(h) => Threshold {
                lambda: universal_threshold(h, coeffs.len()),
                h,
                n: coeffs.len(),
            },
        };
        let split = split_coefficients(band, &coeffs, threshold, &sources)?;
        summaries.push(BandSummary::of(&split, nodes));
        splits.push(split);
    }
    let hf = splits.pop().expect("two bands");
    let lf = splits.pop().expect("two bands");
    let hf_summary = summaries.pop().expect("two bands");
    let lf_summary = summaries.pop().expect("two bands");
    let features = extract_features(&lf, &hf, subject_id, group)?;
    Ok(RecordingAnalysis {
        features,
        lf,
        hf,
        lf_summary,
        hf_summary,
        samples_used: signal.len(),
    })
}

/// Resamples the tachogram points and conditions the signal for the configured depth.
pub fn condition_tachogram(
    points: &[(f64, f64)],
    config: &PipelineConfig,
) -> Result<UniformSignal> {
    let signal =
        resample_cubic_spline(points, config.rate_hz)?.truncate_to_multiple(1 << config.depth)?;
    Ok(if config.detrend {
        signal.remove_mean()
    } else {
        signal
    })
}

pub fn analyze_series(series: &RrSeries, config: &PipelineConfig) -> Result<RecordingAnalysis> {
    let signal = condition_tachogram(&rr_to_tachogram(series), config)?;
    analyze_signal(&signal, config, &series.subject_id, series.group)
}

/// Parses an RR file whose column layout is inferred from the first data line.
pub fn parse_rr_auto(text: &[u8]) -> Result<RrSeries> {
    let as_str = std::str::from_utf8(text)
        .map_err(|e| Error::validation(format!("input is not valid UTF-8: {e}")))?;
    let columns = as_str
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .map_or(1, |l| {
            l.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .count()
        });
    let format = if columns == 2 {
        RrFormat::TwoColumnTimeMs
    } else {
        RrFormat::OneColumnMs
    };
    parse_rr_file(text, format)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub subject_id: String,
    pub group: Group,
}

#[derive(Deserialize)]
struct ManifestRow {
    path: String,
    subject_id: String,
    group: String,
}

/// Reads a `path,subject_id,group` CSV; relative paths resolve against the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    parse_manifest(&text, base).map_err(|e| match e {
        Error::Validation(msg) => Error::validation(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_manifest(text: &[u8], base: &Path) -> Result<Vec<ManifestEntry>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text);
    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, row) in reader.deserialize::<ManifestRow>().enumerate() {
        let row = row.map_err(|e| Error::validation(format!("manifest row {}: {e}", i + 1)))?;
        if !seen.insert(row.subject_id.clone()) {
            return Err(Error::validation(format!(
                "manifest row {}: duplicate subject_id {:?}",
                i + 1,
                row.subject_id
            )));
        }
        let p = PathBuf::from(&row.path);
        entries.push(ManifestEntry {
            path: if p.is_absolute() { p } else { base.join(p) },
            subject_id: row.subject_id,
            group: row.group.parse()?,
        });
    }
    if entries.is_empty() {
        return Err(Error::validation("manifest lists no recordings"));
    }
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Ok {
        features: FeatureVector,
        lf: BandSummary,
        hf: BandSummary,
        samples_used: usize,
    },
    Failed {
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingResult {
    pub subject_id: String,
    pub group: Group,
    pub path: PathBuf,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl RecordingResult {
    pub fn features(&self) -> Option<&FeatureVector> {
        match &self.outcome {
            Outcome::Ok { features, .. } => Some(features),
            Outcome::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum AnovaStatus {
    Ran { table: AnovaTable },
    Skipped { reason: String },
}

/// One group x feature ANOVA over the completed recordings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaOutcome {
    pub name: String,
    /// Column factor levels.
    pub features: Vec<String>,
    /// Row factor levels.
    pub groups: Vec<Group>,
    pub replicates: usize,
    pub standardized: bool,
    #[serde(flatten)]
    pub status: AnovaStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    pub config: PipelineConfig,
    /// Divisor used for the standard deviation features.
    pub std_divisor: String,
    pub recordings: Vec<RecordingResult>,
    pub anova: Vec<AnovaOutcome>,
}

impl RunReport {
    /// True when every recording and every ANOVA completed.
    pub fn is_complete(&self) -> bool {
        self.recordings
            .iter()
            .all(|r| matches!(r.outcome, Outcome::Ok { .. }))
            && self
                .anova
                .iter()
                .all(|a| matches!(a.status, AnovaStatus::Ran { .. }))
    }

    pub fn features(&self) -> impl Iterator<Item = &FeatureVector> {
        self.recordings.iter().filter_map(RecordingResult::features)
    }
}

/// Band splits of one recording, for coefficient dumps.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordingCoefficients {
    pub subject_id: String,
    pub lf: BandSplit,
    pub hf: BandSplit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub report: RunReport,
    pub coefficients: Vec<RecordingCoefficients>,
}

fn process_entry(entry: &ManifestEntry, config: &PipelineConfig) -> Result<RecordingAnalysis> {
    let bytes = std::fs::read(&entry.path).map_err(|e| Error::io(&entry.path, e))?;
    let series = parse_rr_auto(&bytes)?.with_labels(entry.subject_id.clone(), entry.group);
    analyze_series(&series, config)
}

/// Analyzes every entry independently, then runs the group ANOVAs.
pub fn run_entries(entries: &[ManifestEntry], config: &PipelineConfig) -> Result<PipelineRun> {
    if entries.is_empty() {
        return Err(Error::validation("manifest lists no recordings"));
    }
    config.validate()?;

    let analyses: Vec<(ManifestEntry, Result<RecordingAnalysis>)> = entries
        .par_iter()
        .map(|e| (e.clone(), process_entry(e, config)))
        .collect();

    let mut results = BTreeMap::new();
    let mut coefficients = Vec::new();
    for (entry, analysis) in analyses {
        let outcome = match analysis {
            Ok(a) => {
                coefficients.push(RecordingCoefficients {
                    subject_id: entry.subject_id.clone(),
                    lf: a.lf,
                    hf: a.hf,
                });
                Outcome::Ok {
                    features: a.features,
                    lf: a.lf_summary,
                    hf: a.hf_summary,
                    samples_used: a.samples_used,
                }
            }
            Err(e) => Outcome::Failed {
                error: e.to_string(),
            },
        };
        results.insert(
            entry.subject_id.clone(),
            RecordingResult {
                subject_id: entry.subject_id,
                group: entry.group,
                path: entry.path,
                outcome,
            },
        );
    }
    coefficients.sort_by(|a, b| a.subject_id.cmp(&b.subject_id));
    let recordings: Vec<RecordingResult> = results.into_values().collect();

    let completed: Vec<&FeatureVector> = recordings
        .iter()
        .filter_map(RecordingResult::features)
        .collect();
    let anova = vec![
        group_anova(
            "coefficient_stats",
            &COEFFICIENT_FEATURES,
            &completed,
            |f| f.coefficient_stats().to_vec(),
            config.standardize_anova,
        ),
        group_anova(
            "energies",
            &ENERGY_FEATURES,
            &completed,
            |f| f.energies().to_vec(),
            config.standardize_anova,
        ),
    ];

    Ok(PipelineRun {
        report: RunReport {
            tool_version: TOOL_VERSION.to_string(),
            config: config.clone(),
            std_divisor: "n".to_string(),
            recordings,
            anova,
        },
        coefficients,
    })
}

/// Reads the manifest and runs the batch.
pub fn run_pipeline(manifest: &Path, config: &PipelineConfig) -> Result<PipelineRun> {
    let entries = read_manifest(manifest)?;
    run_entries(&entries, config)
}

/// Balanced design: rows are the labeled groups present, columns the features,
/// replicates the subjects of each group in subject_id order.
fn group_anova(
    name: &str,
    feature_names: &[&str],
    completed: &[&FeatureVector],
    values: impl Fn(&FeatureVector) -> Vec<f64>,
    standardize: bool,
) -> AnovaOutcome {
    let mut by_group: BTreeMap<Group, Vec<&FeatureVector>> = BTreeMap::new();
    for f in completed.iter().filter(|f| f.group != Group::Unlabeled) {
        by_group.entry(f.group).or_default().push(f);
    }
    for members in by_group.values_mut() {
        members.sort_by(|a, b| a.subject_id.cmp(&b.subject_id));
    }
    let groups: Vec<Group> = by_group.keys().copied().collect();
    let counts: BTreeSet<usize> = by_group.values().map(Vec::len).collect();
    let replicates = if counts.len() == 1 {
        counts.into_iter().next().unwrap_or(0)
    } else {
        0
    };

    let outcome = |status| AnovaOutcome {
        name: name.to_string(),
        features: feature_names.iter().map(|s| s.to_string()).collect(),
        groups: groups.clone(),
        replicates,
        standardized: standardize,
        status,
    };
    let skip = |reason: String| outcome(AnovaStatus::Skipped { reason });

    if groups.len() < 2 {
        return skip(format!(
            "insufficient design: {} labeled group(s) with completed recordings, need at least 2",
            groups.len()
        ));
    }
    if replicates == 0 {
        let sizes: Vec<String> = by_group
            .iter()
            .map(|(g, m)| format!("{g}={}", m.len()))
            .collect();
        return skip(format!("unbalanced design: {}", sizes.join(", ")));
    }
    if replicates < 2 {
        return skip("insufficient design: fewer than 2 subjects per group".to_string());
    }

    // cells[group][feature][subject]
    let mut cells: Vec<Vec<Vec<f64>>> = by_group
        .values()
        .map(|members| {
            (0..feature_names.len())
                .map(|c| members.iter().map(|f| values(f)[c]).collect())
                .collect()
        })
        .collect();
    if standardize {
        standardize_columns(&mut cells);
    }
    let table = FactorialData::from_cells(&cells).and_then(|d| anova_two_way(&d));
    match table {
        Ok(table) => outcome(AnovaStatus::Ran { table }),
        Err(e) => skip(e.to_string()),
    }
}

/// z-scores each feature column across all groups and subjects.
fn standardize_columns(cells: &mut [Vec<Vec<f64>>]) {
    let columns = cells.first().map_or(0, Vec::len);
    for c in 0..columns {
        let column: Vec<f64> = cells
            .iter()
            .flat_map(|row| row[c].iter().copied())
            .collect();
        let n = column.len() as f64;
        let mean = column.iter().sum::<f64>() / n;
        let sd = (column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        for row in cells.iter_mut() {
            for v in row[c].iter_mut() {
                *v = if sd > 0.0 { (*v - mean) / sd } else { 0.0 };
            }
        }
    }
}
