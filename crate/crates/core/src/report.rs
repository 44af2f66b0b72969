//! Report files.
//!
//! Every run writes `report.json` (the complete [`RunReport`]), a feature
//! table, one ANOVA table per analysis that ran, and a coefficient dump per
//! completed recording:
//!
//! | file                 | csv | json |
//! |----------------------|-----|------|
//! | `features.*`         | yes | yes  |
//! | `anova_<name>.*`     | yes | yes  |
//! | `bands_<subject>.csv`| yes | yes (always CSV) |
//!
//! CSV numbers carry 12 significant digits. JSON numbers use the shortest
//! representation that parses back to the same `f64` (at most 17 significant
//! digits), so `report.json` round-trips exactly.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::ingest::Group;
use crate::pipeline::{
    AnovaStatus, BandSummary, Outcome, OutputFormat, PipelineRun, RecordingCoefficients, RunReport,
};
use crate::stats::{AnovaTable, SourceRow, SOURCE_NAMES};

pub const REPORT_FILE: &str = "report.json";

const FEATURE_HEADER: [&str; 27] = [
    "subject_id",
    "group",
    "STDLF",
    "MEANLF",
    "STDHF",
    "MEANHF",
    "E_LF",
    "E_HF",
    "R_E",
    "lambda_lf",
    "h_lf",
    "n_lf",
    "background_count_lf",
    "significant_count_lf",
    "background_energy_lf",
    "significant_energy_lf",
    "significant_mean_lf",
    "significant_std_lf",
    "lambda_hf",
    "h_hf",
    "n_hf",
    "background_count_hf",
    "significant_count_hf",
    "background_energy_hf",
    "significant_energy_hf",
    "significant_mean_hf",
    "significant_std_hf",
];

const ANOVA_HEADER: [&str; 6] = ["Source", "SS", "df", "MS", "F", "p"];
const BANDS_HEADER: [&str; 5] = ["band", "node", "offset", "coefficient", "component"];

/// Formats `x` with 12 significant digits, without exponent notation.
pub fn format_csv_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    rounded.to_string()
}

fn opt_number(x: Option<f64>) -> String {
    x.map(format_csv_number).unwrap_or_default()
}

#[derive(Debug, Serialize)]
struct FeatureRow<'a> {
    #[serde(flatten)]
    features: &'a FeatureVector,
    lf: &'a BandSummary,
    hf: &'a BandSummary,
}

#[derive(Debug, Serialize)]
struct AnovaRow<'a> {
    source: &'static str,
    #[serde(flatten)]
    row: &'a SourceRow,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::validation(format!("csv encoding: {e}"));
    w.write_record(header).map_err(to_err)?;
    for row in rows {
        w.write_record(&row).map_err(to_err)?;
    }
    w.into_inner()
        .map_err(|e| Error::validation(format!("csv encoding: {e}")))
}

fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::validation(format!("json encoding: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn summary_cells(s: &BandSummary) -> Vec<String> {
    vec![
        format_csv_number(s.lambda),
        format_csv_number(s.h),
        s.n.to_string(),
        s.background_count.to_string(),
        s.significant_count.to_string(),
        format_csv_number(s.background_energy),
        format_csv_number(s.significant_energy),
        opt_number(s.significant.map(|c| c.mean)),
        opt_number(s.significant.map(|c| c.std)),
    ]
}

fn feature_rows(report: &RunReport) -> Vec<FeatureRow<'_>> {
    report
        .recordings
        .iter()
        .filter_map(|r| match &r.outcome {
            Outcome::Ok {
                features, lf, hf, ..
            } => Some(FeatureRow { features, lf, hf }),
            Outcome::Failed { .. } => None,
        })
        .collect()
}

fn anova_csv_rows(table: &AnovaTable) -> Vec<Vec<String>> {
    table
        .sources()
        .iter()
        .map(|(name, row)| {
            vec![
                name.to_string(),
                format_csv_number(row.ss),
                row.df.to_string(),
                opt_number(row.ms),
                opt_number(row.f),
                opt_number(row.p),
            ]
        })
        .collect()
}

fn bands_csv_rows(rec: &RecordingCoefficients) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for split in [&rec.lf, &rec.hf] {
        let mut entries: Vec<_> = split
            .background
            .iter()
            .zip(&split.background_sources)
            .map(|(c, s)| (s.node, s.offset, *c, "background"))
            .chain(
                split
                    .significant
                    .iter()
                    .zip(&split.significant_sources)
                    .map(|(c, s)| (s.node, s.offset, *c, "significant")),
            )
            .collect();
        entries.sort_by_key(|e| (e.0, e.1));
        rows.extend(entries.into_iter().map(|(node, offset, c, component)| {
            vec![
                split.band.to_string(),
                node.to_string(),
                offset.to_string(),
                format_csv_number(c),
                component.to_string(),
            ]
        }));
    }
    rows
}

/// Turns a subject id into a safe file-name fragment.
pub fn file_stem(subject_id: &str) -> String {
    subject_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes all report files into `dir` (created if missing) and returns their paths.
pub fn emit_report(run: &PipelineRun, format: OutputFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let report = &run.report;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, &bytes)?;
        written.push(path);
        Ok(())
    };

    put(REPORT_FILE.to_string(), json_bytes(report)?)?;

    let rows = feature_rows(report);
    match format {
        OutputFormat::Json => put("features.json".into(), json_bytes(&rows)?)?,
        OutputFormat::Csv => {
            let body = rows.iter().map(|r| {
                let f = r.features;
                let mut cells = vec![f.subject_id.clone(), f.group.to_string()];
                cells.extend(
                    f.coefficient_stats()
                        .iter()
                        .chain(f.energies().iter())
                        .map(|v| format_csv_number(*v)),
                );
                cells.extend(summary_cells(r.lf));
                cells.extend(summary_cells(r.hf));
                cells
            });
            put("features.csv".into(), csv_bytes(&FEATURE_HEADER, body)?)?;
        }
    }

    for outcome in &report.anova {
        let AnovaStatus::Ran { table } = &outcome.status else {
            continue;
        };
        let stem = format!("anova_{}", outcome.name);
        match format {
            OutputFormat::Json => {
                let rows: Vec<AnovaRow<'_>> = table
                    .sources()
                    .into_iter()
                    .map(|(source, row)| AnovaRow { source, row })
                    .collect();
                put(format!("{stem}.json"), json_bytes(&rows)?)?;
            }
            OutputFormat::Csv => {
                put(
                    format!("{stem}.csv"),
                    csv_bytes(&ANOVA_HEADER, anova_csv_rows(table))?,
                )?;
            }
        }
    }

    for rec in &run.coefficients {
        let name = format!("bands_{}.csv", file_stem(&rec.subject_id));
        put(name, csv_bytes(&BANDS_HEADER, bands_csv_rows(rec))?)?;
    }
    Ok(written)
}

/// Parses `report.json` from a report directory.
pub fn read_report(dir: &Path) -> Result<RunReport> {
    let path = dir.join(REPORT_FILE);
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::io(&path, e))
}

fn parse_number(path: &Path, field: &str, s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::io(path, format!("column {field}: cannot parse {s:?}")))
}

fn parse_optional(path: &Path, field: &str, s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_number(path, field, s).map(Some)
    }
}

fn read_csv(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::io(path, e))?;
    let found = reader.headers().map_err(|e| Error::io(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::io(path, format!("unexpected header {found:?}")));
    }
    reader
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::io(path, e))
}

/// Reads the feature columns of a `features.csv`.
pub fn read_features_csv(path: &Path) -> Result<Vec<FeatureVector>> {
    read_csv(path, &FEATURE_HEADER)?
        .iter()
        .map(|rec| {
            let num = |i: usize| parse_number(path, FEATURE_HEADER[i], &rec[i]);
            Ok(FeatureVector {
                subject_id: rec[0].to_string(),
                group: rec[1].parse::<Group>()?,
                std_lf: num(2)?,
                mean_lf: num(3)?,
                std_hf: num(4)?,
                mean_hf: num(5)?,
                e_lf: num(6)?,
                e_hf: num(7)?,
                r_e: num(8)?,
            })
        })
        .collect()
}

/// Reads an `anova_*.csv` back into a table.
pub fn read_anova_csv(path: &Path) -> Result<AnovaTable> {
    let records = read_csv(path, &ANOVA_HEADER)?;
    let names: Vec<&str> = records.iter().map(|r| &r[0]).collect();
    if names != SOURCE_NAMES {
        return Err(Error::io(path, format!("unexpected source rows {names:?}")));
    }
    let rows: Vec<SourceRow> = records
        .iter()
        .map(|r| {
            Ok(SourceRow {
                ss: parse_number(path, "SS", &r[1])?,
                df: r[2]
                    .parse()
                    .map_err(|_| Error::io(path, format!("column df: cannot parse {:?}", &r[2])))?,
                ms: parse_optional(path, "MS", &r[3])?,
                f: parse_optional(path, "F", &r[4])?,
                p: parse_optional(path, "p", &r[5])?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(AnovaTable {
        columns: rows[0],
        rows: rows[1],
        interaction: rows[2],
        error: rows[3],
        total: rows[4],
    })
}

/// One line of a `bands_<subject>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientRecord {
    pub band: String,
    pub node: usize,
    pub offset: usize,
    pub coefficient: f64,
    pub significant: bool,
}

pub fn read_bands_csv(path: &Path) -> Result<Vec<CoefficientRecord>> {
    read_csv(path, &BANDS_HEADER)?
        .iter()
        .map(|r| {
            let int = |i: usize| {
                r[i].parse::<usize>()
                    .map_err(|_| Error::io(path, format!("cannot parse {:?}", &r[i])))
            };
            let significant = match &r[4] {
                "background" => false,
                "significant" => true,
                other => return Err(Error::io(path, format!("unknown component {other:?}"))),
            };
            Ok(CoefficientRecord {
                band: r[0].to_string(),
                node: int(1)?,
                offset: int(2)?,
                coefficient: parse_number(path, "coefficient", &r[3])?,
                significant,
            })
        })
        .collect()
}
