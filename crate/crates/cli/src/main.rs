//! `hrv-wpt`: batch wavelet packet analysis of RR-interval recordings.
//!
//! Exit status: 0 when every recording and every ANOVA completed, 1 when the
//! run finished with failures or could not run, 2 for invalid arguments.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use hrv_wpt::pipeline::{run_pipeline, AnovaStatus, Outcome, OutputFormat, PipelineConfig};
use hrv_wpt::report::emit_report;
use hrv_wpt::threshold::MadSource;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MadSourceArg {
    /// Each band's own coefficients.
    Band,
    /// The finest-scale detail node.
    FirstLevel,
}

#[derive(Debug, Parser)]
#[command(name = "hrv-wpt", version, about)]
struct Args {
    /// CSV manifest with columns path,subject_id,group.
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Resampling rate in Hz.
    #[arg(long, default_value_t = 4.0)]
    rate: f64,
    /// Daubechies order (number of vanishing moments).
    #[arg(long, default_value_t = 4)]
    wavelet_order: usize,
    /// Packet tree depth.
    #[arg(long, default_value_t = 6)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = MadSourceArg::Band)]
    mad_source: MadSourceArg,
    /// Remove the mean of the resampled signal before the transform.
    #[arg(long)]
    detrend: bool,
    /// z-score each feature column before the ANOVA.
    #[arg(long)]
    standardize_anova: bool,
}

impl Args {
    fn config(&self) -> PipelineConfig {
        let output_format = match self.format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
        let mad_source = match self.mad_source {
            MadSourceArg::Band => MadSource::PerBand,
            MadSourceArg::FirstLevel => MadSource::FirstLevel,
        };
        PipelineConfig {
            rate_hz: self.rate,
            wavelet_order: self.wavelet_order,
            depth: self.depth,
            mad_source,
            detrend: self.detrend,
            standardize_anova: self.standardize_anova,
            output_format,
            output_dir: self.out.clone(),
            ..PipelineConfig::default()
        }
    }
}

fn run(args: &Args, config: &PipelineConfig) -> anyhow::Result<bool> {
    let run = run_pipeline(&args.manifest, config)
        .with_context(|| format!("processing {}", args.manifest.display()))?;
    let written = emit_report(&run, config.output_format, &args.out)
        .with_context(|| format!("writing results to {}", args.out.display()))?;

    let report = &run.report;
    for rec in &report.recordings {
        if let Outcome::Failed { error } = &rec.outcome {
            eprintln!(
                "failed: {} ({}): {error}",
                rec.subject_id,
                rec.path.display()
            );
        }
    }
    for a in &report.anova {
        if let AnovaStatus::Skipped { reason } = &a.status {
            eprintln!("anova {} skipped: {reason}", a.name);
        }
    }
    let ok = report.features().count();
    eprintln!(
        "{ok}/{} recordings analysed, {} files written to {}",
        report.recordings.len(),
        written.len(),
        args.out.display()
    );
    Ok(report.is_complete())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = args.config();
    if let Err(e) = config.validate() {
        eprintln!("error: invalid configuration: {e}");
        return ExitCode::from(2);
    }
    match run(&args, &config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
