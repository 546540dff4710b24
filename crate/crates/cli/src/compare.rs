//! One-clip comparison of the retargeting pipeline against the retrieval
//! baselines, scored by emotion dynamic range.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use singingbot_core::edr::edr;
use singingbot_core::formats::{
    parse_blendshape_csv, parse_dataset_csv, parse_va_csv, write_actuator_csv, CsvOptions,
};
use singingbot_core::{
    emit_hull_geometry, nnr_baseline, random_baseline, retarget_sequence, smooth_sequence, Error,
    Result, RetargetProfile, SmoothingConfig, Validation,
};

#[derive(Debug, Clone)]
pub struct CompareInputs {
    pub blendshapes: PathBuf,
    pub dataset: PathBuf,
    /// `(method, VA trajectory file)`, in report order.
    pub va: Vec<(String, PathBuf)>,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Copy)]
pub struct CompareSettings {
    pub sigma: f64,
    pub seed: u64,
    pub trim_fraction: f64,
    pub validation: Validation,
    pub fps: u32,
    pub raw_nnr: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodEdr {
    pub method: String,
    pub va_file: String,
    pub points: usize,
    pub edr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub clip: String,
    pub frames: usize,
    pub seed: u64,
    pub sigma: f64,
    pub trim_fraction: f64,
    pub nnr_input: &'static str,
    /// Motor CSVs written, relative to the output directory.
    pub motor_files: Vec<String>,
    pub edr: Vec<MethodEdr>,
}

fn read_parsed<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T>) -> Result<T> {
    fs::read_to_string(path)
        .map_err(Error::from)
        .and_then(|t| parse(&t))
        .map_err(|e| Error::in_file(path.display().to_string(), e))
}

/// Parse every input first and report all failures together, then write
/// `motors_{ours,rt,nnr}.csv`, `report.json`, `report.md` and `edr.svg` into
/// the output directory.
pub fn run_compare(
    inputs: &CompareInputs,
    profile: &RetargetProfile,
    settings: &CompareSettings,
) -> Result<CompareReport> {
    let opts = CsvOptions {
        validation: settings.validation,
        fps: settings.fps,
    };
    let mut errors = Vec::new();
    let clip = read_parsed(&inputs.blendshapes, |t| parse_blendshape_csv(t, &opts))
        .map_err(|e| errors.push(e))
        .ok();
    let dataset = read_parsed(&inputs.dataset, parse_dataset_csv)
        .map_err(|e| errors.push(e))
        .ok();
    let mut trajectories = Vec::new();
    for (name, path) in &inputs.va {
        match read_parsed(path, parse_va_csv) {
            Ok(t) => trajectories.push((name.clone(), t)),
            Err(e) => errors.push(e),
        }
    }
    if inputs.va.is_empty() {
        errors.push(Error::Empty("VA trajectory list"));
    }
    let (Some(clip), Some(dataset), true) = (clip, dataset, errors.is_empty()) else {
        return Err(if errors.len() == 1 {
            errors.remove(0)
        } else {
            Error::Aggregate(errors)
        });
    };
    if dataset.dof() != profile.dof() {
        return Err(Error::DimensionMismatch {
            expected: profile.dof(),
            found: dataset.dof(),
        });
    }

    let cfg = SmoothingConfig::new(settings.sigma);
    let frames = clip.frames;
    let ours = retarget_sequence(profile, &frames, &cfg)?;
    let rt = random_baseline(&dataset, frames.len(), settings.seed)?;
    let nnr = if settings.raw_nnr {
        nnr_baseline(&dataset, &frames)?
    } else {
        nnr_baseline(&dataset, &smooth_sequence(&frames, &cfg)?)?
    };

    fs::create_dir_all(&inputs.output_dir)?;
    let mut motor_files = Vec::new();
    for (name, seq) in [("ours", &ours), ("rt", &rt), ("nnr", &nnr)] {
        let file = format!("motors_{name}.csv");
        fs::write(inputs.output_dir.join(&file), write_actuator_csv(seq))?;
        motor_files.push(file);
    }

    let edr_rows = trajectories
        .iter()
        .zip(&inputs.va)
        .map(|((name, traj), (_, path))| {
            Ok(MethodEdr {
                method: name.clone(),
                va_file: path.display().to_string(),
                points: traj.len(),
                edr: edr(traj, settings.trim_fraction)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let report = CompareReport {
        clip: inputs.blendshapes.display().to_string(),
        frames: frames.len(),
        seed: settings.seed,
        sigma: settings.sigma,
        trim_fraction: settings.trim_fraction,
        nnr_input: if settings.raw_nnr { "raw" } else { "smoothed" },
        motor_files,
        edr: edr_rows,
    };
    let json = serde_json::to_string_pretty(&report).map_err(std::io::Error::other)?;
    fs::write(inputs.output_dir.join("report.json"), json + "\n")?;
    fs::write(inputs.output_dir.join("report.md"), markdown_table(&report))?;
    let svg = emit_hull_geometry(&trajectories, settings.trim_fraction)?;
    fs::write(inputs.output_dir.join("edr.svg"), svg)?;
    Ok(report)
}

fn markdown_table(report: &CompareReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Comparison: {}\n", report.clip);
    let _ = writeln!(
        out,
        "{} frames, sigma {}, RT seed {}, NNR on {} blendshapes, trim fraction {}.\n",
        report.frames, report.sigma, report.seed, report.nnr_input, report.trim_fraction
    );
    out.push_str("| Method | VA points | EDR |\n|---|---:|---:|\n");
    for row in &report.edr {
        let _ = writeln!(out, "| {} | {} | {:.4} |", row.method, row.points, row.edr);
    }
    out
}
