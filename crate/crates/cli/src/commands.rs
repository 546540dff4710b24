//! Subcommand implementations.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};

use singingbot_core::calibration::CalibrationSession;
use singingbot_core::edr::edr;
use singingbot_core::formats::{
    parse_actuator_csv, parse_blendshape_csv, parse_dataset_csv, parse_va_csv, write_actuator_csv,
    BlendshapeSequence, CsvOptions,
};
use singingbot_core::retarget::{default_profile_document, ProfileDocument};
use singingbot_core::wire::number_frames;
use singingbot_core::{
    emit_hull_geometry, nnr_baseline, random_baseline, retarget_sequence, smooth_sequence,
    stream_sequence, ActuatorVector, RetargetProfile, Sink, SmoothingConfig,
};

use crate::args::{BaselineKind, Command, Globals};
use crate::compare::{run_compare, CompareInputs, CompareSettings};
use crate::server::{router, AppState};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// The profile document named by `--profile`, or the bundled one.
pub fn profile_document(g: &Globals) -> Result<ProfileDocument> {
    match &g.profile {
        Some(p) => ProfileDocument::parse(&read(p)?)
            .with_context(|| format!("parsing profile {}", p.display())),
        None => Ok(default_profile_document()),
    }
}

pub fn profile(g: &Globals) -> Result<RetargetProfile> {
    let doc = profile_document(g)?;
    RetargetProfile::from_document(&doc).with_context(|| match &g.profile {
        Some(p) => format!("validating profile {}", p.display()),
        None => "validating bundled profile".into(),
    })
}

fn csv_options(g: &Globals, profile_fps: u32) -> CsvOptions {
    CsvOptions {
        validation: g.validation(),
        fps: g.fps.unwrap_or(profile_fps),
    }
}

fn read_clip(path: &Path, opts: &CsvOptions) -> Result<BlendshapeSequence> {
    let seq = parse_blendshape_csv(&read(path)?, opts)
        .with_context(|| format!("parsing {}", path.display()))?;
    if seq.clamped > 0 {
        eprintln!("clamped {} coefficients in {}", seq.clamped, path.display());
    }
    Ok(seq)
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn write_motors(seq: &[ActuatorVector], output: Option<&Path>) -> Result<()> {
    emit(&write_actuator_csv(seq), output)
}

pub fn run(g: &Globals, cmd: Command) -> Result<()> {
    match cmd {
        Command::Retarget { input, output } => {
            let p = profile(g)?;
            let clip = read_clip(&input, &csv_options(g, p.fps()))?;
            let m = retarget_sequence(&p, &clip.frames, &SmoothingConfig::new(g.sigma))?;
            write_motors(&m, output.as_deref())
        }
        Command::Baseline { kind } => baseline(g, kind),
        Command::Edr { inputs, plot } => {
            let mut trajs = Vec::new();
            for path in &inputs {
                let t = parse_va_csv(&read(path)?)
                    .with_context(|| format!("parsing {}", path.display()))?;
                let name = path.file_stem().map_or_else(
                    || path.display().to_string(),
                    |s| s.to_string_lossy().into_owned(),
                );
                println!("{name}\t{:.6}", edr(&t, g.trim_fraction)?);
                trajs.push((name, t));
            }
            if let Some(plot) = plot {
                fs::write(&plot, emit_hull_geometry(&trajs, g.trim_fraction)?)
                    .with_context(|| format!("writing {}", plot.display()))?;
            }
            Ok(())
        }
        Command::Compare {
            input,
            dataset,
            va,
            output,
            raw_nnr,
        } => {
            let p = profile(g)?;
            let settings = CompareSettings {
                sigma: g.sigma,
                seed: g.seed,
                trim_fraction: g.trim_fraction,
                validation: g.validation(),
                fps: g.fps.unwrap_or(p.fps()),
                raw_nnr,
            };
            let inputs = CompareInputs {
                blendshapes: input,
                dataset,
                va,
                output_dir: output.clone(),
            };
            let report = run_compare(&inputs, &p, &settings)?;
            for row in &report.edr {
                println!("{}\t{:.6}", row.method, row.edr);
            }
            eprintln!("wrote report to {}", output.display());
            Ok(())
        }
        Command::Stream { input, udp, file } => {
            let fps = match g.fps {
                Some(f) => f,
                None => profile_document(g)?.robot.fps,
            };
            let seq = parse_actuator_csv(&read(&input)?)
                .with_context(|| format!("parsing {}", input.display()))?;
            let mut sink = match (udp, file) {
                (Some(addr), _) => {
                    Sink::udp(&addr).with_context(|| format!("connecting to {addr}"))?
                }
                (None, Some(path)) => Sink::file(&path)?,
                (None, None) => bail!("one of --udp or --file is required"),
            };
            let report = stream_sequence(&number_frames(seq), fps as f64, &mut sink)?;
            println!(
                "sent {} frames ({} bytes) in {:.1} ms; mean |jitter| {:.3} ms, max {:.3} ms",
                report.frames_sent,
                report.bytes_sent,
                report.duration_ms,
                report.mean_abs_jitter_ms(),
                report.max_abs_jitter_ms()
            );
            Ok(())
        }
        Command::Calibrate { bind, ui_dir } => {
            let session = CalibrationSession::new(profile_document(g)?)?;
            let app = router(AppState::new(session), ui_dir);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(bind).await?;
                eprintln!("calibration server on http://{}", listener.local_addr()?);
                axum::serve(listener, app).await?;
                Ok(())
            })
        }
    }
}

fn baseline(g: &Globals, kind: BaselineKind) -> Result<()> {
    match kind {
        BaselineKind::Rt {
            dataset,
            input,
            frames,
            output,
        } => {
            let ds = parse_dataset_csv(&read(&dataset)?)
                .with_context(|| format!("parsing {}", dataset.display()))?;
            let n = match (frames, input) {
                (Some(n), _) => n,
                (None, Some(path)) => {
                    let fps = g.fps.unwrap_or(profile_document(g)?.robot.fps);
                    read_clip(&path, &csv_options(g, fps))?.frames.len()
                }
                (None, None) => bail!("one of --input or --frames is required"),
            };
            write_motors(&random_baseline(&ds, n, g.seed)?, output.as_deref())
        }
        BaselineKind::Nnr {
            dataset,
            input,
            output,
            raw,
        } => {
            let ds = parse_dataset_csv(&read(&dataset)?)
                .with_context(|| format!("parsing {}", dataset.display()))?;
            let fps = g.fps.unwrap_or(profile_document(g)?.robot.fps);
            let clip = read_clip(&input, &csv_options(g, fps))?;
            let query = if raw {
                clip.frames
            } else {
                smooth_sequence(&clip.frames, &SmoothingConfig::new(g.sigma))?
            };
            write_motors(&nnr_baseline(&ds, &query)?, output.as_deref())
        }
    }
}
