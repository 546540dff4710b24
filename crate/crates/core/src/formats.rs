//! CSV readers and writers for blendshape sequences, valence-arousal
//! trajectories, paired datasets and actuator sequences.
//!
//! Columns are matched by header name, so files may list them in any order.
//! Floats are written with Rust's shortest round-trip formatting.

use std::collections::HashMap;
use std::fmt::Write;

use crate::baselines::{PairedDataset, PairedSample};
use crate::edr::VaTrajectory;
use crate::error::{Error, Result};
use crate::types::{
    check_timestamps, ActuatorVector, BlendshapeFrame, HeadPose, VaPoint, Validation,
    ARKIT_CHANNELS, NUM_CHANNELS,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvOptions {
    pub validation: Validation,
    /// Used to derive timestamps from the `frame` column when the file has no
    /// `timestamp_ms` column.
    pub fps: u32,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            validation: Validation::Strict,
            fps: crate::retarget::DEFAULT_FPS,
        }
    }
}

/// Parsed blendshape file plus the number of values clamped in lenient mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BlendshapeSequence {
    pub frames: Vec<BlendshapeFrame>,
    pub clamped: usize,
}

pub fn motor_column(i: usize) -> String {
    format!("motor_{i:02}")
}

struct Table {
    columns: HashMap<String, usize>,
    rows: Vec<(usize, csv::StringRecord)>,
}

impl Table {
    fn parse(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = rdr
            .headers()
            .map_err(|e| csv_error(1, "<header>", e))?
            .clone();
        if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
            return Err(Error::Empty("CSV header"));
        }
        let columns = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.to_string(), i))
            .collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                csv_error(line, "<row>", e)
            })?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            rows.push((line, rec));
        }
        Ok(Self { columns, rows })
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.columns
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    fn optional(&self, name: &str) -> Option<usize> {
        self.columns.get(name).copied()
    }

    fn float(&self, line: usize, rec: &csv::StringRecord, col: usize, name: &str) -> Result<f64> {
        let raw = rec.get(col).unwrap_or("");
        let v: f64 = raw.parse().map_err(|_| Error::Csv {
            row: line,
            column: name.to_string(),
            message: format!("malformed number `{raw}`"),
        })?;
        if !v.is_finite() {
            return Err(Error::Csv {
                row: line,
                column: name.to_string(),
                message: format!("non-finite number `{raw}`"),
            });
        }
        Ok(v)
    }

    fn is_blank(rec: &csv::StringRecord, col: usize) -> bool {
        rec.get(col).is_none_or(str::is_empty)
    }

    fn channel_columns(&self) -> Result<[usize; NUM_CHANNELS]> {
        let mut cols = [0; NUM_CHANNELS];
        for (c, name) in cols.iter_mut().zip(ARKIT_CHANNELS) {
            *c = self.require(name)?;
        }
        Ok(cols)
    }

    fn motor_columns(&self) -> Result<Vec<usize>> {
        let count = self
            .columns
            .keys()
            .filter(|k| k.starts_with("motor_"))
            .count();
        (0..count).map(|i| self.require(&motor_column(i))).collect()
    }
}

fn csv_error(row: usize, column: &str, e: impl std::fmt::Display) -> Error {
    Error::Csv {
        row,
        column: column.to_string(),
        message: e.to_string(),
    }
}

fn row_context(line: usize, e: Error) -> Error {
    match e {
        Error::OutOfRange {
            what,
            value,
            min,
            max,
        } => Error::Csv {
            row: line,
            column: what,
            message: format!("value {value} is outside [{min}, {max}]"),
        },
        other => Error::Csv {
            row: line,
            column: "<row>".into(),
            message: other.to_string(),
        },
    }
}

/// Read a blendshape file. Requires all 52 channel columns; optional columns
/// are `frame`, `timestamp_ms`, and `yaw`/`pitch`/`roll` (radians; blank
/// cells mean no pose for that frame).
pub fn parse_blendshape_csv(text: &str, opts: &CsvOptions) -> Result<BlendshapeSequence> {
    let table = Table::parse(text)?;
    let cols = table.channel_columns()?;
    let frame_col = table.optional("frame");
    let ts_col = table.optional("timestamp_ms");
    let pose_cols = match ["yaw", "pitch", "roll"].map(|n| table.optional(n)) {
        [None, None, None] => None,
        [Some(y), Some(p), Some(r)] => Some([y, p, r]),
        partial => {
            let missing = ["yaw", "pitch", "roll"]
                .iter()
                .zip(partial)
                .find(|(_, c)| c.is_none())
                .map(|(n, _)| *n)
                .unwrap_or("yaw");
            return Err(Error::MissingColumn(missing.to_string()));
        }
    };
    if opts.fps == 0 {
        return Err(Error::out_of_range("fps", 0.0, 1.0, f64::INFINITY));
    }

    let mut frames = Vec::with_capacity(table.rows.len());
    let mut clamped = 0;
    for (idx, (line, rec)) in table.rows.iter().enumerate() {
        let line = *line;
        let mut coeffs = [0.0; NUM_CHANNELS];
        for (c, (&col, name)) in coeffs.iter_mut().zip(cols.iter().zip(ARKIT_CHANNELS)) {
            *c = table.float(line, rec, col, name)?;
        }
        let timestamp = match (ts_col, frame_col) {
            (Some(c), _) => table.float(line, rec, c, "timestamp_ms")?,
            (None, Some(c)) => table.float(line, rec, c, "frame")? * 1000.0 / opts.fps as f64,
            (None, None) => idx as f64 * 1000.0 / opts.fps as f64,
        };
        let pose = match pose_cols {
            Some(pc) if pc.iter().all(|&c| !Table::is_blank(rec, c)) => {
                let [y, p, r] = [(pc[0], "yaw"), (pc[1], "pitch"), (pc[2], "roll")]
                    .map(|(c, n)| table.float(line, rec, c, n));
                Some(HeadPose::new(y?, p?, r?).map_err(|e| row_context(line, e))?)
            }
            _ => None,
        };
        let (frame, n) = BlendshapeFrame::validated(coeffs, timestamp, pose, opts.validation)
            .map_err(|e| row_context(line, e))?;
        clamped += n;
        frames.push(frame);
    }
    check_timestamps(&frames).map_err(|e| match e {
        Error::NonMonotonicTimestamp { row } => Error::NonMonotonicTimestamp {
            row: table.rows[row].0,
        },
        other => other,
    })?;
    Ok(BlendshapeSequence { frames, clamped })
}

pub fn write_blendshape_csv(frames: &[BlendshapeFrame]) -> String {
    let with_pose = frames.iter().any(|f| f.pose().is_some());
    let mut out = String::from("frame,timestamp_ms,");
    out.push_str(&ARKIT_CHANNELS.join(","));
    if with_pose {
        out.push_str(",yaw,pitch,roll");
    }
    out.push('\n');
    for (i, f) in frames.iter().enumerate() {
        let _ = write!(out, "{i},{}", f.timestamp_ms());
        for c in f.coefficients() {
            let _ = write!(out, ",{c}");
        }
        if with_pose {
            match f.pose() {
                Some(p) => {
                    let _ = write!(out, ",{},{},{}", p.yaw(), p.pitch(), p.roll());
                }
                None => out.push_str(",,,"),
            }
        }
        out.push('\n');
    }
    out
}

/// Read a `frame,valence,arousal` file.
pub fn parse_va_csv(text: &str) -> Result<VaTrajectory> {
    let table = Table::parse(text)?;
    let v_col = table.require("valence")?;
    let a_col = table.require("arousal")?;
    let points = table
        .rows
        .iter()
        .map(|(line, rec)| {
            let v = table.float(*line, rec, v_col, "valence")?;
            let a = table.float(*line, rec, a_col, "arousal")?;
            VaPoint::new(v, a).map_err(|e| Error::Csv {
                row: *line,
                column: "valence/arousal".into(),
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    VaTrajectory::new(points)
}

pub fn write_va_csv(traj: &VaTrajectory) -> String {
    let mut out = String::from("frame,valence,arousal\n");
    for (i, p) in traj.points().iter().enumerate() {
        let _ = writeln!(out, "{i},{},{}", p.valence, p.arousal);
    }
    out
}

/// Read a paired dataset: the 52 channel columns plus `motor_00..motor_NN`.
pub fn parse_dataset_csv(text: &str) -> Result<PairedDataset> {
    let table = Table::parse(text)?;
    let cols = table.channel_columns()?;
    let motors = table.motor_columns()?;
    if motors.is_empty() {
        return Err(Error::MissingColumn(motor_column(0)));
    }
    let samples = table
        .rows
        .iter()
        .map(|(line, rec)| {
            let mut bs = [0.0; NUM_CHANNELS];
            for (b, (&col, name)) in bs.iter_mut().zip(cols.iter().zip(ARKIT_CHANNELS)) {
                *b = table.float(*line, rec, col, name)?;
            }
            let act = motors
                .iter()
                .enumerate()
                .map(|(i, &c)| table.float(*line, rec, c, &motor_column(i)))
                .collect::<Result<Vec<_>>>()?;
            let act = ActuatorVector::new(act).map_err(|e| row_context(*line, e))?;
            PairedSample::new(bs, act).map_err(|e| row_context(*line, e))
        })
        .collect::<Result<Vec<_>>>()?;
    PairedDataset::new(samples)
}

pub fn write_dataset_csv(ds: &PairedDataset) -> String {
    let mut out = String::from("frame,");
    out.push_str(&ARKIT_CHANNELS.join(","));
    for i in 0..ds.dof() {
        let _ = write!(out, ",{}", motor_column(i));
    }
    out.push('\n');
    for (i, s) in ds.samples().iter().enumerate() {
        let _ = write!(out, "{i}");
        for v in s.blendshapes().iter().chain(s.actuators().values()) {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

/// Read a `frame,motor_00,...` actuator sequence.
pub fn parse_actuator_csv(text: &str) -> Result<Vec<ActuatorVector>> {
    let table = Table::parse(text)?;
    let motors = table.motor_columns()?;
    if motors.is_empty() {
        return Err(Error::MissingColumn(motor_column(0)));
    }
    table
        .rows
        .iter()
        .map(|(line, rec)| {
            let v = motors
                .iter()
                .enumerate()
                .map(|(i, &c)| table.float(*line, rec, c, &motor_column(i)))
                .collect::<Result<Vec<_>>>()?;
            ActuatorVector::new(v).map_err(|e| row_context(*line, e))
        })
        .collect()
}

pub fn write_actuator_csv(seq: &[ActuatorVector]) -> String {
    let dof = seq.first().map_or(0, ActuatorVector::len);
    let mut out = String::from("frame");
    for i in 0..dof {
        let _ = write!(out, ",{}", motor_column(i));
    }
    out.push('\n');
    for (i, v) in seq.iter().enumerate() {
        let _ = write!(out, "{i}");
        for x in v.values() {
            let _ = write!(out, ",{x}");
        }
        out.push('\n');
    }
    out
}
