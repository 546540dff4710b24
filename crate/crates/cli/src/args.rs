use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use singingbot_core::edr::DEFAULT_TRIM_FRACTION;
use singingbot_core::retarget::DEFAULT_SIGMA;
use singingbot_core::Validation;

#[derive(Debug, Parser)]
#[command(
    name = "singingbot",
    version,
    about = "Blendshape-to-animatronic retargeting tools"
)]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Globals {
    /// Robot profile (YAML or JSON). Defaults to the bundled 32-actuator profile.
    #[arg(long, global = true, env = "SINGINGBOT_PROFILE")]
    pub profile: Option<PathBuf>,

    /// Frame rate for timestamp derivation and streaming. Defaults to the
    /// profile's rate.
    #[arg(long, global = true)]
    pub fps: Option<u32>,

    /// Gaussian smoothing sigma in frames; 0 disables smoothing.
    #[arg(long, global = true, default_value_t = DEFAULT_SIGMA)]
    pub sigma: f64,

    /// Seed for the random baseline.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Fraction of VA points dropped as outliers before the hull.
    #[arg(long, global = true, default_value_t = DEFAULT_TRIM_FRACTION)]
    pub trim_fraction: f64,

    /// Reject coefficients outside [0, 1] (default).
    #[arg(long, global = true, conflicts_with = "lenient")]
    pub strict: bool,

    /// Clamp coefficients outside [0, 1] instead of rejecting them.
    #[arg(long, global = true)]
    pub lenient: bool,
}

impl Globals {
    pub fn validation(&self) -> Validation {
        if self.lenient {
            Validation::Lenient
        } else {
            Validation::Strict
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smooth and retarget a blendshape CSV to a motor CSV.
    Retarget {
        #[arg(long, short)]
        input: PathBuf,
        /// Motor CSV path; stdout when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Produce a motor sequence with a retrieval baseline.
    Baseline {
        #[command(subcommand)]
        kind: BaselineKind,
    },
    /// Emotion dynamic range of one or more VA trajectories.
    Edr {
        /// VA CSV files (`frame,valence,arousal`).
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Write an SVG hull plot here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Run ours, RT and NNR on one clip and tabulate EDR per method.
    Compare {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// VA trajectory per method as `name=path`; repeatable.
        #[arg(long = "va", value_parser = parse_named_path, required = true)]
        va: Vec<(String, PathBuf)>,
        #[arg(long, short)]
        output: PathBuf,
        /// Feed NNR the raw instead of the smoothed blendshapes.
        #[arg(long)]
        raw_nnr: bool,
    },
    /// Play a motor CSV at the frame rate over UDP, or dump it to a file.
    Stream {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        udp: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Serve the calibration API and UI.
    Calibrate {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Directory with the built UI bundle.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BaselineKind {
    /// Uniform random draws from the dataset.
    Rt {
        #[arg(long)]
        dataset: PathBuf,
        /// Blendshape clip whose length sets the frame count.
        #[arg(long, short, required_unless_present = "frames")]
        input: Option<PathBuf>,
        #[arg(long, conflicts_with = "input")]
        frames: Option<usize>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Nearest dataset sample per frame.
    Nnr {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Query with the raw instead of the smoothed blendshapes.
        #[arg(long)]
        raw: bool,
    },
}

fn parse_named_path(s: &str) -> Result<(String, PathBuf), String> {
    let (name, path) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=path, got `{s}`"))?;
    if name.is_empty() || path.is_empty() {
        return Err(format!("expected name=path, got `{s}`"));
    }
    Ok((name.to_string(), PathBuf::from(path)))
}
