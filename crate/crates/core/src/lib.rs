//! Avatar-to-animatronic expression transfer.
//!
//! Blendshape sequences are smoothed, merged into semantic intensities and
//! mapped through authored piecewise-linear functions onto a robot's
//! actuators ([`retarget`]). Performances are scored by the area of their
//! valence-arousal hull ([`edr`]) and compared against random and
//! nearest-neighbour baselines ([`baselines`]). Motor sequences are
//! streamed with a small binary protocol ([`wire`], [`stream`]).

pub mod baselines;
pub mod calibration;
pub mod edr;
pub mod error;
pub mod formats;
pub mod plot;
pub mod retarget;
pub mod stream;
pub mod types;
pub mod wire;

pub use baselines::{nnr_baseline, random_baseline, PairedDataset, PairedSample};
pub use edr::{convex_hull, edr, polygon_area, trim_outliers, HullPolygon, VaTrajectory};
pub use error::{Error, Result};
pub use plot::emit_hull_geometry;
pub use retarget::{
    eval_piecewise, load_profile, map_head_pose, merge_channels, retarget_frame, retarget_sequence,
    smooth_sequence, PiecewiseMap, RetargetProfile, SmoothingConfig,
};
pub use stream::{stream_sequence, Sink, StreamReport};
pub use types::{
    channel_index, clamp_unit, ActuatorVector, BlendshapeFrame, HeadPose, VaPoint, Validation,
    ARKIT_CHANNELS, NUM_CHANNELS,
};
pub use wire::{decode_motor_frame, encode_motor_frame, MotorFrame};
