//! Blendshape-to-actuator retargeting.
//!
//! Each merged semantic intensity drives one [`PiecewiseMap`]; the offsets of
//! all semantics are summed onto the rest pose and clamped once. Head pose,
//! when present, overrides the neck motors.

mod piecewise;
mod profile;
mod smoothing;

use std::collections::BTreeMap;

use rayon::prelude::*;

pub use piecewise::{Anchor, PiecewiseMap};
pub use profile::{
    default_profile, default_profile_document, load_profile, AnchorPose, MappingSection, MergeRule,
    NeckAxis, NeckSection, ProfileDocument, RetargetProfile, RobotSection, Semantic, DEFAULT_FPS,
    MASK_THRESHOLD,
};
pub use smoothing::{smooth_sequence, SmoothingConfig, DEFAULT_SIGMA};

use crate::error::Result;
use crate::types::{clamp_unit, ActuatorVector, BlendshapeFrame, HeadPose};

/// Mean of the input channels of `semantic` in `frame`.
pub(crate) fn semantic_intensity(semantic: &Semantic, frame: &BlendshapeFrame) -> f64 {
    let c = frame.coefficients();
    let sum: f64 = semantic.inputs().iter().map(|&i| c[i]).sum();
    // mean of values in [0, 1] can drift past 1 by an ulp
    (sum / semantic.inputs().len() as f64).clamp(0.0, 1.0)
}

/// Collapse a frame into per-semantic intensities. Merge rules average their
/// inputs; excluded channels are dropped.
pub fn merge_channels(frame: &BlendshapeFrame, profile: &RetargetProfile) -> BTreeMap<String, f64> {
    profile
        .semantics()
        .iter()
        .map(|s| (s.name().to_string(), semantic_intensity(s, frame)))
        .collect()
}

/// Offset contributed by one map at `beta`.
pub fn eval_piecewise(map: &PiecewiseMap, beta: f64) -> Result<Vec<f64>> {
    map.eval(beta)
}

/// Neck motor commands for a head pose, as `(motor, value)` for yaw, pitch
/// and roll. Empty when the profile has no neck section.
pub fn map_head_pose(profile: &RetargetProfile, pose: &HeadPose) -> Vec<(usize, f64)> {
    let Some(neck) = profile.neck() else {
        return Vec::new();
    };
    [neck.yaw, neck.pitch, neck.roll]
        .iter()
        .zip(pose.angles())
        .map(|(axis, angle)| (axis.motor, (axis.rest + axis.gain * angle).clamp(0.0, 1.0)))
        .collect()
}

/// Rest pose plus the sum of every semantic's offset, clamped to `[0, 1]`.
pub fn retarget_frame(
    profile: &RetargetProfile,
    frame: &BlendshapeFrame,
) -> Result<ActuatorVector> {
    let mut m = profile.rest_pose().values().to_vec();
    for s in profile.semantics() {
        s.map().accumulate(semantic_intensity(s, frame), &mut m)?;
    }
    let mut m = clamp_unit(&m)?;
    if let Some(pose) = frame.pose() {
        for (motor, value) in map_head_pose(profile, &pose) {
            m[motor] = value;
        }
    }
    ActuatorVector::new(m)
}

/// Smooth the sequence, then retarget every frame.
pub fn retarget_sequence(
    profile: &RetargetProfile,
    frames: &[BlendshapeFrame],
    cfg: &SmoothingConfig,
) -> Result<Vec<ActuatorVector>> {
    let smoothed = smooth_sequence(frames, cfg)?;
    smoothed
        .par_iter()
        .map(|f| retarget_frame(profile, f))
        .collect()
}
