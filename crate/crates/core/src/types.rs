//! Domain value types shared by every stage of the pipeline.
//!
//! All types here are immutable once constructed: validation happens in the
//! constructors, so a value that exists satisfies its range invariants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of ARKit blendshape channels.
pub const NUM_CHANNELS: usize = 52;

/// Canonical ARKit channel ordering. Input files are keyed by these names and
/// reordered into this layout on load.
pub const ARKIT_CHANNELS: [&str; NUM_CHANNELS] = [
    "eyeBlinkLeft",
    "eyeLookDownLeft",
    "eyeLookInLeft",
    "eyeLookOutLeft",
    "eyeLookUpLeft",
    "eyeSquintLeft",
    "eyeWideLeft",
    "eyeBlinkRight",
    "eyeLookDownRight",
    "eyeLookInRight",
    "eyeLookOutRight",
    "eyeLookUpRight",
    "eyeSquintRight",
    "eyeWideRight",
    "jawForward",
    "jawLeft",
    "jawRight",
    "jawOpen",
    "mouthClose",
    "mouthFunnel",
    "mouthPucker",
    "mouthLeft",
    "mouthRight",
    "mouthSmileLeft",
    "mouthSmileRight",
    "mouthFrownLeft",
    "mouthFrownRight",
    "mouthDimpleLeft",
    "mouthDimpleRight",
    "mouthStretchLeft",
    "mouthStretchRight",
    "mouthRollLower",
    "mouthRollUpper",
    "mouthShrugLower",
    "mouthShrugUpper",
    "mouthPressLeft",
    "mouthPressRight",
    "mouthLowerDownLeft",
    "mouthLowerDownRight",
    "mouthUpperUpLeft",
    "mouthUpperUpRight",
    "browDownLeft",
    "browDownRight",
    "browInnerUp",
    "browOuterUpLeft",
    "browOuterUpRight",
    "cheekPuff",
    "cheekSquintLeft",
    "cheekSquintRight",
    "noseSneerLeft",
    "noseSneerRight",
    "tongueOut",
];

/// Position of `name` in [`ARKIT_CHANNELS`].
pub fn channel_index(name: &str) -> Result<usize> {
    ARKIT_CHANNELS
        .iter()
        .position(|c| *c == name)
        .ok_or_else(|| Error::UnknownChannel(name.to_string()))
}

/// Clamp every component into `[0, 1]`. Non-finite input is rejected rather
/// than silently mapped to an endpoint.
pub fn clamp_unit(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v.is_finite() {
                Ok(v.clamp(0.0, 1.0))
            } else {
                Err(Error::NonFinite(format!("component {i}")))
            }
        })
        .collect()
}

/// How out-of-range blendshape coefficients are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validation {
    /// Any coefficient outside `[0, 1]` is an error.
    #[default]
    Strict,
    /// Coefficients are clamped and the number of clamped values is reported.
    Lenient,
}

/// Validate coefficients in place. Returns how many values were clamped
/// (always 0 in strict mode).
pub fn validate_coefficients(values: &mut [f64], mode: Validation) -> Result<usize> {
    let mut clamped = 0;
    for (i, v) in values.iter_mut().enumerate() {
        let name = ARKIT_CHANNELS.get(i).copied().unwrap_or("?");
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("channel {name}")));
        }
        if !(0.0..=1.0).contains(v) {
            match mode {
                Validation::Strict => return Err(Error::out_of_range(name, *v, 0.0, 1.0)),
                Validation::Lenient => {
                    *v = v.clamp(0.0, 1.0);
                    clamped += 1;
                }
            }
        }
    }
    Ok(clamped)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HeadPose {
    yaw: f64,
    pitch: f64,
    roll: f64,
}

impl HeadPose {
    pub fn new(yaw: f64, pitch: f64, roll: f64) -> Result<Self> {
        for (name, v) in [("yaw", yaw), ("pitch", pitch), ("roll", roll)] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name.to_string()));
            }
            if v.abs() > std::f64::consts::PI {
                return Err(Error::out_of_range(
                    name,
                    v,
                    -std::f64::consts::PI,
                    std::f64::consts::PI,
                ));
            }
        }
        Ok(Self { yaw, pitch, roll })
    }

    pub fn yaw(&self) -> f64 {
        self.yaw
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn roll(&self) -> f64 {
        self.roll
    }

    pub fn angles(&self) -> [f64; 3] {
        [self.yaw, self.pitch, self.roll]
    }
}

/// One video frame of blendshape coefficients in canonical ARKit order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlendshapeFrame {
    coefficients: [f64; NUM_CHANNELS],
    timestamp_ms: f64,
    pose: Option<HeadPose>,
}

impl BlendshapeFrame {
    /// Strictly validated constructor.
    pub fn new(
        coefficients: [f64; NUM_CHANNELS],
        timestamp_ms: f64,
        pose: Option<HeadPose>,
    ) -> Result<Self> {
        Self::validated(coefficients, timestamp_ms, pose, Validation::Strict).map(|(f, _)| f)
    }

    /// Construct with the given validation mode, returning the frame and the
    /// number of coefficients that were clamped.
    pub fn validated(
        mut coefficients: [f64; NUM_CHANNELS],
        timestamp_ms: f64,
        pose: Option<HeadPose>,
        mode: Validation,
    ) -> Result<(Self, usize)> {
        if !timestamp_ms.is_finite() {
            return Err(Error::NonFinite("timestamp".into()));
        }
        let clamped = validate_coefficients(&mut coefficients, mode)?;
        Ok((
            Self {
                coefficients,
                timestamp_ms,
                pose,
            },
            clamped,
        ))
    }

    /// All-zero frame.
    pub fn neutral(timestamp_ms: f64) -> Self {
        Self {
            coefficients: [0.0; NUM_CHANNELS],
            timestamp_ms,
            pose: None,
        }
    }

    /// Copy of this frame with one channel replaced.
    pub fn with(mut self, name: &str, value: f64) -> Result<Self> {
        let idx = channel_index(name)?;
        let mut probe = [value];
        validate_coefficients(&mut probe, Validation::Strict)
            .map_err(|_| Error::out_of_range(name, value, 0.0, 1.0))?;
        self.coefficients[idx] = value;
        Ok(self)
    }

    pub fn with_pose(mut self, pose: Option<HeadPose>) -> Self {
        self.pose = pose;
        self
    }

    pub fn coefficients(&self) -> &[f64; NUM_CHANNELS] {
        &self.coefficients
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(self.coefficients[channel_index(name)?])
    }

    pub fn timestamp_ms(&self) -> f64 {
        self.timestamp_ms
    }

    pub fn pose(&self) -> Option<HeadPose> {
        self.pose
    }

    /// Replace the coefficients, keeping timestamp and pose. Values are
    /// clamped into `[0, 1]`.
    pub(crate) fn with_coefficients_clamped(&self, coefficients: [f64; NUM_CHANNELS]) -> Self {
        let mut c = coefficients;
        for v in &mut c {
            *v = v.clamp(0.0, 1.0);
        }
        Self {
            coefficients: c,
            timestamp_ms: self.timestamp_ms,
            pose: self.pose,
        }
    }
}

/// Check the sequence-level invariant that timestamps strictly increase.
pub fn check_timestamps(frames: &[BlendshapeFrame]) -> Result<()> {
    for (row, w) in frames.windows(2).enumerate() {
        if w[1].timestamp_ms <= w[0].timestamp_ms {
            return Err(Error::NonMonotonicTimestamp { row: row + 1 });
        }
    }
    Ok(())
}

/// Normalized motor positions, one per actuator.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ActuatorVector(Vec<f64>);

impl ActuatorVector {
    /// Rejects values outside `[0, 1]`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("actuator {i}")));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::out_of_range(format!("actuator {i}"), v, 0.0, 1.0));
            }
        }
        Ok(Self(values))
    }

    /// Clamps into `[0, 1]`; only non-finite values are errors.
    pub fn clamped(values: &[f64]) -> Result<Self> {
        clamp_unit(values).map(Self)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check_dof(&self, dof: usize) -> Result<()> {
        if self.0.len() != dof {
            return Err(Error::DimensionMismatch {
                expected: dof,
                found: self.0.len(),
            });
        }
        Ok(())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// One point in valence-arousal space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VaPoint {
    pub valence: f64,
    pub arousal: f64,
}

impl VaPoint {
    pub fn new(valence: f64, arousal: f64) -> Result<Self> {
        for (name, v) in [("valence", valence), ("arousal", arousal)] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name.to_string()));
            }
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::out_of_range(name, v, -1.0, 1.0));
            }
        }
        Ok(Self { valence, arousal })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn channel_index_examples() {
        assert_eq!(channel_index("eyeBlinkLeft").unwrap(), 0);
        assert_eq!(channel_index("jawOpen").unwrap(), 17);
        assert_eq!(channel_index("tongueOut").unwrap(), 51);
    }

    #[test]
    fn unknown_channel_names_offender() {
        let err = channel_index("jawOpn").unwrap_err();
        assert!(err.to_string().contains("jawOpn"));
    }

    #[test]
    fn channel_index_is_bijective() {
        let mut seen = [false; NUM_CHANNELS];
        for name in ARKIT_CHANNELS {
            let i = channel_index(name).unwrap();
            assert!(!seen[i]);
            seen[i] = true;
            assert_eq!(ARKIT_CHANNELS[i], name);
        }
        assert!(seen.iter().all(|s| *s));
    }

    #[test]
    fn clamp_unit_examples() {
        assert_eq!(clamp_unit(&[0.2, 0.8]).unwrap(), vec![0.2, 0.8]);
        assert_eq!(clamp_unit(&[-0.3, 1.7]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(clamp_unit(&[1.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        assert!(clamp_unit(&[0.1, f64::NAN]).is_err());
        assert!(clamp_unit(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn strict_rejects_lenient_counts() {
        let mut c = [0.0; NUM_CHANNELS];
        c[17] = 1.2;
        c[3] = -0.1;
        assert!(BlendshapeFrame::new(c, 0.0, None).is_err());
        let (f, n) = BlendshapeFrame::validated(c, 0.0, None, Validation::Lenient).unwrap();
        assert_eq!(n, 2);
        assert_eq!(f.coefficients()[17], 1.0);
        assert_eq!(f.coefficients()[3], 0.0);
    }

    #[test]
    fn head_pose_bounds() {
        assert!(HeadPose::new(0.1, -0.2, 3.0).is_ok());
        assert!(HeadPose::new(3.2, 0.0, 0.0).is_err());
        assert!(HeadPose::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn va_point_bounds() {
        assert!(VaPoint::new(-1.0, 1.0).is_ok());
        assert!(VaPoint::new(1.01, 0.0).is_err());
    }

    #[test]
    fn actuator_vector_checks() {
        assert!(ActuatorVector::new(vec![0.0, 1.0, 0.5]).is_ok());
        assert!(ActuatorVector::new(vec![1.5]).is_err());
        let v = ActuatorVector::clamped(&[1.5, -2.0]).unwrap();
        assert_eq!(v.values(), &[1.0, 0.0]);
        assert!(v.check_dof(3).is_err());
    }

    #[test]
    fn timestamps_must_increase() {
        let frames = vec![
            BlendshapeFrame::neutral(0.0),
            BlendshapeFrame::neutral(40.0),
            BlendshapeFrame::neutral(40.0),
        ];
        assert!(matches!(
            check_timestamps(&frames),
            Err(Error::NonMonotonicTimestamp { row: 2 })
        ));
    }

    proptest! {
        #[test]
        fn clamp_is_idempotent(v in prop::collection::vec(-5.0f64..5.0, 0..40)) {
            let once = clamp_unit(&v).unwrap();
            let twice = clamp_unit(&once).unwrap();
            prop_assert_eq!(once.len(), v.len());
            prop_assert_eq!(once, twice);
        }
    }
}
