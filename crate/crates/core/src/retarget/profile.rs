//! Retarget profile documents and their validated in-memory form.
//!
//! A document stores *absolute* actuator poses for every anchor, the way an
//! animator authors them on hardware. Loading subtracts the rest pose and
//! applies the per-semantic actuator mask, producing offset anchors that can
//! be summed across semantics without double counting.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::piecewise::{Anchor, PiecewiseMap};
use crate::error::{Error, Result};
use crate::types::{channel_index, ActuatorVector, ARKIT_CHANNELS, NUM_CHANNELS};

/// Offsets at or below this magnitude do not put an actuator in a
/// semantic's default mask.
pub const MASK_THRESHOLD: f64 = 1e-4;

pub const DEFAULT_FPS: u32 = 25;

const DEFAULT_PROFILE_YAML: &str = include_str!("../../profiles/default.yaml");

fn default_fps() -> u32 {
    DEFAULT_FPS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDocument {
    pub robot: RobotSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neck: Option<NeckSection>,
    #[serde(default)]
    pub merges: Vec<MergeRule>,
    #[serde(default)]
    pub excluded: Vec<String>,
    pub mappings: BTreeMap<String, MappingSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotSection {
    pub dof: usize,
    pub rest_pose: Vec<f64>,
    #[serde(default = "default_fps")]
    pub fps: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeckSection {
    pub yaw: NeckAxis,
    pub pitch: NeckAxis,
    pub roll: NeckAxis,
}

/// Affine map from one head angle (radians) to one neck motor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeckAxis {
    pub motor: usize,
    pub gain: f64,
    pub rest: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MergeRule {
    pub output: String,
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingSection {
    #[serde(default)]
    pub anchors: Vec<AnchorPose>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorPose {
    pub intensity: f64,
    pub pose: Vec<f64>,
}

impl ProfileDocument {
    /// Parse YAML or JSON text (JSON is accepted by the YAML parser).
    pub fn parse(text: &str) -> Result<Self> {
        let de = serde_yaml::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::profile(path, e.into_inner().to_string())
        })
    }

    pub fn to_yaml(&self) -> String {
        serde_yaml::to_string(self).expect("profile documents always serialize")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile documents always serialize")
    }
}

/// One merged input feeding one piecewise map.
#[derive(Debug, Clone, PartialEq)]
pub struct Semantic {
    pub(crate) inputs: Vec<usize>,
    pub(crate) map: PiecewiseMap,
}

impl Semantic {
    pub fn name(&self) -> &str {
        self.map.semantic()
    }

    /// Channel indices averaged into this semantic's intensity.
    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn map(&self) -> &PiecewiseMap {
        &self.map
    }
}

/// Validated, immutable retarget configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RetargetProfile {
    dof: usize,
    fps: u32,
    rest_pose: ActuatorVector,
    semantics: Vec<Semantic>,
    merges: Vec<MergeRule>,
    excluded: Vec<usize>,
    neck: Option<NeckSection>,
}

/// Parse and validate a profile document.
pub fn load_profile(text: &str) -> Result<RetargetProfile> {
    RetargetProfile::from_document(&ProfileDocument::parse(text)?)
}

/// The bundled 32-actuator profile (29 facial motors, neck on 29..31).
pub fn default_profile_document() -> ProfileDocument {
    ProfileDocument::parse(DEFAULT_PROFILE_YAML).expect("bundled profile parses")
}

pub fn default_profile() -> RetargetProfile {
    RetargetProfile::from_document(&default_profile_document()).expect("bundled profile is valid")
}

impl RetargetProfile {
    pub fn from_document(doc: &ProfileDocument) -> Result<Self> {
        Self::build(doc, false)
    }

    /// Like [`from_document`](Self::from_document) but tolerates mapped
    /// semantics with no anchors yet (they contribute nothing). Used for
    /// drafts under calibration.
    pub fn from_draft(doc: &ProfileDocument) -> Result<Self> {
        Self::build(doc, true)
    }

    fn build(doc: &ProfileDocument, allow_empty: bool) -> Result<Self> {
        let dof = doc.robot.dof;
        if dof == 0 {
            return Err(Error::profile("robot.dof", "must be at least 1"));
        }
        if doc.robot.fps == 0 {
            return Err(Error::profile("robot.fps", "must be positive"));
        }
        if doc.robot.rest_pose.len() != dof {
            return Err(Error::profile(
                "robot.rest_pose",
                format!(
                    "has {} values, expected dof = {dof}",
                    doc.robot.rest_pose.len()
                ),
            ));
        }
        let rest_pose = ActuatorVector::new(doc.robot.rest_pose.clone())
            .map_err(|e| Error::profile("robot.rest_pose", e.to_string()))?;

        if let Some(neck) = &doc.neck {
            let mut motors = BTreeSet::new();
            for (axis, a) in [
                ("yaw", neck.yaw),
                ("pitch", neck.pitch),
                ("roll", neck.roll),
            ] {
                if a.motor >= dof {
                    return Err(Error::profile(
                        format!("neck.{axis}.motor"),
                        format!("motor {} >= dof {dof}", a.motor),
                    ));
                }
                if !motors.insert(a.motor) {
                    return Err(Error::profile(
                        format!("neck.{axis}.motor"),
                        format!("motor {} already used by another axis", a.motor),
                    ));
                }
                if !a.gain.is_finite() {
                    return Err(Error::profile(
                        format!("neck.{axis}.gain"),
                        "must be finite",
                    ));
                }
                if !(0.0..=1.0).contains(&a.rest) {
                    return Err(Error::profile(
                        format!("neck.{axis}.rest"),
                        format!("{} is outside [0, 1]", a.rest),
                    ));
                }
            }
        }

        // where each channel is accounted for
        let mut owner: [Option<String>; NUM_CHANNELS] = std::array::from_fn(|_| None);
        let mut claim = |name: &str, path: String, what: String| -> Result<usize> {
            let idx = channel_index(name).map_err(|e| Error::profile(&path, e.to_string()))?;
            if let Some(prev) = &owner[idx] {
                return Err(Error::profile(
                    path,
                    format!("channel `{name}` already accounted for as {prev}"),
                ));
            }
            owner[idx] = Some(what);
            Ok(idx)
        };

        let mut merge_inputs: BTreeMap<&str, (usize, Vec<usize>)> = BTreeMap::new();
        for (i, rule) in doc.merges.iter().enumerate() {
            if rule.inputs.is_empty() {
                return Err(Error::profile(
                    format!("merges[{i}].inputs"),
                    "must not be empty",
                ));
            }
            if channel_index(&rule.output).is_ok() {
                return Err(Error::profile(
                    format!("merges[{i}].output"),
                    format!("`{}` collides with a blendshape channel name", rule.output),
                ));
            }
            let mut idxs = Vec::with_capacity(rule.inputs.len());
            for (j, input) in rule.inputs.iter().enumerate() {
                idxs.push(claim(
                    input,
                    format!("merges[{i}].inputs[{j}]"),
                    format!("an input of merge `{}`", rule.output),
                )?);
            }
            if merge_inputs.insert(&rule.output, (i, idxs)).is_some() {
                return Err(Error::profile(
                    format!("merges[{i}].output"),
                    format!("duplicate merge output `{}`", rule.output),
                ));
            }
        }

        let mut excluded = Vec::with_capacity(doc.excluded.len());
        for (i, name) in doc.excluded.iter().enumerate() {
            excluded.push(claim(name, format!("excluded[{i}]"), "excluded".into())?);
        }

        let mut semantics = Vec::with_capacity(doc.mappings.len());
        for (name, section) in &doc.mappings {
            let path = format!("mappings.{name}");
            let inputs = match merge_inputs.get(name.as_str()) {
                Some((_, idxs)) => idxs.clone(),
                None => vec![claim(name, path.clone(), "a direct mapping".into())?],
            };
            if section.anchors.is_empty() && !allow_empty {
                return Err(Error::profile(
                    format!("{path}.anchors"),
                    format!("semantic `{name}` has no anchors"),
                ));
            }
            let map = build_map(name, section, &doc.robot.rest_pose)?;
            semantics.push(Semantic { inputs, map });
        }

        for (output, (i, _)) in &merge_inputs {
            if !doc.mappings.contains_key(*output) {
                return Err(Error::profile(
                    format!("merges[{i}].output"),
                    format!("merge output `{output}` has no mapping"),
                ));
            }
        }

        if let Some(missing) = owner.iter().position(Option::is_none) {
            return Err(Error::profile(
                "mappings",
                format!(
                    "channel `{}` is not mapped, merged, or excluded",
                    ARKIT_CHANNELS[missing]
                ),
            ));
        }

        Ok(Self {
            dof,
            fps: doc.robot.fps,
            rest_pose,
            semantics,
            merges: doc.merges.clone(),
            excluded,
            neck: doc.neck,
        })
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn fps(&self) -> u32 {
        self.fps
    }

    pub fn rest_pose(&self) -> &ActuatorVector {
        &self.rest_pose
    }

    pub fn semantics(&self) -> &[Semantic] {
        &self.semantics
    }

    pub fn semantic(&self, name: &str) -> Option<&Semantic> {
        self.semantics.iter().find(|s| s.name() == name)
    }

    pub fn merges(&self) -> &[MergeRule] {
        &self.merges
    }

    /// Excluded channel indices.
    pub fn excluded(&self) -> &[usize] {
        &self.excluded
    }

    pub fn neck(&self) -> Option<&NeckSection> {
        self.neck.as_ref()
    }

    /// Serialize back to a document with absolute anchor poses and explicit
    /// masks.
    pub fn to_document(&self) -> ProfileDocument {
        let rest = self.rest_pose.values();
        let mappings = self
            .semantics
            .iter()
            .map(|s| {
                let anchors = s
                    .map
                    .anchors()
                    .iter()
                    .map(|a| AnchorPose {
                        intensity: a.intensity,
                        pose: rest.iter().zip(&a.delta).map(|(r, d)| r + d).collect(),
                    })
                    .collect();
                let section = MappingSection {
                    anchors,
                    mask: Some(s.map.mask().iter().copied().collect()),
                };
                (s.name().to_string(), section)
            })
            .collect();
        ProfileDocument {
            robot: RobotSection {
                dof: self.dof,
                rest_pose: rest.to_vec(),
                fps: self.fps,
            },
            neck: self.neck,
            merges: self.merges.clone(),
            excluded: self
                .excluded
                .iter()
                .map(|&i| ARKIT_CHANNELS[i].to_string())
                .collect(),
            mappings,
        }
    }
}

fn build_map(name: &str, section: &MappingSection, rest: &[f64]) -> Result<PiecewiseMap> {
    let dof = rest.len();
    for (k, a) in section.anchors.iter().enumerate() {
        let path = format!("mappings.{name}.anchors[{k}].pose");
        if a.pose.len() != dof {
            return Err(Error::profile(
                path,
                format!("has {} values, expected dof = {dof}", a.pose.len()),
            ));
        }
        if let Some(v) = a.pose.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::profile(path, format!("value {v} is outside [0, 1]")));
        }
    }
    let mask: BTreeSet<usize> = match &section.mask {
        Some(m) => m.iter().copied().collect(),
        None => (0..dof)
            .filter(|&i| {
                section
                    .anchors
                    .iter()
                    .any(|a| (a.pose[i] - rest[i]).abs() > MASK_THRESHOLD)
            })
            .collect(),
    };
    let anchors = section
        .anchors
        .iter()
        .map(|a| Anchor {
            intensity: a.intensity,
            delta: a.pose.iter().zip(rest).map(|(p, r)| p - r).collect(),
        })
        .collect();
    PiecewiseMap::new(name, dof, anchors, mask)
}
