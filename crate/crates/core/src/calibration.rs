//! Anchor authoring session.
//!
//! The session edits a draft profile document: an operator picks a semantic
//! and intensity, poses the actuators by hand, and saves the pose as an
//! anchor. Saving at an intensity that already has an anchor replaces it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::retarget::{retarget_frame, AnchorPose, ProfileDocument, RetargetProfile};
use crate::types::{channel_index, ActuatorVector, BlendshapeFrame, HeadPose, NUM_CHANNELS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    #[default]
    Yaml,
    Json,
}

/// Full session state as pushed to clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub actuators: Vec<f64>,
    pub semantic: Option<String>,
    pub intensity: Option<f64>,
    pub anchors: BTreeMap<String, Vec<AnchorPose>>,
}

/// Named channel intensities for a preview; channels left out are 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PreviewRequest {
    #[serde(default)]
    pub coefficients: BTreeMap<String, f64>,
    #[serde(default)]
    pub pose: Option<[f64; 3]>,
}

impl PreviewRequest {
    pub fn to_frame(&self) -> Result<BlendshapeFrame> {
        let mut c = [0.0; NUM_CHANNELS];
        for (name, &v) in &self.coefficients {
            c[channel_index(name)?] = v;
        }
        let pose = self
            .pose
            .map(|[y, p, r]| HeadPose::new(y, p, r))
            .transpose()?;
        BlendshapeFrame::new(c, 0.0, pose)
    }
}

#[derive(Debug, Clone)]
pub struct CalibrationSession {
    draft: ProfileDocument,
    profile: RetargetProfile,
    live: Vec<f64>,
    selected: Option<(String, f64)>,
}

impl CalibrationSession {
    /// Start from a draft. Mapped semantics may have no anchors yet.
    pub fn new(draft: ProfileDocument) -> Result<Self> {
        let profile = RetargetProfile::from_draft(&draft)?;
        let live = profile.rest_pose().values().to_vec();
        Ok(Self {
            draft,
            profile,
            live,
            selected: None,
        })
    }

    pub fn dof(&self) -> usize {
        self.profile.dof()
    }

    pub fn draft(&self) -> &ProfileDocument {
        &self.draft
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            actuators: self.live.clone(),
            semantic: self.selected.as_ref().map(|(s, _)| s.clone()),
            intensity: self.selected.as_ref().map(|(_, t)| *t),
            anchors: self
                .draft
                .mappings
                .iter()
                .map(|(k, m)| (k.clone(), m.anchors.clone()))
                .collect(),
        }
    }

    /// Set one live actuator, clamped into `[0, 1]`. Returns the stored value.
    pub fn set_actuator(&mut self, index: usize, value: f64) -> Result<f64> {
        if index >= self.live.len() {
            return Err(Error::Calibration(format!(
                "actuator index {index} >= dof {}",
                self.live.len()
            )));
        }
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("actuator {index}")));
        }
        let v = value.clamp(0.0, 1.0);
        self.live[index] = v;
        Ok(v)
    }

    /// Put every live actuator back at the rest pose.
    pub fn reset(&mut self) {
        self.live = self.profile.rest_pose().values().to_vec();
    }

    pub fn select(&mut self, semantic: &str, intensity: f64) -> Result<()> {
        if !self.draft.mappings.contains_key(semantic) {
            return Err(Error::UnknownSemantic(semantic.to_string()));
        }
        if !(0.0..=1.0).contains(&intensity) {
            return Err(Error::out_of_range("intensity", intensity, 0.0, 1.0));
        }
        self.selected = Some((semantic.to_string(), intensity));
        Ok(())
    }

    /// Actuators the draft profile produces for `req`.
    pub fn preview(&self, req: &PreviewRequest) -> Result<ActuatorVector> {
        retarget_frame(&self.profile, &req.to_frame()?)
    }

    /// Record the live actuators as the anchor for the selected semantic and
    /// intensity.
    pub fn save_anchor(&mut self) -> Result<()> {
        let (semantic, intensity) = self
            .selected
            .clone()
            .ok_or_else(|| Error::Calibration("no semantic selected".into()))?;
        if intensity <= 0.0 {
            return Err(Error::Calibration(
                "intensity 0 is the rest pose and cannot hold an anchor".into(),
            ));
        }
        let mut draft = self.draft.clone();
        let anchors = &mut draft
            .mappings
            .get_mut(&semantic)
            .ok_or_else(|| Error::UnknownSemantic(semantic.clone()))?
            .anchors;
        let pose = AnchorPose {
            intensity,
            pose: self.live.clone(),
        };
        match anchors.iter().position(|a| a.intensity == intensity) {
            Some(i) => anchors[i] = pose,
            None => {
                anchors.push(pose);
                anchors.sort_by(|a, b| a.intensity.total_cmp(&b.intensity));
            }
        }
        self.profile = RetargetProfile::from_draft(&draft)?;
        self.draft = draft;
        Ok(())
    }

    /// Serialize the draft. Fails if any mapped semantic still has no anchors.
    pub fn export_profile(&self, format: ExportFormat) -> Result<String> {
        RetargetProfile::from_document(&self.draft)?;
        Ok(match format {
            ExportFormat::Yaml => self.draft.to_yaml(),
            ExportFormat::Json => self.draft.to_json(),
        })
    }
}
