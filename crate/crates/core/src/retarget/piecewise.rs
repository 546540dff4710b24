use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// One authored control point: at `intensity`, the semantic contributes
/// `delta` (offset from the rest pose) to every actuator.
#[derive(Debug, Clone, PartialEq)]
pub struct Anchor {
    pub intensity: f64,
    pub delta: Vec<f64>,
}

/// Piecewise-linear map from one semantic intensity to an actuator offset.
///
/// An implicit anchor `(0, 0)` precedes the stored anchors, so the map is
/// zero at neutral. Between anchors the offset is interpolated linearly;
/// above the last anchor it holds the last anchor's offset.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseMap {
    semantic: String,
    dof: usize,
    anchors: Vec<Anchor>,
    mask: BTreeSet<usize>,
}

impl PiecewiseMap {
    /// Build a map from offset anchors. Offset components outside `mask` are
    /// zeroed. Intensities must be strictly increasing within `(0, 1]`.
    pub fn new(
        semantic: impl Into<String>,
        dof: usize,
        anchors: Vec<Anchor>,
        mask: BTreeSet<usize>,
    ) -> Result<Self> {
        let semantic = semantic.into();
        if let Some(&bad) = mask.iter().find(|&&i| i >= dof) {
            return Err(Error::profile(
                format!("mappings.{semantic}.mask"),
                format!("actuator index {bad} >= dof {dof}"),
            ));
        }
        let mut prev = 0.0;
        let mut anchors = anchors;
        for (k, a) in anchors.iter_mut().enumerate() {
            let path = format!("mappings.{semantic}.anchors[{k}]");
            if !a.intensity.is_finite() || a.intensity <= 0.0 || a.intensity > 1.0 {
                return Err(Error::profile(
                    path,
                    format!(
                        "intensity {} must lie in (0, 1]; 0 is the implicit rest anchor",
                        a.intensity
                    ),
                ));
            }
            if a.intensity <= prev {
                return Err(Error::profile(
                    path,
                    format!(
                        "anchor intensities for `{semantic}` must strictly increase ({} after {prev})",
                        a.intensity
                    ),
                ));
            }
            prev = a.intensity;
            if a.delta.len() != dof {
                return Err(Error::profile(
                    path,
                    format!("pose has {} values, expected {dof}", a.delta.len()),
                ));
            }
            if a.delta.iter().any(|v| !v.is_finite()) {
                return Err(Error::profile(path, "non-finite pose value"));
            }
            for (i, d) in a.delta.iter_mut().enumerate() {
                if !mask.contains(&i) {
                    *d = 0.0;
                }
            }
        }
        Ok(Self {
            semantic,
            dof,
            anchors,
            mask,
        })
    }

    pub fn semantic(&self) -> &str {
        &self.semantic
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    pub fn mask(&self) -> &BTreeSet<usize> {
        &self.mask
    }

    /// Evaluate the offset vector at `beta`.
    pub fn eval(&self, beta: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dof];
        self.accumulate(beta, &mut out)?;
        Ok(out)
    }

    /// Add the offset at `beta` into `out`.
    pub fn accumulate(&self, beta: f64, out: &mut [f64]) -> Result<()> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::out_of_range(
                format!("intensity of `{}`", self.semantic),
                beta,
                0.0,
                1.0,
            ));
        }
        if out.len() != self.dof {
            return Err(Error::DimensionMismatch {
                expected: self.dof,
                found: out.len(),
            });
        }
        // first anchor strictly above beta
        let upper = self.anchors.partition_point(|a| a.intensity <= beta);
        if upper == self.anchors.len() {
            // at or beyond the last anchor (or no anchors at all)
            if let Some(last) = self.anchors.last() {
                for &i in &self.mask {
                    out[i] += last.delta[i];
                }
            }
            return Ok(());
        }
        let hi = &self.anchors[upper];
        let (lo_t, lo_delta) = match upper {
            0 => (0.0, None),
            k => (
                self.anchors[k - 1].intensity,
                Some(&self.anchors[k - 1].delta),
            ),
        };
        let t = (beta - lo_t) / (hi.intensity - lo_t);
        for &i in &self.mask {
            let lo = lo_delta.map_or(0.0, |d| d[i]);
            out[i] += lo + t * (hi.delta[i] - lo);
        }
        Ok(())
    }
}
