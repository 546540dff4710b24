use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{BlendshapeFrame, NUM_CHANNELS};

pub const DEFAULT_SIGMA: f64 = 1.0;

/// Temporal Gaussian filter applied per channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    /// Standard deviation in frames.
    pub sigma: f64,
    /// Half-window in frames; `None` means `ceil(3 * sigma)`.
    pub radius: Option<usize>,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            sigma: DEFAULT_SIGMA,
            radius: None,
        }
    }
}

impl SmoothingConfig {
    pub fn new(sigma: f64) -> Self {
        Self {
            sigma,
            radius: None,
        }
    }

    pub fn with_radius(sigma: f64, radius: usize) -> Self {
        Self {
            sigma,
            radius: Some(radius),
        }
    }

    pub fn effective_radius(&self) -> usize {
        self.radius
            .unwrap_or_else(|| (3.0 * self.sigma).ceil() as usize)
    }

    fn validate(&self) -> Result<()> {
        if self.sigma.is_nan() || self.sigma < 0.0 {
            return Err(Error::NegativeSigma(self.sigma));
        }
        if !self.sigma.is_finite() {
            return Err(Error::NonFinite("smoothing sigma".into()));
        }
        Ok(())
    }

    /// Normalized kernel of length `2 * radius + 1`. A zero sigma yields the
    /// unit impulse.
    pub fn kernel(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if self.sigma == 0.0 {
            return Ok(vec![1.0]);
        }
        let r = self.effective_radius() as isize;
        let denom = 2.0 * self.sigma * self.sigma;
        let mut k: Vec<f64> = (-r..=r)
            .map(|x| (-((x * x) as f64) / denom).exp())
            .collect();
        let sum: f64 = k.iter().sum();
        for w in &mut k {
            *w /= sum;
        }
        Ok(k)
    }
}

/// Mirror an out-of-range index back into `0..n` without repeating the edge
/// sample (`d c b | a b c d | c b a`).
pub(crate) fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - m) as usize
    }
}

/// Gaussian-smooth every channel of the sequence. Timestamps and poses are
/// carried through unchanged.
pub fn smooth_sequence(
    frames: &[BlendshapeFrame],
    cfg: &SmoothingConfig,
) -> Result<Vec<BlendshapeFrame>> {
    let kernel = cfg.kernel()?;
    if frames.is_empty() {
        return Err(Error::Empty("blendshape sequence"));
    }
    if kernel.len() == 1 {
        return Ok(frames.to_vec());
    }
    let n = frames.len();
    let r = (kernel.len() / 2) as isize;
    Ok((0..n)
        .map(|t| {
            let mut acc = [0.0; NUM_CHANNELS];
            for (k, w) in kernel.iter().enumerate() {
                let src = &frames[reflect_index(t as isize + k as isize - r, n)];
                for (a, c) in acc.iter_mut().zip(src.coefficients()) {
                    *a += w * c;
                }
            }
            frames[t].with_coefficients_clamped(acc)
        })
        .collect())
}
