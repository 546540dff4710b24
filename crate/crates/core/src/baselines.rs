//! Retrieval baselines over a paired (blendshape, actuator) dataset.
//!
//! The random baseline draws sample indices with `ChaCha8Rng` seeded through
//! `SeedableRng::seed_from_u64`, using `rand` 0.9 uniform range sampling.
//! Both are portable, so a seed reproduces the same sequence everywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{
    validate_coefficients, ActuatorVector, BlendshapeFrame, Validation, NUM_CHANNELS,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    blendshapes: [f64; NUM_CHANNELS],
    actuators: ActuatorVector,
}

impl PairedSample {
    pub fn new(mut blendshapes: [f64; NUM_CHANNELS], actuators: ActuatorVector) -> Result<Self> {
        validate_coefficients(&mut blendshapes, Validation::Strict)?;
        Ok(Self {
            blendshapes,
            actuators,
        })
    }

    pub fn blendshapes(&self) -> &[f64; NUM_CHANNELS] {
        &self.blendshapes
    }

    pub fn actuators(&self) -> &ActuatorVector {
        &self.actuators
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedDataset {
    samples: Vec<PairedSample>,
    dof: usize,
}

impl PairedDataset {
    pub fn new(samples: Vec<PairedSample>) -> Result<Self> {
        let dof = samples
            .first()
            .ok_or(Error::Empty("paired dataset"))?
            .actuators
            .len();
        for s in &samples {
            s.actuators.check_dof(dof)?;
        }
        Ok(Self { samples, dof })
    }

    pub fn samples(&self) -> &[PairedSample] {
        &self.samples
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Index of the sample whose blendshapes are nearest `query` in L2,
    /// lowest index on ties.
    pub fn nearest(&self, query: &[f64; NUM_CHANNELS]) -> usize {
        let mut best = f64::INFINITY;
        let mut best_idx = 0;
        for (i, s) in self.samples.iter().enumerate() {
            // partial sums only grow, so a partial sum already above the
            // best can never win or tie
            let mut d = 0.0;
            for (a, b) in s.blendshapes.iter().zip(query) {
                let diff = a - b;
                d += diff * diff;
                if d > best {
                    break;
                }
            }
            if d < best {
                best = d;
                best_idx = i;
            }
        }
        best_idx
    }
}

/// Sample indices drawn by [`random_baseline`] for `seed`.
pub fn random_indices(n: usize, frames: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..frames).map(|_| rng.random_range(0..n)).collect()
}

/// `frames` actuator vectors drawn uniformly with replacement.
pub fn random_baseline(
    ds: &PairedDataset,
    frames: usize,
    seed: u64,
) -> Result<Vec<ActuatorVector>> {
    if frames == 0 {
        return Err(Error::Empty("frame count"));
    }
    Ok(random_indices(ds.len(), frames, seed)
        .into_iter()
        .map(|i| ds.samples[i].actuators.clone())
        .collect())
}

/// Per frame, the actuators of the nearest sample by blendshape distance.
pub fn nnr_baseline(ds: &PairedDataset, frames: &[BlendshapeFrame]) -> Result<Vec<ActuatorVector>> {
    if frames.is_empty() {
        return Err(Error::Empty("blendshape sequence"));
    }
    Ok(frames
        .par_iter()
        .map(|f| ds.samples[ds.nearest(f.coefficients())].actuators.clone())
        .collect())
}
