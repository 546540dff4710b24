//! Benchmark fixtures. The benches themselves live in `benches/`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use singingbot_core::{
    ActuatorVector, BlendshapeFrame, PairedDataset, PairedSample, VaPoint, NUM_CHANNELS,
};

pub fn random_frames(n: usize, seed: u64) -> Vec<BlendshapeFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let c: [f64; NUM_CHANNELS] = std::array::from_fn(|_| rng.random::<f64>());
            BlendshapeFrame::new(c, i as f64 * 40.0, None).unwrap()
        })
        .collect()
}

pub fn random_dataset(n: usize, dof: usize, seed: u64) -> PairedDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..n)
        .map(|_| {
            let bs: [f64; NUM_CHANNELS] = std::array::from_fn(|_| rng.random::<f64>());
            let act = (0..dof).map(|_| rng.random::<f64>()).collect();
            PairedSample::new(bs, ActuatorVector::new(act).unwrap()).unwrap()
        })
        .collect();
    PairedDataset::new(samples).unwrap()
}

pub fn random_cloud(n: usize, seed: u64) -> Vec<VaPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| VaPoint::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)).unwrap())
        .collect()
}
