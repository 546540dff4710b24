//! Independent reference implementations used as test oracles. None of these
//! call into the code paths they check.

#![allow(dead_code)]

use singingbot_core::retarget::{PiecewiseMap, RetargetProfile};
use singingbot_core::{BlendshapeFrame, PairedDataset, VaPoint, NUM_CHANNELS};

/// Evaluate a piecewise map from per-segment slope and intercept vectors:
/// on `[t_k, t_k+1)` the value is `w * beta + c` with
/// `w = (d_k+1 - d_k) / (t_k+1 - t_k)` and `c = d_k - w * t_k`.
pub fn segment_oracle(map: &PiecewiseMap, beta: f64) -> Vec<f64> {
    let dof = map.dof();
    let mut knots: Vec<(f64, Vec<f64>)> = vec![(0.0, vec![0.0; dof])];
    knots.extend(map.anchors().iter().map(|a| (a.intensity, a.delta.clone())));
    let last = knots.last().unwrap();
    if beta >= last.0 {
        return last.1.clone();
    }
    let k = (0..knots.len() - 1)
        .find(|&k| knots[k].0 <= beta && beta < knots[k + 1].0)
        .expect("beta lies in some segment");
    let (t0, d0) = &knots[k];
    let (t1, d1) = &knots[k + 1];
    (0..dof)
        .map(|i| {
            let w = (d1[i] - d0[i]) / (t1 - t0);
            let c = d0[i] - w * t0;
            w * beta + c
        })
        .collect()
}

/// Rest pose plus every semantic's contribution, computed by walking all 52
/// channels, then clamped; neck motors overridden when a pose is present.
pub fn retarget_oracle(profile: &RetargetProfile, frame: &BlendshapeFrame) -> Vec<f64> {
    let mut sum = profile.rest_pose().values().to_vec();
    for s in profile.semantics() {
        let mut total = 0.0;
        let mut count = 0usize;
        for ch in 0..NUM_CHANNELS {
            if s.inputs().contains(&ch) {
                total += frame.coefficients()[ch];
                count += 1;
            }
        }
        let beta = (total / count as f64).min(1.0);
        for (acc, d) in sum.iter_mut().zip(segment_oracle(s.map(), beta)) {
            *acc += d;
        }
    }
    let mut out: Vec<f64> = sum.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    if let (Some(pose), Some(neck)) = (frame.pose(), profile.neck()) {
        for (axis, angle) in [
            (neck.yaw, pose.yaw()),
            (neck.pitch, pose.pitch()),
            (neck.roll, pose.roll()),
        ] {
            out[axis.motor] = (axis.rest + axis.gain * angle).clamp(0.0, 1.0);
        }
    }
    out
}

fn orient(o: &VaPoint, a: &VaPoint, b: &VaPoint) -> f64 {
    (a.valence - o.valence) * (b.arousal - o.arousal)
        - (a.arousal - o.arousal) * (b.valence - o.valence)
}

/// Jarvis march. Returns hull vertices (collinear points excluded) in
/// counter-clockwise order and the area by fan triangulation.
pub fn gift_wrap(points: &[VaPoint]) -> (Vec<VaPoint>, f64) {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| {
        a.valence
            .total_cmp(&b.valence)
            .then(a.arousal.total_cmp(&b.arousal))
    });
    pts.dedup();
    if pts.len() < 3 {
        return (pts, 0.0);
    }
    let start = 0; // leftmost, lowest
    let mut hull = vec![];
    let mut cur = start;
    loop {
        hull.push(pts[cur]);
        let mut cand = (cur + 1) % pts.len();
        for j in 0..pts.len() {
            if j == cur {
                continue;
            }
            let o = orient(&pts[cur], &pts[cand], &pts[j]);
            let farther = (pts[j].valence - pts[cur].valence)
                .hypot(pts[j].arousal - pts[cur].arousal)
                > (pts[cand].valence - pts[cur].valence)
                    .hypot(pts[cand].arousal - pts[cur].arousal);
            // keep the most clockwise candidate; on collinear ties the farther one
            if o < 0.0 || (o == 0.0 && farther) {
                cand = j;
            }
        }
        cur = cand;
        if cur == start || hull.len() > pts.len() {
            break;
        }
    }
    let area = if hull.len() < 3 {
        0.0
    } else {
        (1..hull.len() - 1)
            .map(|i| orient(&hull[0], &hull[i], &hull[i + 1]).abs() / 2.0)
            .sum()
    };
    (hull, area)
}

/// Exhaustive nearest-neighbour scan, lowest index on ties.
pub fn nnr_scan(ds: &PairedDataset, query: &[f64; NUM_CHANNELS]) -> usize {
    let dists: Vec<f64> = ds
        .samples()
        .iter()
        .map(|s| {
            s.blendshapes()
                .iter()
                .zip(query)
                .map(|(a, b)| (a - b) * (a - b))
                .sum()
        })
        .collect();
    let min = dists.iter().cloned().fold(f64::INFINITY, f64::min);
    dists.iter().position(|&d| d == min).unwrap()
}

/// `ceil(5 * n / 100)` in integer arithmetic.
pub fn five_percent_ceil(n: usize) -> usize {
    (5 * n).div_ceil(100)
}
