//! Emotion dynamic range: the area of the convex hull of a valence-arousal
//! trajectory after the most distant points have been trimmed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::VaPoint;

pub const DEFAULT_TRIM_FRACTION: f64 = 0.05;

/// Per-frame valence-arousal points of one performance. Never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct VaTrajectory {
    points: Vec<VaPoint>,
}

impl VaTrajectory {
    pub fn new(points: Vec<VaPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("valence-arousal trajectory"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[VaPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn centroid(&self) -> (f64, f64) {
        centroid(&self.points)
    }
}

fn centroid(points: &[VaPoint]) -> (f64, f64) {
    let n = points.len() as f64;
    let (sv, sa) = points
        .iter()
        .fold((0.0, 0.0), |(v, a), p| (v + p.valence, a + p.arousal));
    (sv / n, sa / n)
}

/// Number of points trimmed for `fraction` of `n`: `ceil(fraction * n)`.
/// Products within 1e-9 of an integer count as that integer, so 5% of 60 is
/// 3 and not 4.
pub fn trim_count(fraction: f64, n: usize) -> usize {
    let x = fraction * n as f64;
    let k = (x - 1e-9).ceil().max(0.0) as usize;
    k.min(n)
}

/// Drop the `ceil(fraction * N)` points farthest from the centroid of all
/// points. Equal distances remove the later frame first. Survivors keep
/// their order. The result is empty only when every point is trimmed
/// (for example one point with a positive fraction).
pub fn trim_outliers(traj: &VaTrajectory, fraction: f64) -> Result<Vec<VaPoint>> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::out_of_range("trim fraction", fraction, 0.0, 1.0));
    }
    let pts = traj.points();
    let k = trim_count(fraction, pts.len());
    if k == 0 {
        return Ok(pts.to_vec());
    }
    let (cv, ca) = centroid(pts);
    let mut order: Vec<(f64, usize)> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| ((p.valence - cv).hypot(p.arousal - ca), i))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)));
    let mut removed = vec![false; pts.len()];
    for &(_, i) in &order[..k] {
        removed[i] = true;
    }
    Ok(pts
        .iter()
        .zip(removed)
        .filter_map(|(p, r)| (!r).then_some(*p))
        .collect())
}

/// Convex polygon in counter-clockwise order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullPolygon {
    pub vertices: Vec<VaPoint>,
    pub area: f64,
}

fn cross(o: &VaPoint, a: &VaPoint, b: &VaPoint) -> f64 {
    (a.valence - o.valence) * (b.arousal - o.arousal)
        - (a.arousal - o.arousal) * (b.valence - o.valence)
}

/// Monotone-chain convex hull. Collinear points are dropped, so degenerate
/// inputs produce one or two extreme vertices and zero area.
pub fn convex_hull(points: &[VaPoint]) -> HullPolygon {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| {
        a.valence
            .total_cmp(&b.valence)
            .then(a.arousal.total_cmp(&b.arousal))
    });
    pts.dedup();
    if pts.len() <= 2 {
        return HullPolygon {
            vertices: pts,
            area: 0.0,
        };
    }

    let mut hull: Vec<VaPoint> = Vec::with_capacity(2 * pts.len());
    // lower chain
    for p in &pts {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    // upper chain
    let lower_len = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(*p);
    }
    // last point repeats the first
    hull.pop();

    let area = polygon_area(&hull);
    HullPolygon {
        vertices: hull,
        area,
    }
}

/// Shoelace area of a simple polygon; 0 for fewer than three vertices.
pub fn polygon_area(vertices: &[VaPoint]) -> f64 {
    if vertices.len() < 3 {
        return 0.0;
    }
    let n = vertices.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % n];
            a.valence * b.arousal - b.valence * a.arousal
        })
        .sum();
    twice.abs() / 2.0
}

/// Emotion dynamic range of a trajectory.
pub fn edr(traj: &VaTrajectory, fraction: f64) -> Result<f64> {
    Ok(convex_hull(&trim_outliers(traj, fraction)?).area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: f64, a: f64) -> VaPoint {
        VaPoint::new(v, a).unwrap()
    }

    fn traj(points: &[(f64, f64)]) -> VaTrajectory {
        VaTrajectory::new(points.iter().map(|&(v, a)| p(v, a)).collect()).unwrap()
    }

    #[test]
    fn empty_trajectory_rejected() {
        assert!(VaTrajectory::new(vec![]).is_err());
    }

    #[test]
    fn zero_fraction_is_identity() {
        let t = traj(&[(0.1, 0.2), (-0.5, 0.3), (0.9, -0.9)]);
        assert_eq!(trim_outliers(&t, 0.0).unwrap(), t.points());
    }

    #[test]
    fn far_point_trimmed() {
        let mut pts = vec![(0.0, 0.0); 19];
        pts.insert(6, (0.9, 0.9));
        let out = trim_outliers(&traj(&pts), 0.05).unwrap();
        assert_eq!(out.len(), 19);
        assert!(out.iter().all(|q| q.valence == 0.0));
    }

    #[test]
    fn ties_remove_latest_frame() {
        let pts: Vec<VaPoint> = (0..20).map(|i| p(0.3, -0.2 + 0.0 * i as f64)).collect();
        let t = VaTrajectory::new(pts).unwrap();
        let out = trim_outliers(&t, 0.05).unwrap();
        assert_eq!(out.len(), 19);

        // distinguishable ties: two points equidistant from the centroid
        let t = traj(&[(0.5, 0.0), (0.0, 0.0), (-0.5, 0.0)]);
        let out = trim_outliers(&t, 0.3).unwrap();
        assert_eq!(out, vec![p(0.5, 0.0), p(0.0, 0.0)]);
    }

    #[test]
    fn fraction_validated() {
        let t = traj(&[(0.0, 0.0)]);
        assert!(trim_outliers(&t, 1.0).is_err());
        assert!(trim_outliers(&t, -0.1).is_err());
    }

    #[test]
    fn trim_count_rounds_up() {
        assert_eq!(trim_count(0.05, 1), 1);
        assert_eq!(trim_count(0.05, 20), 1);
        assert_eq!(trim_count(0.05, 21), 2);
        assert_eq!(trim_count(0.05, 60), 3);
        assert_eq!(trim_count(0.0, 100), 0);
    }

    #[test]
    fn square_hull() {
        let h = convex_hull(&traj(&[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]).points);
        assert_eq!(h.vertices.len(), 4);
        assert_eq!(h.area, 4.0);
        assert_eq!(h.vertices[0], p(-1.0, -1.0));
        assert_eq!(h.vertices[1], p(1.0, -1.0));
    }

    #[test]
    fn collinear_hull_is_flat() {
        let h = convex_hull(&traj(&[(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]).points);
        assert_eq!(h.area, 0.0);
        assert_eq!(h.vertices, vec![p(0.0, 0.0), p(1.0, 1.0)]);
    }

    #[test]
    fn hull_drops_edge_midpoints() {
        let h = convex_hull(
            &traj(&[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).points,
        );
        assert_eq!(h.vertices.len(), 4);
        assert_eq!(h.area, 1.0);
    }

    #[test]
    fn area_examples() {
        assert_eq!(polygon_area(&[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]), 0.5);
        assert_eq!(polygon_area(&[]), 0.0);
        assert_eq!(polygon_area(&[p(0.0, 0.0), p(1.0, 1.0)]), 0.0);
    }

    #[test]
    fn convex_octagon_matches_fan_triangulation() {
        let verts: Vec<VaPoint> = (0..8)
            .map(|k| {
                let th = k as f64 * std::f64::consts::TAU / 8.0 + 0.1 * (k % 3) as f64;
                p(0.8 * th.cos(), 0.6 * th.sin())
            })
            .collect();
        let fan: f64 = (1..7)
            .map(|i| cross(&verts[0], &verts[i], &verts[i + 1]).abs() / 2.0)
            .sum();
        assert!((polygon_area(&verts) - fan).abs() < 1e-12);
    }

    #[test]
    fn edr_examples() {
        let sq = traj(&[(0.0, 0.0), (0.2, 0.0), (0.2, 0.2), (0.0, 0.2)]);
        assert!((edr(&sq, 0.0).unwrap() - 0.04).abs() < 1e-12);
        let same = traj(&[(0.3, 0.3); 12]);
        assert_eq!(edr(&same, 0.05).unwrap(), 0.0);
        assert_eq!(edr(&traj(&[(0.3, 0.3)]), 0.05).unwrap(), 0.0);
    }

    fn cloud() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 1..60)
    }

    proptest! {
        #[test]
        fn hull_contains_points(pts in cloud()) {
            let t = traj(&pts);
            let h = convex_hull(t.points());
            prop_assert!(h.vertices.len() <= pts.len());
            if h.vertices.len() >= 3 {
                let n = h.vertices.len();
                for q in t.points() {
                    for i in 0..n {
                        let c = cross(&h.vertices[i], &h.vertices[(i + 1) % n], q);
                        prop_assert!(c >= -1e-12);
                    }
                }
                prop_assert!((polygon_area(&h.vertices) - h.area).abs() <= 1e-12);
            }
        }

        #[test]
        fn rigid_motion_preserves_edr(pts in cloud(), th in 0.0f64..std::f64::consts::TAU,
                                      dx in -0.4f64..0.4, dy in -0.4f64..0.4) {
            let moved: Vec<(f64, f64)> = pts
                .iter()
                .map(|&(v, a)| (v * th.cos() - a * th.sin() + dx, v * th.sin() + a * th.cos() + dy))
                .filter(|&(v, a)| v.abs() <= 1.0 && a.abs() <= 1.0)
                .collect();
            prop_assume!(moved.len() == pts.len());
            let a = edr(&traj(&pts), 0.0).unwrap();
            let b = edr(&traj(&moved), 0.0).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn adding_point_never_shrinks(pts in cloud(), extra in (-1.0f64..1.0, -1.0f64..1.0)) {
            let before = edr(&traj(&pts), 0.0).unwrap();
            let mut more = pts.clone();
            more.push(extra);
            let after = edr(&traj(&more), 0.0).unwrap();
            prop_assert!(after >= before - 1e-12);
        }

        #[test]
        fn trims_exact_count(pts in cloud(), fraction in 0.0f64..0.99) {
            let t = traj(&pts);
            let out = trim_outliers(&t, fraction).unwrap();
            prop_assert_eq!(out.len(), pts.len() - trim_count(fraction, pts.len()));
        }
    }
}
