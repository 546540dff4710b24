//! SVG rendering of valence-arousal hulls, one translucent polygon per
//! method.

use std::fmt::Write;

use crate::edr::{convex_hull, trim_outliers, VaTrajectory};
use crate::error::{Error, Result};
use crate::types::VaPoint;

/// Side length of the square viewport in user units.
pub const VIEWPORT: f64 = 480.0;

const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Valence maps rightward and arousal upward: `(-1, -1)` lands on the
/// bottom-left corner and `(1, 1)` on the top-right.
pub fn to_viewport(p: &VaPoint) -> (f64, f64) {
    (
        (p.valence + 1.0) / 2.0 * VIEWPORT,
        (1.0 - p.arousal) / 2.0 * VIEWPORT,
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Render hulls of the trimmed trajectories. Each method gets a polygon
/// with class `hull method-<i>`, a scatter of its surviving points, and an
/// EDR label.
pub fn emit_hull_geometry(trajs: &[(String, VaTrajectory)], fraction: f64) -> Result<String> {
    if trajs.is_empty() {
        return Err(Error::Empty("trajectory list for plot"));
    }
    let mut svg = String::new();
    let s = VIEWPORT;
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#
    );
    svg.push_str("<style>.hull{fill-opacity:0.25;stroke-width:2}.pt{fill-opacity:0.6}text{font-family:sans-serif;font-size:13px}</style>\n");
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{s}" height="{s}" fill="#ffffff" stroke="#888888"/>"##
    );
    let h = s / 2.0;
    let _ = writeln!(
        svg,
        r##"<line class="axis" x1="0" y1="{h}" x2="{s}" y2="{h}" stroke="#bbbbbb"/>"##
    );
    let _ = writeln!(
        svg,
        r##"<line class="axis" x1="{h}" y1="0" x2="{h}" y2="{s}" stroke="#bbbbbb"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}">valence</text>"#,
        s - 60.0,
        h - 6.0
    );
    let _ = writeln!(svg, r#"<text x="{}" y="16">arousal</text>"#, h + 6.0);

    for (i, (name, traj)) in trajs.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let kept = trim_outliers(traj, fraction)?;
        let hull = convex_hull(&kept);
        let pts: Vec<String> = hull
            .vertices
            .iter()
            .map(|v| {
                let (x, y) = to_viewport(v);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let name = escape(name);
        let _ = writeln!(svg, r#"<g id="method-{i}" data-method="{name}">"#);
        let _ = writeln!(
            svg,
            r#"<polygon class="hull method-{i}" points="{}" fill="{color}" stroke="{color}"/>"#,
            pts.join(" ")
        );
        for p in &kept {
            let (x, y) = to_viewport(p);
            let _ = writeln!(
                svg,
                r#"<circle class="pt method-{i}" cx="{x:.3}" cy="{y:.3}" r="2" fill="{color}"/>"#
            );
        }
        let _ = writeln!(
            svg,
            r#"<text class="label method-{i}" x="8" y="{}" fill="{color}">{name}: EDR {:.4}</text>"#,
            s - 10.0 - 18.0 * (trajs.len() - 1 - i) as f64,
            hull.area
        );
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
