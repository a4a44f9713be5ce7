//! Planar geometry on rate pairs `(R₀, R₁)` with the ℓ₁ ground metric.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r0: f64,
    pub r1: f64,
}

impl RatePoint {
    pub const ORIGIN: RatePoint = RatePoint { r0: 0.0, r1: 0.0 };

    pub fn new(r0: f64, r1: f64) -> Self {
        RatePoint { r0, r1 }
    }

    pub fn l1(self, other: RatePoint) -> f64 {
        (self.r0 - other.r0).abs() + (self.r1 - other.r1).abs()
    }
}

fn cross(o: RatePoint, a: RatePoint, b: RatePoint) -> f64 {
    (a.r0 - o.r0) * (b.r1 - o.r1) - (a.r1 - o.r1) * (b.r0 - o.r0)
}

/// Counter-clockwise convex hull (monotone chain). Collinear points and
/// duplicates are dropped; one or two vertices come back for degenerate
/// inputs.
pub fn convex_hull(points: &[RatePoint]) -> Result<Vec<RatePoint>> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.r0.total_cmp(&b.r0).then(a.r1.total_cmp(&b.r1)));
    sorted.dedup();
    if sorted.len() < 3 {
        return Ok(sorted);
    }
    let mut hull: Vec<RatePoint> = Vec::with_capacity(2 * sorted.len());
    for &p in &sorted {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in sorted.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Ok(hull)
}

/// Whether `p` lies in the convex polygon `hull` (CCW), allowing `slack`
/// of signed-area error per edge.
pub fn hull_contains(hull: &[RatePoint], p: RatePoint, slack: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0].l1(p) <= slack,
        2 => l1_point_segment(p, hull[0], hull[1]) <= slack,
        n => (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], p) >= -slack),
    }
}

/// ℓ₁ distance from `p` to the segment `[a, b]`. The objective is convex
/// and piecewise linear in the segment parameter, so its minimum sits at
/// an endpoint or where one coordinate difference changes sign.
pub fn l1_point_segment(p: RatePoint, a: RatePoint, b: RatePoint) -> f64 {
    let d0 = b.r0 - a.r0;
    let d1 = b.r1 - a.r1;
    let at = |t: f64| RatePoint::new(a.r0 + t * d0, a.r1 + t * d1).l1(p);
    let mut best = at(0.0).min(at(1.0));
    if d0 != 0.0 {
        best = best.min(at(((p.r0 - a.r0) / d0).clamp(0.0, 1.0)));
    }
    if d1 != 0.0 {
        best = best.min(at(((p.r1 - a.r1) / d1).clamp(0.0, 1.0)));
    }
    best
}

/// ℓ₁ distance from `p` to the convex polygon `hull` (zero inside).
pub fn l1_point_polygon(p: RatePoint, hull: &[RatePoint]) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => hull[0].l1(p),
        2 => l1_point_segment(p, hull[0], hull[1]),
        n => {
            if hull_contains(hull, p, 0.0) {
                return 0.0;
            }
            (0..n)
                .map(|i| l1_point_segment(p, hull[i], hull[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}
