//! Distances between channels, compound families and rate regions.
//!
//! Channels are compared by the worst-row ℓ₁ distance
//! `d(W, W̃) = max_x Σ_y |W(y|x) - W̃(y|x)|`. Families of channels are
//! compared by the two directed Hausdorff distances built on `d`, and rate
//! regions by the symmetric Hausdorff distance under the ℓ₁ metric on
//! `(R₀, R₁)`. All scans break ties by lowest index.

use std::borrow::Borrow;

use serde::Serialize;

use crate::channel::{BroadcastPair, Channel, CompoundBcc};
use crate::error::{Error, Result};
use crate::geometry::{l1_point_polygon, RatePoint};
use crate::region::RateRectangle;

pub fn channel_distance(w1: &Channel, w2: &Channel) -> Result<f64> {
    channel_distance_witness(w1, w2).map(|d| d.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowDistance {
    pub value: f64,
    /// First input attaining the maximum.
    pub row: usize,
}

pub fn channel_distance_witness(w1: &Channel, w2: &Channel) -> Result<RowDistance> {
    if w1.inputs() != w2.inputs() || w1.outputs() != w2.outputs() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            w1.inputs(),
            w1.outputs(),
            w2.inputs(),
            w2.outputs()
        )));
    }
    let mut best = RowDistance { value: 0.0, row: 0 };
    for (x, (a, b)) in w1.rows().zip(w2.rows()).enumerate() {
        let d: f64 = a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum();
        if d > best.value {
            best = RowDistance { value: d, row: x };
        }
    }
    Ok(best)
}

/// `max(d(W, W̃), d(V, Ṽ))`.
pub fn pair_distance(p1: &BroadcastPair, p2: &BroadcastPair) -> Result<f64> {
    Ok(channel_distance(p1.w(), p2.w())?.max(channel_distance(p1.v(), p2.v())?))
}

/// Which directed Hausdorff distance to take between families `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `d₁(a, b) = max_{j ∈ b} min_{i ∈ a} d(a_i, b_j)`
    One,
    /// `d₂(a, b) = max_{i ∈ a} min_{j ∈ b} d(a_i, b_j)`
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SetDistance {
    pub value: f64,
    /// Member of `a` in the attaining pair.
    pub a_index: usize,
    /// Member of `b` in the attaining pair.
    pub b_index: usize,
}

pub fn directed_set_distance<A, B>(a: &[A], b: &[B], direction: Direction) -> Result<SetDistance>
where
    A: Borrow<Channel>,
    B: Borrow<Channel>,
{
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let (outer_len, inner_len) = match direction {
        Direction::One => (b.len(), a.len()),
        Direction::Two => (a.len(), b.len()),
    };
    let mut best: Option<SetDistance> = None;
    for outer in 0..outer_len {
        let mut nearest: Option<SetDistance> = None;
        for inner in 0..inner_len {
            let (i, j) = match direction {
                Direction::One => (inner, outer),
                Direction::Two => (outer, inner),
            };
            let value = channel_distance(a[i].borrow(), b[j].borrow())?;
            if nearest.is_none_or(|n| value < n.value) {
                nearest = Some(SetDistance {
                    value,
                    a_index: i,
                    b_index: j,
                });
            }
        }
        let nearest = nearest.expect("non-empty inner set");
        if best.is_none_or(|b| nearest.value > b.value) {
            best = Some(nearest);
        }
    }
    Ok(best.expect("non-empty outer set"))
}

/// The four directed distances whose maximum is the compound distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompoundDistance {
    pub value: f64,
    pub w_one: SetDistance,
    pub w_two: SetDistance,
    pub v_one: SetDistance,
    pub v_two: SetDistance,
}

impl CompoundDistance {
    /// The component attaining the maximum, with its name.
    pub fn witness(&self) -> (&'static str, SetDistance) {
        [
            ("d1_W", self.w_one),
            ("d2_W", self.w_two),
            ("d1_V", self.v_one),
            ("d2_V", self.v_two),
        ]
        .into_iter()
        .fold(("d1_W", self.w_one), |acc, c| if c.1.value > acc.1.value { c } else { acc })
    }
}

pub fn compound_distance_detail(c1: &CompoundBcc, c2: &CompoundBcc) -> Result<CompoundDistance> {
    if (c1.x_size(), c1.y_size(), c1.z_size()) != (c2.x_size(), c2.y_size(), c2.z_size()) {
        return Err(Error::ShapeMismatch("compound channels use different alphabets".into()));
    }
    let (w1, w2) = (c1.w_family(), c2.w_family());
    let (v1, v2) = (c1.v_family(), c2.v_family());
    let w_one = directed_set_distance(&w1, &w2, Direction::One)?;
    let w_two = directed_set_distance(&w1, &w2, Direction::Two)?;
    let v_one = directed_set_distance(&v1, &v2, Direction::One)?;
    let v_two = directed_set_distance(&v1, &v2, Direction::Two)?;
    let value = w_one.value.max(w_two.value).max(v_one.value).max(v_two.value);
    Ok(CompoundDistance {
        value,
        w_one,
        w_two,
        v_one,
        v_two,
    })
}

/// `D(𝔚₁, 𝔚₂)`: the largest directed Hausdorff distance between the
/// marginal families.
pub fn compound_distance(c1: &CompoundBcc, c2: &CompoundBcc) -> Result<f64> {
    compound_distance_detail(c1, c2).map(|d| d.value)
}

/// A finite, non-empty cloud of rate pairs in the non-negative quadrant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionPointSet {
    points: Vec<RatePoint>,
}

impl RegionPointSet {
    pub fn new(points: Vec<RatePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(p) = points.iter().find(|p| !(p.r0 >= 0.0 && p.r1 >= 0.0)) {
            return Err(Error::Domain(format!("rate pair ({}, {}) is not in the quadrant", p.r0, p.r1)));
        }
        Ok(RegionPointSet { points })
    }

    pub fn points(&self) -> &[RatePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionDistance {
    pub value: f64,
    /// Point realising the larger directed distance.
    pub from: RatePoint,
    /// Its nearest neighbour in the other set.
    pub to: RatePoint,
}

fn directed_points(a: &[RatePoint], b: &[RatePoint]) -> RegionDistance {
    let mut best = RegionDistance {
        value: -1.0,
        from: a[0],
        to: b[0],
    };
    for &p in a {
        let (mut near, mut near_d) = (b[0], p.l1(b[0]));
        for &q in &b[1..] {
            let d = p.l1(q);
            if d < near_d {
                near = q;
                near_d = d;
            }
        }
        if near_d > best.value {
            best = RegionDistance {
                value: near_d,
                from: p,
                to: near,
            };
        }
    }
    best
}

pub fn region_distance_witness(r1: &RegionPointSet, r2: &RegionPointSet) -> Result<RegionDistance> {
    if r1.is_empty() || r2.is_empty() {
        return Err(Error::EmptySet);
    }
    let forward = directed_points(&r1.points, &r2.points);
    let backward = directed_points(&r2.points, &r1.points);
    Ok(if backward.value > forward.value { backward } else { forward })
}

/// Symmetric ℓ₁ Hausdorff distance between two finite point sets.
pub fn region_distance(r1: &RegionPointSet, r2: &RegionPointSet) -> Result<f64> {
    region_distance_witness(r1, r2).map(|d| d.value)
}

/// `|A₀ - B₀| + |A₁ - B₁|` between the far corners of two origin-anchored
/// rectangles.
pub fn rectangle_corner_gap(r1: &RateRectangle, r2: &RateRectangle) -> f64 {
    (r1.a0 - r2.a0).abs() + (r1.a1 - r2.a1).abs()
}

/// Exact Hausdorff distance between the filled rectangles `[0,A₀]×[0,A₁]`
/// and `[0,B₀]×[0,B₁]`. The farthest point of one rectangle from the other
/// is its far corner, whose ℓ₁ distance to a box is the summed per-axis
/// excess.
pub fn rectangle_distance(r1: &RateRectangle, r2: &RateRectangle) -> f64 {
    let excess = |a: &RateRectangle, b: &RateRectangle| (a.a0 - b.a0).max(0.0) + (a.a1 - b.a1).max(0.0);
    excess(r1, r2).max(excess(r2, r1))
}

/// Exact ℓ₁ Hausdorff distance between two convex polygons given by their
/// CCW vertex lists. Distance to a convex set is convex, so each directed
/// term is attained at a vertex.
pub fn polygon_distance(hull1: &[RatePoint], hull2: &[RatePoint]) -> Result<f64> {
    if hull1.is_empty() || hull2.is_empty() {
        return Err(Error::EmptySet);
    }
    let directed = |a: &[RatePoint], b: &[RatePoint]| {
        a.iter().map(|&p| l1_point_polygon(p, b)).fold(0.0, f64::max)
    };
    Ok(directed(hull1, hull2).max(directed(hull2, hull1)))
}
