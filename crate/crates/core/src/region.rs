//! Rate rectangles for a fixed auxiliary chain, their unions over a finite
//! grid of auxiliary distributions, and convex-hull inner approximations of
//! the capacity region.
//!
//! For block length `n`, state family `𝒮` and a chain `U - V - Xⁿ`, the
//! rectangle's far corner is
//!
//! ```text
//! A₀ = (1/n) min_s min{ I(U;Y_sⁿ), I(U;Z_sⁿ) }
//! A₁ = (1/n) ( min_s I(V;Y_sⁿ|U) - max_s I(V;Z_sⁿ|U) )
//! ```
//!
//! with both coordinates clipped at zero. Regions built here only ever
//! contain achievable points, so they are inner approximations: the grid is
//! finite and `n` is bounded.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{product_channel, Channel, CompoundBcc, ProbVector};
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, RatePoint};
use crate::info::{induced_joint, AuxiliaryInput, ChainInformation};
use crate::metrics::{polygon_distance, RegionPointSet};

pub const INNER_APPROXIMATION: &str = "inner approximation";

/// Receiver whose mutual information attains the common-rate minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Receiver {
    Legitimate,
    Eavesdropper,
}

/// States attaining the min/max terms of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RectangleWitness {
    pub common_state: usize,
    pub common_receiver: Receiver,
    pub legitimate_state: usize,
    pub eavesdropper_state: usize,
}

/// The rectangle `[0, a0] × [0, a1]` of rate pairs in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRectangle {
    pub a0: f64,
    pub a1: f64,
    pub n: usize,
    /// Grid index of the auxiliary chain, when it came from a grid.
    pub aux_id: Option<u64>,
    pub witness: Option<RectangleWitness>,
}

impl RateRectangle {
    pub fn from_corner(a0: f64, a1: f64) -> Self {
        RateRectangle {
            a0,
            a1,
            n: 1,
            aux_id: None,
            witness: None,
        }
    }

    pub fn corner(&self) -> RatePoint {
        RatePoint::new(self.a0, self.a1)
    }

    pub fn contains(&self, p: RatePoint) -> bool {
        p.r0 >= 0.0 && p.r1 >= 0.0 && p.r0 <= self.a0 && p.r1 <= self.a1
    }

    /// The corner and its two axis projections; with the origin, their hull
    /// is the rectangle.
    pub fn extreme_points(&self) -> [RatePoint; 3] {
        [
            self.corner(),
            RatePoint::new(self.a0, 0.0),
            RatePoint::new(0.0, self.a1),
        ]
    }
}

/// Unnormalised per-state information terms for one auxiliary chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateTerms {
    /// `I(U; Yⁿ)`
    pub common_y: f64,
    /// `I(U; Zⁿ)`
    pub common_z: f64,
    /// `I(V; Yⁿ | U)`
    pub private_y: f64,
    /// `I(V; Zⁿ | U)`
    pub private_z: f64,
}

/// Holds the `n`-fold extensions of every state so that many auxiliary
/// chains can be evaluated against the same compound channel.
#[derive(Debug, Clone)]
pub struct RectangleEvaluator {
    n: usize,
    x_size: usize,
    w_blocks: Vec<Channel>,
    v_blocks: Vec<Channel>,
}

impl RectangleEvaluator {
    pub fn new(c: &CompoundBcc, n: usize) -> Result<Self> {
        let mut w_blocks = Vec::with_capacity(c.len());
        let mut v_blocks = Vec::with_capacity(c.len());
        for s in c.states() {
            w_blocks.push(product_channel(s.w(), n)?);
            v_blocks.push(product_channel(s.v(), n)?);
        }
        Ok(RectangleEvaluator {
            n,
            x_size: c.x_size(),
            w_blocks,
            v_blocks,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Size of the encoder output alphabet, `|𝒳|ⁿ`.
    pub fn block_size(&self) -> usize {
        self.w_blocks[0].inputs()
    }

    fn check(&self, aux: &AuxiliaryInput) -> Result<()> {
        if aux.n() != self.n || aux.block_size() != self.block_size() {
            return Err(Error::DimensionMismatch(format!(
                "auxiliary chain emits {} blocks of length {}, channel expects {}^{}",
                aux.block_size(),
                aux.n(),
                self.x_size,
                self.n
            )));
        }
        Ok(())
    }

    pub fn terms(&self, aux: &AuxiliaryInput) -> Result<Vec<StateTerms>> {
        self.check(aux)?;
        self.w_blocks
            .iter()
            .zip(&self.v_blocks)
            .map(|(w, v)| {
                let y = ChainInformation::from_joint(&induced_joint(aux, w)?)?;
                let z = ChainInformation::from_joint(&induced_joint(aux, v)?)?;
                Ok(StateTerms {
                    common_y: y.common,
                    common_z: z.common,
                    private_y: y.private,
                    private_z: z.private,
                })
            })
            .collect()
    }

    pub fn evaluate(&self, aux: &AuxiliaryInput) -> Result<RateRectangle> {
        let terms = self.terms(aux)?;
        Ok(rectangle_from_terms(&terms, self.n))
    }
}

/// Reduces per-state terms to the rectangle corner (lowest state index wins
/// ties).
pub fn rectangle_from_terms(terms: &[StateTerms], n: usize) -> RateRectangle {
    let mut common = (f64::INFINITY, 0, Receiver::Legitimate);
    let mut legit = (f64::INFINITY, 0);
    let mut eaves = (f64::NEG_INFINITY, 0);
    for (s, t) in terms.iter().enumerate() {
        if t.common_y < common.0 {
            common = (t.common_y, s, Receiver::Legitimate);
        }
        if t.common_z < common.0 {
            common = (t.common_z, s, Receiver::Eavesdropper);
        }
        if t.private_y < legit.0 {
            legit = (t.private_y, s);
        }
        if t.private_z > eaves.0 {
            eaves = (t.private_z, s);
        }
    }
    let scale = 1.0 / n as f64;
    RateRectangle {
        a0: (common.0 * scale).max(0.0),
        a1: ((legit.0 - eaves.0) * scale).max(0.0),
        n,
        aux_id: None,
        witness: Some(RectangleWitness {
            common_state: common.1,
            common_receiver: common.2,
            legitimate_state: legit.1,
            eavesdropper_state: eaves.1,
        }),
    }
}

/// `ℛₙ(𝔚, U, V, Xⁿ)` as its far corner.
pub fn rate_rectangle(c: &CompoundBcc, aux: &AuxiliaryInput) -> Result<RateRectangle> {
    RectangleEvaluator::new(c, aux.n())?.evaluate(aux)
}

/// Lattice of auxiliary distributions: every probability vector whose
/// entries are multiples of `1 / resolution`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Lattice points per unit; the step is `1 / resolution`.
    pub resolution: u32,
    pub u_size: usize,
    pub v_size: usize,
    /// Refuse grids with more auxiliary chains than this.
    pub max_aux: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            resolution: 8,
            u_size: 2,
            v_size: 2,
            max_aux: 1 << 24,
        }
    }
}

impl GridSpec {
    pub fn new(resolution: u32) -> Self {
        GridSpec {
            resolution,
            ..GridSpec::default()
        }
    }

    pub fn with_aux_sizes(mut self, u_size: usize, v_size: usize) -> Self {
        self.u_size = u_size;
        self.v_size = v_size;
        self
    }

    pub fn step(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    fn validate(&self) -> Result<()> {
        if self.resolution == 0 {
            return Err(Error::Domain("grid resolution must be at least 1 (two points per edge)".into()));
        }
        if self.u_size == 0 || self.v_size == 0 {
            return Err(Error::Domain("auxiliary alphabets must be non-empty".into()));
        }
        Ok(())
    }
}

/// All compositions of `resolution` into `parts` non-negative parts, scaled
/// to probability vectors, in lexicographic order.
pub fn simplex_lattice(parts: usize, resolution: u32) -> Vec<Vec<f64>> {
    fn fill(parts: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == parts {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            fill(parts, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    fill(parts, resolution, &mut Vec::with_capacity(parts), &mut raw);
    raw.into_iter()
        .map(|c| c.into_iter().map(|k| k as f64 / resolution as f64).collect())
        .collect()
}

/// Enumerates auxiliary chains `(P_U, P_{V|U}, E)` on a lattice, indexed
/// by a mixed-radix integer (encoder rows vary fastest).
#[derive(Debug, Clone)]
pub struct AuxGrid {
    spec: GridSpec,
    n: usize,
    u_lattice: Vec<Vec<f64>>,
    v_lattice: Vec<Vec<f64>>,
    x_lattice: Vec<Vec<f64>>,
    len: u64,
}

impl AuxGrid {
    pub fn new(spec: GridSpec, x_size: usize, n: usize) -> Result<Self> {
        spec.validate()?;
        let block = (x_size as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if block > usize::MAX as u128 {
            return Err(Error::SizeExceeded {
                entries: block,
                budget: usize::MAX as u128,
            });
        }
        let binomial = |parts: usize| -> u128 {
            // C(resolution + parts - 1, parts - 1)
            let r = spec.resolution as u128;
            let mut acc: u128 = 1;
            for i in 1..parts as u128 {
                acc = acc.saturating_mul(r + i) / i;
            }
            acc
        };
        let (lu, lv, lx) = (binomial(spec.u_size), binomial(spec.v_size), binomial(block as usize));
        let total = lu
            .saturating_mul(lv.saturating_pow(spec.u_size as u32))
            .saturating_mul(lx.saturating_pow(spec.v_size as u32));
        if total > spec.max_aux as u128 || lx > spec.max_aux as u128 {
            return Err(Error::SizeExceeded {
                entries: total,
                budget: spec.max_aux as u128,
            });
        }
        Ok(AuxGrid {
            spec,
            n,
            u_lattice: simplex_lattice(spec.u_size, spec.resolution),
            v_lattice: simplex_lattice(spec.v_size, spec.resolution),
            x_lattice: simplex_lattice(block as usize, spec.resolution),
            len: total as u64,
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn aux(&self, index: u64) -> AuxiliaryInput {
        assert!(index < self.len, "aux index out of range");
        let mut rest = index;
        let mut digit = |radix: usize| {
            let d = (rest % radix as u64) as usize;
            rest /= radix as u64;
            d
        };
        let (nu, nv) = (self.spec.u_size, self.spec.v_size);
        let mut enc_rows = vec![0usize; nv];
        for slot in enc_rows.iter_mut().rev() {
            *slot = digit(self.x_lattice.len());
        }
        let mut v_rows = vec![0usize; nu];
        for slot in v_rows.iter_mut().rev() {
            *slot = digit(self.v_lattice.len());
        }
        let u_row = digit(self.u_lattice.len());

        let block = self.x_lattice[0].len();
        let encoder = Channel::from_flat_trusted(
            nv,
            block,
            enc_rows.iter().flat_map(|&i| self.x_lattice[i].iter().copied()).collect(),
        );
        let p_v_given_u = Channel::from_flat_trusted(
            nu,
            nv,
            v_rows.iter().flat_map(|&i| self.v_lattice[i].iter().copied()).collect(),
        );
        let p_u = ProbVector::from_trusted(self.u_lattice[u_row].clone());
        AuxiliaryInput::new(p_u, p_v_given_u, encoder, self.n).expect("grid dimensions are consistent")
    }
}

/// One rectangle corner found during a grid sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CornerRecord {
    pub n: usize,
    pub aux_id: u64,
    pub corner: RatePoint,
}

/// A grid-based inner approximation: every rectangle corner, the point set
/// spanning their union, and its convex hull.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionApproximation {
    pub label: &'static str,
    pub points: RegionPointSet,
    /// Counter-clockwise hull vertices.
    pub hull: Vec<RatePoint>,
    pub corners: Vec<CornerRecord>,
    pub n_values: Vec<usize>,
    pub grid: GridSpec,
}

impl RegionApproximation {
    fn from_corners(corners: Vec<CornerRecord>, n_values: Vec<usize>, grid: GridSpec) -> Result<Self> {
        let mut points = Vec::with_capacity(3 * corners.len() + 1);
        points.push(RatePoint::ORIGIN);
        for c in &corners {
            points.extend(RateRectangle::from_corner(c.corner.r0, c.corner.r1).extreme_points());
        }
        let hull = convex_hull(&points)?;
        Ok(RegionApproximation {
            label: INNER_APPROXIMATION,
            points: RegionPointSet::new(points)?,
            hull,
            corners,
            n_values,
            grid,
        })
    }

    /// Exact ℓ₁ Hausdorff distance between the two hulls.
    pub fn hull_distance(&self, other: &RegionApproximation) -> Result<f64> {
        polygon_distance(&self.hull, &other.hull)
    }
}

/// Rectangle corners for every grid chain at block length `n`, in grid
/// order regardless of how the work is scheduled.
pub fn grid_corners(c: &CompoundBcc, n: usize, grid: &GridSpec) -> Result<Vec<CornerRecord>> {
    let evaluator = RectangleEvaluator::new(c, n)?;
    let aux_grid = AuxGrid::new(*grid, c.x_size(), n)?;
    (0..aux_grid.len())
        .into_par_iter()
        .map(|id| {
            let rect = evaluator.evaluate(&aux_grid.aux(id))?;
            Ok(CornerRecord {
                n,
                aux_id: id,
                corner: rect.corner(),
            })
        })
        .collect()
}

/// `ℳₙ(𝔚)` restricted to the auxiliary grid.
pub fn region_mn(c: &CompoundBcc, n: usize, grid: &GridSpec) -> Result<RegionApproximation> {
    let corners = grid_corners(c, n, grid)?;
    RegionApproximation::from_corners(corners, vec![n], *grid)
}

/// Convex hull of the grid regions for `n = 1..=n_max` together with the
/// origin. Time sharing makes every hull point achievable.
pub fn capacity_region_approx(c: &CompoundBcc, n_max: usize, grid: &GridSpec) -> Result<RegionApproximation> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let mut corners = Vec::new();
    for n in 1..=n_max {
        corners.extend(grid_corners(c, n, grid)?);
    }
    RegionApproximation::from_corners(corners, (1..=n_max).collect(), *grid)
}

/// Samples the boundary of a polygon at spacing at most `step`, for use
/// with the point-set region distance.
pub fn densify_polygon(hull: &[RatePoint], step: f64) -> Result<RegionPointSet> {
    if hull.is_empty() {
        return Err(Error::EmptySet);
    }
    if step.is_nan() || step <= 0.0 {
        return Err(Error::Domain(format!("step {step} must be positive")));
    }
    let mut points = Vec::new();
    let edges = if hull.len() == 1 { 1 } else { hull.len() };
    for i in 0..edges {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        let pieces = (a.l1(b) / step).ceil().max(1.0) as usize;
        for k in 0..pieces {
            let t = k as f64 / pieces as f64;
            points.push(RatePoint::new(
                (a.r0 + t * (b.r0 - a.r0)).max(0.0),
                (a.r1 + t * (b.r1 - a.r1)).max(0.0),
            ));
        }
    }
    RegionPointSet::new(points)
}
