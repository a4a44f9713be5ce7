//! Random instance generation: simplex sampling, Euclidean simplex
//! projection and ℓ₁-ball perturbations.
//!
//! Every verifier derives one RNG per trial from `(seed, trial index)`, so
//! results do not depend on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::channel::{BroadcastPair, Channel, CompoundBcc, ProbVector};
use crate::error::Result;
use crate::info::AuxiliaryInput;

/// Keeps perturbed rows strictly inside the requested ℓ₁ radius after
/// floating-point rounding.
const RADIUS_SHRINK: f64 = 1.0 - 1e-9;

/// RNG for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw from the probability simplex (flat Dirichlet).
pub fn random_prob_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> ProbVector {
    assert!(len > 0);
    let draws: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    ProbVector::from_trusted(draws.into_iter().map(|d| d / total).collect())
}

/// Simplex draw with a random subset of entries forced to zero, so that
/// deterministic and boundary cases show up in sampled instances.
pub fn random_sparse_prob_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, zero_prob: f64) -> ProbVector {
    let mut draws: Vec<f64> = (0..len)
        .map(|_| {
            if rng.random::<f64>() < zero_prob {
                0.0
            } else {
                Exp1.sample(rng)
            }
        })
        .collect();
    if draws.iter().all(|&d| d == 0.0) {
        let i = rng.random_range(0..len);
        draws[i] = 1.0;
    }
    let total: f64 = draws.iter().sum();
    ProbVector::from_trusted(draws.into_iter().map(|d| d / total).collect())
}

pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, inputs: usize, outputs: usize) -> Channel {
    let mut data = Vec::with_capacity(inputs * outputs);
    for _ in 0..inputs {
        data.extend(random_prob_vector(rng, outputs).into_inner());
    }
    Channel::from_flat_trusted(inputs, outputs, data)
}

/// Like [`random_channel`] but with sparse rows.
pub fn random_sparse_channel<R: Rng + ?Sized>(rng: &mut R, inputs: usize, outputs: usize) -> Channel {
    let mut data = Vec::with_capacity(inputs * outputs);
    for _ in 0..inputs {
        data.extend(random_sparse_prob_vector(rng, outputs, 0.35).into_inner());
    }
    Channel::from_flat_trusted(inputs, outputs, data)
}

/// Random compound family; odd-numbered states get sparse rows.
pub fn random_compound<R: Rng + ?Sized>(
    rng: &mut R,
    states: usize,
    x_size: usize,
    y_size: usize,
    z_size: usize,
) -> Result<CompoundBcc> {
    let pairs = (0..states)
        .map(|s| {
            let (w, v) = if s % 2 == 1 {
                (random_sparse_channel(rng, x_size, y_size), random_sparse_channel(rng, x_size, z_size))
            } else {
                (random_channel(rng, x_size, y_size), random_channel(rng, x_size, z_size))
            };
            BroadcastPair::new(w, v)
        })
        .collect::<Result<Vec<_>>>()?;
    CompoundBcc::unlabeled(pairs)
}

/// Random chain `U - V - Xⁿ` with sparse prefix channel and encoder.
pub fn random_aux<R: Rng + ?Sized>(
    rng: &mut R,
    u_size: usize,
    v_size: usize,
    x_size: usize,
    n: usize,
) -> Result<AuxiliaryInput> {
    let block = x_size.pow(n as u32);
    let p_u = random_sparse_prob_vector(rng, u_size, 0.25);
    let p_v_given_u = random_sparse_channel(rng, u_size, v_size);
    let encoder = random_sparse_channel(rng, v_size, block);
    AuxiliaryInput::new(p_u, p_v_given_u, encoder, n)
}

/// Euclidean projection onto the probability simplex (sort-and-threshold).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let candidate = (cumulative - 1.0) / (i + 1) as f64;
        if s - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// How far a perturbed row travels inside its ℓ₁ ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Perturbation {
    /// Radius drawn uniformly from `(0, ε]`.
    Interior,
    /// Radius `ε` whenever the simplex allows it.
    Boundary,
}

/// Symmetric zero-sum Gaussian noise, projected back onto the simplex and
/// then scaled along the displacement so that `‖out - row‖₁ ≤ radius`.
pub fn perturb_row<R: Rng + ?Sized>(rng: &mut R, row: &[f64], radius: f64, mode: Perturbation) -> Vec<f64> {
    let len = row.len();
    if len < 2 || radius <= 0.0 {
        return row.to_vec();
    }
    let mut noise: Vec<f64> = (0..len)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            z * radius
        })
        .collect();
    let mean = noise.iter().sum::<f64>() / len as f64;
    noise.iter_mut().for_each(|z| *z -= mean);

    let candidate: Vec<f64> = row.iter().zip(&noise).map(|(r, z)| r + z).collect();
    let projected = project_simplex(&candidate);
    let displacement: Vec<f64> = projected.iter().zip(row).map(|(p, r)| p - r).collect();
    let length: f64 = displacement.iter().map(|d| d.abs()).sum();
    if length == 0.0 {
        return row.to_vec();
    }

    let target = match mode {
        Perturbation::Interior => radius * (1.0 - rng.random::<f64>()),
        Perturbation::Boundary => radius,
    } * RADIUS_SHRINK;
    let mut scale = target / length;
    // Past the projected point, stop where the first coordinate reaches zero.
    if scale > 1.0 {
        let limit = displacement
            .iter()
            .zip(row)
            .filter(|(d, _)| **d < 0.0)
            .map(|(d, r)| r / -d)
            .fold(f64::INFINITY, f64::min);
        scale = scale.min(limit);
    }
    let mut out: Vec<f64> = row
        .iter()
        .zip(&displacement)
        .map(|(r, d)| (r + scale * d).max(0.0))
        .collect();
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= total);
    out
}

/// Perturbs every row of `w` within ℓ₁ radius `radius`.
pub fn perturb_channel<R: Rng + ?Sized>(rng: &mut R, w: &Channel, radius: f64, mode: Perturbation) -> Channel {
    let mut data = Vec::with_capacity(w.as_flat().len());
    for row in w.rows() {
        data.extend(perturb_row(rng, row, radius, mode));
    }
    Channel::from_flat_trusted(w.inputs(), w.outputs(), data)
}
