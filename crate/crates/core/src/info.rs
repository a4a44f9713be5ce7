//! Shannon entropy, mutual information and total variation, all in bits.
//!
//! Mutual informations are computed from joint entropies with the
//! convention `0 log 0 = 0`; one entropy kernel serves every quantity.

use serde::Serialize;

use crate::channel::{Channel, ProbVector, STOCHASTIC_TOL};
use crate::error::{Error, Result};

/// `-Σ p log₂ p` over the positive entries of `mass`.
pub fn entropy_of_mass(mass: &[f64]) -> f64 {
    let h: f64 = mass
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

pub fn entropy(p: &ProbVector) -> f64 {
    entropy_of_mass(p.as_slice())
}

/// `H₂(ε) = -ε log₂ ε - (1-ε) log₂ (1-ε)`.
pub fn binary_entropy(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("binary entropy argument {eps} outside [0,1]")));
    }
    Ok(entropy_of_mass(&[eps, 1.0 - eps]))
}

/// `Σ |p - q|`, ranging over `[0, 2]`.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum())
}

/// Auxiliary structure `U - V - Xⁿ`: a prefix distribution, a prefix
/// channel `P_{V|U}` and a stochastic encoder `E(xⁿ|v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryInput {
    p_u: ProbVector,
    p_v_given_u: Channel,
    encoder: Channel,
    n: usize,
}

impl AuxiliaryInput {
    pub fn new(p_u: ProbVector, p_v_given_u: Channel, encoder: Channel, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("block length must be at least 1".into()));
        }
        if p_u.len() != p_v_given_u.inputs() {
            return Err(Error::DimensionMismatch(format!(
                "P_U has {} entries but P_V|U has {} rows",
                p_u.len(),
                p_v_given_u.inputs()
            )));
        }
        if p_v_given_u.outputs() != encoder.inputs() {
            return Err(Error::DimensionMismatch(format!(
                "P_V|U has {} outputs but the encoder has {} rows",
                p_v_given_u.outputs(),
                encoder.inputs()
            )));
        }
        Ok(AuxiliaryInput {
            p_u,
            p_v_given_u,
            encoder,
            n,
        })
    }

    /// Constant `U`, `V = Xⁿ` with the given input distribution.
    pub fn direct(p_x: ProbVector, n: usize) -> Result<Self> {
        let size = p_x.len();
        AuxiliaryInput::new(
            ProbVector::point_mass(1, 0),
            Channel::constant(1, &p_x),
            Channel::identity(size),
            n,
        )
    }

    pub fn p_u(&self) -> &ProbVector {
        &self.p_u
    }

    pub fn p_v_given_u(&self) -> &Channel {
        &self.p_v_given_u
    }

    pub fn encoder(&self) -> &Channel {
        &self.encoder
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn u_size(&self) -> usize {
        self.p_u.len()
    }

    pub fn v_size(&self) -> usize {
        self.p_v_given_u.outputs()
    }

    /// `|𝒳|ⁿ`, the encoder's output alphabet.
    pub fn block_size(&self) -> usize {
        self.encoder.outputs()
    }

    /// `P(u, v, xⁿ)` flattened as `(u, v, xⁿ)`.
    pub fn joint_uvx(&self) -> Vec<f64> {
        let (nu, nv, nx) = (self.u_size(), self.v_size(), self.block_size());
        let mut mass = vec![0.0; nu * nv * nx];
        for (u, &pu) in self.p_u.as_slice().iter().enumerate() {
            for (v, &pv) in self.p_v_given_u.row(u).iter().enumerate() {
                let weight = pu * pv;
                if weight == 0.0 {
                    continue;
                }
                let base = (u * nv + v) * nx;
                for (slot, &e) in mass[base..base + nx].iter_mut().zip(self.encoder.row(v)) {
                    *slot = weight * e;
                }
            }
        }
        mass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub size: usize,
}

/// A distribution over a product of named finite axes, flattened
/// row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    axes: Vec<Axis>,
    mass: Vec<f64>,
}

impl JointDistribution {
    pub fn new(axes: Vec<(&str, usize)>, mass: Vec<f64>) -> Result<Self> {
        let expected: usize = axes.iter().map(|(_, s)| *s).product();
        if axes.is_empty() || mass.len() != expected {
            return Err(Error::LengthMismatch {
                left: mass.len(),
                right: expected,
            });
        }
        if let Some((i, &v)) = mass.iter().enumerate().find(|(_, &v)| v.is_nan() || v < -1e-12) {
            return Err(Error::NegativeEntry {
                row: 0,
                col: i,
                value: v,
            });
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::RowSumViolation { row: 0, sum: total });
        }
        Ok(JointDistribution {
            axes: axes
                .into_iter()
                .map(|(name, size)| Axis {
                    name: name.to_string(),
                    size,
                })
                .collect(),
            mass: mass.into_iter().map(|v| v.max(0.0)).collect(),
        })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.size).collect()
    }

    /// Marginal over the axes in `keep` (kept in the order given).
    pub fn marginal(&self, keep: &[usize]) -> Vec<f64> {
        let shape = self.shape();
        let sizes: Vec<usize> = keep.iter().map(|&k| shape[k]).collect();
        let mut out = vec![0.0; sizes.iter().product()];
        let mut index = vec![0usize; shape.len()];
        for &p in &self.mass {
            if p != 0.0 {
                let flat = keep.iter().fold(0, |acc, &k| acc * shape[k] + index[k]);
                out[flat] += p;
            }
            // odometer increment, last axis fastest
            for d in (0..shape.len()).rev() {
                index[d] += 1;
                if index[d] < shape[d] {
                    break;
                }
                index[d] = 0;
            }
        }
        out
    }

    /// Joint entropy of the axes in `keep`; `H(∅) = 0`.
    pub fn entropy_of(&self, keep: &[usize]) -> f64 {
        if keep.is_empty() {
            0.0
        } else if keep.len() == self.axes.len() && keep.iter().enumerate().all(|(i, &k)| i == k) {
            entropy_of_mass(&self.mass)
        } else {
            entropy_of_mass(&self.marginal(keep))
        }
    }
}

/// `P(u, v, yⁿ) = Σ_{xⁿ} W(yⁿ|xⁿ) E(xⁿ|v) P(v|u) P(u)`, where `w` already
/// acts on blocks.
pub fn induced_joint(aux: &AuxiliaryInput, w: &Channel) -> Result<JointDistribution> {
    if w.inputs() != aux.block_size() {
        return Err(Error::DimensionMismatch(format!(
            "channel has {} inputs but the encoder emits {} blocks",
            w.inputs(),
            aux.block_size()
        )));
    }
    let uvx = aux.joint_uvx();
    let (nu, nv, nx, ny) = (aux.u_size(), aux.v_size(), aux.block_size(), w.outputs());
    let mut mass = vec![0.0; nu * nv * ny];
    for (uv, block) in uvx.chunks(nx).enumerate() {
        let out = &mut mass[uv * ny..(uv + 1) * ny];
        for (x, &p) in block.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (slot, &q) in out.iter_mut().zip(w.row(x)) {
                *slot += p * q;
            }
        }
    }
    JointDistribution::new(vec![("U", nu), ("V", nv), ("Y", ny)], mass)
}

/// `I(A;B|C)` for a three-axis joint ordered `(C, A, B)`:
/// `H(C,B) + H(C,A) - H(C,A,B) - H(C)`.
pub fn conditional_mutual_information(joint: &JointDistribution) -> Result<f64> {
    if joint.axes().len() != 3 {
        return Err(Error::AxisCountMismatch {
            expected: 3,
            found: joint.axes().len(),
        });
    }
    Ok(joint.entropy_of(&[0, 2]) + joint.entropy_of(&[0, 1]) - joint.entropy_of(&[0, 1, 2]) - joint.entropy_of(&[0]))
}

/// `I(A;B) = H(A) + H(B) - H(A,B)` for a two-axis joint.
pub fn mutual_information(joint: &JointDistribution) -> Result<f64> {
    if joint.axes().len() != 2 {
        return Err(Error::AxisCountMismatch {
            expected: 2,
            found: joint.axes().len(),
        });
    }
    Ok(joint.entropy_of(&[0]) + joint.entropy_of(&[1]) - joint.entropy_of(&[0, 1]))
}

/// Per-receiver terms of a rate rectangle, read off one `(U, V, Yⁿ)` joint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainInformation {
    /// `I(U; Yⁿ)`
    pub common: f64,
    /// `I(V; Yⁿ | U)`
    pub private: f64,
}

impl ChainInformation {
    pub fn from_joint(joint: &JointDistribution) -> Result<Self> {
        if joint.axes().len() != 3 {
            return Err(Error::AxisCountMismatch {
                expected: 3,
                found: joint.axes().len(),
            });
        }
        let h_u = joint.entropy_of(&[0]);
        let h_y = joint.entropy_of(&[2]);
        let h_uy = joint.entropy_of(&[0, 2]);
        let h_uv = joint.entropy_of(&[0, 1]);
        let h_uvy = joint.entropy_of(&[0, 1, 2]);
        Ok(ChainInformation {
            common: h_u + h_y - h_uy,
            private: h_uy + h_uv - h_uvy - h_u,
        })
    }
}
