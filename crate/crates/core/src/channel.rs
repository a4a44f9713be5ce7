//! Discrete memoryless channels, broadcast pairs and compound families.
//!
//! A [`Channel`] is a row-stochastic matrix: row `x` is the output
//! distribution for input symbol `x`. Symbol tuples of a memoryless
//! extension are flattened lexicographically with the last coordinate
//! varying fastest, so `(x_1, ..., x_n)` maps to
//! `x_1 * k^(n-1) + ... + x_n`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampling::{perturb_row, Perturbation};

/// Absolute tolerance on `|row sum - 1|`.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Entries below `-NEGATIVE_TOL` are rejected; entries in `[-NEGATIVE_TOL, 0)`
/// are clamped to zero.
pub const NEGATIVE_TOL: f64 = 1e-12;

/// Default cap on the number of entries of a product channel (2^24).
pub const DEFAULT_ENTRY_BUDGET: u128 = 1 << 24;

fn check_row(row_index: usize, row: &[f64]) -> Result<Vec<f64>> {
    for (col, &value) in row.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite {
                row: row_index,
                col,
            });
        }
        if value < -NEGATIVE_TOL {
            return Err(Error::NegativeEntry {
                row: row_index,
                col,
                value,
            });
        }
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::RowSumViolation {
            row: row_index,
            sum,
        });
    }
    let clamped: Vec<f64> = row.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    Ok(clamped.into_iter().map(|v| v / total).collect())
}

/// A probability distribution over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        check_row(0, &entries).map(ProbVector)
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform distribution needs a non-empty alphabet");
        ProbVector(vec![1.0 / len as f64; len])
    }

    pub fn point_mass(len: usize, at: usize) -> Self {
        assert!(at < len, "point mass index out of range");
        let mut entries = vec![0.0; len];
        entries[at] = 1.0;
        ProbVector(entries)
    }

    pub(crate) fn from_trusted(entries: Vec<f64>) -> Self {
        ProbVector(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for ProbVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A row-stochastic matrix `W(y|x)` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    inputs: usize,
    outputs: usize,
    data: Vec<f64>,
}

/// Builds a [`Channel`] from nested rows, checking stochasticity.
pub fn validate_channel(rows: &[Vec<f64>]) -> Result<Channel> {
    let first = rows.first().ok_or(Error::EmptyMatrix)?;
    let outputs = first.len();
    if outputs == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut data = Vec::with_capacity(rows.len() * outputs);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != outputs {
            return Err(Error::RaggedRows {
                row: i,
                expected: outputs,
                found: row.len(),
            });
        }
        data.extend(check_row(i, row)?);
    }
    Ok(Channel {
        inputs: rows.len(),
        outputs,
        data,
    })
}

impl Channel {
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        validate_channel(rows)
    }

    /// Builds a channel from a row-major buffer, with the same checks as
    /// [`validate_channel`].
    pub fn from_flat(inputs: usize, outputs: usize, data: Vec<f64>) -> Result<Self> {
        if inputs == 0 || outputs == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != inputs * outputs {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: inputs * outputs,
            });
        }
        let mut checked = Vec::with_capacity(data.len());
        for (i, row) in data.chunks(outputs).enumerate() {
            checked.extend(check_row(i, row)?);
        }
        Ok(Channel {
            inputs,
            outputs,
            data: checked,
        })
    }

    pub(crate) fn from_flat_trusted(inputs: usize, outputs: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), inputs * outputs);
        Channel {
            inputs,
            outputs,
            data,
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut data = vec![0.0; size * size];
        for i in 0..size {
            data[i * size + i] = 1.0;
        }
        Channel::from_flat_trusted(size, size, data)
    }

    /// Every input maps to the uniform distribution over the outputs.
    pub fn uniform(inputs: usize, outputs: usize) -> Self {
        Channel::from_flat_trusted(inputs, outputs, vec![1.0 / outputs as f64; inputs * outputs])
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("crossover {p} outside [0,1]")));
        }
        Ok(Channel::from_flat_trusted(2, 2, vec![1.0 - p, p, p, 1.0 - p]))
    }

    /// Channel whose every row equals `dist`.
    pub fn constant(inputs: usize, dist: &ProbVector) -> Self {
        let mut data = Vec::with_capacity(inputs * dist.len());
        for _ in 0..inputs {
            data.extend_from_slice(dist.as_slice());
        }
        Channel::from_flat_trusted(inputs, dist.len(), data)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks(self.outputs)
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.outputs + y]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Cascade `self` then `next`: `(self ∘ next)(z|x) = Σ_y self(y|x) next(z|y)`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if self.outputs != next.inputs {
            return Err(Error::DimensionMismatch(format!(
                "cannot cascade {}x{} into {}x{}",
                self.inputs, self.outputs, next.inputs, next.outputs
            )));
        }
        let mut data = vec![0.0; self.inputs * next.outputs];
        for x in 0..self.inputs {
            let out = &mut data[x * next.outputs..(x + 1) * next.outputs];
            for (y, &p) in self.row(x).iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for (o, &q) in out.iter_mut().zip(next.row(y)) {
                    *o += p * q;
                }
            }
        }
        Ok(Channel::from_flat_trusted(self.inputs, next.outputs, data))
    }

    /// Memoryless `n`-fold extension under the default entry budget.
    pub fn power(&self, n: usize) -> Result<Channel> {
        product_channel(self, n)
    }
}

/// Memoryless `n`-fold extension `Wⁿ(yⁿ|xⁿ) = Π W(y_i|x_i)`.
pub fn product_channel(w: &Channel, n: usize) -> Result<Channel> {
    product_channel_with_budget(w, n, DEFAULT_ENTRY_BUDGET)
}

pub fn product_channel_with_budget(w: &Channel, n: usize, budget: u128) -> Result<Channel> {
    if n == 0 {
        return Err(Error::Domain("block length must be at least 1".into()));
    }
    let factors = vec![w; n];
    tensor_product(&factors, budget)
}

/// Tensor product of channels, first factor on the most significant
/// coordinate. Used both for memoryless powers and for mixed products.
pub fn tensor_product(factors: &[&Channel], budget: u128) -> Result<Channel> {
    let first = factors.first().ok_or(Error::EmptySet)?;
    let mut inputs: u128 = 1;
    let mut outputs: u128 = 1;
    for f in factors {
        inputs = inputs.saturating_mul(f.inputs as u128);
        outputs = outputs.saturating_mul(f.outputs as u128);
    }
    let entries = inputs.saturating_mul(outputs);
    if entries > budget {
        return Err(Error::SizeExceeded { entries, budget });
    }
    let mut acc = (*first).clone();
    for f in &factors[1..] {
        acc = kron(&acc, f);
    }
    Ok(acc)
}

fn kron(a: &Channel, b: &Channel) -> Channel {
    let inputs = a.inputs * b.inputs;
    let outputs = a.outputs * b.outputs;
    let mut data = Vec::with_capacity(inputs * outputs);
    for xa in 0..a.inputs {
        for xb in 0..b.inputs {
            for &pa in a.row(xa) {
                for &pb in b.row(xb) {
                    data.push(pa * pb);
                }
            }
        }
    }
    Channel::from_flat_trusted(inputs, outputs, data)
}

/// A joint broadcast kernel `Q(y,z|x)`, stored with `(y, z)` flattened as
/// `y * z_size + z`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointChannel {
    y_size: usize,
    z_size: usize,
    kernel: Channel,
}

impl JointChannel {
    /// `rows[x]` is the flattened `Q(·,·|x)` over `𝒴×𝒵`.
    pub fn new(y_size: usize, z_size: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let kernel = validate_channel(rows)?;
        if kernel.outputs != y_size * z_size {
            return Err(Error::ShapeMismatch(format!(
                "joint rows have {} entries, expected {}x{}",
                kernel.outputs, y_size, z_size
            )));
        }
        Ok(JointChannel {
            y_size,
            z_size,
            kernel,
        })
    }

    /// `Q(y,z|x) = W(y|x) V(z|x)`.
    pub fn independent(w: &Channel, v: &Channel) -> Result<Self> {
        if w.inputs != v.inputs {
            return Err(Error::ShapeMismatch("W and V have different input alphabets".into()));
        }
        let mut data = Vec::with_capacity(w.inputs * w.outputs * v.outputs);
        for x in 0..w.inputs {
            for &py in w.row(x) {
                for &pz in v.row(x) {
                    data.push(py * pz);
                }
            }
        }
        Ok(JointChannel {
            y_size: w.outputs,
            z_size: v.outputs,
            kernel: Channel::from_flat_trusted(w.inputs, w.outputs * v.outputs, data),
        })
    }

    pub fn inputs(&self) -> usize {
        self.kernel.inputs
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn z_size(&self) -> usize {
        self.z_size
    }

    pub fn entry(&self, x: usize, y: usize, z: usize) -> f64 {
        self.kernel.entry(x, y * self.z_size + z)
    }
}

/// Splits `Q(y,z|x)` into `W(y|x) = Σ_z Q` and `V(z|x) = Σ_y Q`.
pub fn marginals(joint: &JointChannel) -> Result<(Channel, Channel)> {
    let inputs = joint.inputs();
    let mut w = vec![0.0; inputs * joint.y_size];
    let mut v = vec![0.0; inputs * joint.z_size];
    for x in 0..inputs {
        for y in 0..joint.y_size {
            for z in 0..joint.z_size {
                let q = joint.entry(x, y, z);
                w[x * joint.y_size + y] += q;
                v[x * joint.z_size + z] += q;
            }
        }
    }
    Ok((
        Channel::from_flat(inputs, joint.y_size, w)?,
        Channel::from_flat(inputs, joint.z_size, v)?,
    ))
}

/// A broadcast channel `(W, V)` to the legitimate receiver and the
/// eavesdropper.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastPair {
    w: Channel,
    v: Channel,
    joint: Option<JointChannel>,
}

impl BroadcastPair {
    pub fn new(w: Channel, v: Channel) -> Result<Self> {
        if w.inputs != v.inputs {
            return Err(Error::ShapeMismatch(format!(
                "W has {} inputs but V has {}",
                w.inputs, v.inputs
            )));
        }
        Ok(BroadcastPair { w, v, joint: None })
    }

    pub fn from_joint(joint: JointChannel) -> Result<Self> {
        let (w, v) = marginals(&joint)?;
        Ok(BroadcastPair {
            w,
            v,
            joint: Some(joint),
        })
    }

    pub fn w(&self) -> &Channel {
        &self.w
    }

    pub fn v(&self) -> &Channel {
        &self.v
    }

    pub fn joint(&self) -> Option<&JointChannel> {
        self.joint.as_ref()
    }
}

/// A finite compound broadcast channel: one of `states` is active for the
/// whole transmission, and the sender does not know which.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundBcc {
    states: Vec<BroadcastPair>,
    labels: Vec<String>,
}

impl CompoundBcc {
    pub fn new(states: Vec<BroadcastPair>, labels: Vec<String>) -> Result<Self> {
        let first = states.first().ok_or(Error::EmptySet)?;
        if labels.len() != states.len() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: states.len(),
            });
        }
        let shape = (first.w.inputs, first.w.outputs, first.v.outputs);
        for (i, s) in states.iter().enumerate() {
            if (s.w.inputs, s.w.outputs, s.v.outputs) != shape {
                return Err(Error::ShapeMismatch(format!(
                    "state {i} has alphabets {:?}, expected {:?}",
                    (s.w.inputs, s.w.outputs, s.v.outputs),
                    shape
                )));
            }
        }
        Ok(CompoundBcc { states, labels })
    }

    /// States labelled `s0, s1, ...`.
    pub fn unlabeled(states: Vec<BroadcastPair>) -> Result<Self> {
        let labels = (0..states.len()).map(|i| format!("s{i}")).collect();
        CompoundBcc::new(states, labels)
    }

    pub fn single(w: Channel, v: Channel) -> Result<Self> {
        CompoundBcc::unlabeled(vec![BroadcastPair::new(w, v)?])
    }

    pub fn states(&self) -> &[BroadcastPair] {
        &self.states
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn x_size(&self) -> usize {
        self.states[0].w.inputs
    }

    pub fn y_size(&self) -> usize {
        self.states[0].w.outputs
    }

    pub fn z_size(&self) -> usize {
        self.states[0].v.outputs
    }

    /// The marginal compound channel to receiver 1.
    pub fn w_family(&self) -> Vec<&Channel> {
        self.states.iter().map(|s| &s.w).collect()
    }

    /// The marginal compound channel to receiver 2.
    pub fn v_family(&self) -> Vec<&Channel> {
        self.states.iter().map(|s| &s.v).collect()
    }

    /// Returns a copy with one more state appended.
    pub fn with_state(&self, pair: BroadcastPair, label: impl Into<String>) -> Result<Self> {
        let mut states = self.states.clone();
        let mut labels = self.labels.clone();
        states.push(pair);
        labels.push(label.into());
        CompoundBcc::new(states, labels)
    }
}

/// Moves every row of every channel by at most `epsilon` in ℓ₁, so that the
/// compound distance between `base` and the result is at most `epsilon`.
pub fn perturb_compound(base: &CompoundBcc, epsilon: f64, seed: u64) -> Result<CompoundBcc> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon {epsilon} outside (0,1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perturb = |c: &Channel| {
        let mut data = Vec::with_capacity(c.as_flat().len());
        for row in c.rows() {
            data.extend(perturb_row(&mut rng, row, epsilon, Perturbation::Interior));
        }
        Channel::from_flat_trusted(c.inputs, c.outputs, data)
    };
    let states = base
        .states
        .iter()
        .map(|s| BroadcastPair {
            w: perturb(&s.w),
            v: perturb(&s.v),
            joint: None,
        })
        .collect();
    CompoundBcc::new(states, base.labels.clone())
}
