//! Symmetrizability of a two-state arbitrarily varying channel whose
//! parameter `λ` switches it from symmetrizable (`λ = 0`) to
//! non-symmetrizable (`λ > 0`).
//!
//! A family `{W_s}` is symmetrizable when some `σ: 𝒳 → 𝒫(𝒮)` satisfies
//!
//! `Σ_s W_s(y|x) σ(s|x') = Σ_s W_s(y|x') σ(s|x)` for all `x, x', y`.
//!
//! The check solves `min t` subject to `|lhs - rhs| ≤ t` on every
//! constraint (only `x < x'` is needed; the rest are mirror images) and
//! calls the family symmetrizable when the optimum is at most
//! [`SYMMETRIZABLE_TOL`].

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{Channel, CompoundBcc, ProbVector};
use crate::error::{Error, Result};
use crate::info::AuxiliaryInput;
use crate::lp::{solve, Constraint, LinearProgram, LpOutcome, Relation};
use crate::region::{rate_rectangle, RateRectangle};

pub const SYMMETRIZABLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AvcFamily {
    states: Vec<Channel>,
}

impl AvcFamily {
    pub fn new(states: Vec<Channel>) -> Result<Self> {
        let first = states.first().ok_or(Error::EmptySet)?;
        let shape = (first.inputs(), first.outputs());
        if let Some(bad) = states.iter().find(|c| (c.inputs(), c.outputs()) != shape) {
            return Err(Error::ShapeMismatch(format!(
                "state is {}x{}, family is {}x{}",
                bad.inputs(),
                bad.outputs(),
                shape.0,
                shape.1
            )));
        }
        Ok(AvcFamily { states })
    }

    pub fn states(&self) -> &[Channel] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn inputs(&self) -> usize {
        self.states[0].inputs()
    }

    pub fn outputs(&self) -> usize {
        self.states[0].outputs()
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda {lambda} outside [0,1]")));
    }
    Ok(())
}

/// `[[1, 0, 0], [0, λ, 1-λ]]`
pub fn w1(lambda: f64) -> Result<Channel> {
    check_lambda(lambda)?;
    Channel::new(&[vec![1.0, 0.0, 0.0], vec![0.0, lambda, 1.0 - lambda]])
}

/// `[[λ, 0, 1-λ], [0, 1, 0]]`
pub fn w2(lambda: f64) -> Result<Channel> {
    check_lambda(lambda)?;
    Channel::new(&[vec![lambda, 0.0, 1.0 - lambda], vec![0.0, 1.0, 0.0]])
}

/// The family `{W₁(λ), W₂(λ)}` and the eavesdropper channel (all rows ½).
pub fn example_family(lambda: f64) -> Result<(AvcFamily, Channel)> {
    let family = AvcFamily::new(vec![w1(lambda)?, w2(lambda)?])?;
    Ok((family, Channel::uniform(2, 2)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetrizerResult {
    pub symmetrizable: bool,
    /// `σ(s|x)` as a channel from inputs to states.
    pub sigma: Option<Channel>,
    /// Largest constraint violation of the best `σ` found.
    pub residual: f64,
}

/// `max_{x,x',y} |Σ_s W_s(y|x)σ(s|x') - Σ_s W_s(y|x')σ(s|x)|`, computed
/// directly from the definition.
pub fn symmetrizer_residual(family: &AvcFamily, sigma: &Channel) -> Result<f64> {
    if sigma.inputs() != family.inputs() || sigma.outputs() != family.len() {
        return Err(Error::ShapeMismatch(format!(
            "sigma is {}x{}, expected {}x{}",
            sigma.inputs(),
            sigma.outputs(),
            family.inputs(),
            family.len()
        )));
    }
    let mut worst: f64 = 0.0;
    for x in 0..family.inputs() {
        for xp in 0..family.inputs() {
            for y in 0..family.outputs() {
                let mut diff = 0.0;
                for (s, w) in family.states().iter().enumerate() {
                    diff += w.entry(x, y) * sigma.entry(xp, s) - w.entry(xp, y) * sigma.entry(x, s);
                }
                worst = worst.max(diff.abs());
            }
        }
    }
    Ok(worst)
}

pub fn symmetrizability_check(family: &AvcFamily) -> Result<SymmetrizerResult> {
    let (nx, ns, ny) = (family.inputs(), family.len(), family.outputs());
    // Variables: σ(s|x) at x * ns + s, then t.
    let vars = nx * ns + 1;
    let t = vars - 1;
    let mut constraints = Vec::new();
    for x in 0..nx {
        let mut row = vec![0.0; vars];
        row[x * ns..(x + 1) * ns].iter_mut().for_each(|v| *v = 1.0);
        constraints.push(Constraint::new(row, Relation::Eq, 1.0));
    }
    for x in 0..nx {
        for xp in x + 1..nx {
            for y in 0..ny {
                let mut f = vec![0.0; vars];
                for (s, w) in family.states().iter().enumerate() {
                    f[xp * ns + s] += w.entry(x, y);
                    f[x * ns + s] -= w.entry(xp, y);
                }
                let mut upper = f.clone();
                upper[t] = -1.0;
                let mut lower: Vec<f64> = f.iter().map(|v| -v).collect();
                lower[t] = -1.0;
                constraints.push(Constraint::new(upper, Relation::Le, 0.0));
                constraints.push(Constraint::new(lower, Relation::Le, 0.0));
            }
        }
    }
    let mut objective = vec![0.0; vars];
    objective[t] = 1.0;
    let x = match solve(&LinearProgram { objective, constraints })? {
        LpOutcome::Optimal { x, .. } => x,
        other => {
            return Err(Error::Domain(format!(
                "symmetrizer program is always feasible and bounded, solver returned {other:?}"
            )))
        }
    };
    let mut data = Vec::with_capacity(nx * ns);
    for row in x[..nx * ns].chunks(ns) {
        let total: f64 = row.iter().sum();
        data.extend(row.iter().map(|v| v / total));
    }
    let sigma = Channel::from_flat(nx, ns, data)?;
    let residual = symmetrizer_residual(family, &sigma)?;
    let symmetrizable = residual <= SYMMETRIZABLE_TOL;
    Ok(SymmetrizerResult {
        symmetrizable,
        sigma: symmetrizable.then_some(sigma),
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub symmetrizable: bool,
    pub residual: f64,
    /// Rectangle of the single-state channel `(W₁(λ), V)` at `n = 1` with
    /// uniform input and `V = X`.
    pub rectangle: RateRectangle,
}

pub fn lambda_sweep(lambdas: &[f64]) -> Result<Vec<SweepRow>> {
    if lambdas.is_empty() {
        return Err(Error::EmptySet);
    }
    lambdas
        .par_iter()
        .map(|&lambda| {
            let (family, v) = example_family(lambda)?;
            let check = symmetrizability_check(&family)?;
            let single = CompoundBcc::single(family.states()[0].clone(), v)?;
            let rectangle = rate_rectangle(&single, &AuxiliaryInput::direct(ProbVector::uniform(2), 1)?)?;
            Ok(SweepRow {
                lambda,
                symmetrizable: check.symmetrizable,
                residual: check.residual,
                rectangle,
            })
        })
        .collect()
}
