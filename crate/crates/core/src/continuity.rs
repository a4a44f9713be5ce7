//! Continuity bounds and their empirical verification.
//!
//! Every verifier measures the distance between the two inputs itself and
//! plugs the measured value into the bound, so a generator that overshoots
//! its nominal radius cannot hide a violation. Inequalities are checked
//! with an absolute tolerance of [`VIOLATION_TOL`].

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::channel::{perturb_compound, product_channel, tensor_product, Channel, CompoundBcc, DEFAULT_ENTRY_BUDGET};
use crate::error::{Error, Result};
use crate::info::{
    binary_entropy, conditional_mutual_information, entropy_of_mass, induced_joint, total_variation, AuxiliaryInput,
    JointDistribution,
};
use crate::io::{AuxJson, ChannelJson, CompoundJson};
use crate::metrics::{channel_distance, compound_distance, rectangle_corner_gap, rectangle_distance};
use crate::region::{capacity_region_approx, GridSpec, RateRectangle, RectangleEvaluator, INNER_APPROXIMATION};
use crate::sampling::{
    perturb_channel, perturb_row, random_aux, random_channel, random_compound, random_prob_vector,
    random_sparse_channel, random_sparse_prob_vector, trial_rng, Perturbation,
};

pub const VIOLATION_TOL: f64 = 1e-9;

/// Extra allowance on hull distances between grid approximations.
pub const GRID_SLACK: f64 = 1e-6;

fn check_eps(eps: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero {
        (0.0..1.0).contains(&eps)
    } else {
        eps > 0.0 && eps < 1.0
    };
    if ok {
        Ok(())
    } else {
        let range = if allow_zero { "[0,1)" } else { "(0,1)" };
        Err(Error::Domain(format!("epsilon {eps} outside {range}")))
    }
}

fn check_size(name: &str, size: usize) -> Result<()> {
    if size == 0 {
        return Err(Error::Domain(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// `2ε log|𝒴| + 2H₂(ε)`
pub fn delta1(eps: f64, y_size: usize) -> Result<f64> {
    check_eps(eps, true)?;
    check_size("|Y|", y_size)?;
    Ok(2.0 * eps * (y_size as f64).log2() + 2.0 * binary_entropy(eps)?)
}

/// `4ε log|𝒴| + 4H₂(ε)`
pub fn delta2(eps: f64, y_size: usize) -> Result<f64> {
    Ok(2.0 * delta1(eps, y_size)?)
}

/// All bounds at one `ε`, in bits. `ε = 0` is accepted as the limit case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaBundle {
    pub eps: f64,
    pub delta1: f64,
    pub delta2_y: f64,
    pub delta2_z: f64,
    /// Bound on the common-rate corner gap, `max{δ₂(ε,|𝒴|), δ₂(ε,|𝒵|)}`.
    pub delta_prime: f64,
    /// Bound on the confidential-rate corner gap, `δ₂(ε,|𝒴|) + δ₂(ε,|𝒵|)`.
    pub delta_dprime: f64,
    pub delta_total: f64,
}

impl DeltaBundle {
    pub fn new(eps: f64, y_size: usize, z_size: usize) -> Result<Self> {
        check_eps(eps, true)?;
        check_size("|Y|", y_size)?;
        check_size("|Z|", z_size)?;
        let h = binary_entropy(eps)?;
        let (ly, lz) = ((y_size as f64).log2(), (z_size as f64).log2());
        let delta_prime = 4.0 * h + 4.0 * eps * ly.max(lz);
        let delta_dprime = 4.0 * eps * ((y_size * z_size) as f64).log2() + 8.0 * h;
        Ok(DeltaBundle {
            eps,
            delta1: 2.0 * eps * ly + 2.0 * h,
            delta2_y: 4.0 * eps * ly + 4.0 * h,
            delta2_z: 4.0 * eps * lz + 4.0 * h,
            delta_prime,
            delta_dprime,
            delta_total: delta_prime + delta_dprime,
        })
    }
}

/// One inequality `gap ≤ bound` measured on one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub gap: f64,
    pub bound: f64,
}

impl Check {
    pub fn new(name: &'static str, gap: f64, bound: f64) -> Self {
        Check { name, gap, bound }
    }

    /// NaN gaps count as violations.
    pub fn violated(&self) -> bool {
        self.gap.is_nan() || self.gap > self.bound + VIOLATION_TOL
    }

    pub fn ratio(&self) -> f64 {
        if self.bound > 0.0 {
            self.gap / self.bound
        } else if self.gap <= VIOLATION_TOL {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// The checks made on one instance. The first check is the headline one.
#[derive(Debug, Clone)]
pub struct Instance {
    pub checks: Vec<Check>,
    pub detail: Value,
}

impl Instance {
    pub fn violated(&self) -> bool {
        self.checks.iter().any(Check::violated)
    }

    fn primary(&self) -> &Check {
        &self.checks[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub instances: usize,
    pub violations: usize,
    pub max_gap: f64,
    pub tightness: f64,
}

/// Aggregate of a verification run.
///
/// `bound` is the nominal bound at the requested `ε`; each instance is
/// judged against its own bound at the measured distance. `tightness` is
/// the largest headline gap/bound ratio. `witness` is the first violating
/// instance if there is one, else the tightest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub suite: String,
    pub instances: usize,
    pub violations: usize,
    pub max_gap: f64,
    pub bound: f64,
    pub tightness: f64,
    pub witness: Value,
    pub checks: Vec<CheckSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ContinuityReport {
    pub fn from_instances(suite: &str, bound: f64, instances: &[Instance], note: Option<String>) -> Self {
        let mut summaries: Vec<CheckSummary> = Vec::new();
        let mut violations = 0;
        let mut max_gap: f64 = 0.0;
        let mut tightness: f64 = 0.0;
        let mut tightest: Option<usize> = None;
        let mut first_violation: Option<usize> = None;

        for (i, inst) in instances.iter().enumerate() {
            if inst.violated() {
                violations += 1;
                first_violation.get_or_insert(i);
            }
            let head = inst.primary();
            max_gap = max_gap.max(head.gap);
            if tightest.is_none() || head.ratio() > tightness {
                tightness = head.ratio();
                tightest = Some(i);
            }
            for c in &inst.checks {
                let pos = match summaries.iter().position(|s| s.name == c.name) {
                    Some(p) => p,
                    None => {
                        summaries.push(CheckSummary {
                            name: c.name.to_string(),
                            instances: 0,
                            violations: 0,
                            max_gap: 0.0,
                            tightness: 0.0,
                        });
                        summaries.len() - 1
                    }
                };
                let s = &mut summaries[pos];
                s.instances += 1;
                s.violations += c.violated() as usize;
                s.max_gap = s.max_gap.max(c.gap);
                s.tightness = s.tightness.max(c.ratio());
            }
        }

        let witness = match first_violation.or(tightest) {
            Some(i) => json!({
                "index": i,
                "violated": instances[i].violated(),
                "checks": instances[i].checks,
                "detail": instances[i].detail,
            }),
            None => Value::Null,
        };
        ContinuityReport {
            suite: suite.to_string(),
            instances: instances.len(),
            violations,
            max_gap,
            bound,
            tightness,
            witness,
            checks: summaries,
            note,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JointSizes {
    pub x: usize,
    pub y: usize,
}

/// `H(Y|X)` for a joint flattened as `(x, y)`.
pub fn conditional_entropy(joint: &[f64], sizes: JointSizes) -> Result<f64> {
    if joint.len() != sizes.x * sizes.y {
        return Err(Error::LengthMismatch {
            left: joint.len(),
            right: sizes.x * sizes.y,
        });
    }
    let p_x: Vec<f64> = joint.chunks(sizes.y).map(|row| row.iter().sum()).collect();
    Ok((entropy_of_mass(joint) - entropy_of_mass(&p_x)).max(0.0))
}

/// Compares `|H(Y|X) - H(Ỹ|X̃)|` with `δ₁` at the measured distance.
pub fn entropy_continuity_instance(p: &[f64], q: &[f64], sizes: JointSizes) -> Result<Instance> {
    let tv = total_variation(p, q)?;
    let gap = (conditional_entropy(p, sizes)? - conditional_entropy(q, sizes)?).abs();
    Ok(Instance {
        checks: vec![Check::new("entropy_gap", gap, delta1(tv, sizes.y)?)],
        detail: json!({ "tv": tv, "p": p, "q": q }),
    })
}

fn alternating_mode(trial: usize) -> Perturbation {
    if trial.is_multiple_of(2) {
        Perturbation::Boundary
    } else {
        Perturbation::Interior
    }
}

pub fn verify_entropy_continuity(trials: usize, eps: f64, sizes: JointSizes, seed: u64) -> Result<ContinuityReport> {
    check_eps(eps, false)?;
    check_size("|X|", sizes.x)?;
    check_size("|Y|", sizes.y)?;
    let len = sizes.x * sizes.y;
    let instances = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let base = if t % 4 < 2 {
                random_sparse_prob_vector(&mut rng, len, 0.3)
            } else {
                random_prob_vector(&mut rng, len)
            }
            .into_inner();
            let moved = perturb_row(&mut rng, &base, eps, alternating_mode(t));
            let mut inst = entropy_continuity_instance(&base, &moved, sizes)?;
            inst.detail["trial"] = json!(t);
            Ok(inst)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContinuityReport::from_instances(
        "lemma2",
        delta1(eps, sizes.y)?,
        &instances,
        None,
    ))
}

/// `P(u, v, y₁ᵏ ỹₖ₊₁ⁿ)`: the first `k` block coordinates pass through `w`,
/// the rest through `w_tilde`.
pub fn hybrid_distribution(
    aux: &AuxiliaryInput,
    w: &Channel,
    w_tilde: &Channel,
    k: usize,
) -> Result<JointDistribution> {
    if w.inputs() != w_tilde.inputs() || w.outputs() != w_tilde.outputs() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            w.inputs(),
            w.outputs(),
            w_tilde.inputs(),
            w_tilde.outputs()
        )));
    }
    let n = aux.n();
    if k > n {
        return Err(Error::DimensionMismatch(format!("hybrid index {k} exceeds block length {n}")));
    }
    let factors: Vec<&Channel> = std::iter::repeat_n(w, k)
        .chain(std::iter::repeat_n(w_tilde, n - k))
        .collect();
    induced_joint(aux, &tensor_product(&factors, DEFAULT_ENTRY_BUDGET)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TelescopeStep {
    pub k: usize,
    /// `‖P_{k+1} - P_k‖` between consecutive hybrids.
    pub tv: f64,
    /// `I(V;Y₁ᵏ⁺¹Ỹₖ₊₂ⁿ|U) - I(V;Y₁ᵏỸₖ₊₁ⁿ|U)`
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TelescopeAnalysis {
    pub n: usize,
    pub y_size: usize,
    pub measured_eps: f64,
    pub steps: Vec<TelescopeStep>,
    /// `I(V;Yⁿ|U) - I(V;Ỹⁿ|U)`, computed from the plain product channels.
    pub total_difference: f64,
    /// `|Σ steps - total_difference|`
    pub reconstruction_error: f64,
}

pub fn analyze_telescoping(aux: &AuxiliaryInput, w: &Channel, w_tilde: &Channel) -> Result<TelescopeAnalysis> {
    let n = aux.n();
    let measured_eps = channel_distance(w, w_tilde)?;
    let hybrids = (0..=n)
        .map(|k| hybrid_distribution(aux, w, w_tilde, k))
        .collect::<Result<Vec<_>>>()?;
    let info = hybrids
        .iter()
        .map(conditional_mutual_information)
        .collect::<Result<Vec<_>>>()?;
    let steps = (0..n)
        .map(|k| {
            Ok(TelescopeStep {
                k,
                tv: total_variation(hybrids[k + 1].mass(), hybrids[k].mass())?,
                difference: info[k + 1] - info[k],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total_difference = conditional_mutual_information(&induced_joint(aux, &product_channel(w, n)?)?)?
        - conditional_mutual_information(&induced_joint(aux, &product_channel(w_tilde, n)?)?)?;
    let summed: f64 = steps.iter().map(|s| s.difference).sum();
    Ok(TelescopeAnalysis {
        n,
        y_size: w.outputs(),
        measured_eps,
        steps,
        total_difference,
        reconstruction_error: (summed - total_difference).abs(),
    })
}

impl TelescopeAnalysis {
    /// Summed bound first, then the per-step bounds and the identity.
    pub fn checks(&self) -> Result<Vec<Check>> {
        let d2 = delta2(self.measured_eps, self.y_size)?;
        let max_step = self.steps.iter().map(|s| s.difference.abs()).fold(0.0, f64::max);
        let max_tv = self.steps.iter().map(|s| s.tv).fold(0.0, f64::max);
        Ok(vec![
            Check::new("mi_bound", self.total_difference.abs(), self.n as f64 * d2),
            Check::new("step_gap", max_step, d2),
            Check::new("step_tv", max_tv, self.measured_eps),
            Check::new("reconstruction", self.reconstruction_error, 0.0),
        ])
    }
}

/// Checks every telescoping step of one instance, plus the summed bound.
pub fn verify_telescoping(
    aux: &AuxiliaryInput,
    w: &Channel,
    w_tilde: &Channel,
    eps: f64,
) -> Result<ContinuityReport> {
    check_eps(eps, true)?;
    let measured = channel_distance(w, w_tilde)?;
    if measured > eps {
        return Err(Error::PreconditionViolated { measured, eps });
    }
    let analysis = analyze_telescoping(aux, w, w_tilde)?;
    let instances = telescope_instances(&analysis)?;
    Ok(ContinuityReport::from_instances(
        "telescope",
        aux.n() as f64 * delta2(eps, w.outputs())?,
        &instances,
        None,
    ))
}

fn telescope_instances(analysis: &TelescopeAnalysis) -> Result<Vec<Instance>> {
    let d = analysis.measured_eps;
    let d2 = delta2(d, analysis.y_size)?;
    let mut instances: Vec<Instance> = analysis
        .steps
        .iter()
        .map(|s| Instance {
            checks: vec![
                Check::new("step_gap", s.difference.abs(), d2),
                Check::new("step_tv", s.tv, d),
            ],
            detail: json!({ "step": s, "measured_eps": d }),
        })
        .collect();
    instances.push(Instance {
        checks: vec![
            Check::new("mi_bound", analysis.total_difference.abs(), analysis.n as f64 * d2),
            Check::new("reconstruction", analysis.reconstruction_error, 0.0),
        ],
        detail: json!({
            "measured_eps": d,
            "total_difference": analysis.total_difference,
            "reconstruction_error": analysis.reconstruction_error,
        }),
    });
    Ok(instances)
}

/// Alphabet sizes for random conditional-information instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MiSizes {
    pub x: usize,
    pub y: usize,
    pub u: usize,
    pub v: usize,
}

impl Default for MiSizes {
    fn default() -> Self {
        MiSizes { x: 2, y: 3, u: 2, v: 3 }
    }
}

struct MiTrial {
    aux: AuxiliaryInput,
    w: Channel,
    w_tilde: Channel,
}

fn mi_trial(seed: u64, t: usize, eps: f64, n: usize, sizes: MiSizes) -> Result<MiTrial> {
    let mut rng = trial_rng(seed, t as u64);
    let w = if t % 4 < 2 {
        random_sparse_channel(&mut rng, sizes.x, sizes.y)
    } else {
        random_channel(&mut rng, sizes.x, sizes.y)
    };
    let w_tilde = perturb_channel(&mut rng, &w, eps, alternating_mode(t));
    let aux = random_aux(&mut rng, sizes.u, sizes.v, sizes.x, n)?;
    Ok(MiTrial { aux, w, w_tilde })
}

fn check_mi_args(eps: f64, n: usize, sizes: MiSizes) -> Result<()> {
    check_eps(eps, false)?;
    check_size("n", n)?;
    for (name, s) in [("|X|", sizes.x), ("|Y|", sizes.y), ("|U|", sizes.u), ("|V|", sizes.v)] {
        check_size(name, s)?;
    }
    let entries = (sizes.x as u128)
        .checked_pow(n as u32)
        .and_then(|a| (sizes.y as u128).checked_pow(n as u32).map(|b| a.saturating_mul(b)))
        .unwrap_or(u128::MAX);
    if entries > DEFAULT_ENTRY_BUDGET {
        return Err(Error::SizeExceeded {
            entries,
            budget: DEFAULT_ENTRY_BUDGET,
        });
    }
    Ok(())
}

pub fn verify_mi_continuity(
    trials: usize,
    eps: f64,
    n: usize,
    sizes: MiSizes,
    seed: u64,
) -> Result<ContinuityReport> {
    check_mi_args(eps, n, sizes)?;
    let instances = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial = mi_trial(seed, t, eps, n, sizes)?;
            let analysis = analyze_telescoping(&trial.aux, &trial.w, &trial.w_tilde)?;
            Ok(Instance {
                checks: analysis.checks()?,
                detail: json!({
                    "trial": t,
                    "w": ChannelJson::from(&trial.w),
                    "w_tilde": ChannelJson::from(&trial.w_tilde),
                    "aux": AuxJson::from(&trial.aux),
                    "analysis": analysis,
                }),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContinuityReport::from_instances(
        "lemma3",
        n as f64 * delta2(eps, sizes.y)?,
        &instances,
        None,
    ))
}

/// Per-step telescoping checks over random instances.
pub fn telescope_suite(trials: usize, eps: f64, n: usize, sizes: MiSizes, seed: u64) -> Result<ContinuityReport> {
    check_mi_args(eps, n, sizes)?;
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial = mi_trial(seed, t, eps, n, sizes)?;
            let analysis = analyze_telescoping(&trial.aux, &trial.w, &trial.w_tilde)?;
            let mut instances = telescope_instances(&analysis)?;
            for inst in &mut instances {
                inst.detail["trial"] = json!(t);
            }
            Ok(instances)
        })
        .collect::<Result<Vec<_>>>()?;
    let instances: Vec<Instance> = per_trial.into_iter().flatten().collect();
    Ok(ContinuityReport::from_instances(
        "telescope",
        n as f64 * delta2(eps, sizes.y)?,
        &instances,
        None,
    ))
}

/// Corner gap first, then the Hausdorff distance and the two axis gaps.
pub fn rectangle_checks(r1: &RateRectangle, r2: &RateRectangle, bundle: &DeltaBundle) -> Vec<Check> {
    vec![
        Check::new("corner_gap", rectangle_corner_gap(r1, r2), bundle.delta_total),
        Check::new("region_distance", rectangle_distance(r1, r2), bundle.delta_total),
        Check::new("common_gap", (r1.a0 - r2.a0).abs(), bundle.delta_prime),
        Check::new("confidential_gap", (r1.a1 - r2.a1).abs(), bundle.delta_dprime),
    ]
}

fn check_same_alphabets(c1: &CompoundBcc, c2: &CompoundBcc) -> Result<()> {
    let shape = |c: &CompoundBcc| (c.x_size(), c.y_size(), c.z_size());
    if shape(c1) != shape(c2) {
        return Err(Error::ShapeMismatch(format!(
            "alphabets {:?} vs {:?}",
            shape(c1),
            shape(c2)
        )));
    }
    Ok(())
}

fn measured_distance(c1: &CompoundBcc, c2: &CompoundBcc, eps: f64) -> Result<f64> {
    check_eps(eps, true)?;
    check_same_alphabets(c1, c2)?;
    let measured = compound_distance(c1, c2)?;
    if measured > eps {
        return Err(Error::PreconditionViolated { measured, eps });
    }
    Ok(measured)
}

fn rectangle_instances(c1: &CompoundBcc, c2: &CompoundBcc, aux_list: &[AuxiliaryInput], measured: f64) -> Result<Vec<Instance>> {
    let bundle = DeltaBundle::new(measured, c1.y_size(), c1.z_size())?;
    let mut evaluators = BTreeMap::new();
    for aux in aux_list {
        if let Entry::Vacant(slot) = evaluators.entry(aux.n()) {
            slot.insert((RectangleEvaluator::new(c1, aux.n())?, RectangleEvaluator::new(c2, aux.n())?));
        }
    }
    aux_list
        .par_iter()
        .enumerate()
        .map(|(i, aux)| {
            let (e1, e2) = &evaluators[&aux.n()];
            let r1 = e1.evaluate(aux)?;
            let r2 = e2.evaluate(aux)?;
            Ok(Instance {
                checks: rectangle_checks(&r1, &r2, &bundle),
                detail: json!({
                    "aux_index": i,
                    "measured_eps": measured,
                    "aux": AuxJson::from(aux),
                    "rect1": r1,
                    "rect2": r2,
                }),
            })
        })
        .collect()
}

/// Compares the rectangles of `c1` and `c2` for every auxiliary chain.
pub fn verify_rectangle_continuity(
    c1: &CompoundBcc,
    c2: &CompoundBcc,
    aux_list: &[AuxiliaryInput],
    eps: f64,
) -> Result<ContinuityReport> {
    let measured = measured_distance(c1, c2, eps)?;
    let mut instances = rectangle_instances(c1, c2, aux_list, measured)?;
    let (j1, j2) = (json!(CompoundJson::from(c1)), json!(CompoundJson::from(c2)));
    for inst in &mut instances {
        inst.detail["c1"] = j1.clone();
        inst.detail["c2"] = j2.clone();
    }
    Ok(ContinuityReport::from_instances(
        "lemma4",
        DeltaBundle::new(eps, c1.y_size(), c1.z_size())?.delta_total,
        &instances,
        None,
    ))
}

/// Largest alphabet used by the random compound suites.
const SUITE_MAX_ALPHABET: usize = 3;

/// Random compound pairs (`|𝒮| ≤ 3`, alphabets 2 or 3) perturbed by `eps`,
/// each checked on `aux_per_pair` random chains of block length `n`.
pub fn lemma4_suite(pairs: usize, aux_per_pair: usize, eps: f64, n: usize, seed: u64) -> Result<ContinuityReport> {
    check_eps(eps, false)?;
    check_size("n", n)?;
    let per_pair = (0..pairs)
        .into_par_iter()
        .map(|p| {
            let mut rng = trial_rng(seed, p as u64);
            let states = rng.random_range(1..=SUITE_MAX_ALPHABET);
            let (x, y, z) = (
                rng.random_range(2..=SUITE_MAX_ALPHABET),
                rng.random_range(2..=SUITE_MAX_ALPHABET),
                rng.random_range(2..=SUITE_MAX_ALPHABET),
            );
            let c1 = random_compound(&mut rng, states, x, y, z)?;
            let c2 = perturb_compound(&c1, eps, rng.random())?;
            let aux_list = (0..aux_per_pair)
                .map(|_| {
                    let u = rng.random_range(1..=SUITE_MAX_ALPHABET);
                    let v = rng.random_range(1..=SUITE_MAX_ALPHABET);
                    random_aux(&mut rng, u, v, x, n)
                })
                .collect::<Result<Vec<_>>>()?;
            let measured = measured_distance(&c1, &c2, eps)?;
            let mut instances = rectangle_instances(&c1, &c2, &aux_list, measured)?;
            let (j1, j2) = (json!(CompoundJson::from(&c1)), json!(CompoundJson::from(&c2)));
            for inst in &mut instances {
                inst.detail["pair"] = json!(p);
                inst.detail["c1"] = j1.clone();
                inst.detail["c2"] = j2.clone();
            }
            Ok(instances)
        })
        .collect::<Result<Vec<_>>>()?;
    let instances: Vec<Instance> = per_pair.into_iter().flatten().collect();
    Ok(ContinuityReport::from_instances(
        "lemma4",
        DeltaBundle::new(eps, SUITE_MAX_ALPHABET, SUITE_MAX_ALPHABET)?.delta_total,
        &instances,
        None,
    ))
}

fn capacity_note(n_max: usize, grid: &GridSpec) -> String {
    format!(
        "{INNER_APPROXIMATION}: matched auxiliary grid, step 1/{}, |U|={}, |V|={}, n_max={n_max}, slack {GRID_SLACK:e}",
        grid.resolution, grid.u_size, grid.v_size
    )
}

fn capacity_instance(c1: &CompoundBcc, c2: &CompoundBcc, n_max: usize, grid: &GridSpec, measured: f64) -> Result<Instance> {
    let bundle = DeltaBundle::new(measured, c1.y_size(), c1.z_size())?;
    let r1 = capacity_region_approx(c1, n_max, grid)?;
    let r2 = capacity_region_approx(c2, n_max, grid)?;
    let distance = r1.hull_distance(&r2)?;
    Ok(Instance {
        checks: vec![Check::new("hull_distance", distance, bundle.delta_total + GRID_SLACK)],
        detail: json!({
            "measured_eps": measured,
            "delta": bundle.delta_total,
            "slack": GRID_SLACK,
            "hull1": r1.hull,
            "hull2": r2.hull,
            "c1": CompoundJson::from(c1),
            "c2": CompoundJson::from(c2),
        }),
    })
}

/// Hull distance between the grid approximations of the two capacity
/// regions, both computed on the same auxiliary grid.
pub fn verify_capacity_continuity(
    c1: &CompoundBcc,
    c2: &CompoundBcc,
    n_max: usize,
    grid: &GridSpec,
    eps: f64,
) -> Result<ContinuityReport> {
    let measured = measured_distance(c1, c2, eps)?;
    let instance = capacity_instance(c1, c2, n_max, grid, measured)?;
    Ok(ContinuityReport::from_instances(
        "theorem2",
        DeltaBundle::new(eps, c1.y_size(), c1.z_size())?.delta_total + GRID_SLACK,
        &[instance],
        Some(capacity_note(n_max, grid)),
    ))
}

/// Random pairs with binary input, so the grid stays small.
pub fn theorem2_suite(pairs: usize, eps: f64, n_max: usize, grid: &GridSpec, seed: u64) -> Result<ContinuityReport> {
    check_eps(eps, false)?;
    let instances = (0..pairs)
        .into_par_iter()
        .map(|p| {
            let mut rng = trial_rng(seed, p as u64);
            let states = rng.random_range(1..=SUITE_MAX_ALPHABET);
            let y = rng.random_range(2..=SUITE_MAX_ALPHABET);
            let z = rng.random_range(2..=SUITE_MAX_ALPHABET);
            let c1 = random_compound(&mut rng, states, 2, y, z)?;
            let c2 = perturb_compound(&c1, eps, rng.random())?;
            let measured = measured_distance(&c1, &c2, eps)?;
            let mut inst = capacity_instance(&c1, &c2, n_max, grid, measured)?;
            inst.detail["pair"] = json!(p);
            Ok(inst)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContinuityReport::from_instances(
        "theorem2",
        DeltaBundle::new(eps, SUITE_MAX_ALPHABET, SUITE_MAX_ALPHABET)?.delta_total + GRID_SLACK,
        &instances,
        Some(capacity_note(n_max, grid)),
    ))
}
