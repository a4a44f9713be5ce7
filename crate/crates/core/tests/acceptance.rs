//! Acceptance criteria, one PASS/FAIL line each. Every library result is
//! re-derived by a brute-force reference in `oracle`.

mod oracle;

use std::process::Command;
use std::time::{Duration, Instant};

use bcc_lab::avc::{example_family, symmetrizability_check};
use bcc_lab::continuity::{
    hybrid_distribution, lemma4_suite, theorem2_suite, verify_entropy_continuity, verify_mi_continuity,
    ContinuityReport, DeltaBundle, JointSizes, MiSizes, VIOLATION_TOL,
};
use bcc_lab::metrics::{channel_distance, rectangle_corner_gap, rectangle_distance, region_distance, RegionPointSet};
use bcc_lab::region::{region_mn, GridSpec, RateRectangle};
use bcc_lab::sampling::{perturb_channel, random_aux, random_channel, random_sparse_channel, trial_rng, Perturbation};
use bcc_lab::{delta2, induced_joint, product_channel, Channel, CompoundBcc, RatePoint};
use rand::Rng;
use serde_json::Value;

use oracle::{Aux, Matrix};

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn witness_detail(r: &ContinuityReport) -> &Value {
    &r.witness["detail"]
}

fn criterion_1() -> Outcome {
    let d2 = delta2(0.5, 2).unwrap();
    let bundle = DeltaBundle::new(0.1, 2, 2).unwrap();
    let exact = oracle::delta(0.1, 2, 2);
    let listed = 6.827952;
    let agrees = (bundle.delta_total - exact).abs() < 1e-12 && (d2 - oracle::delta2(0.5, 2)).abs() < 1e-15;
    let pass = d2 == 6.0 && (bundle.delta_total - listed).abs() <= 1e-6 && agrees;
    outcome(
        pass,
        format!(
            "delta2(0.5,2) = {d2:.6}; delta(0.1,2,2) = {:.7} vs listed {listed} (|diff| = {:.1e}, tol 1e-6); \
             reference evaluation {exact:.7}, library agrees: {agrees}",
            bundle.delta_total,
            (bundle.delta_total - listed).abs()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut violations = 0;
    let mut instances = 0;
    let mut rechecked = true;
    let mut worst: f64 = 0.0;
    for (i, &eps) in [0.01, 0.05, 0.1, 0.25].iter().enumerate() {
        for y in 2..=4 {
            let sizes = JointSizes { x: 3, y };
            let r = verify_entropy_continuity(1000, eps, sizes, 100 + (i * 10 + y) as u64).unwrap();
            instances += r.instances;
            violations += r.violations;
            worst = worst.max(r.tightness);
            let w = witness_detail(&r);
            let (p, q) = (oracle::vector(&w["p"]), oracle::vector(&w["q"]));
            let tv = oracle::l1(&p, &q);
            let gap = (oracle::conditional_entropy(&p, 3, y) - oracle::conditional_entropy(&q, 3, y)).abs();
            let reported = r.witness["checks"][0]["gap"].as_f64().unwrap();
            rechecked &= tv <= eps && (gap - reported).abs() < 1e-12 && gap <= oracle::delta1(tv, y) + VIOLATION_TOL;
        }
    }
    outcome(
        violations == 0 && instances == 12_000 && rechecked,
        format!("{instances} instances, {violations} violations, max tightness {worst:.4}, witnesses re-derived: {rechecked}"),
    )
}

fn criterion_3() -> Outcome {
    let mut violations = 0;
    let mut instances = 0;
    let mut worst_reconstruction: f64 = 0.0;
    let mut rechecked = true;
    for n in 1..=3 {
        for (j, &eps) in [0.01, 0.1].iter().enumerate() {
            let r = verify_mi_continuity(500, eps, n, MiSizes::default(), 200 + (n * 10 + j) as u64).unwrap();
            instances += r.instances;
            violations += r.violations;
            let recon = r.checks.iter().find(|c| c.name == "reconstruction").unwrap();
            worst_reconstruction = worst_reconstruction.max(recon.max_gap);
            violations += recon.violations;

            let w = witness_detail(&r);
            let (wm, wt) = (oracle::matrix(&w["w"]), oracle::matrix(&w["w_tilde"]));
            let aux = Aux::from_json(&w["aux"]);
            let (_, i_w) = oracle::chain_information(&oracle::chain_joint(&aux, &vec![&wm; n]));
            let (_, i_wt) = oracle::chain_information(&oracle::chain_joint(&aux, &vec![&wt; n]));
            let d = oracle::channel_distance(&wm, &wt);
            let reported = w["analysis"]["total_difference"].as_f64().unwrap();
            rechecked &= d <= eps
                && ((i_w - i_wt) - reported).abs() < 1e-9
                && (i_w - i_wt).abs() <= n as f64 * oracle::delta2(d, 3) + VIOLATION_TOL;
        }
    }
    outcome(
        violations == 0 && instances == 3000 && worst_reconstruction <= 1e-9 && rechecked,
        format!(
            "{instances} instances, {violations} violations, worst reconstruction error {worst_reconstruction:.1e}, \
             witnesses re-derived: {rechecked}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut worst_endpoint: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for t in 0..100u64 {
        let mut rng = trial_rng(4, t);
        let n = rng.random_range(1..=3);
        let (x, y) = (rng.random_range(2..=3), rng.random_range(2..=3));
        let w = random_sparse_channel(&mut rng, x, y);
        let wt = perturb_channel(&mut rng, &w, 0.1, Perturbation::Boundary);
        let (u_size, v_size) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let aux = random_aux(&mut rng, u_size, v_size, x, n).unwrap();

        let top = hybrid_distribution(&aux, &w, &wt, n).unwrap();
        let bottom = hybrid_distribution(&aux, &w, &wt, 0).unwrap();
        let direct_w = induced_joint(&aux, &product_channel(&w, n).unwrap()).unwrap();
        let direct_wt = induced_joint(&aux, &product_channel(&wt, n).unwrap()).unwrap();
        worst_endpoint = worst_endpoint
            .max(oracle::l1(top.mass(), direct_w.mass()))
            .max(oracle::l1(bottom.mass(), direct_wt.mass()));

        let (wm, wtm) = (w.to_rows(), wt.to_rows());
        let reference = Aux::from_lib(&aux);
        for k in 0..=n {
            let factors: Vec<&Matrix> = (0..n).map(|i| if i < k { &wm } else { &wtm }).collect();
            let expected = oracle::flatten(&oracle::chain_joint(&reference, &factors));
            let got = hybrid_distribution(&aux, &w, &wt, k).unwrap();
            worst_oracle = worst_oracle.max(oracle::l1(got.mass(), &expected));
        }
    }
    outcome(
        worst_endpoint <= 1e-12 && worst_oracle <= 1e-12,
        format!("100 instances, endpoint mismatch {worst_endpoint:.1e}, brute-force mismatch over all k {worst_oracle:.1e}"),
    )
}

fn criterion_5() -> Outcome {
    let r = lemma4_suite(50, 50, 0.05, 1, 5).unwrap();
    let component = |name: &str| r.checks.iter().find(|c| c.name == name).map(|c| c.violations).unwrap_or(usize::MAX);
    let w = witness_detail(&r);
    let (s1, s2) = (oracle::compound_states(&w["c1"]), oracle::compound_states(&w["c2"]));
    let aux = Aux::from_json(&w["aux"]);
    let (a1, b1) = oracle::rectangle(&s1, &aux);
    let (a2, b2) = oracle::rectangle(&s2, &aux);
    let d = oracle::compound_distance(&s1, &s2);
    let (y, z) = (s1[0].0[0].len(), s1[0].1[0].len());
    let gap = (a1 - a2).abs() + (b1 - b2).abs();
    let reported = r.witness["checks"][0]["gap"].as_f64().unwrap();
    let rechecked = d <= 0.05
        && (gap - reported).abs() < 1e-9
        && gap <= oracle::delta(d, y, z) + VIOLATION_TOL
        && (a1 - a2).abs() <= oracle::delta_prime(d, y, z) + VIOLATION_TOL
        && (b1 - b2).abs() <= oracle::delta_dprime(d, y, z) + VIOLATION_TOL;
    let pass = r.instances == 2500
        && r.violations == 0
        && ["corner_gap", "common_gap", "confidential_gap"].iter().all(|c| component(c) == 0)
        && rechecked;
    outcome(
        pass,
        format!(
            "{} instances, {} violations, max corner gap {:.4}, tightness {:.4}, witness re-derived: {rechecked}",
            r.instances, r.violations, r.max_gap, r.tightness
        ),
    )
}

fn hull_points(v: &Value) -> Vec<(f64, f64)> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|p| (p["r0"].as_f64().unwrap(), p["r1"].as_f64().unwrap()))
        .collect()
}

fn inside_convex(p: (f64, f64), hull: &[(f64, f64)]) -> bool {
    if hull.len() < 3 {
        return false;
    }
    (0..hull.len()).all(|i| {
        let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
        (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= -1e-12
    })
}

/// Directed ℓ₁ distance between convex polygons: worst vertex of `a`,
/// measured against a dense sampling of the boundary of `b`.
fn sampled_directed(a: &[(f64, f64)], b: &[(f64, f64)], samples: usize) -> f64 {
    let mut boundary = Vec::new();
    for i in 0..b.len() {
        let (p, q) = (b[i], b[(i + 1) % b.len()]);
        for k in 0..samples {
            let t = k as f64 / samples as f64;
            boundary.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
        }
    }
    a.iter()
        .map(|&p| {
            if inside_convex(p, b) {
                0.0
            } else {
                boundary
                    .iter()
                    .map(|q| (p.0 - q.0).abs() + (p.1 - q.1).abs())
                    .fold(f64::INFINITY, f64::min)
            }
        })
        .fold(0.0, f64::max)
}

fn criterion_6() -> Outcome {
    let r = theorem2_suite(10, 0.05, 1, &GridSpec::new(8), 6).unwrap();
    let w = witness_detail(&r);
    let (h1, h2) = (hull_points(&w["hull1"]), hull_points(&w["hull2"]));
    let sampled = sampled_directed(&h1, &h2, 20_000).max(sampled_directed(&h2, &h1, 20_000));
    let reported = r.witness["checks"][0]["gap"].as_f64().unwrap();
    let (s1, s2) = (oracle::compound_states(&w["c1"]), oracle::compound_states(&w["c2"]));
    let d = oracle::compound_distance(&s1, &s2);
    let (y, z) = (s1[0].0[0].len(), s1[0].1[0].len());
    // Boundary sampling can only overestimate the exact distance, by at
    // most the sample spacing.
    let rechecked = reported <= sampled + 1e-12 && sampled - reported < 1e-3 && reported <= oracle::delta(d, y, z) + 1e-6;
    outcome(
        r.instances == 10 && r.violations == 0 && rechecked,
        format!(
            "{} pairs, {} violations, max hull distance {:.4}, tightness {:.4}, witness re-derived: {rechecked}",
            r.instances, r.violations, r.max_gap, r.tightness
        ),
    )
}

fn lattice(parts: usize, resolution: usize) -> Vec<Vec<f64>> {
    if parts == 1 {
        return vec![vec![1.0]];
    }
    let mut out = Vec::new();
    for k in 0..=resolution {
        for mut rest in lattice(parts - 1, resolution - k) {
            let scale = (resolution - k) as f64 / resolution as f64;
            rest.iter_mut().for_each(|v| *v *= scale);
            let mut row = vec![k as f64 / resolution as f64];
            row.extend(rest);
            out.push(row);
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let w: Matrix = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let v: Matrix = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
    let states = vec![(w.clone(), v.clone())];
    let simplex = lattice(2, 16);
    let target = (0.0, 1.0);
    let mut oracle_best = f64::INFINITY;
    for p_u in &simplex {
        for v0 in &simplex {
            for v1 in &simplex {
                for e0 in &simplex {
                    for e1 in &simplex {
                        let aux = Aux {
                            n: 1,
                            p_u: p_u.clone(),
                            p_v_given_u: vec![v0.clone(), v1.clone()],
                            encoder: vec![e0.clone(), e1.clone()],
                        };
                        let (a0, a1) = oracle::rectangle(&states, &aux);
                        oracle_best = oracle_best.min((a0 - target.0).abs() + (a1 - target.1).abs());
                    }
                }
            }
        }
    }
    let c = CompoundBcc::single(Channel::identity(2), Channel::uniform(2, 2)).unwrap();
    let region = region_mn(&c, 1, &GridSpec::new(16)).unwrap();
    let lib_best = region
        .corners
        .iter()
        .map(|k| k.corner.l1(RatePoint::new(target.0, target.1)))
        .fold(f64::INFINITY, f64::min);
    outcome(
        lib_best <= 0.05 && (lib_best - oracle_best).abs() < 1e-9,
        format!(
            "{} grid chains, best corner at l1 distance {lib_best:.2e} from (0,1); brute-force grid {oracle_best:.2e}",
            region.corners.len()
        ),
    )
}

fn residual(states: &[Matrix], sigma: &Matrix) -> f64 {
    let (nx, ny) = (states[0].len(), states[0][0].len());
    let mut worst: f64 = 0.0;
    for x in 0..nx {
        for xp in 0..nx {
            for y in 0..ny {
                let lhs: f64 = states.iter().enumerate().map(|(s, w)| w[x][y] * sigma[xp][s]).sum();
                let rhs: f64 = states.iter().enumerate().map(|(s, w)| w[xp][y] * sigma[x][s]).sum();
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    worst
}

fn criterion_8() -> Outcome {
    let (f0, _) = example_family(0.0).unwrap();
    let r0 = symmetrizability_check(&f0).unwrap();
    let states0: Vec<Matrix> = f0.states().iter().map(Channel::to_rows).collect();
    let witness_ok = r0
        .sigma
        .as_ref()
        .map(|s| residual(&states0, &s.to_rows()) <= 1e-12)
        .unwrap_or(false);
    let zero_ok = r0.symmetrizable && r0.residual <= 1e-12 && witness_ok;

    let mut margins = Vec::new();
    let mut positive_ok = true;
    for lambda in [0.01, 0.1, 0.25, 0.5, 0.75, 1.0] {
        let (f, _) = example_family(lambda).unwrap();
        let r = symmetrizability_check(&f).unwrap();
        let states: Vec<Matrix> = f.states().iter().map(Channel::to_rows).collect();
        // Brute-force search over σ(·|x) = (a, 1-a), (b, 1-b).
        let mut grid_min = f64::INFINITY;
        for i in 0..=200 {
            for j in 0..=200 {
                let (a, b) = (i as f64 / 200.0, j as f64 / 200.0);
                grid_min = grid_min.min(residual(&states, &vec![vec![a, 1.0 - a], vec![b, 1.0 - b]]));
            }
        }
        positive_ok &= !r.symmetrizable && r.residual > 1e-6 && r.residual <= grid_min + 1e-12;
        margins.push(format!("{lambda}:{:.3}", r.residual));
    }
    outcome(
        zero_ok && positive_ok,
        format!(
            "lambda=0 symmetrizable={} residual={:.1e} witness verified={witness_ok}; margins {}",
            r0.symmetrizable,
            r0.residual,
            margins.join(" ")
        ),
    )
}

fn vertex_set(r: &RateRectangle) -> RegionPointSet {
    RegionPointSet::new(vec![
        RatePoint::ORIGIN,
        RatePoint::new(r.a0, 0.0),
        RatePoint::new(0.0, r.a1),
        RatePoint::new(r.a0, r.a1),
    ])
    .unwrap()
}

/// Hausdorff distance between filled boxes from the vertices of each box
/// clamped into the other.
fn box_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let directed = |p: (f64, f64), q: (f64, f64)| {
        [(0.0, 0.0), (p.0, 0.0), (0.0, p.1), p]
            .iter()
            .map(|&(x, y)| (x - x.clamp(0.0, q.0)).abs() + (y - y.clamp(0.0, q.1)).abs())
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

fn criterion_9() -> Outcome {
    let mut axioms = true;
    for t in 0..1000u64 {
        let mut rng = trial_rng(9, t);
        let (x, y) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let a = random_channel(&mut rng, x, y);
        let b = random_sparse_channel(&mut rng, x, y);
        let c = random_channel(&mut rng, x, y);
        let d = |p: &Channel, q: &Channel| channel_distance(p, q).unwrap();
        axioms &= d(&a, &a) == 0.0
            && (d(&a, &b) - d(&b, &a)).abs() <= 1e-12
            && d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12
            && (d(&a, &b) - oracle::channel_distance(&a.to_rows(), &b.to_rows())).abs() <= 1e-12;
    }

    let mut bounded = true;
    for t in 0..500u64 {
        let mut rng = trial_rng(90, t);
        let r1 = RateRectangle::from_corner(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
        let r2 = RateRectangle::from_corner(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
        let gap = rectangle_corner_gap(&r1, &r2);
        let exact = rectangle_distance(&r1, &r2);
        let points = region_distance(&vertex_set(&r1), &vertex_set(&r2)).unwrap();
        bounded &= exact <= gap + 1e-12
            && points <= gap + 1e-12
            && (exact - box_distance((r1.a0, r1.a1), (r2.a0, r2.a1))).abs() <= 1e-12;
    }

    let mut nested = true;
    for t in 0..100u64 {
        let mut rng = trial_rng(91, t);
        let inner = RateRectangle::from_corner(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let outer = RateRectangle::from_corner(inner.a0 + rng.random_range(0.0..1.0), inner.a1 + rng.random_range(0.0..1.0));
        let gap = rectangle_corner_gap(&inner, &outer);
        let exact = rectangle_distance(&inner, &outer);
        let points = region_distance(&vertex_set(&inner), &vertex_set(&outer)).unwrap();
        nested &= (exact - gap).abs() <= 1e-9 && (points - gap).abs() <= 1e-9;
    }
    outcome(
        axioms && bounded && nested,
        format!("channel axioms on 1000 triples: {axioms}; distance <= corner gap on 500 pairs: {bounded}; equality on 100 nested pairs: {nested}"),
    )
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        let out = dir.path().join(format!("report_{threads}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_bcc-lab"))
            .args(["verify", "lemma4", "--eps", "0.05", "--trials", "50", "--seed", "7", "--out"])
            .arg(&out)
            .env("BCC_LAB_THREADS", threads)
            .status()
            .unwrap();
        (status.code(), std::fs::read(&out).unwrap_or_default())
    };
    let (c1, one) = run("1");
    let (c8, eight) = run("8");
    outcome(
        c1 == Some(0) && c8 == Some(0) && !one.is_empty() && one == eight,
        format!("exit codes {c1:?}/{c8:?}, {} vs {} bytes, identical: {}", one.len(), eight.len(), one == eight),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("delta formulas", criterion_1, None),
        ("entropy continuity suite", criterion_2, Some(Duration::from_secs(10))),
        ("conditional information suite", criterion_3, Some(Duration::from_secs(60))),
        ("hybrid boundary identities", criterion_4, None),
        ("rectangle continuity suite", criterion_5, Some(Duration::from_secs(120))),
        ("capacity region continuity", criterion_6, Some(Duration::from_secs(300))),
        ("rate rectangle grid oracle", criterion_7, None),
        ("symmetrizability flip", criterion_8, None),
        ("metric axioms", criterion_9, None),
        ("determinism across thread counts", criterion_10, None),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = run();
        let elapsed = start.elapsed();
        if let Some(limit) = budget {
            if elapsed > *limit {
                result.pass = false;
                result.detail.push_str(&format!("; over time budget {limit:?}"));
            }
        }
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name} ({:.2}s): {}", i + 1, elapsed.as_secs_f64(), result.detail);
        failed += (!result.pass) as usize;
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
