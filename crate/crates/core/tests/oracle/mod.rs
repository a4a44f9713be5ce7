//! Brute-force reference computations for the integration tests. Nothing
//! here calls into the library's numerics: joints are built by explicit
//! digit loops and information quantities by their defining sums.

#![allow(dead_code, clippy::needless_range_loop)]

use serde_json::Value;

pub type Matrix = Vec<Vec<f64>>;

pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

pub fn delta1(eps: f64, y: usize) -> f64 {
    2.0 * eps * (y as f64).log2() + 2.0 * h2(eps)
}

pub fn delta2(eps: f64, y: usize) -> f64 {
    4.0 * eps * (y as f64).log2() + 4.0 * h2(eps)
}

pub fn delta_prime(eps: f64, y: usize, z: usize) -> f64 {
    delta2(eps, y).max(delta2(eps, z))
}

pub fn delta_dprime(eps: f64, y: usize, z: usize) -> f64 {
    delta2(eps, y) + delta2(eps, z)
}

pub fn delta(eps: f64, y: usize, z: usize) -> f64 {
    delta_prime(eps, y, z) + delta_dprime(eps, y, z)
}

/// `-Σ p(x,y) log(p(x,y)/p(x))` for a joint stored as rows over x.
pub fn conditional_entropy(joint: &[f64], x: usize, y: usize) -> f64 {
    let mut h = 0.0;
    for a in 0..x {
        let row = &joint[a * y..(a + 1) * y];
        let px: f64 = row.iter().sum();
        for &p in row {
            if p > 0.0 {
                h -= p * (p / px).log2();
            }
        }
    }
    h
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum()
}

pub fn channel_distance(a: &Matrix, b: &Matrix) -> f64 {
    a.iter().zip(b).map(|(r, s)| l1(r, s)).fold(0.0, f64::max)
}

pub fn matrix(v: &Value) -> Matrix {
    v["rows"]
        .as_array()
        .expect("rows")
        .iter()
        .map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect())
        .collect()
}

pub fn vector(v: &Value) -> Vec<f64> {
    v.as_array().expect("array").iter().map(|x| x.as_f64().unwrap()).collect()
}

/// Chain `U - V - Xⁿ` in plain containers.
#[derive(Debug, Clone)]
pub struct Aux {
    pub n: usize,
    pub p_u: Vec<f64>,
    pub p_v_given_u: Matrix,
    pub encoder: Matrix,
}

impl Aux {
    pub fn from_json(v: &Value) -> Aux {
        Aux {
            n: v["n"].as_u64().unwrap() as usize,
            p_u: vector(&v["p_u"]),
            p_v_given_u: matrix(&v["p_v_given_u"]),
            encoder: matrix(&v["encoder"]),
        }
    }

    pub fn from_lib(a: &bcc_lab::AuxiliaryInput) -> Aux {
        Aux {
            n: a.n(),
            p_u: a.p_u().as_slice().to_vec(),
            p_v_given_u: a.p_v_given_u().to_rows(),
            encoder: a.encoder().to_rows(),
        }
    }
}

/// Digits of `index` in base `base`, most significant first.
fn digits(mut index: usize, base: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0; len];
    for slot in d.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    d
}

/// `P(u, v, y₁…yₙ)` where coordinate `i` passes through `channels[i]`.
/// Returned as `[u][v][y-block]` with the first coordinate most significant.
pub fn chain_joint(aux: &Aux, channels: &[&Matrix]) -> Vec<Vec<Vec<f64>>> {
    let n = channels.len();
    let x = channels[0].len();
    let y = channels[0][0].len();
    let xb = x.pow(n as u32);
    let yb = y.pow(n as u32);
    let nu = aux.p_u.len();
    let nv = aux.encoder.len();
    let mut out = vec![vec![vec![0.0; yb]; nv]; nu];
    for u in 0..nu {
        for v in 0..nv {
            let puv = aux.p_u[u] * aux.p_v_given_u[u][v];
            for xs in 0..xb {
                let px = puv * aux.encoder[v][xs];
                if px == 0.0 {
                    continue;
                }
                let xd = digits(xs, x, n);
                for ys in 0..yb {
                    let yd = digits(ys, y, n);
                    let mut p = px;
                    for i in 0..n {
                        p *= channels[i][xd[i]][yd[i]];
                    }
                    out[u][v][ys] += p;
                }
            }
        }
    }
    out
}

pub fn flatten(joint: &[Vec<Vec<f64>>]) -> Vec<f64> {
    joint.iter().flatten().flatten().copied().collect()
}

/// `(I(U;Y), I(V;Y|U))` from their defining sums.
pub fn chain_information(joint: &[Vec<Vec<f64>>]) -> (f64, f64) {
    let nu = joint.len();
    let nv = joint[0].len();
    let ny = joint[0][0].len();
    let p_u: Vec<f64> = joint.iter().map(|a| a.iter().flatten().sum()).collect();
    let mut p_uy = vec![vec![0.0; ny]; nu];
    let mut p_uv = vec![vec![0.0; nv]; nu];
    let mut p_y = vec![0.0; ny];
    for u in 0..nu {
        for v in 0..nv {
            for yv in 0..ny {
                let p = joint[u][v][yv];
                p_uy[u][yv] += p;
                p_uv[u][v] += p;
                p_y[yv] += p;
            }
        }
    }
    let mut common = 0.0;
    for u in 0..nu {
        for yv in 0..ny {
            let p = p_uy[u][yv];
            if p > 0.0 {
                common += p * (p / (p_u[u] * p_y[yv])).log2();
            }
        }
    }
    let mut private = 0.0;
    for u in 0..nu {
        for v in 0..nv {
            for yv in 0..ny {
                let p = joint[u][v][yv];
                if p > 0.0 {
                    private += p * (p * p_u[u] / (p_uv[u][v] * p_uy[u][yv])).log2();
                }
            }
        }
    }
    (common, private)
}

/// Corner `(a0, a1)` of the rate rectangle for a compound given as
/// `(W_s, V_s)` pairs.
pub fn rectangle(states: &[(Matrix, Matrix)], aux: &Aux) -> (f64, f64) {
    let n = aux.n;
    let mut common = f64::INFINITY;
    let mut legit = f64::INFINITY;
    let mut eaves = f64::NEG_INFINITY;
    for (w, v) in states {
        let (cy, py) = chain_information(&chain_joint(aux, &vec![w; n]));
        let (cz, pz) = chain_information(&chain_joint(aux, &vec![v; n]));
        common = common.min(cy).min(cz);
        legit = legit.min(py);
        eaves = eaves.max(pz);
    }
    (
        (common / n as f64).max(0.0),
        ((legit - eaves) / n as f64).max(0.0),
    )
}

pub fn compound_states(v: &Value) -> Vec<(Matrix, Matrix)> {
    v["states"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (matrix(&s["W"]), matrix(&s["V"])))
        .collect()
}

/// Hausdorff distance between two compound families (max of the two
/// directed distances on the W family and on the V family).
pub fn compound_distance(a: &[(Matrix, Matrix)], b: &[(Matrix, Matrix)]) -> f64 {
    let directed = |from: &[&Matrix], to: &[&Matrix]| {
        from.iter()
            .map(|p| to.iter().map(|q| channel_distance(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let wa: Vec<&Matrix> = a.iter().map(|s| &s.0).collect();
    let wb: Vec<&Matrix> = b.iter().map(|s| &s.0).collect();
    let va: Vec<&Matrix> = a.iter().map(|s| &s.1).collect();
    let vb: Vec<&Matrix> = b.iter().map(|s| &s.1).collect();
    directed(&wa, &wb)
        .max(directed(&wb, &wa))
        .max(directed(&va, &vb))
        .max(directed(&vb, &va))
}
