//! Test-only oracles. Nothing here calls into the crate's solver or its
//! linear algebra.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleOutcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// Gauss-Jordan solve of a square system; `None` when (near) singular.
pub fn gauss_solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for k in 0..n {
        let p = (k..n).max_by(|&a, &b| m[a][k].abs().partial_cmp(&m[b][k].abs()).unwrap())?;
        if m[p][k].abs() < 1e-10 {
            return None;
        }
        m.swap(k, p);
        rhs.swap(k, p);
        for i in 0..n {
            if i != k {
                let f = m[i][k] / m[k][k];
                let pivot = m[k].clone();
                for (v, pv) in m[i][k..n].iter_mut().zip(&pivot[k..n]) {
                    *v -= f * pv;
                }
                rhs[i] -= f * rhs[k];
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Minimum of `c·x` over all basic feasible solutions of `Ax = b, x ≥ 0`
/// (A assumed to have full row rank). `None` if there is no BFS.
pub fn min_over_bfs(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<(f64, Vec<f64>)> {
    let m = a.len();
    let n = c.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for cols in combinations(n, m) {
        let sub: Vec<Vec<f64>> = a.iter().map(|row| cols.iter().map(|&j| row[j]).collect()).collect();
        let Some(xb) = gauss_solve(sub, b.to_vec()) else { continue };
        let scale = 1.0 + b.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
        if xb.iter().any(|&v| v < -1e-9 * scale) {
            continue;
        }
        let mut x = vec![0.0; n];
        for (&j, &v) in cols.iter().zip(&xb) {
            x[j] = v;
        }
        let obj: f64 = c.iter().zip(&x).map(|(c, x)| c * x).sum();
        if best.as_ref().is_none_or(|(o, _)| obj < *o) {
            best = Some((obj, x));
        }
    }
    best
}

/// Whether `{d ≥ 0, Ad = 0, Σd = 1}` contains a point with `c·d < 0`,
/// checked by enumerating the vertices of that polytope.
pub fn has_improving_ray(c: &[f64], a: &[Vec<f64>]) -> bool {
    let n = c.len();
    let mut rows: Vec<Vec<f64>> = a.to_vec();
    rows.push(vec![1.0; n]);
    let mut rhs = vec![0.0; a.len()];
    rhs.push(1.0);
    // drop rows that are linearly dependent on earlier ones
    let (rows, rhs) = independent_rows(rows, rhs);
    match min_over_bfs(c, &rows, &rhs) {
        Some((obj, _)) => obj < -1e-9,
        None => false,
    }
}

fn independent_rows(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    let mut kept_rhs = Vec::new();
    let mut echelon: Vec<Vec<f64>> = Vec::new();
    for (row, r) in rows.into_iter().zip(rhs) {
        let mut v = row.clone();
        for e in &echelon {
            let p = e.iter().position(|x| x.abs() > 1e-12).unwrap();
            let f = v[p] / e[p];
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi -= f * ei;
            }
        }
        if v.iter().any(|x| x.abs() > 1e-9) {
            echelon.push(v);
            kept.push(row);
            kept_rhs.push(r);
        }
    }
    (kept, kept_rhs)
}

/// Full classification of `min cᵀx, Ax = b, x ≥ 0` by enumeration.
pub fn classify(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> OracleOutcome {
    match min_over_bfs(c, a, b) {
        None => OracleOutcome::Infeasible,
        Some(_) if has_improving_ray(c, a) => OracleOutcome::Unbounded,
        Some((obj, _)) => OracleOutcome::Optimal(obj),
    }
}

pub fn rank(rows: &[Vec<f64>]) -> usize {
    let (kept, _) = independent_rows(rows.to_vec(), vec![0.0; rows.len()]);
    kept.len()
}

/// Random full-row-rank LP with small integer data.
pub struct RandomLp {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

pub fn random_lp(rng: &mut ChaCha8Rng, max_m: usize, max_n: usize) -> RandomLp {
    loop {
        let m = rng.random_range(1..=max_m);
        let n = rng.random_range(m..=max_n.max(m));
        let a: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.random_range(-4..=6) as f64).collect())
            .collect();
        if rank(&a) < m {
            continue;
        }
        let c = (0..n).map(|_| rng.random_range(-3..=8) as f64).collect();
        let b = (0..m).map(|_| rng.random_range(-5..=15) as f64).collect();
        return RandomLp { c, a, b };
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Random LP `(c, A)` with a basis that is dual feasible by construction,
/// plus RHS samples drawn from the cone `{B x_B : x_B ≥ 0}`.
pub struct ConeFamily {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub basis: Vec<usize>,
    pub samples: Vec<Vec<f64>>,
}

pub fn cone_family(r: &mut ChaCha8Rng, max_m: usize, max_n: usize) -> Option<ConeFamily> {
    let m = r.random_range(1..=max_m);
    let n = r.random_range(m..=max_n.max(m));
    let a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        cols.swap(i, r.random_range(0..=i));
    }
    let mut basis = cols[..m].to_vec();
    basis.sort_unstable();
    let bt: Vec<Vec<f64>> = basis.iter().map(|&j| a.iter().map(|row| row[j]).collect()).collect();
    let c_b: Vec<f64> = (0..m).map(|_| r.random_range(-2.0..2.0)).collect();
    let y = gauss_solve(bt, c_b.clone())?;
    let mut c = vec![0.0; n];
    for (k, &j) in basis.iter().enumerate() {
        c[j] = c_b[k];
    }
    for j in (0..n).filter(|j| !basis.contains(j)) {
        c[j] = (0..m).map(|i| a[i][j] * y[i]).sum::<f64>() + r.random_range(0.05..2.0);
    }
    let samples = (0..r.random_range(2..=5))
        .map(|_| {
            let xb: Vec<f64> = (0..m).map(|_| r.random_range(0.0..10.0)).collect();
            (0..m).map(|i| basis.iter().zip(&xb).map(|(&j, v)| a[i][j] * v).sum()).collect()
        })
        .collect();
    Some(ConeFamily { c, a, basis, samples })
}
