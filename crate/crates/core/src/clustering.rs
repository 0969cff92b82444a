//! Time series aggregation: k-means on normalized inputs and clustering by
//! optimal basis.

use std::collections::{BTreeMap, HashMap};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispatch::{
    regime_label, solve_full, DispatchError, DispatchSolution, Representative, RepresentativeSet,
    SystemData,
};
use crate::lp::BasisSignature;

pub const KMEANS_RESTARTS: usize = 10;
pub const KMEANS_MAX_ITER: usize = 300;
pub const KMEANS_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("k = {k} is not in 1..={horizon}")]
    KExceedsH { k: usize, horizon: usize },
    #[error("cluster model does not match features: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
}

/// Min-max normalized hourly features: demand, then one capacity-factor
/// column per variable series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    /// Constant columns, mapped to 0.5.
    pub degenerate: Vec<bool>,
}

pub const DEMAND_COLUMN: &str = "demand";

impl FeatureMatrix {
    /// Normalize raw columns (each of equal length).
    pub fn from_columns(columns: Vec<String>, raw: &[Vec<f64>]) -> Self {
        assert_eq!(columns.len(), raw.len());
        let hours = raw.first().map_or(0, Vec::len);
        let mut min = Vec::with_capacity(raw.len());
        let mut max = Vec::with_capacity(raw.len());
        let mut degenerate = Vec::with_capacity(raw.len());
        for col in raw {
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            min.push(lo);
            max.push(hi);
            degenerate.push(!(hi > lo));
        }
        let rows = (0..hours)
            .map(|h| {
                raw.iter()
                    .enumerate()
                    .map(|(c, col)| {
                        if degenerate[c] {
                            0.5
                        } else {
                            (col[h] - min[c]) / (max[c] - min[c])
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            columns,
            rows,
            min,
            max,
            degenerate,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.columns.len()
    }

    /// Map a normalized vector back to physical units.
    pub fn denormalize(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(c, &v)| {
                if self.degenerate[c] {
                    self.min[c]
                } else {
                    self.min[c] + v * (self.max[c] - self.min[c])
                }
            })
            .collect()
    }
}

pub fn normalize_features(system: &SystemData) -> FeatureMatrix {
    let mut columns = vec![DEMAND_COLUMN.to_string()];
    let mut raw = vec![system.demand().to_vec()];
    for id in system.variable_series() {
        raw.push(system.capacity_factors()[&id].clone());
        columns.push(id);
    }
    FeatureMatrix::from_columns(columns, &raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterMethod {
    KMeans,
    BasisOriented,
}

impl ClusterMethod {
    pub fn label(self) -> &'static str {
        match self {
            ClusterMethod::KMeans => "kmeans",
            ClusterMethod::BasisOriented => "basis",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub method: ClusterMethod,
    pub k: usize,
    /// Normalized feature space.
    pub centroids: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub weights: Vec<usize>,
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_map: Option<Vec<BasisSignature>>,
}

impl ClusterModel {
    pub fn horizon(&self) -> usize {
        self.assignment.len()
    }

    /// Check the partition and weight invariants.
    pub fn validate(&self) -> Result<(), ClusterError> {
        let bad = |m: String| Err(ClusterError::Mismatch(m));
        if self.k == 0 || self.centroids.len() != self.k || self.weights.len() != self.k || self.labels.len() != self.k {
            return bad(format!("inconsistent cluster count {}", self.k));
        }
        if let Some(map) = &self.basis_map {
            if map.len() != self.k {
                return bad("basis map length differs from k".into());
            }
        }
        let mut counts = vec![0usize; self.k];
        for &a in &self.assignment {
            if a >= self.k {
                return bad(format!("assignment {a} out of range"));
            }
            counts[a] += 1;
        }
        if counts != self.weights {
            return bad("weights are not the assignment histogram".into());
        }
        Ok(())
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn means(rows: &[Vec<f64>], assignment: &[usize], k: usize, dim: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (row, &a) in rows.iter().zip(assignment) {
        counts[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(row) {
            *s += v;
        }
    }
    for (s, &n) in sums.iter_mut().zip(&counts) {
        if n > 0 {
            s.iter_mut().for_each(|v| *v /= n as f64);
        }
    }
    (sums, counts)
}

fn plus_plus_seeds(rows: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![rows[rng.random_range(0..rows.len())].clone()];
    let mut dist: Vec<f64> = rows.iter().map(|r| sq_dist(r, &centroids[0])).collect();
    while centroids.len() < k {
        let next = match WeightedIndex::new(&dist) {
            Ok(w) => w.sample(rng),
            // every point already coincides with a centroid
            Err(_) => rng.random_range(0..rows.len()),
        };
        centroids.push(rows[next].clone());
        for (d, r) in dist.iter_mut().zip(rows) {
            *d = d.min(sq_dist(r, &centroids[centroids.len() - 1]));
        }
    }
    centroids
}

struct LloydRun {
    centroids: Vec<Vec<f64>>,
    assignment: Vec<usize>,
    inertia: f64,
}

fn lloyd(rows: &[Vec<f64>], k: usize, max_iter: usize, tol: f64, rng: &mut ChaCha8Rng) -> LloydRun {
    let dim = rows[0].len();
    let mut centroids = plus_plus_seeds(rows, k, rng);
    let mut assignment = vec![usize::MAX; rows.len()];
    for _ in 0..max_iter.max(1) {
        let next: Vec<usize> = rows.iter().map(|r| nearest(r, &centroids).0).collect();
        let changed = next != assignment;
        assignment = next;
        let (mut updated, mut counts) = means(rows, &assignment, k, dim);
        // empty clusters take the point farthest from its own centroid,
        // drawn from a cluster that keeps at least one member
        while let Some(j) = counts.iter().position(|&n| n == 0) {
            let far = (0..rows.len())
                .filter(|&i| counts[assignment[i]] > 1)
                .map(|i| (i, sq_dist(&rows[i], &updated[assignment[i]])))
                .fold((usize::MAX, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
                .0;
            assignment[far] = j;
            (updated, counts) = means(rows, &assignment, k, dim);
        }
        let shift = centroids
            .iter()
            .zip(&updated)
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = updated;
        if !changed || shift < tol {
            break;
        }
    }
    let inertia = rows
        .iter()
        .zip(&assignment)
        .map(|(r, &a)| sq_dist(r, &centroids[a]))
        .sum();
    LloydRun {
        centroids,
        assignment,
        inertia,
    }
}

/// Renumber clusters by the first hour that belongs to each.
fn first_occurrence_order(assignment: &[usize], k: usize) -> Vec<usize> {
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    for &a in assignment {
        if map[a] == usize::MAX {
            map[a] = next;
            next += 1;
        }
    }
    map
}

/// Lloyd's algorithm with k-means++ seeding, best of
/// [`KMEANS_RESTARTS`] runs by inertia.
pub fn kmeans(
    features: &FeatureMatrix,
    k: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<ClusterModel, ClusterError> {
    let horizon = features.num_rows();
    if k == 0 || k > horizon {
        return Err(ClusterError::KExceedsH { k, horizon });
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..KMEANS_RESTARTS).map(|_| master.random()).collect();
    let runs: Vec<LloydRun> = seeds
        .par_iter()
        .map(|&s| lloyd(&features.rows, k, max_iter, tol, &mut ChaCha8Rng::seed_from_u64(s)))
        .collect();
    let best = runs
        .into_iter()
        .reduce(|best, run| if run.inertia < best.inertia { run } else { best })
        .expect("at least one restart");

    let order = first_occurrence_order(&best.assignment, k);
    let assignment: Vec<usize> = best.assignment.iter().map(|&a| order[a]).collect();
    let mut centroids = vec![Vec::new(); k];
    for (old, c) in best.centroids.into_iter().enumerate() {
        centroids[order[old]] = c;
    }
    let mut weights = vec![0; k];
    for &a in &assignment {
        weights[a] += 1;
    }
    Ok(ClusterModel {
        method: ClusterMethod::KMeans,
        k,
        centroids,
        assignment,
        weights,
        labels: (0..k).map(|j| format!("cluster {j}")).collect(),
        basis_map: None,
    })
}

/// Mean squared deviation between hours and their centroids, averaged over
/// every hour and feature column in normalized space.
pub fn input_mse(features: &FeatureMatrix, model: &ClusterModel) -> Result<f64, ClusterError> {
    if model.horizon() != features.num_rows() {
        return Err(ClusterError::Mismatch(format!(
            "{} assignments for {} hours",
            model.horizon(),
            features.num_rows()
        )));
    }
    let total: f64 = features
        .rows
        .iter()
        .zip(&model.assignment)
        .map(|(r, &a)| sq_dist(r, &model.centroids[a]))
        .sum();
    Ok(total / (features.num_rows() * features.num_cols()) as f64)
}

/// Solve every hour and group hours by their optimal basis.
pub fn basis_cluster(system: &SystemData) -> Result<ClusterModel, ClusterError> {
    let full = solve_full(system)?;
    Ok(basis_cluster_from(system, &normalize_features(system), &full))
}

/// Group hours by the bases recorded in an already solved full model.
pub fn basis_cluster_from(
    system: &SystemData,
    features: &FeatureMatrix,
    full: &DispatchSolution,
) -> ClusterModel {
    let mut ids: HashMap<&BasisSignature, usize> = HashMap::new();
    let mut basis_map: Vec<BasisSignature> = Vec::new();
    let assignment: Vec<usize> = full
        .periods
        .iter()
        .map(|p| {
            let basis = p.solution.basis.as_ref().expect("optimal periods carry a basis");
            *ids.entry(basis).or_insert_with(|| {
                basis_map.push(basis.clone());
                basis_map.len() - 1
            })
        })
        .collect();
    let k = basis_map.len();
    let (centroids, weights) = means(&features.rows, &assignment, k, features.num_cols());
    ClusterModel {
        method: ClusterMethod::BasisOriented,
        k,
        centroids,
        assignment,
        weights,
        labels: basis_map.iter().map(|b| regime_label(system, b)).collect(),
        basis_map: Some(basis_map),
    }
}

/// Centroids in physical units, weighted by cluster size.
pub fn to_representatives(
    model: &ClusterModel,
    features: &FeatureMatrix,
) -> Result<RepresentativeSet, ClusterError> {
    model.validate()?;
    if model.horizon() != features.num_rows() {
        return Err(ClusterError::Mismatch("horizon differs".into()));
    }
    let reps = model
        .centroids
        .iter()
        .zip(&model.weights)
        .map(|(c, &w)| {
            let phys = features.denormalize(c);
            let mut cf = BTreeMap::new();
            let mut demand = 0.0;
            for (name, v) in features.columns.iter().zip(phys) {
                if name == DEMAND_COLUMN {
                    demand = v.max(0.0);
                } else {
                    cf.insert(name.clone(), v.clamp(0.0, 1.0));
                }
            }
            Representative {
                demand,
                cf,
                weight: w as f64,
            }
        })
        .collect();
    Ok(RepresentativeSet { reps })
}
