//! Input/output error metrics, the shared-basis averaging check, and the
//! k-means vs. basis comparison pipeline.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::{
    basis_cluster_from, input_mse, kmeans, normalize_features, to_representatives, ClusterError,
    ClusterModel, FeatureMatrix, KMEANS_MAX_ITER, KMEANS_TOL,
};
use crate::dispatch::{
    solve_aggregated, solve_full, DispatchError, DispatchKind, DispatchSolution, RepresentativeSet,
    SystemData,
};
use crate::lp::{self, BasisSignature, LpError, LpStatus, StandardFormLp};

/// Relative tolerance on objective agreement in [`theorem_check`].
pub const THEOREM_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("full-model cost is zero; relative error undefined")]
    ZeroBaseline,
    #[error("expected a {expected:?} solution")]
    WrongKind { expected: DispatchKind },
    #[error("sample {index} is not optimal under the given basis ({status:?})")]
    SampleRejected { index: usize, status: LpStatus },
    #[error("no RHS samples given")]
    EmptySamples,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

/// `|a − b| / max(|a|, |b|, 1)`
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// `100 · |full − aggregated| / |full|`
pub fn output_error(full: &DispatchSolution, aggregated: &DispatchSolution) -> Result<f64, EvalError> {
    if full.kind != DispatchKind::Full {
        return Err(EvalError::WrongKind { expected: DispatchKind::Full });
    }
    if aggregated.kind != DispatchKind::Aggregated {
        return Err(EvalError::WrongKind { expected: DispatchKind::Aggregated });
    }
    output_error_pct(full.total_cost, aggregated.total_cost)
}

pub fn output_error_pct(full_cost: f64, aggregated_cost: f64) -> Result<f64, EvalError> {
    if full_cost == 0.0 {
        return Err(EvalError::ZeroBaseline);
    }
    Ok(100.0 * (full_cost - aggregated_cost).abs() / full_cost.abs())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheckResult {
    pub trials: usize,
    pub failures: usize,
    pub worst_objective_gap: f64,
    pub worst_basis_violation: Option<String>,
}

impl TheoremCheckResult {
    pub fn merge(mut self, other: TheoremCheckResult) -> Self {
        self.trials += other.trials;
        self.failures += other.failures;
        self.worst_objective_gap = self.worst_objective_gap.max(other.worst_objective_gap);
        if self.worst_basis_violation.is_none() {
            self.worst_basis_violation = other.worst_basis_violation;
        }
        self
    }
}

/// One trial: every sample must be optimal under `basis`; then the averaged
/// RHS must be optimal under `basis` as well, with objective equal to the
/// mean of the sample objectives and to a fresh solve of the averaged LP.
pub fn theorem_check(
    lp_template: &StandardFormLp,
    basis: &BasisSignature,
    rhs_samples: &[Vec<f64>],
) -> Result<TheoremCheckResult, EvalError> {
    if rhs_samples.is_empty() {
        return Err(EvalError::EmptySamples);
    }
    let m = lp_template.num_rows();
    let mut mean = vec![0.0; m];
    let mut mean_objective = 0.0;
    for (index, b) in rhs_samples.iter().enumerate() {
        let sol = lp::solve_with_basis(&lp_template.with_rhs(b.clone())?, basis)?;
        if sol.status != LpStatus::Optimal {
            return Err(EvalError::SampleRejected { index, status: sol.status });
        }
        mean_objective += sol.objective;
        for (acc, v) in mean.iter_mut().zip(b) {
            *acc += v;
        }
    }
    let count = rhs_samples.len() as f64;
    mean_objective /= count;
    mean.iter_mut().for_each(|v| *v /= count);

    let averaged = lp_template.with_rhs(mean)?;
    let fixed = lp::solve_with_basis(&averaged, basis)?;
    let fresh = lp::solve(&averaged)?;

    let mut violation = None;
    if fixed.status != LpStatus::Optimal {
        violation = Some(format!("basis {basis} is {:?} at the averaged RHS", fixed.status));
    } else if fresh.status != LpStatus::Optimal {
        violation = Some(format!("averaged LP solves as {:?}", fresh.status));
    }
    let gap = relative_gap(fixed.objective, mean_objective).max(relative_gap(fixed.objective, fresh.objective));
    let gap = if gap.is_nan() { f64::INFINITY } else { gap };
    let failed = violation.is_some() || gap > THEOREM_TOL;
    if failed && violation.is_none() {
        violation = Some(format!("objective gap {gap:e}"));
    }
    Ok(TheoremCheckResult {
        trials: 1,
        failures: usize::from(failed),
        worst_objective_gap: gap,
        worst_basis_violation: violation,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub label: String,
    pub weight: f64,
    /// Physical units, keyed by feature column.
    pub centroid: BTreeMap<String, f64>,
    #[serde(default)]
    pub basis: Option<BasisSignature>,
}

impl PartialEq for ClusterSummary {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
            && self.weight == other.weight
            && self.centroid == other.centroid
            && self.basis == other.basis
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub method: String,
    pub k: usize,
    pub input_mse: f64,
    pub full_cost: f64,
    pub aggregated_cost: f64,
    pub output_error_pct: f64,
    pub per_cluster: Vec<ClusterSummary>,
    /// Wall-clock milliseconds per phase; excluded from equality and from
    /// the serialized report.
    #[serde(skip)]
    pub timings_ms: BTreeMap<String, f64>,
}

impl PartialEq for EvaluationReport {
    fn eq(&self, other: &Self) -> bool {
        self.method == other.method
            && self.k == other.k
            && self.input_mse == other.input_mse
            && self.full_cost == other.full_cost
            && self.aggregated_cost == other.aggregated_cost
            && self.output_error_pct == other.output_error_pct
            && self.per_cluster == other.per_cluster
    }
}

/// Everything produced for one aggregation method.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub model: ClusterModel,
    pub representatives: RepresentativeSet,
    pub aggregated: DispatchSolution,
    pub report: EvaluationReport,
}

/// Aggregate with `model`, solve the aggregated dispatch and score it
/// against `full`.
pub fn evaluate_model(
    system: &SystemData,
    features: &FeatureMatrix,
    full: &DispatchSolution,
    model: ClusterModel,
) -> Result<MethodRun, EvalError> {
    let started = Instant::now();
    let representatives = to_representatives(&model, features)?;
    let aggregated = solve_aggregated(system, &representatives)?;
    let solve_ms = started.elapsed().as_secs_f64() * 1e3;
    let output_error_pct = output_error(full, &aggregated)?;
    let per_cluster = representatives
        .reps
        .iter()
        .enumerate()
        .map(|(j, rep)| {
            let mut centroid = rep.cf.clone();
            centroid.insert(crate::clustering::DEMAND_COLUMN.to_string(), rep.demand);
            ClusterSummary {
                label: model.labels[j].clone(),
                weight: rep.weight,
                centroid,
                basis: model.basis_map.as_ref().map(|m| m[j].clone()),
            }
        })
        .collect();
    let report = EvaluationReport {
        method: model.method.label().to_string(),
        k: model.k,
        input_mse: input_mse(features, &model)?,
        full_cost: full.total_cost,
        aggregated_cost: aggregated.total_cost,
        output_error_pct,
        per_cluster,
        timings_ms: BTreeMap::from([("aggregated_solve".to_string(), solve_ms)]),
    };
    Ok(MethodRun {
        model,
        representatives,
        aggregated,
        report,
    })
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub features: FeatureMatrix,
    pub full: DispatchSolution,
    pub kmeans: MethodRun,
    pub basis: MethodRun,
}

impl Comparison {
    pub fn reports(&self) -> Vec<EvaluationReport> {
        vec![self.kmeans.report.clone(), self.basis.report.clone()]
    }
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Solve the full model once, then run the k-means and basis pipelines
/// against it. `k_for_kmeans` defaults to the discovered basis count.
pub fn compare_methods_detailed(
    system: &SystemData,
    k_for_kmeans: Option<usize>,
    seed: u64,
) -> Result<Comparison, EvalError> {
    let t = Instant::now();
    let full = solve_full(system)?;
    let full_ms = ms_since(t);
    let features = normalize_features(system);

    let t = Instant::now();
    let basis_model = basis_cluster_from(system, &features, &full);
    let basis_cluster_ms = ms_since(t);
    let mut basis = evaluate_model(system, &features, &full, basis_model)?;

    let k = k_for_kmeans.unwrap_or(basis.model.k);
    let t = Instant::now();
    let kmeans_model = kmeans(&features, k, seed, KMEANS_MAX_ITER, KMEANS_TOL)?;
    let kmeans_ms = ms_since(t);
    let mut kmeans = evaluate_model(system, &features, &full, kmeans_model)?;

    basis.report.timings_ms.insert("full_solve".into(), full_ms);
    basis.report.timings_ms.insert("clustering".into(), basis_cluster_ms);
    kmeans.report.timings_ms.insert("full_solve".into(), full_ms);
    kmeans.report.timings_ms.insert("clustering".into(), kmeans_ms);
    Ok(Comparison {
        features,
        full,
        kmeans,
        basis,
    })
}

/// Reports for k-means and basis-oriented aggregation, in that order.
pub fn compare_methods(
    system: &SystemData,
    k_for_kmeans: Option<usize>,
    seed: u64,
) -> Result<Vec<EvaluationReport>, EvalError> {
    Ok(compare_methods_detailed(system, k_for_kmeans, seed)?.reports())
}
