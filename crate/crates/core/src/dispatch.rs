//! Economic dispatch in equality standard form.
//!
//! Column layout for `G` generators: `0..G` are production above minimum
//! (`p_g − p_min_g`), `G..2G` are headroom slacks. Row 0 is the demand
//! balance, row `1 + g` is the upper bound of generator `g`. The cost
//! vector and matrix depend only on the fleet, so every period differs
//! from every other only in its right-hand side.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{self, BasisSignature, LpError, LpSolution, LpStatus, StandardFormLp};

/// Name reserved for the non-supplied-energy unit.
pub const NSE_NAME: &str = "NSE";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DispatchError {
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("invalid representatives: {0}")]
    InvalidRepresentatives(String),
    #[error("a generator named \"{NSE_NAME}\" already exists")]
    DuplicateNse,
    #[error("NSE cost {nse_cost} does not exceed the highest existing cost {max_cost}")]
    CostNotDominant { nse_cost: f64, max_cost: f64 },
    #[error("NSE capacity {capacity} is below peak demand {peak}")]
    SentinelTooSmall { capacity: f64, peak: f64 },
    #[error("representative {rep} has no capacity factor for series \"{series}\"")]
    MissingCf { rep: usize, series: String },
    #[error("hour index {hour} out of range for horizon {horizon}")]
    HourOutOfRange { hour: usize, horizon: usize },
    #[error("period {period} is infeasible")]
    Infeasible { period: usize },
    #[error("period {period} is unbounded")]
    Unbounded { period: usize },
    #[error("period {period}: {source}")]
    Solver { period: usize, source: LpError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    /// Currency per MWh.
    pub variable_cost: f64,
    /// MW.
    pub p_min: f64,
    /// Installed MW.
    pub capacity: f64,
    /// Capacity-factor series for variable units; `None` means CF ≡ 1.
    pub cf_series: Option<String>,
}

impl Generator {
    pub fn thermal(name: &str, variable_cost: f64, capacity: f64) -> Self {
        Self {
            name: name.to_string(),
            variable_cost,
            p_min: 0.0,
            capacity,
            cf_series: None,
        }
    }

    pub fn variable(name: &str, variable_cost: f64, capacity: f64, series: &str) -> Self {
        Self {
            name: name.to_string(),
            variable_cost,
            p_min: 0.0,
            capacity,
            cf_series: Some(series.to_string()),
        }
    }

    pub fn is_variable(&self) -> bool {
        self.cf_series.is_some()
    }

    fn validate(&self) -> Result<(), DispatchError> {
        let bad = |msg: &str| Err(DispatchError::InvalidSystem(format!("generator {}: {msg}", self.name)));
        if !(self.variable_cost.is_finite() && self.p_min.is_finite() && self.capacity.is_finite()) {
            return bad("non-finite parameter");
        }
        if self.variable_cost < 0.0 {
            return bad("negative variable cost");
        }
        if self.p_min < 0.0 || self.p_min > self.capacity {
            return bad("requires 0 <= p_min <= capacity");
        }
        Ok(())
    }
}

/// Fleet plus hourly demand and capacity-factor series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemData {
    generators: Vec<Generator>,
    demand: Vec<f64>,
    capacity_factors: BTreeMap<String, Vec<f64>>,
}

impl SystemData {
    pub fn new(
        generators: Vec<Generator>,
        demand: Vec<f64>,
        capacity_factors: BTreeMap<String, Vec<f64>>,
    ) -> Result<Self, DispatchError> {
        let h = demand.len();
        if h == 0 {
            return Err(DispatchError::InvalidSystem("empty horizon".into()));
        }
        if demand.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(DispatchError::InvalidSystem("demand must be finite and >= 0".into()));
        }
        for (id, series) in &capacity_factors {
            if series.len() != h {
                return Err(DispatchError::InvalidSystem(format!(
                    "series {id} has {} hours, demand has {h}",
                    series.len()
                )));
            }
            if let Some(v) = series.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(DispatchError::InvalidSystem(format!(
                    "series {id}: capacity factor {v} outside [0, 1]"
                )));
            }
        }
        let mut names = std::collections::BTreeSet::new();
        for g in &generators {
            g.validate()?;
            if !names.insert(g.name.as_str()) {
                return Err(DispatchError::InvalidSystem(format!("duplicate generator {}", g.name)));
            }
            if let Some(id) = &g.cf_series {
                if !capacity_factors.contains_key(id) {
                    return Err(DispatchError::InvalidSystem(format!(
                        "generator {} references unknown series {id}",
                        g.name
                    )));
                }
            }
        }
        if generators.is_empty() {
            return Err(DispatchError::InvalidSystem("no generators".into()));
        }
        Ok(Self {
            generators,
            demand,
            capacity_factors,
        })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    pub fn capacity_factors(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.capacity_factors
    }

    pub fn horizon(&self) -> usize {
        self.demand.len()
    }

    /// Distinct series referenced by variable generators, in fleet order.
    pub fn variable_series(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for id in self.generators.iter().filter_map(|g| g.cf_series.as_ref()) {
            if !out.contains(id) {
                out.push(id.clone());
            }
        }
        out
    }

    pub fn nse_index(&self) -> Option<usize> {
        self.generators.iter().position(|g| g.name == NSE_NAME)
    }

    /// Capacity factors of hour `h`, keyed by series id.
    pub fn hour_cf(&self, h: usize) -> BTreeMap<String, f64> {
        self.capacity_factors
            .iter()
            .map(|(k, v)| (k.clone(), v[h]))
            .collect()
    }

    /// `Σ C_g · p_min_g`: cost of the shifted-out minimum output per period.
    pub fn min_output_cost(&self) -> f64 {
        self.generators.iter().map(|g| g.variable_cost * g.p_min).sum()
    }
}

/// Append a fictitious high-cost unit that absorbs any unmet demand.
pub fn add_nse_generator(
    system: &SystemData,
    nse_cost: f64,
    sentinel_capacity: f64,
) -> Result<SystemData, DispatchError> {
    if system.nse_index().is_some() {
        return Err(DispatchError::DuplicateNse);
    }
    let max_cost = system
        .generators
        .iter()
        .map(|g| g.variable_cost)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(nse_cost > max_cost) {
        return Err(DispatchError::CostNotDominant { nse_cost, max_cost });
    }
    let peak = system.demand.iter().copied().fold(0.0, f64::max);
    if !(sentinel_capacity >= peak) {
        return Err(DispatchError::SentinelTooSmall {
            capacity: sentinel_capacity,
            peak,
        });
    }
    let mut generators = system.generators.clone();
    generators.push(Generator::thermal(NSE_NAME, nse_cost, sentinel_capacity));
    SystemData::new(generators, system.demand.clone(), system.capacity_factors.clone())
}

/// NSE with a sentinel capacity of ten times peak demand.
pub fn add_default_nse(system: &SystemData, nse_cost: f64) -> Result<SystemData, DispatchError> {
    let peak = system.demand.iter().copied().fold(0.0, f64::max);
    add_nse_generator(system, nse_cost, (10.0 * peak).max(1.0))
}

/// One weighted representative period in physical units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representative {
    /// MW.
    pub demand: f64,
    pub cf: BTreeMap<String, f64>,
    /// Hours represented.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentativeSet {
    pub reps: Vec<Representative>,
}

impl RepresentativeSet {
    /// Each hour of `system` as its own representative with weight 1.
    pub fn identity(system: &SystemData) -> Self {
        Self {
            reps: (0..system.horizon())
                .map(|h| Representative {
                    demand: system.demand[h],
                    cf: system.hour_cf(h),
                    weight: 1.0,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.reps.iter().map(|r| r.weight).sum()
    }

    pub fn validate(&self, horizon: usize) -> Result<(), DispatchError> {
        if self.reps.is_empty() {
            return Err(DispatchError::InvalidRepresentatives("empty set".into()));
        }
        if let Some(i) = self.reps.iter().position(|r| !(r.weight > 0.0) || !r.weight.is_finite()) {
            return Err(DispatchError::InvalidRepresentatives(format!(
                "representative {i} has non-positive weight"
            )));
        }
        let total = self.total_weight();
        if (total - horizon as f64).abs() > 1e-9 * horizon as f64 {
            return Err(DispatchError::InvalidRepresentatives(format!(
                "weights sum to {total}, horizon is {horizon}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DispatchKind {
    Full,
    Aggregated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodDispatch {
    pub solution: LpSolution,
    /// MW per generator, including `p_min`.
    pub production: Vec<f64>,
    pub weight: f64,
    /// Cost of this period before weighting.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchSolution {
    pub kind: DispatchKind,
    pub periods: Vec<PeriodDispatch>,
    pub total_cost: f64,
}

impl DispatchSolution {
    pub fn bases(&self) -> impl Iterator<Item = &BasisSignature> {
        self.periods.iter().filter_map(|p| p.solution.basis.as_ref())
    }
}

fn fleet_lp_parts(system: &SystemData) -> (Vec<f64>, Vec<Vec<f64>>) {
    let g = system.generators.len();
    let mut c = vec![0.0; 2 * g];
    for (k, gen) in system.generators.iter().enumerate() {
        c[k] = gen.variable_cost;
    }
    let mut rows = Vec::with_capacity(g + 1);
    let mut balance = vec![0.0; 2 * g];
    balance[..g].fill(1.0);
    rows.push(balance);
    for k in 0..g {
        let mut row = vec![0.0; 2 * g];
        row[k] = 1.0;
        row[g + k] = 1.0;
        rows.push(row);
    }
    (c, rows)
}

/// RHS for one period: `(D − Σp_min, capacity_g·CF_g − p_min_g, ...)`.
fn period_rhs<F>(system: &SystemData, demand: f64, cf: F) -> Result<Vec<f64>, String>
where
    F: Fn(&str) -> Option<f64>,
{
    let p_min_total: f64 = system.generators.iter().map(|g| g.p_min).sum();
    let mut b = Vec::with_capacity(system.generators.len() + 1);
    b.push(demand - p_min_total);
    for g in &system.generators {
        let factor = match &g.cf_series {
            Some(id) => cf(id).ok_or_else(|| id.clone())?,
            None => 1.0,
        };
        b.push(g.capacity * factor - g.p_min);
    }
    Ok(b)
}

/// Equality-form LP of hour `h`.
pub fn build_hourly_lp(system: &SystemData, h: usize) -> Result<StandardFormLp, DispatchError> {
    if h >= system.horizon() {
        return Err(DispatchError::HourOutOfRange {
            hour: h,
            horizon: system.horizon(),
        });
    }
    let b = period_rhs(system, system.demand[h], |id| {
        system.capacity_factors.get(id).map(|s| s[h])
    })
    .expect("series ids are validated on construction");
    let (c, rows) = fleet_lp_parts(system);
    StandardFormLp::new(c, rows, b).map_err(|source| DispatchError::Solver { period: h, source })
}

/// One LP per representative, paired with its weight.
pub fn build_aggregated(
    system: &SystemData,
    reps: &RepresentativeSet,
) -> Result<Vec<(StandardFormLp, f64)>, DispatchError> {
    reps.validate(system.horizon())?;
    let (c, rows) = fleet_lp_parts(system);
    reps.reps
        .iter()
        .enumerate()
        .map(|(r, rep)| {
            let b = period_rhs(system, rep.demand, |id| rep.cf.get(id).copied())
                .map_err(|series| DispatchError::MissingCf { rep: r, series })?;
            let lp = StandardFormLp::new(c.clone(), rows.clone(), b)
                .map_err(|source| DispatchError::Solver { period: r, source })?;
            Ok((lp, rep.weight))
        })
        .collect()
}

fn solve_period(
    system: &SystemData,
    period: usize,
    lp: &StandardFormLp,
    weight: f64,
) -> Result<PeriodDispatch, DispatchError> {
    let solution = lp::solve(lp).map_err(|source| DispatchError::Solver { period, source })?;
    match solution.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => return Err(DispatchError::Unbounded { period }),
        _ => return Err(DispatchError::Infeasible { period }),
    }
    let production = system
        .generators
        .iter()
        .enumerate()
        .map(|(k, g)| solution.x[k] + g.p_min)
        .collect();
    let cost = solution.objective + system.min_output_cost();
    Ok(PeriodDispatch {
        solution,
        production,
        weight,
        cost,
    })
}

fn collect_periods(
    kind: DispatchKind,
    results: Vec<Result<PeriodDispatch, DispatchError>>,
) -> Result<DispatchSolution, DispatchError> {
    let periods = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let total_cost = periods.iter().map(|p| p.weight * p.cost).sum();
    Ok(DispatchSolution {
        kind,
        periods,
        total_cost,
    })
}

/// Solve every hour independently.
pub fn solve_full(system: &SystemData) -> Result<DispatchSolution, DispatchError> {
    let results = (0..system.horizon())
        .into_par_iter()
        .map(|h| {
            let lp = build_hourly_lp(system, h)?;
            solve_period(system, h, &lp, 1.0)
        })
        .collect();
    collect_periods(DispatchKind::Full, results)
}

/// Solve every representative; the total weights each period's cost.
pub fn solve_aggregated(
    system: &SystemData,
    reps: &RepresentativeSet,
) -> Result<DispatchSolution, DispatchError> {
    let lps = build_aggregated(system, reps)?;
    let results = lps
        .par_iter()
        .enumerate()
        .map(|(r, (lp, w))| solve_period(system, r, lp, *w))
        .collect();
    collect_periods(DispatchKind::Aggregated, results)
}

/// The unit on the margin under `basis`: the generator whose production
/// and headroom columns are both basic.
pub fn marginal_generator(system: &SystemData, basis: &BasisSignature) -> Option<usize> {
    let g = system.generators.len();
    let mut found = (0..g).filter(|&k| basis.contains(k) && basis.contains(g + k));
    let first = found.next()?;
    found.next().is_none().then_some(first)
}

/// Human-readable regime name for a basis.
pub fn regime_label(system: &SystemData, basis: &BasisSignature) -> String {
    match marginal_generator(system, basis) {
        Some(k) if system.generators[k].name == NSE_NAME => NSE_NAME.to_string(),
        Some(k) => format!("{} marginal", system.generators[k].name),
        None => format!("degenerate {basis}"),
    }
}
