//! File formats and synthetic data.
//!
//! Series CSV: header `hour,demand,cf_<series>...`, hours contiguous from 0.
//! System config: one JSON document (see [`SystemConfig`]). Reports,
//! cluster models and representative sets are JSON with floats rounded to
//! 12 significant digits.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Normal};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::ClusterModel;
use crate::dispatch::{add_nse_generator, DispatchError, Generator, RepresentativeSet, SystemData};
use crate::evaluation::{ClusterSummary, EvaluationReport};

pub const CF_PREFIX: &str = "cf_";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: expected hour {expected}, found {found}")]
    NonContiguousHours { line: u64, expected: u64, found: u64 },
    #[error("line {line}: capacity factor {value} outside [0, 1]")]
    OutOfRangeCf { value: f64, line: u64 },
    #[error("invalid header: {0}")]
    Header(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("unknown config keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("regime target unreachable: {0}")]
    RegimeUnreachable(String),
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DataError + '_ {
    move |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Demand and capacity-factor series without a fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesData {
    pub demand: Vec<f64>,
    pub capacity_factors: BTreeMap<String, Vec<f64>>,
}

impl SeriesData {
    pub fn horizon(&self) -> usize {
        self.demand.len()
    }

    pub fn of_system(system: &SystemData) -> Self {
        Self {
            demand: system.demand().to_vec(),
            capacity_factors: system.capacity_factors().clone(),
        }
    }
}

pub fn load_series(path: &Path) -> Result<SeriesData, DataError> {
    let file = File::open(path).map_err(io_err(path))?;
    read_series(file)
}

pub fn read_series<R: Read>(reader: R) -> Result<SeriesData, DataError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| DataError::Header(e.to_string()))?
        .clone();
    if header.get(0) != Some("hour") || header.get(1) != Some("demand") {
        return Err(DataError::Header(format!(
            "expected `hour,demand,...`, found `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut series_ids = Vec::new();
    for name in header.iter().skip(2) {
        let id = name
            .strip_prefix(CF_PREFIX)
            .filter(|id| !id.is_empty())
            .ok_or_else(|| DataError::Header(format!("column `{name}` lacks the `{CF_PREFIX}` prefix")))?;
        if series_ids.iter().any(|s| s == id) {
            return Err(DataError::Header(format!("duplicate column `{name}`")));
        }
        series_ids.push(id.to_string());
    }

    let mut demand = Vec::new();
    let mut cfs: Vec<Vec<f64>> = vec![Vec::new(); series_ids.len()];
    for record in rdr.records() {
        let record = record.map_err(|e| DataError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let hour: u64 = field(0).parse().map_err(|_| DataError::Parse {
            line,
            message: format!("bad hour `{}`", field(0)),
        })?;
        let expected = demand.len() as u64;
        if hour != expected {
            return Err(DataError::NonContiguousHours { line, expected, found: hour });
        }
        let number = |i: usize| -> Result<f64, DataError> {
            field(i)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| DataError::Parse {
                    line,
                    message: format!("bad number `{}` in column {}", field(i), header.get(i).unwrap_or("?")),
                })
        };
        let d = number(1)?;
        if d < 0.0 {
            return Err(DataError::Parse { line, message: format!("negative demand {d}") });
        }
        demand.push(d);
        for (k, col) in cfs.iter_mut().enumerate() {
            let v = number(2 + k)?;
            if !(0.0..=1.0).contains(&v) {
                return Err(DataError::OutOfRangeCf { value: v, line });
            }
            col.push(v);
        }
    }
    if demand.is_empty() {
        return Err(DataError::Parse { line: 1, message: "no data rows".into() });
    }
    Ok(SeriesData {
        demand,
        capacity_factors: series_ids.into_iter().zip(cfs).collect(),
    })
}

/// Floats are written in shortest round-trip form, so reading back is
/// bit-identical.
pub fn write_series(path: &Path, series: &SeriesData) -> Result<(), DataError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut header = String::from("hour,demand");
    for id in series.capacity_factors.keys() {
        header.push_str(&format!(",{CF_PREFIX}{id}"));
    }
    writeln!(w, "{header}").map_err(io_err(path))?;
    for h in 0..series.horizon() {
        let mut line = format!("{h},{}", series.demand[h]);
        for col in series.capacity_factors.values() {
            line.push_str(&format!(",{}", col[h]));
        }
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub name: String,
    pub cost: f64,
    #[serde(default)]
    pub p_min: f64,
    pub capacity: f64,
    #[serde(default)]
    pub is_variable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cf_series: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NseConfig {
    pub enabled: bool,
    #[serde(default = "default_nse_cost")]
    pub cost: f64,
    /// Sentinel capacity as a multiple of peak demand.
    #[serde(default = "default_nse_multiplier")]
    pub capacity_multiplier: f64,
}

fn default_nse_cost() -> f64 {
    1000.0
}

fn default_nse_multiplier() -> f64 {
    10.0
}

impl Default for NseConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            cost: default_nse_cost(),
            capacity_multiplier: default_nse_multiplier(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub generators: Vec<GeneratorConfig>,
    #[serde(default)]
    pub nse: NseConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    /// Series CSV; relative paths resolve against the config file's directory.
    pub series: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownKeys {
    Reject,
    Warn,
}

pub fn parse_config(text: &str, unknown: UnknownKeys) -> Result<SystemConfig, DataError> {
    let mut ignored = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let config: SystemConfig = serde_ignored::deserialize(&mut de, |path| ignored.push(path.to_string()))?;
    de.end()?;
    if !ignored.is_empty() {
        match unknown {
            UnknownKeys::Reject => return Err(DataError::UnknownKeys(ignored)),
            UnknownKeys::Warn => {
                for key in &ignored {
                    log::warn!("ignoring unknown config key `{key}`");
                }
            }
        }
    }
    Ok(config)
}

pub fn load_config(path: &Path, unknown: UnknownKeys) -> Result<SystemConfig, DataError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_config(&text, unknown)
}

impl SystemConfig {
    /// Combine the fleet with series data, adding NSE if enabled.
    pub fn build_system(&self, series: SeriesData) -> Result<SystemData, DataError> {
        if let Some(h) = self.horizon {
            if h != series.horizon() {
                return Err(DataError::Config(format!(
                    "horizon {h} but the series has {} hours",
                    series.horizon()
                )));
            }
        }
        let mut generators = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            if g.is_variable != g.cf_series.is_some() {
                return Err(DataError::Config(format!(
                    "generator {}: cf_series must be set exactly when is_variable",
                    g.name
                )));
            }
            if let Some(id) = &g.cf_series {
                if !series.capacity_factors.contains_key(id) {
                    return Err(DataError::Config(format!(
                        "generator {}: series file has no column {CF_PREFIX}{id}",
                        g.name
                    )));
                }
            }
            generators.push(Generator {
                name: g.name.clone(),
                variable_cost: g.cost,
                p_min: g.p_min,
                capacity: g.capacity,
                cf_series: g.cf_series.clone(),
            });
        }
        let system = SystemData::new(generators, series.demand, series.capacity_factors)?;
        if !self.nse.enabled {
            return Ok(system);
        }
        if !(self.nse.capacity_multiplier > 0.0) {
            return Err(DataError::Config("nse.capacity_multiplier must be positive".into()));
        }
        let peak = system.demand().iter().copied().fold(0.0, f64::max);
        let capacity = (self.nse.capacity_multiplier * peak).max(peak).max(1.0);
        Ok(add_nse_generator(&system, self.nse.cost, capacity)?)
    }

    pub fn series_path(&self, config_path: &Path) -> PathBuf {
        if self.series.is_absolute() {
            self.series.clone()
        } else {
            config_path.parent().unwrap_or(Path::new(".")).join(&self.series)
        }
    }
}

/// Load a config and its series file into a system.
pub fn load_system(config_path: &Path, unknown: UnknownKeys) -> Result<SystemData, DataError> {
    let config = load_config(config_path, unknown)?;
    let series = load_series(&config.series_path(config_path))?;
    config.build_system(series)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandModel {
    /// MW.
    pub base: f64,
    pub daily_amplitude: f64,
    pub seasonal_amplitude: f64,
    /// Gaussian noise, clipped at ±3σ.
    pub noise_std: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindModel {
    /// Independent hourly draws from Beta(alpha, beta).
    Beta { alpha: f64, beta: f64, seed: u64 },
    Constant { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FleetSpec {
    pub wind_capacity: f64,
    pub wind_cost: f64,
    pub thermal_capacity: f64,
    pub thermal_cost: f64,
    pub nse_cost: f64,
    pub nse_capacity_multiplier: f64,
}

/// Minimum fraction of hours required in each merit-order regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeTargets {
    pub min_wind_marginal_fraction: f64,
    pub min_thermal_marginal_fraction: f64,
    pub min_nse_fraction: f64,
}

/// Partial JSON specs fill omitted sections from [`SyntheticSpec::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub hours: usize,
    pub demand: DemandModel,
    pub wind: WindModel,
    pub fleet: FleetSpec,
    pub targets: RegimeTargets,
}

impl Default for SyntheticSpec {
    /// One wind unit, one thermal unit and NSE over a year, tuned so that all
    /// three regimes occur and NSE hours are rare.
    fn default() -> Self {
        Self {
            hours: 8760,
            demand: DemandModel {
                base: 100.0,
                daily_amplitude: 20.0,
                seasonal_amplitude: 15.0,
                noise_std: 8.0,
                seed: 1,
            },
            wind: WindModel::Beta { alpha: 1.6, beta: 2.4, seed: 2 },
            fleet: FleetSpec {
                wind_capacity: 150.0,
                wind_cost: 0.0,
                thermal_capacity: 110.0,
                thermal_cost: 10.0,
                nse_cost: 1000.0,
                nse_capacity_multiplier: 10.0,
            },
            targets: RegimeTargets {
                min_wind_marginal_fraction: 0.01,
                min_thermal_marginal_fraction: 0.01,
                min_nse_fraction: 0.001,
            },
        }
    }
}

impl SyntheticSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.demand.seed = seed;
        if let WindModel::Beta { seed: s, .. } = &mut self.wind {
            *s = seed.wrapping_add(1);
        }
        self
    }

    fn validate(&self) -> Result<(), DataError> {
        let bad = |m: &str| Err(DataError::Config(format!("synthetic spec: {m}")));
        if self.hours == 0 {
            return bad("hours must be >= 1");
        }
        let d = &self.demand;
        if ![d.base, d.daily_amplitude, d.seasonal_amplitude, d.noise_std].iter().all(|v| v.is_finite()) {
            return bad("non-finite demand parameter");
        }
        if d.noise_std < 0.0 {
            return bad("noise_std must be >= 0");
        }
        match self.wind {
            WindModel::Beta { alpha, beta, .. } if !(alpha > 0.0 && beta > 0.0) => {
                return bad("beta shape parameters must be positive")
            }
            WindModel::Constant { value } if !(0.0..=1.0).contains(&value) => {
                return bad("constant capacity factor outside [0, 1]")
            }
            _ => {}
        }
        let f = &self.fleet;
        if !(f.wind_capacity >= 0.0 && f.thermal_capacity >= 0.0) {
            return bad("capacities must be >= 0");
        }
        let t = &self.targets;
        for v in [t.min_wind_marginal_fraction, t.min_thermal_marginal_fraction, t.min_nse_fraction] {
            if !(0.0..=1.0).contains(&v) {
                return bad("regime fractions must lie in [0, 1]");
            }
        }
        Ok(())
    }
}

/// Hour counts per merit-order regime of the wind/thermal/NSE fleet.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RegimeSummary {
    pub hours: usize,
    pub wind_marginal: usize,
    pub thermal_marginal: usize,
    pub nse: usize,
    /// Demand exactly at a capacity boundary.
    pub boundary: usize,
}

impl RegimeSummary {
    pub fn classify(fleet: &FleetSpec, demand: &[f64], wind_cf: &[f64]) -> Self {
        let mut s = RegimeSummary {
            hours: demand.len(),
            ..Default::default()
        };
        for (&d, &cf) in demand.iter().zip(wind_cf) {
            let wind = fleet.wind_capacity * cf;
            let both = wind + fleet.thermal_capacity;
            if d < wind {
                s.wind_marginal += 1;
            } else if d > wind && d < both {
                s.thermal_marginal += 1;
            } else if d > both {
                s.nse += 1;
            } else {
                s.boundary += 1;
            }
        }
        s
    }

    pub fn fraction(&self, count: usize) -> f64 {
        count as f64 / self.hours.max(1) as f64
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub system: SystemData,
    pub regimes: RegimeSummary,
}

pub const WIND_SERIES: &str = "wind";

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticInstance, DataError> {
    spec.validate()?;
    let d = &spec.demand;
    let f = &spec.fleet;
    let peak_possible = d.base + d.daily_amplitude.abs() + d.seasonal_amplitude.abs() + 3.0 * d.noise_std;
    if spec.targets.min_nse_fraction > 0.0 && peak_possible <= f.thermal_capacity {
        return Err(DataError::RegimeUnreachable(format!(
            "demand never exceeds {peak_possible} MW, thermal capacity alone is {} MW",
            f.thermal_capacity
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
    let noise = (d.noise_std > 0.0).then(|| Normal::new(0.0, d.noise_std).expect("validated std"));
    let tau = std::f64::consts::TAU;
    let demand: Vec<f64> = (0..spec.hours)
        .map(|h| {
            let t = h as f64;
            // evening peak, winter peak
            let daily = d.daily_amplitude * (tau * (t - 12.0) / 24.0).sin();
            let seasonal = d.seasonal_amplitude * (tau * t / 8760.0).cos();
            let eps = noise.map_or(0.0, |n| {
                n.sample(&mut rng).clamp(-3.0 * d.noise_std, 3.0 * d.noise_std)
            });
            (d.base + daily + seasonal + eps).max(0.0)
        })
        .collect();
    let wind: Vec<f64> = match spec.wind {
        WindModel::Beta { alpha, beta, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dist = Beta::new(alpha, beta).expect("validated shape");
            (0..spec.hours).map(|_| dist.sample(&mut rng).clamp(0.0, 1.0)).collect()
        }
        WindModel::Constant { value } => vec![value; spec.hours],
    };

    let regimes = RegimeSummary::classify(f, &demand, &wind);
    let t = &spec.targets;
    for (name, count, min) in [
        ("wind-marginal", regimes.wind_marginal, t.min_wind_marginal_fraction),
        ("thermal-marginal", regimes.thermal_marginal, t.min_thermal_marginal_fraction),
        ("NSE", regimes.nse, t.min_nse_fraction),
    ] {
        let achieved = regimes.fraction(count);
        if achieved < min {
            return Err(DataError::RegimeUnreachable(format!(
                "{name} hours: achieved fraction {achieved:.6}, target at least {min}"
            )));
        }
    }

    let base = SystemData::new(
        vec![
            Generator::variable("wind", f.wind_cost, f.wind_capacity, WIND_SERIES),
            Generator::thermal("thermal", f.thermal_cost, f.thermal_capacity),
        ],
        demand,
        BTreeMap::from([(WIND_SERIES.to_string(), wind)]),
    )?;
    let peak = base.demand().iter().copied().fold(0.0, f64::max);
    let system = add_nse_generator(&base, f.nse_cost, (f.nse_capacity_multiplier * peak).max(peak).max(1.0))?;
    Ok(SyntheticInstance { system, regimes })
}

/// Config document describing a synthetic instance whose series were
/// written to `series_file`.
pub fn synthetic_config(spec: &SyntheticSpec, series_file: &Path) -> SystemConfig {
    let f = &spec.fleet;
    SystemConfig {
        generators: vec![
            GeneratorConfig {
                name: "wind".into(),
                cost: f.wind_cost,
                p_min: 0.0,
                capacity: f.wind_capacity,
                is_variable: true,
                cf_series: Some(WIND_SERIES.into()),
            },
            GeneratorConfig {
                name: "thermal".into(),
                cost: f.thermal_cost,
                p_min: 0.0,
                capacity: f.thermal_capacity,
                is_variable: false,
                cf_series: None,
            },
        ],
        nse: NseConfig {
            enabled: true,
            cost: f.nse_cost,
            capacity_multiplier: f.nse_capacity_multiplier,
        },
        horizon: Some(spec.hours),
        series: series_file.to_path_buf(),
    }
}

/// Round to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_report(report: &EvaluationReport) -> EvaluationReport {
    EvaluationReport {
        input_mse: round12(report.input_mse),
        full_cost: round12(report.full_cost),
        aggregated_cost: round12(report.aggregated_cost),
        output_error_pct: round12(report.output_error_pct),
        per_cluster: report
            .per_cluster
            .iter()
            .map(|c| ClusterSummary {
                label: c.label.clone(),
                weight: round12(c.weight),
                centroid: c.centroid.iter().map(|(k, v)| (k.clone(), round12(*v))).collect(),
                basis: c.basis.clone(),
            })
            .collect(),
        ..report.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), DataError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, DataError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}

const REPORT_CSV_HEADER: &str = "method,k,input_mse,full_cost,aggregated_cost,output_error_pct";

/// JSON carries the full report; CSV carries the scalar fields only.
pub fn write_report(report: &EvaluationReport, path: &Path, format: ReportFormat) -> Result<(), DataError> {
    let r = round_report(report);
    match format {
        ReportFormat::Json => write_json(path, &r),
        ReportFormat::Csv => {
            let text = format!(
                "{REPORT_CSV_HEADER}\n{},{},{},{},{},{}\n",
                r.method, r.k, r.input_mse, r.full_cost, r.aggregated_cost, r.output_error_pct
            );
            std::fs::write(path, text).map_err(io_err(path))
        }
    }
}

/// Rounded reports as a pretty JSON array, as written by [`write_report`].
pub fn reports_to_json(reports: &[EvaluationReport]) -> Result<String, DataError> {
    let rounded: Vec<EvaluationReport> = reports.iter().map(round_report).collect();
    Ok(serde_json::to_string_pretty(&rounded)?)
}

pub fn read_report(path: &Path, format: ReportFormat) -> Result<EvaluationReport, DataError> {
    match format {
        ReportFormat::Json => read_json(path),
        ReportFormat::Csv => {
            let text = std::fs::read_to_string(path).map_err(io_err(path))?;
            let mut lines = text.lines();
            if lines.next() != Some(REPORT_CSV_HEADER) {
                return Err(DataError::Header(format!("expected `{REPORT_CSV_HEADER}`")));
            }
            let row = lines.next().ok_or(DataError::Parse { line: 2, message: "missing row".into() })?;
            let f: Vec<&str> = row.split(',').collect();
            if f.len() != 6 {
                return Err(DataError::Parse { line: 2, message: format!("{} fields, expected 6", f.len()) });
            }
            let num = |i: usize| {
                f[i].parse::<f64>().map_err(|_| DataError::Parse { line: 2, message: format!("bad number `{}`", f[i]) })
            };
            Ok(EvaluationReport {
                method: f[0].to_string(),
                k: f[1].parse().map_err(|_| DataError::Parse { line: 2, message: format!("bad k `{}`", f[1]) })?,
                input_mse: num(2)?,
                full_cost: num(3)?,
                aggregated_cost: num(4)?,
                output_error_pct: num(5)?,
                per_cluster: Vec::new(),
                timings_ms: BTreeMap::new(),
            })
        }
    }
}

pub fn write_clusters(model: &ClusterModel, path: &Path) -> Result<(), DataError> {
    let mut rounded = model.clone();
    for c in &mut rounded.centroids {
        c.iter_mut().for_each(|v| *v = round12(*v));
    }
    write_json(path, &rounded)
}

pub fn read_clusters(path: &Path) -> Result<ClusterModel, DataError> {
    let model: ClusterModel = read_json(path)?;
    model
        .validate()
        .map_err(|e| DataError::Config(format!("{}: {e}", path.display())))?;
    Ok(model)
}

pub fn write_representatives(reps: &RepresentativeSet, path: &Path) -> Result<(), DataError> {
    let mut rounded = reps.clone();
    for r in &mut rounded.reps {
        r.demand = round12(r.demand);
        r.weight = round12(r.weight);
        r.cf.values_mut().for_each(|v| *v = round12(*v));
    }
    write_json(path, &rounded)
}

pub fn read_representatives(path: &Path) -> Result<RepresentativeSet, DataError> {
    read_json(path)
}
