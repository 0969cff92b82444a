//! `tsagg` command-line interface.
//!
//! Exit codes: 0 success, 1 contract violation, 2 usage or input error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::clustering::{basis_cluster_from, kmeans, normalize_features, ClusterModel, KMEANS_MAX_ITER, KMEANS_TOL};
use crate::data_io::{
    generate_synthetic, load_config, load_series, load_system, read_clusters, read_json, synthetic_config,
    write_clusters, write_json, write_report, write_representatives, write_series, ReportFormat, SeriesData,
    SyntheticSpec, UnknownKeys,
};
use crate::dispatch::{regime_label, solve_full, SystemData};
use crate::evaluation::{compare_methods_detailed, evaluate_model, EvaluationReport, MethodRun};
use crate::plot::render_scatter;

/// Basis-method output error (percent) above which `compare` fails.
pub const SELF_CHECK_PCT: f64 = 1e-4;

pub const THREADS_ENV: &str = "TSAGG_THREADS";

#[derive(Debug, Parser)]
#[command(name = "tsagg", version, about = "Basis-oriented time series aggregation for economic dispatch")]
struct Cli {
    /// Warn about unknown config keys instead of rejecting the config.
    #[arg(long, global = true)]
    warn_unknown_keys: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Kmeans,
    Basis,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic series CSV, regime summary and matching config.
    Generate {
        /// Synthetic spec JSON; built-in defaults when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Override the demand and wind seeds.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve every hour of the full dispatch model.
    SolveFull {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster hours, solve the aggregated model and report the errors.
    Aggregate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run both methods against one full solve and check the basis result.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Scatter plot of hours colored by cluster.
    Plot {
        #[arg(long)]
        clusters: PathBuf,
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Contract(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Contract(_) => 1,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    configure_threads();
    let unknown = if cli.warn_unknown_keys {
        UnknownKeys::Warn
    } else {
        UnknownKeys::Reject
    };
    let result = match cli.command {
        Command::Generate { spec, out, seed } => generate(spec.as_deref(), &out, seed),
        Command::SolveFull { config, out } => cmd_solve_full(&config, &out, unknown),
        Command::Aggregate { config, method, k, seed, out } => {
            if matches!(method, Method::Kmeans) && k.is_none() {
                let err = Cli::command().error(ErrorKind::MissingRequiredArgument, "--method kmeans requires --k <K>");
                let _ = err.print();
                return 2;
            }
            aggregate(&config, method, k, seed, &out, unknown)
        }
        Command::Compare { config, out, seed } => compare(&config, &out, seed, unknown),
        Command::Plot { clusters, series, out } => plot(&clusters, &series, &out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Contract(m) => eprintln!("check failed: {m}"),
            }
            f.code()
        }
    }
}

fn configure_threads() {
    let Ok(value) = std::env::var(THREADS_ENV) else { return };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            // a second call in the same process keeps the first pool
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => log::warn!("ignoring {THREADS_ENV}={value}: expected a positive integer"),
    }
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))
}

fn generate(spec_path: Option<&Path>, out: &Path, seed: Option<u64>) -> Result<(), Failure> {
    let mut spec: SyntheticSpec = match spec_path {
        Some(p) => read_json(p).map_err(usage)?,
        None => SyntheticSpec::default(),
    };
    if let Some(s) = seed {
        spec = spec.with_seed(s);
    }
    let inst = generate_synthetic(&spec).map_err(usage)?;
    create_dir(out)?;
    let series_file = Path::new("series.csv");
    write_series(&out.join(series_file), &SeriesData::of_system(&inst.system)).map_err(usage)?;
    write_json(&out.join("regimes.json"), &inst.regimes).map_err(usage)?;
    write_json(&out.join("system.json"), &synthetic_config(&spec, series_file)).map_err(usage)?;
    let r = &inst.regimes;
    println!(
        "{} hours: {} wind marginal, {} thermal marginal, {} NSE, {} on a boundary",
        r.hours, r.wind_marginal, r.thermal_marginal, r.nse, r.boundary
    );
    Ok(())
}

#[derive(Serialize)]
struct FullSummary {
    hours: usize,
    total_cost: f64,
    regime_counts: BTreeMap<String, usize>,
}

fn cmd_solve_full(config: &Path, out: &Path, unknown: UnknownKeys) -> Result<(), Failure> {
    let system = load_system(config, unknown).map_err(usage)?;
    let full = solve_full(&system).map_err(|e| Failure::Contract(e.to_string()))?;
    let mut regime_counts = BTreeMap::new();
    for basis in full.bases() {
        *regime_counts.entry(regime_label(&system, basis)).or_insert(0) += 1;
    }
    let summary = FullSummary {
        hours: system.horizon(),
        total_cost: full.total_cost,
        regime_counts,
    };
    if let Some(dir) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write_json(out, &summary).map_err(usage)?;
    println!("total cost {:.6} over {} hours", full.total_cost, system.horizon());
    Ok(())
}

fn write_method_outputs(dir: &Path, suffix: &str, run: &MethodRun) -> Result<(), Failure> {
    write_clusters(&run.model, &dir.join(format!("clusters{suffix}.json"))).map_err(usage)?;
    write_representatives(&run.representatives, &dir.join(format!("representatives{suffix}.json"))).map_err(usage)?;
    write_report(&run.report, &dir.join(format!("report{suffix}.json")), ReportFormat::Json).map_err(usage)
}

fn aggregate(
    config: &Path,
    method: Method,
    k: Option<usize>,
    seed: u64,
    out: &Path,
    unknown: UnknownKeys,
) -> Result<(), Failure> {
    let system = load_system(config, unknown).map_err(usage)?;
    let full = solve_full(&system).map_err(|e| Failure::Contract(e.to_string()))?;
    let features = normalize_features(&system);
    let model = match method {
        Method::Basis => {
            if k.is_some() {
                eprintln!("warning: --k is ignored for --method basis; the cluster count is discovered");
            }
            basis_cluster_from(&system, &features, &full)
        }
        Method::Kmeans => {
            let k = k.expect("checked by caller");
            kmeans(&features, k, seed, KMEANS_MAX_ITER, KMEANS_TOL).map_err(usage)?
        }
    };
    let run = evaluate_model(&system, &features, &full, model).map_err(|e| Failure::Contract(e.to_string()))?;
    create_dir(out)?;
    write_method_outputs(out, "", &run)?;
    write_json(&out.join("timings.json"), &run.report.timings_ms).map_err(usage)?;
    print_table(&[run.report]);
    Ok(())
}

fn summary_table(reports: &[EvaluationReport]) -> String {
    let mut s = String::from("method,k,input_mse,output_error_pct\n");
    for r in reports {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.method,
            r.k,
            crate::data_io::round12(r.input_mse),
            crate::data_io::round12(r.output_error_pct)
        ));
    }
    s
}

fn print_table(reports: &[EvaluationReport]) {
    println!("{:<8} {:>4} {:>12} {:>16}", "method", "k", "input MSE", "output error %");
    for r in reports {
        println!("{:<8} {:>4} {:>12.6} {:>16.6}", r.method, r.k, r.input_mse, r.output_error_pct);
    }
}

fn scatter(system: &SystemData, model: &ClusterModel, title: &str) -> Result<String, Failure> {
    render_scatter(&SeriesData::of_system(system), model, title).map_err(usage)
}

fn compare(config: &Path, out: &Path, seed: u64, unknown: UnknownKeys) -> Result<(), Failure> {
    let system = load_system(config, unknown).map_err(usage)?;
    let cmp = compare_methods_detailed(&system, None, seed).map_err(|e| Failure::Contract(e.to_string()))?;
    create_dir(out)?;
    write_method_outputs(out, "_kmeans", &cmp.kmeans)?;
    write_method_outputs(out, "_basis", &cmp.basis)?;
    let reports = cmp.reports();
    std::fs::write(out.join("summary.csv"), summary_table(&reports)).map_err(usage)?;
    let timings: BTreeMap<&str, &BTreeMap<String, f64>> =
        reports.iter().map(|r| (r.method.as_str(), &r.timings_ms)).collect();
    write_json(&out.join("timings.json"), &timings).map_err(usage)?;
    for (run, name, title) in [
        (&cmp.kmeans, "fig_kmeans.svg", "k-means clusters"),
        (&cmp.basis, "fig_basis.svg", "basis-oriented clusters"),
    ] {
        let svg = scatter(&system, &run.model, title)?;
        std::fs::write(out.join(name), svg).map_err(usage)?;
    }
    print_table(&reports);

    let err = cmp.basis.report.output_error_pct;
    if !(err <= SELF_CHECK_PCT) {
        return Err(Failure::Contract(format!(
            "basis-oriented output error {err:e}% exceeds {SELF_CHECK_PCT:e}%"
        )));
    }
    Ok(())
}

fn plot(clusters: &Path, series: &Path, out: &Path) -> Result<(), Failure> {
    let model = read_clusters(clusters).map_err(usage)?;
    let series = load_series(series).map_err(usage)?;
    let title = format!("{} clusters", model.method.label());
    let svg = render_scatter(&series, &model, &title).map_err(usage)?;
    std::fs::write(out, svg).map_err(|e| usage(format!("{}: {e}", out.display())))
}

/// Load just the config (used by tests and callers that need the series path).
pub fn config_series_path(config: &Path) -> Result<PathBuf, String> {
    let cfg = load_config(config, UnknownKeys::Warn).map_err(|e| e.to_string())?;
    Ok(cfg.series_path(config))
}
