//! The `drknn` command line: `lfd`, `classify`, `eval`, `sweep`, `verify`.
//!
//! Every flag can also come from a TOML or JSON file passed with `--config`
//! (keys are the flag names with `_` for `-`); flags win over the file. A
//! previous JSON report is itself a valid config file, which is how a run is
//! reproduced. Exit codes: 0 success, 2 configuration error, 3 numerical
//! failure (including failed verification checks).

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::data::{parse_queries, read_text, resolve_dataset};
use crate::domain::{empirical_distributions, euclidean_cost, Dataset};
use crate::embedding::{fit_pca, fit_svd, transform, EmbeddingKind, Standardizer};
use crate::error::{Error, Result};
use crate::eval::{
    compare, fit, sweep, ClassifierConfig, EmbeddingConfig, EpisodeSpec, EvalReport, Protocol, RadiusChoice,
    SweepParameter,
};
use crate::lfd::{duality_report, solve_lfd, RadiusVector, SolverStatus};
use crate::report::{emit, write_table, Report};
use crate::verify::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

const DEFAULT_RADIUS_GRID: &str = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";

#[derive(Debug, Parser)]
#[command(
    name = "drknn",
    version,
    about = "Distributionally robust weighted k-nearest neighbors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the least favorable distributions of a labeled dataset.
    Lfd(CommandArgs),
    /// Fit a classifier on a dataset and label the points of a query file.
    Classify(CommandArgs),
    /// Few-shot episodes: accuracy of one or more methods on shared episodes.
    Eval(CommandArgs),
    /// Paired sensitivity sweep over k, bandwidth, radius or tau.
    Sweep(CommandArgs),
    /// Check the LP solver against brute-force oracles on tiny instances.
    Verify(CommandArgs),
}

impl Command {
    fn parts(&self) -> (&'static str, &CommandArgs) {
        match self {
            Command::Lfd(a) => ("lfd", a),
            Command::Classify(a) => ("classify", a),
            Command::Eval(a) => ("eval", a),
            Command::Sweep(a) => ("sweep", a),
            Command::Verify(a) => ("verify", a),
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommandArgs {
    /// TOML or JSON config file (a previous report works too); flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
}

/// Every run setting. `None` means "not given"; [`RunConfig::resolve`] fills
/// the defaults a command uses so reports record the values actually used.
#[derive(Debug, Clone, Default, PartialEq, clap::Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Dataset file (features then 1-based label per row) or `builtin:NAME`
    /// (two_point, six_point, gaussian_noisy).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    /// Wasserstein radii: one value, one per class (comma-separated), or `cv`
    /// to cross-validate over --radius-grid. [default: cv; required for lfd]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<String>,
    /// Cross-validation grid: comma-separated radii; per-class vectors as
    /// `a/b`. [default: 0,0.1,…,1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_grid: Option<String>,
    /// Stratified cross-validation folds. [default: 5]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub folds: Option<usize>,
    /// Neighbors voting per query. [default: 5]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Gaussian kernel bandwidth h for `kernel`. [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    /// Entropy truncation level for `truncated`, in [0, 1]. [default: 0.9]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Feature map fitted on training data: none, pca:R or svd:R, with an
    /// optional `+std` suffix to z-score first. [default: none]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding: Option<String>,
    /// Method(s): drknn, vanilla, inverse_distance, kernel, truncated,
    /// uniform_random. eval takes a comma-separated list. [default: drknn;
    /// eval: drknn,vanilla]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// Number of episodes. [default: 30]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub episodes: Option<usize>,
    /// Training samples per class in each episode (K). [default: 5]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    /// Classes per episode (M). [default: 2]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<usize>,
    /// Query samples per episode, split evenly across classes. [default: 100]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub queries: Option<usize>,
    /// Root random seed. [default: 0]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads for episodes; 0 uses every core. Does not affect
    /// results. [default: 0]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    /// Grid resolution of the brute-force oracle (must divide 1). [default:
    /// 0.01 for n ≤ 2 and M ≤ 2, else 0.05]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    /// Points to classify: features, optionally followed by a 1-based label.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query_file: Option<String>,
    /// Swept parameter: k, bandwidth, radius or tau.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
    /// Comma-separated values of the swept parameter.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<String>,
    /// lfd: also solve the Lipschitz-regularized dual and report the gap.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duality: Option<bool>,
    /// Report path (JSON); stdout when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Optional flat CSV table (eval, sweep, verify).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

fn config_error(e: impl std::fmt::Display) -> Error {
    Error::param("config", e.to_string())
}

/// Reads a TOML or JSON config file. A JSON report contributes its `config`.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = read_text(path)?;
    let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    if is_json {
        let value: Value = serde_json::from_str(&text).map_err(config_error)?;
        let block = match value.get("schema_version") {
            Some(_) => value.get("config").cloned().unwrap_or(Value::Null),
            None => value,
        };
        serde_json::from_value(block).map_err(config_error)
    } else {
        toml::from_str(&text).map_err(config_error)
    }
}

impl RunConfig {
    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(self, flags: &RunConfig) -> Result<RunConfig> {
        let mut base = serde_json::to_value(self).map_err(config_error)?;
        let top = serde_json::to_value(flags).map_err(config_error)?;
        if let (Some(b), Some(t)) = (base.as_object_mut(), top.as_object()) {
            for (k, v) in t {
                b.insert(k.clone(), v.clone());
            }
        }
        serde_json::from_value(base).map_err(config_error)
    }

    /// Fills the defaults `command` uses and checks required fields.
    pub fn resolve(mut self, command: &str) -> Result<RunConfig> {
        let needs_dataset = command != "verify";
        if needs_dataset && self.dataset.is_none() {
            return Err(Error::param(
                "dataset",
                format!("`--dataset` is required for `{command}`"),
            ));
        }
        match command {
            "lfd" => {
                if self.radii.as_deref().is_none_or(|r| r == "cv") {
                    return Err(Error::param(
                        "radii",
                        "`lfd` needs explicit radii (one or one per class)",
                    ));
                }
                self.embedding.get_or_insert_with(|| "none".into());
                self.duality.get_or_insert(false);
            }
            "classify" | "eval" | "sweep" => {
                let default_method = if command == "eval" { "drknn,vanilla" } else { "drknn" };
                self.method.get_or_insert_with(|| default_method.into());
                self.embedding.get_or_insert_with(|| "none".into());
                let methods = self.methods()?;
                if methods.iter().any(|m| uses_radius(m)) {
                    let radii = self.radii.get_or_insert_with(|| "cv".into());
                    if radii == "cv" {
                        self.radius_grid.get_or_insert_with(|| DEFAULT_RADIUS_GRID.into());
                        self.folds.get_or_insert(5);
                    }
                }
                if methods
                    .iter()
                    .any(|m| matches!(m.as_str(), "drknn" | "vanilla" | "inverse_distance" | "truncated"))
                {
                    self.k.get_or_insert(5);
                }
                if methods.iter().any(|m| m == "kernel") {
                    self.bandwidth.get_or_insert(1.0);
                }
                if methods.iter().any(|m| m == "truncated") {
                    self.tau.get_or_insert(0.9);
                }
                if command == "classify" {
                    if self.query_file.is_none() {
                        return Err(Error::param("query-file", "`--query-file` is required for `classify`"));
                    }
                    if methods.iter().any(|m| m == "uniform_random") {
                        self.seed.get_or_insert(0);
                    }
                } else {
                    self.episodes.get_or_insert(30);
                    self.shots.get_or_insert(5);
                    self.classes.get_or_insert(2);
                    self.queries.get_or_insert(100);
                    self.seed.get_or_insert(0);
                    self.jobs.get_or_insert(0);
                }
                if command == "sweep" {
                    if methods.len() != 1 {
                        return Err(Error::param("method", "`sweep` takes exactly one method"));
                    }
                    if self.param.is_none() {
                        return Err(Error::param("param", "`--param` is required for `sweep`"));
                    }
                    if self.values.is_none() {
                        return Err(Error::param("values", "`--values` is required for `sweep`"));
                    }
                }
            }
            "verify" => {
                self.seed.get_or_insert(0);
            }
            _ => unreachable!("clap only produces known commands"),
        }
        Ok(self)
    }

    fn methods(&self) -> Result<Vec<String>> {
        let methods: Vec<String> = self
            .method
            .as_deref()
            .unwrap_or("drknn")
            .split(',')
            .map(|m| m.trim().to_string())
            .collect();
        for m in &methods {
            if !matches!(
                m.as_str(),
                "drknn" | "vanilla" | "inverse_distance" | "kernel" | "truncated" | "uniform_random"
            ) {
                return Err(Error::param("method", format!("unknown method `{m}`")));
            }
        }
        Ok(methods)
    }

    fn embedding_config(&self) -> Result<EmbeddingConfig> {
        self.embedding.as_deref().unwrap_or("none").parse()
    }

    fn radius_choice(&self) -> Result<RadiusChoice> {
        match self.radii.as_deref() {
            None | Some("cv") => {
                let grid = self
                    .radius_grid
                    .as_deref()
                    .unwrap_or(DEFAULT_RADIUS_GRID)
                    .split(',')
                    .map(|entry| entry.split('/').map(|v| parse_number("radius-grid", v)).collect())
                    .collect::<Result<Vec<Vec<f64>>>>()?;
                Ok(RadiusChoice::CrossValidated {
                    grid,
                    folds: self.folds.unwrap_or(5),
                })
            }
            Some(list) => Ok(RadiusChoice::Fixed(parse_list("radii", list)?)),
        }
    }

    fn classifier(&self, method: &str) -> Result<ClassifierConfig> {
        let k = self.k.unwrap_or(5);
        if k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        Ok(match method {
            "drknn" => ClassifierConfig::DrKnn {
                k,
                radius: self.radius_choice()?,
            },
            "vanilla" => ClassifierConfig::Vanilla { k },
            "inverse_distance" => ClassifierConfig::InverseDistance { k },
            "kernel" => {
                let bandwidth = self.bandwidth.unwrap_or(1.0);
                if !(bandwidth > 0.0 && bandwidth.is_finite()) {
                    return Err(Error::param(
                        "bandwidth",
                        format!("{bandwidth} is not a positive number"),
                    ));
                }
                ClassifierConfig::Kernel {
                    bandwidth,
                    radius: self.radius_choice()?,
                }
            }
            "truncated" => {
                let tau = self.tau.unwrap_or(0.9);
                if !(0.0..=1.0).contains(&tau) {
                    return Err(Error::param("tau", format!("{tau} is outside [0, 1]")));
                }
                ClassifierConfig::Truncated {
                    k,
                    tau,
                    radius: self.radius_choice()?,
                }
            }
            "uniform_random" => ClassifierConfig::UniformRandom,
            other => return Err(Error::param("method", format!("unknown method `{other}`"))),
        })
    }

    fn protocol(&self) -> Result<Protocol> {
        Ok(Protocol {
            episode: EpisodeSpec {
                class_count: self.classes.unwrap_or(2),
                shots: self.shots.unwrap_or(5),
                query_count: self.queries.unwrap_or(100),
                seed: self.seed.unwrap_or(0),
            },
            episodes: self.episodes.unwrap_or(30),
            embedding: self.embedding_config()?,
            jobs: self.jobs.unwrap_or(0),
        })
    }
}

fn uses_radius(method: &str) -> bool {
    matches!(method, "drknn" | "kernel" | "truncated")
}

fn parse_number(field: &'static str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::param(field, format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::param(field, format!("`{s}` is not finite")));
    }
    Ok(v)
}

fn parse_list(field: &'static str, s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|v| parse_number(field, v)).collect()
}

fn load(config: &RunConfig) -> Result<Dataset> {
    let spec = config.dataset.as_deref().expect("resolve checked the dataset");
    resolve_dataset(spec)
}

/// Applies the configured feature map to a whole dataset (lfd command).
fn embed(config: &EmbeddingConfig, data: &Dataset) -> Result<Dataset> {
    let scaled = if config.standardize {
        Standardizer::fit(data).transform(data)?
    } else {
        data.clone()
    };
    match config.kind {
        None => Ok(scaled),
        Some(EmbeddingKind::Pca) => transform(&fit_pca(&scaled, config.rank)?, &scaled),
        Some(EmbeddingKind::Svd) => transform(&fit_svd(&scaled, config.rank)?, &scaled),
    }
}

/// What a command produced: the result block, timing, and whether the run
/// should exit with a numerical failure despite producing a report.
struct Outcome {
    result: Value,
    timing: Value,
    numeric_failure: bool,
}

fn radii_for(values: Vec<f64>, class_count: usize) -> Result<RadiusVector> {
    match values.as_slice() {
        [r] => RadiusVector::uniform(class_count, *r),
        _ if values.len() == class_count => RadiusVector::new(values),
        _ => Err(Error::param(
            "radii",
            format!("{} radii given for {class_count} classes", values.len()),
        )),
    }
}

fn run_lfd(config: &RunConfig) -> Result<Outcome> {
    let data = embed(&config.embedding_config()?, &load(config)?)?;
    data.require_all_classes()?;
    let RadiusChoice::Fixed(values) = config.radius_choice()? else {
        unreachable!("resolve rejects cv for lfd")
    };
    let radii = radii_for(values, data.class_count())?;
    let cost = euclidean_cost(&data)?;
    let emp = empirical_distributions(&data)?;
    let sol = solve_lfd(&cost, &emp, &radii)?;
    let duality = if config.duality == Some(true) && sol.status == SolverStatus::Optimal {
        Some(duality_report(&cost, &emp, &radii)?)
    } else {
        None
    };
    let lfds: Vec<Value> = sol
        .lfds
        .iter()
        .enumerate()
        .map(|(m, d)| json!({"class": m + 1, "mass": d.mass()}))
        .collect();
    Ok(Outcome {
        numeric_failure: sol.status != SolverStatus::Optimal,
        result: json!({
            "status": sol.status.to_string(),
            "diagnostics": sol.diagnostics,
            "n": data.len(),
            "class_count": data.class_count(),
            "radii": radii.as_slice(),
            "objective": sol.objective,
            "minimax_risk": sol.minimax_risk,
            "lfds": lfds,
            "spend": sol.spend,
            "duality": duality,
        }),
        timing: json!({}),
    })
}

fn run_classify(config: &RunConfig) -> Result<Outcome> {
    let train = load(config)?;
    let path = config.query_file.as_deref().expect("resolve checked the query file");
    let (queries, labeled) = parse_queries(&read_text(Path::new(path))?, train.dim(), train.class_count())?;
    let methods = config.methods()?;
    if methods.len() != 1 {
        return Err(Error::param("method", "`classify` takes exactly one method"));
    }
    let classifier = config.classifier(&methods[0])?;
    let mut fitted = fit(
        &classifier,
        &config.embedding_config()?,
        &train,
        config.seed.unwrap_or(0),
    )?;
    let predictions = fitted.predict(&queries)?;
    let accuracy = labeled.then(|| {
        let hits = predictions
            .iter()
            .zip(queries.labels())
            .filter(|(p, y)| **p == *y)
            .count();
        hits as f64 / predictions.len() as f64
    });
    Ok(Outcome {
        result: json!({
            "method": classifier.id(),
            "classifier": classifier,
            "predictions": predictions.iter().map(|p| p + 1).collect::<Vec<_>>(),
            "accuracy": accuracy,
            "radii": fitted.radius.as_ref().map(|r| r.as_slice().to_vec()),
            "kept": fitted.truncated.as_ref().map(|t| t.len()),
        }),
        timing: json!({}),
        numeric_failure: false,
    })
}

/// `EvalReport` without wall-clock numbers, which go under `timing`.
fn report_value(r: &EvalReport) -> Value {
    let mut v = serde_json::to_value(r).expect("reports serialize");
    v.as_object_mut()
        .expect("report is an object")
        .remove("seconds_per_episode");
    v
}

fn run_eval(config: &RunConfig) -> Result<Outcome> {
    let source = load(config)?;
    let classifiers = config
        .methods()?
        .iter()
        .map(|m| config.classifier(m))
        .collect::<Result<Vec<_>>>()?;
    let protocol = config.protocol()?;
    let reports = compare(&source, &protocol, &classifiers)?;
    let paired: Vec<Value> = (0..protocol.episodes)
        .map(|t| {
            let accs: serde_json::Map<String, Value> = reports
                .iter()
                .enumerate()
                .map(|(i, r)| (format!("{}#{i}", r.classifier), json!(r.accuracies[t])))
                .collect();
            json!({"episode": t, "accuracy": accs})
        })
        .collect();
    if let Some(path) = &config.table {
        let mut rows = Vec::new();
        for (i, r) in reports.iter().enumerate() {
            for (t, a) in r.accuracies.iter().enumerate() {
                rows.push(vec![t.to_string(), format!("{}#{i}", r.classifier), format!("{a:?}")]);
            }
        }
        write_table(path, &["episode", "method", "accuracy"], &rows)?;
    }
    Ok(Outcome {
        result: json!({
            "reports": reports.iter().map(report_value).collect::<Vec<_>>(),
            "paired": paired,
        }),
        timing: json!({
            "seconds_per_episode": reports.iter().map(|r| &r.seconds_per_episode).collect::<Vec<_>>(),
        }),
        numeric_failure: false,
    })
}

fn run_sweep(config: &RunConfig) -> Result<Outcome> {
    let source = load(config)?;
    let parameter: SweepParameter = config.param.as_deref().expect("resolve checked param").parse()?;
    let values = parse_list("values", config.values.as_deref().expect("resolve checked values"))?;
    let base = config.classifier(&config.methods()?[0])?;
    let protocol = config.protocol()?;
    let reports = sweep(&source, &protocol, &base, parameter, &values)?;
    let means: Vec<f64> = reports.iter().map(|r| r.mean).collect();
    let range =
        means.iter().copied().fold(f64::NEG_INFINITY, f64::max) - means.iter().copied().fold(f64::INFINITY, f64::min);
    if let Some(path) = &config.table {
        let mut rows = Vec::new();
        for (r, v) in reports.iter().zip(&values) {
            for (t, a) in r.accuracies.iter().enumerate() {
                let kept = r.kept.as_ref().map_or(String::new(), |k| k[t].to_string());
                rows.push(vec![format!("{v:?}"), t.to_string(), format!("{a:?}"), kept]);
            }
        }
        write_table(
            path,
            &[
                config.param.as_deref().unwrap_or("value"),
                "episode",
                "accuracy",
                "kept",
            ],
            &rows,
        )?;
    }
    Ok(Outcome {
        result: json!({
            "parameter": parameter,
            "values": values,
            "method": base.id(),
            "reports": reports.iter().map(report_value).collect::<Vec<_>>(),
            "means": means,
            "accuracy_range": range,
        }),
        timing: json!({
            "seconds_per_episode": reports.iter().map(|r| &r.seconds_per_episode).collect::<Vec<_>>(),
        }),
        numeric_failure: false,
    })
}

fn run_verify(config: &RunConfig) -> Result<Outcome> {
    let checks = run_suite(config.seed.unwrap_or(0), config.grid_step)?;
    let passed = checks.iter().filter(|c| c.passed).count();
    let failed = checks.len() - passed;
    for c in &checks {
        eprintln!(
            "{:4} {:28} {:30} solver {:.9} oracle {:.9} tol {:.1e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.instance,
            c.check,
            c.solver,
            c.oracle,
            c.tolerance
        );
    }
    if let Some(path) = &config.table {
        let rows: Vec<Vec<String>> = checks
            .iter()
            .map(|c| {
                vec![
                    c.instance.clone(),
                    c.check.clone(),
                    format!("{:?}", c.solver),
                    format!("{:?}", c.oracle),
                    format!("{:?}", c.tolerance),
                    c.passed.to_string(),
                ]
            })
            .collect();
        write_table(
            path,
            &["instance", "check", "solver", "oracle", "tolerance", "passed"],
            &rows,
        )?;
    }
    Ok(Outcome {
        result: json!({"checks": checks, "passed": passed, "failed": failed, "all_passed": failed == 0}),
        timing: json!({}),
        numeric_failure: failed > 0,
    })
}

/// Runs one command with an already resolved configuration and returns the
/// report text plus the exit code.
pub fn execute(command: &str, config: &RunConfig) -> Result<(String, i32)> {
    let start = Instant::now();
    let outcome = match command {
        "lfd" => run_lfd(config)?,
        "classify" => run_classify(config)?,
        "eval" => run_eval(config)?,
        "sweep" => run_sweep(config)?,
        "verify" => run_verify(config)?,
        other => return Err(Error::param("command", format!("unknown command `{other}`"))),
    };
    let mut timing = outcome.timing;
    if let Some(t) = timing.as_object_mut() {
        t.insert("seconds".into(), json!(start.elapsed().as_secs_f64()));
    }
    // Output locations are not part of what determines the result.
    let recorded = RunConfig {
        out: None,
        table: None,
        ..config.clone()
    };
    let text = Report::new(command, &recorded, outcome.result, timing).to_json()?;
    Ok((text, if outcome.numeric_failure { EXIT_NUMERIC } else { EXIT_OK }))
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Solver { .. } => EXIT_NUMERIC,
        _ => EXIT_CONFIG,
    }
}

/// Parses arguments, runs, writes the report and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (command, args) = cli.command.parts();
    let result = (|| {
        let base = match &args.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        let config = base.overlay(&args.run)?.resolve(command)?;
        let (text, code) = execute(command, &config)?;
        emit(config.out.as_deref(), &text)?;
        Ok::<_, Error>(code)
    })();
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
