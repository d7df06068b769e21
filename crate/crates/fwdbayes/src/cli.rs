//! Subcommands of the `fwdbayes` binary. Each run writes `report.json`, one
//! or more CSV tables, `summary.txt` and a separate `metadata.json` holding
//! the only time-dependent output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fwdbayes_core::modes::{bernoulli_hierarchy, raven_hierarchy, regression_hierarchy, HierarchyReport};
use fwdbayes_core::norms::check_all;
use fwdbayes_core::regression::{gen_dataset, replication_seed, RegressionPosterior};
use serde::{Deserialize, Serialize};

use crate::config::{self, ModesFile, ProblemKind, RavenFile, RegressionFile};
use crate::driver::{concentration_trend_par, replicate_experiment_par};
use crate::error::{CliError, Result};
use crate::report::{
    to_json, CurveReport, ModelPoint, ModesReport, NormsReport, RegressionReport, Series, ThresholdReport,
};
use crate::tables;

#[derive(Debug, Parser)]
#[command(name = "fwdbayes", version, about = "Batch runner for forward-looking Bayesian experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check Regularity, Open-Mindedness, Simple Convergence and local Countable Additivity.
    RavenNorms(RunArgs),
    /// Least evidence length pushing credence in "all ravens are black" above each threshold.
    RavenThreshold(RunArgs),
    /// Posterior in "all ravens are black" after n = 0..=curve_max_n black ravens.
    RavenCurve(RunArgs),
    /// Replicated step-function regression study.
    RegressRun(RunArgs),
    /// Evaluate the hierarchy of convergence modes on one problem.
    ModesReport(RunArgs),
    /// Extract a plot series from a report as a tidy CSV table.
    EmitPlot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the config's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exit with status 1 when a norm check fails.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// A `report.json` written by another subcommand.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    PosteriorCurve,
    ModelPosterior,
    ConcentrationTrend,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::PosteriorCurve => "posterior-curve",
            PlotKind::ModelPosterior => "model-posterior",
            PlotKind::ConcentrationTrend => "concentration-trend",
        }
    }
}

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
    /// Set when `--strict` is given and a norm check fails.
    pub strict_failure: Option<String>,
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Artifacts {
    fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Artifacts { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    fn text(&mut self, name: &str, content: &str) -> Result<()> {
        let p = self.path(name);
        std::fs::write(&p, content).map_err(|e| CliError::io(p, e))
    }

    fn finish(mut self, command: &str, args: &RunArgs, summary: String, strict_failure: Option<String>) -> Result<Outcome> {
        self.text("summary.txt", &summary)?;
        let metadata = Metadata {
            tool: "fwdbayes",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: args.config.display().to_string(),
            seed_override: args.seed,
            generated_at_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        };
        self.text("metadata.json", &to_json(&metadata))?;
        Ok(Outcome { summary, files: self.files, strict_failure })
    }
}

#[derive(Debug, Serialize)]
struct Metadata {
    tool: &'static str,
    version: &'static str,
    command: String,
    config: String,
    seed_override: Option<u64>,
    generated_at_unix: u64,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::RavenNorms(a) => raven_norms(a),
        Command::RavenThreshold(a) => raven_threshold(a),
        Command::RavenCurve(a) => raven_curve(a),
        Command::RegressRun(a) => regress_run(a),
        Command::ModesReport(a) => modes_report(a),
        Command::EmitPlot(a) => emit_plot(a),
    }
}

#[derive(Serialize)]
struct StatusRow<'a> {
    name: &'a str,
    status: &'a str,
}

fn raven_norms(args: &RunArgs) -> Result<Outcome> {
    let file: RavenFile = config::load(&args.config)?;
    let prior = file.prior()?;
    let norms = check_all(&prior);
    let report = NormsReport::new(&file, &prior, &norms);

    let mut out = Artifacts::create(&args.out)?;
    out.text("report.json", &to_json(&report))?;
    let rows = report.verdicts.iter().map(|v| StatusRow { name: &v.norm, status: &v.status });
    tables::write_rows(&out.path("verdicts.csv"), rows)?;

    let mut summary = String::new();
    for v in &report.verdicts {
        let _ = writeln!(summary, "{:<26} {}", v.norm, v.status);
    }
    let _ = writeln!(summary, "convergence implies countable additivity: {}", report.implication_holds);
    let failing: Vec<_> = report.verdicts.iter().filter(|v| v.status == "Fails").map(|v| v.norm.as_str()).collect();
    let strict = (args.strict && !failing.is_empty()).then(|| format!("norm checks failed: {}", failing.join(", ")));
    out.finish("raven-norms", args, summary, strict)
}

#[derive(Serialize)]
struct ThresholdRow<'a> {
    threshold: &'a str,
    n: Option<u64>,
}

fn raven_threshold(args: &RunArgs) -> Result<Outcome> {
    let file: RavenFile = config::load(&args.config)?;
    let prior = file.prior()?;
    let thresholds = file.threshold_values()?;
    if thresholds.is_empty() {
        return Err(CliError::config("thresholds", "at least one threshold is required"));
    }
    let report = ThresholdReport::new(&file, &prior, &thresholds)?;

    let mut out = Artifacts::create(&args.out)?;
    out.text("report.json", &to_json(&report))?;
    let rows = report.thresholds.iter().map(|t| ThresholdRow { threshold: &t.threshold, n: t.n });
    tables::write_rows(&out.path("thresholds.csv"), rows)?;

    let mut summary = String::new();
    for t in &report.thresholds {
        let n = t.n.map_or_else(|| "none".to_string(), |n| n.to_string());
        let _ = writeln!(summary, "threshold {}: least n = {n}", t.threshold);
    }
    out.finish("raven-threshold", args, summary, None)
}

fn raven_curve(args: &RunArgs) -> Result<Outcome> {
    let file: RavenFile = config::load(&args.config)?;
    let prior = file.prior()?;
    let report = CurveReport::new(&file, &prior)?;
    let curve = report.series.posterior_curve.as_deref().unwrap_or_default();

    let mut out = Artifacts::create(&args.out)?;
    out.text("report.json", &to_json(&report))?;
    tables::write_rows(&out.path("posterior-curve.csv"), curve)?;

    let mut summary = String::new();
    if let (Some(first), Some(last)) = (curve.first(), curve.last()) {
        let _ = writeln!(summary, "posterior at n = {}: {}", first.n, first.posterior_exact);
        let _ = writeln!(summary, "posterior at n = {}: {}", last.n, last.posterior_exact);
    }
    out.finish("raven-curve", args, summary, None)
}

fn regress_run(args: &RunArgs) -> Result<Outcome> {
    let file: RegressionFile = config::load(&args.config)?;
    let cfg = file.build(args.seed)?;
    let run = replicate_experiment_par(&cfg)?;

    let (data, source) = match &file.dataset {
        Some(path) => {
            let path = resolve(&args.config, path);
            (tables::read_dataset(&path)?, format!("file {}", path.display()))
        }
        None => {
            let seed = replication_seed(cfg.master_seed, 0);
            (gen_dataset(&cfg.fstar, cfg.n, seed), format!("replication 0 (seed {seed})"))
        }
    };
    let fit = RegressionPosterior::fit(&data, &cfg.prior, cfg.tau)?;
    let model_posterior = cfg
        .prior
        .weights()
        .iter()
        .zip(fit.model_weights())
        .enumerate()
        .map(|(depth, (&prior, &posterior))| ModelPoint { depth: depth as u32, prior, posterior })
        .collect();
    let trend = match file.trend_sizes.as_slice() {
        [] => None,
        sizes => Some(concentration_trend_par(&cfg, sizes)?),
    };
    let series = Series {
        model_posterior: Some(model_posterior),
        concentration_trend: trend.as_ref().map(|rows| rows.iter().map(Into::into).collect()),
        ..Series::default()
    };
    let report = RegressionReport::new(&run, &cfg.fstar, &file.decay, source, series);

    let mut out = Artifacts::create(&args.out)?;
    out.text("report.json", &to_json(&report))?;
    tables::write_replications(&out.path("replications.csv"), &run)?;
    tables::write_dataset(&out.path("dataset.csv"), &data)?;
    if let Some(rows) = &trend {
        tables::write_trend(&out.path("trend.csv"), rows)?;
    }

    let mut summary = String::new();
    let _ = writeln!(summary, "models M_0..M_{} , n = {}, {} replications", run.max_depth, run.n, run.replications.len());
    let _ = writeln!(summary, "concentration > 1 - delta: {:.3}", run.success_fraction);
    let _ = writeln!(summary, "true depth most probable: {:.3}", run.identified_fraction);
    let _ = writeln!(summary, "both: {}/{}", report.concentrated_on_truth, run.replications.len());
    let _ = writeln!(summary, "mean L2 error of posterior mean: {:.6}", run.mean_l2_error);
    out.finish("regress-run", args, summary, None)
}

#[derive(Serialize)]
struct ModeRow<'a> {
    mode: &'a str,
    status: &'a str,
}

fn modes_report(args: &RunArgs) -> Result<Outcome> {
    let file: ModesFile = config::load(&args.config)?;
    let hierarchy: HierarchyReport = match file.problem {
        ProblemKind::Raven => raven_hierarchy(&file.raven()?.prior()?),
        ProblemKind::Bernoulli => {
            let sizes = file.sizes()?;
            bernoulli_hierarchy(&file.bernoulli()?.build(args.seed)?, sizes)?
        }
        ProblemKind::Regression => {
            let sizes = file.sizes()?;
            let cfg = file.regression()?.build(args.seed)?;
            regression_hierarchy(concentration_trend_par(&cfg, sizes)?)
        }
    };
    let report = ModesReport::new(&hierarchy);

    let mut out = Artifacts::create(&args.out)?;
    out.text("report.json", &to_json(&report))?;
    let rows = report.verdicts.iter().map(|v| ModeRow { mode: &v.mode, status: &v.status });
    tables::write_rows(&out.path("modes.csv"), rows)?;
    if let Some(trend) = &report.series.concentration_trend {
        tables::write_rows(&out.path("trend.csv"), trend)?;
    }

    let mut summary = String::new();
    for v in &report.verdicts {
        let _ = writeln!(summary, "{:<26} {}", v.mode, v.status);
    }
    let _ = writeln!(summary, "highest achieved: {}", report.highest.as_deref().unwrap_or("none"));
    out.finish("modes-report", args, summary, None)
}

#[derive(Deserialize)]
struct PlotSource {
    #[serde(default)]
    series: Series,
}

/// Writes `<out>/<kind>.csv` from the matching series of a report.
pub fn emit_plot_data(report: &Path, kind: PlotKind, out: &Path) -> Result<PathBuf> {
    let text = std::fs::read_to_string(report).map_err(|e| CliError::io(report, e))?;
    let source: PlotSource =
        serde_json::from_str(&text).map_err(|e| CliError::config("report", format!("{}: {e}", report.display())))?;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let path = out.join(format!("{}.csv", kind.name()));
    let missing = || CliError::MissingSeries(kind.name().to_string());
    match kind {
        PlotKind::PosteriorCurve => tables::write_rows(&path, source.series.posterior_curve.ok_or_else(missing)?)?,
        PlotKind::ModelPosterior => tables::write_rows(&path, source.series.model_posterior.ok_or_else(missing)?)?,
        PlotKind::ConcentrationTrend => {
            tables::write_rows(&path, source.series.concentration_trend.ok_or_else(missing)?)?
        }
    }
    Ok(path)
}

fn emit_plot(args: &PlotArgs) -> Result<Outcome> {
    let path = emit_plot_data(&args.report, args.kind, &args.out)?;
    Ok(Outcome { summary: format!("wrote {}\n", path.display()), files: vec![path], strict_failure: None })
}

fn resolve(config: &Path, path: &Path) -> PathBuf {
    match config.parent() {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}
