//! JSON report records. Field order is declaration order, so serialized
//! reports are stable; exact values appear in their text form.

use fwdbayes_core::credence::{fmt_rational, ExactOrBounds, HyperReal, Rational, RavenPrior};
use fwdbayes_core::modes::{HierarchyReport, ModeVerdict};
use fwdbayes_core::norms::{NormReport, NormVerdict, Witness};
use fwdbayes_core::regression::{ReplicationSummary, RunReport};
use fwdbayes_core::update::{least_threshold_n, posterior_limit, posterior_yes, Threshold};
use serde::{Deserialize, Serialize};

use crate::config::{BranchFamilyConfig, DecayConfig, RavenFile};
use crate::error::Result;
use crate::tables::TrendRecord;

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ValueRecord {
    Exact { value: String, approx: f64 },
    Bounds { lower: String, upper: String },
}

impl From<&ExactOrBounds<HyperReal>> for ValueRecord {
    fn from(v: &ExactOrBounds<HyperReal>) -> Self {
        match v {
            ExactOrBounds::Exact(x) => ValueRecord::Exact { value: x.to_text(), approx: x.standard_f64() },
            ExactOrBounds::Bounds { lower, upper } => {
                ValueRecord::Bounds { lower: lower.to_text(), upper: upper.to_text() }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictRecord {
    pub norm: String,
    pub status: String,
    pub witness: Option<String>,
    pub constraint: Option<String>,
    pub value: Option<ValueRecord>,
    pub trace: Vec<String>,
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Evidence(e) => format!("evidence {e}"),
        Witness::World(w) => format!("world {w}"),
        Witness::UndefinedConditioning(w) => format!("undefined conditioning in world {w}"),
    }
}

impl From<&NormVerdict> for VerdictRecord {
    fn from(v: &NormVerdict) -> Self {
        VerdictRecord {
            norm: v.norm.to_string(),
            status: v.status.to_string(),
            witness: v.witness.as_ref().map(witness_text),
            constraint: v.constraint.clone(),
            value: v.value.as_ref().map(ValueRecord::from),
            trace: v.trace.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorRecord {
    pub p_star: String,
    pub branch_family: BranchFamilyConfig,
    pub real_valued: bool,
    pub total_mass: ValueRecord,
    pub deficit: ValueRecord,
}

impl PriorRecord {
    pub fn new(file: &RavenFile, p: &RavenPrior) -> Self {
        PriorRecord {
            p_star: p.p_star().to_text(),
            branch_family: file.branch_family.clone(),
            real_valued: p.is_real_valued(),
            total_mass: (&p.total_mass()).into(),
            deficit: (&p.deficit()).into(),
        }
    }
}

/// Plot-ready series; each is present only in reports that produce it.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
pub struct Series {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posterior_curve: Option<Vec<CurvePoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_posterior: Option<Vec<ModelPoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concentration_trend: Option<Vec<TrendRecord>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct CurvePoint {
    pub n: u64,
    /// Standard part of the posterior.
    pub posterior: f64,
    pub posterior_exact: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct ModelPoint {
    pub depth: u32,
    pub prior: f64,
    pub posterior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormsReport {
    pub command: &'static str,
    pub prior: PriorRecord,
    pub verdicts: Vec<VerdictRecord>,
    pub implication_holds: bool,
    pub any_fails: bool,
}

impl NormsReport {
    pub fn new(file: &RavenFile, p: &RavenPrior, norms: &NormReport) -> Self {
        NormsReport {
            command: "raven-norms",
            prior: PriorRecord::new(file, p),
            verdicts: norms.verdicts().into_iter().map(VerdictRecord::from).collect(),
            implication_holds: norms.implication_holds,
            any_fails: norms.any_fails(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRecord {
    pub threshold: String,
    /// Least `n` with posterior above the threshold; `null` if none exists.
    pub n: Option<u64>,
    pub posterior_at_n: Option<String>,
    pub posterior_before_n: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub command: &'static str,
    pub prior: PriorRecord,
    pub limit: ValueRecord,
    pub thresholds: Vec<ThresholdRecord>,
}

impl ThresholdReport {
    pub fn new(file: &RavenFile, p: &RavenPrior, thresholds: &[Rational]) -> Result<Self> {
        let limit = ValueRecord::from(&posterior_limit(p)?);
        let thresholds = thresholds
            .iter()
            .map(|t| {
                let rec = match least_threshold_n(p, t)? {
                    Threshold::At(n) => ThresholdRecord {
                        threshold: fmt_rational(t),
                        n: Some(n),
                        posterior_at_n: Some(posterior_yes(p, n)?.to_text()),
                        posterior_before_n: match n {
                            0 => None,
                            _ => Some(posterior_yes(p, n - 1)?.to_text()),
                        },
                    },
                    Threshold::NoSuchN => ThresholdRecord {
                        threshold: fmt_rational(t),
                        n: None,
                        posterior_at_n: None,
                        posterior_before_n: None,
                    },
                };
                Ok(rec)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ThresholdReport { command: "raven-threshold", prior: PriorRecord::new(file, p), limit, thresholds })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveReport {
    pub command: &'static str,
    pub prior: PriorRecord,
    pub limit: ValueRecord,
    pub series: Series,
}

pub fn posterior_curve(p: &RavenPrior, max_n: u64) -> Result<Vec<CurvePoint>> {
    (0..=max_n)
        .map(|n| {
            let post = posterior_yes(p, n)?;
            Ok(CurvePoint { n, posterior: post.standard_f64(), posterior_exact: post.to_text() })
        })
        .collect()
}

impl CurveReport {
    pub fn new(file: &RavenFile, p: &RavenPrior) -> Result<Self> {
        Ok(CurveReport {
            command: "raven-curve",
            prior: PriorRecord::new(file, p),
            limit: (&posterior_limit(p)?).into(),
            series: Series { posterior_curve: Some(posterior_curve(p, file.curve_max_n)?), ..Series::default() },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationRecord {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub argmax_model: u32,
    pub argmax_posterior: f64,
    pub concentration: f64,
    pub mean_l2_error: f64,
    pub model_posterior: Vec<f64>,
}

impl From<&ReplicationSummary> for ReplicationRecord {
    fn from(r: &ReplicationSummary) -> Self {
        ReplicationRecord {
            index: r.index,
            seed: r.seed,
            n: r.n,
            argmax_model: r.argmax_model,
            argmax_posterior: r.argmax_posterior,
            concentration: r.concentration,
            mean_l2_error: r.mean_l2_error,
            model_posterior: r.model_posterior.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionReport {
    pub command: &'static str,
    /// Depth `K` of the largest model; the model space is truncated there.
    pub max_depth: u32,
    pub fstar_depth: u32,
    pub fstar_values: Vec<f64>,
    pub decay: DecayConfig,
    pub n: usize,
    pub tau: f64,
    pub eps: f64,
    pub delta: f64,
    pub samples: usize,
    pub master_seed: u64,
    pub prior_weights: Vec<f64>,
    pub success_fraction: f64,
    pub identified_fraction: f64,
    /// Replications with concentration above `1 - delta` and the true depth most probable.
    pub concentrated_on_truth: usize,
    pub mean_concentration: f64,
    pub mean_l2_error: f64,
    /// Source of the data behind `series.model_posterior`.
    pub fitted_dataset: String,
    pub replications: Vec<ReplicationRecord>,
    pub series: Series,
}

impl RegressionReport {
    pub fn new(
        run: &RunReport,
        fstar: &fwdbayes_core::regression::StepCurve,
        decay: &DecayConfig,
        fitted_dataset: String,
        series: Series,
    ) -> Self {
        RegressionReport {
            command: "regress-run",
            max_depth: run.max_depth,
            fstar_depth: fstar.depth(),
            fstar_values: fstar.values().to_vec(),
            decay: decay.clone(),
            n: run.n,
            tau: run.tau,
            eps: run.eps,
            delta: run.delta,
            samples: run.samples,
            master_seed: run.master_seed,
            prior_weights: run.prior_weights.clone(),
            success_fraction: run.success_fraction,
            identified_fraction: run.identified_fraction,
            concentrated_on_truth: run.concentrated_on(fstar.depth()),
            mean_concentration: run.mean_concentration,
            mean_l2_error: run.mean_l2_error,
            fitted_dataset,
            replications: run.replications.iter().map(ReplicationRecord::from).collect(),
            series,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendDiagnostic {
    pub n: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRecord {
    pub mode: String,
    pub status: String,
    pub limit: Option<ValueRecord>,
    pub note: Option<String>,
    pub diagnostics: Vec<TrendDiagnostic>,
}

impl From<&ModeVerdict> for ModeRecord {
    fn from(v: &ModeVerdict) -> Self {
        ModeRecord {
            mode: v.mode.to_string(),
            status: v.status.to_string(),
            limit: v.limit.as_ref().map(ValueRecord::from),
            note: v.note.clone(),
            diagnostics: v
                .diagnostics
                .iter()
                .map(|r| TrendDiagnostic { n: r.n, estimate: r.estimate, stderr: r.stderr, exact: r.exact })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModesReport {
    pub command: &'static str,
    pub problem: &'static str,
    /// Strongest mode with status CertifiedAnalytic or EmpiricalTrend.
    pub highest: Option<String>,
    pub verdicts: Vec<ModeRecord>,
    pub series: Series,
}

impl ModesReport {
    pub fn new(h: &HierarchyReport) -> Self {
        let trend: Vec<TrendRecord> = h
            .verdicts
            .iter()
            .find(|v| !v.diagnostics.is_empty())
            .map(|v| v.diagnostics.iter().map(TrendRecord::from).collect())
            .unwrap_or_default();
        ModesReport {
            command: "modes-report",
            problem: h.problem,
            highest: h.highest.map(|m| m.to_string()),
            verdicts: h.verdicts.iter().map(ModeRecord::from).collect(),
            series: Series {
                concentration_trend: (!trend.is_empty()).then_some(trend),
                ..Series::default()
            },
        }
    }
}

/// Serializes a report as pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report records always serialize");
    s.push('\n');
    s
}
