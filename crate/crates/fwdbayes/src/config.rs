//! TOML config schemas, one per command. Unknown keys are rejected; exact
//! quantities (credences, thresholds) are written as strings such as
//! `"1/2"`, `"0.9"` or `"1/2 - eps"`.

use std::path::{Path, PathBuf};

use fwdbayes_core::credence::{Geometric, HyperReal, Rational, RavenPrior, TailSequence};
use fwdbayes_core::modes::{BernoulliConfig, Theta};
use fwdbayes_core::regression::{DecayFamily, ModelPrior, RegressionConfig, StepCurve};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{in_field, CliError, Result};

/// Branch masses `p_k` of a raven prior.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BranchFamilyConfig {
    /// `p_k = scale * ratio^k` for `k >= start`, zero before.
    Geometric {
        scale: String,
        ratio: String,
        #[serde(default = "one")]
        start: u64,
    },
    /// Listed `p_1..p_m`, then a geometric tail.
    FiniteThenGeometric { head: Vec<String>, tail: GeometricConfig },
    /// Listed `p_1..p_m` and an upper bound on the remaining mass.
    Explicit { head: Vec<String>, tail_upper_bound: String },
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricConfig {
    pub scale: String,
    pub ratio: String,
    pub start: u64,
}

fn one() -> u64 {
    1
}

fn default_curve_max_n() -> u64 {
    20
}

/// Config for `raven-norms`, `raven-threshold` and `raven-curve`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RavenFile {
    pub p_star: String,
    pub branch_family: BranchFamilyConfig,
    /// Credence thresholds for `raven-threshold`.
    #[serde(default)]
    pub thresholds: Vec<String>,
    /// Last prefix length of the posterior curve.
    #[serde(default = "default_curve_max_n")]
    pub curve_max_n: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub depth: u32,
    pub values: Vec<f64>,
}

/// Prior over model depths.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DecayConfig {
    Flat,
    Geometric { ratio: f64 },
    Factorial,
    SuperExponential,
    AntiOckham { pivot: u32 },
    /// Weights for `M_0..=M_K`, summing to 1.
    Custom { weights: Vec<f64> },
}

fn default_max_depth() -> u32 {
    8
}

/// Config for `regress-run` and the regression problem of `modes-report`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionFile {
    pub fstar: CurveConfig,
    pub n: usize,
    pub tau: f64,
    #[serde(default = "default_max_depth")]
    pub max_depth: u32,
    pub decay: DecayConfig,
    pub eps: f64,
    pub delta: f64,
    pub samples: usize,
    pub replications: usize,
    pub master_seed: u64,
    /// Sample sizes for the concentration trend series.
    #[serde(default)]
    pub trend_sizes: Vec<usize>,
    /// CSV file (columns `x,y`) to fit in place of generated data for the
    /// model-posterior series. Relative paths resolve against the config file.
    #[serde(default)]
    pub dataset: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BernoulliFile {
    /// 0.4 or 0.6.
    pub theta_true: f64,
    /// Prior credence in `theta = 0.6`.
    pub prior_yes: String,
    pub trials: usize,
    pub delta: f64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Raven,
    Bernoulli,
    Regression,
}

/// Config for `modes-report`: a problem selector plus its sub-config.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModesFile {
    pub problem: ProblemKind,
    /// Sample sizes of the trend table (stochastic problems only).
    #[serde(default)]
    pub sizes: Vec<usize>,
    pub raven: Option<RavenFile>,
    pub bernoulli: Option<BernoulliFile>,
    pub regression: Option<RegressionFile>,
}

/// Reads and parses a TOML config.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text)
}

/// Parses TOML text, naming the offending key where the parser reports one.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e: toml::de::Error| {
        let message = e.message().to_string();
        let field = message.split('`').nth(1).map(str::to_string);
        CliError::Config { field, message }
    })
}

pub fn parse_hyper(field: &str, text: &str) -> Result<HyperReal> {
    text.parse::<HyperReal>().map_err(in_field(field))
}

pub fn parse_rational(field: &str, text: &str) -> Result<Rational> {
    let h = parse_hyper(field, text)?;
    if !h.is_real() {
        return Err(CliError::config(field, format!("`{text}` must be a real number")));
    }
    Ok(h.standard_part().clone())
}

impl GeometricConfig {
    fn build(&self, field: &str) -> Result<Geometric> {
        Geometric::new(
            parse_hyper(field, &self.scale)?,
            parse_rational(field, &self.ratio)?,
            self.start,
        )
        .map_err(in_field(field))
    }
}

impl BranchFamilyConfig {
    pub fn build(&self) -> Result<TailSequence> {
        const FIELD: &str = "branch_family";
        let head = |terms: &[String]| terms.iter().map(|t| parse_hyper(FIELD, t)).collect::<Result<Vec<_>>>();
        match self {
            BranchFamilyConfig::Geometric { scale, ratio, start } => {
                GeometricConfig { scale: scale.clone(), ratio: ratio.clone(), start: *start }
                    .build(FIELD)
                    .map(TailSequence::Geometric)
            }
            BranchFamilyConfig::FiniteThenGeometric { head: h, tail } => {
                TailSequence::finite_then_geometric(head(h)?, tail.build(FIELD)?).map_err(in_field(FIELD))
            }
            BranchFamilyConfig::Explicit { head: h, tail_upper_bound } => {
                TailSequence::explicit(head(h)?, parse_rational(FIELD, tail_upper_bound)?).map_err(in_field(FIELD))
            }
        }
    }
}

impl RavenFile {
    pub fn prior(&self) -> Result<RavenPrior> {
        let p_star = parse_hyper("p_star", &self.p_star)?;
        RavenPrior::new(p_star, self.branch_family.build()?).map_err(in_field("branch_family"))
    }

    pub fn threshold_values(&self) -> Result<Vec<Rational>> {
        self.thresholds.iter().map(|t| parse_rational("thresholds", t)).collect()
    }
}

impl DecayConfig {
    pub fn prior(&self, max_depth: u32) -> Result<ModelPrior> {
        let family = match self {
            DecayConfig::Flat => DecayFamily::Flat,
            DecayConfig::Geometric { ratio } => DecayFamily::Geometric { ratio: *ratio },
            DecayConfig::Factorial => DecayFamily::Factorial,
            DecayConfig::SuperExponential => DecayFamily::SuperExponential,
            DecayConfig::AntiOckham { pivot } => DecayFamily::AntiOckham { pivot: *pivot },
            DecayConfig::Custom { weights } => {
                if weights.len() != max_depth as usize + 1 {
                    return Err(CliError::config(
                        "decay",
                        format!("custom prior needs {} weights for M_0..=M_{max_depth}, got {}", max_depth + 1, weights.len()),
                    ));
                }
                return ModelPrior::from_weights(weights).map_err(in_field("decay"));
            }
        };
        ModelPrior::from_family(family, max_depth).map_err(in_field("decay"))
    }
}

impl RegressionFile {
    /// Validated core config; `seed` overrides `master_seed`.
    pub fn build(&self, seed: Option<u64>) -> Result<RegressionConfig> {
        let fstar = StepCurve::new(self.fstar.depth, self.fstar.values.clone()).map_err(in_field("fstar"))?;
        if fstar.depth() > self.max_depth {
            return Err(CliError::config(
                "fstar",
                format!("depth {} exceeds max_depth {}", fstar.depth(), self.max_depth),
            ));
        }
        let cfg = RegressionConfig {
            fstar,
            n: self.n,
            tau: self.tau,
            prior: self.decay.prior(self.max_depth)?,
            eps: self.eps,
            delta: self.delta,
            samples: self.samples,
            replications: self.replications,
            master_seed: seed.unwrap_or(self.master_seed),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl BernoulliFile {
    pub fn build(&self, seed: Option<u64>) -> Result<BernoulliConfig> {
        let cfg = BernoulliConfig {
            theta_true: Theta::from_f64(self.theta_true)?,
            prior_yes: parse_rational("prior_yes", &self.prior_yes)?,
            n: 0,
            trials: self.trials,
            delta: self.delta,
            seed: seed.unwrap_or(self.master_seed),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ModesFile {
    pub fn sizes(&self) -> Result<&[usize]> {
        if self.sizes.is_empty() {
            return Err(CliError::config("sizes", "at least one sample size is required"));
        }
        Ok(&self.sizes)
    }

    pub fn raven(&self) -> Result<&RavenFile> {
        self.raven.as_ref().ok_or_else(|| CliError::config("raven", "missing [raven] table for problem = \"raven\""))
    }

    pub fn bernoulli(&self) -> Result<&BernoulliFile> {
        self.bernoulli
            .as_ref()
            .ok_or_else(|| CliError::config("bernoulli", "missing [bernoulli] table for problem = \"bernoulli\""))
    }

    pub fn regression(&self) -> Result<&RegressionFile> {
        self.regression
            .as_ref()
            .ok_or_else(|| CliError::config("regression", "missing [regression] table for problem = \"regression\""))
    }
}
