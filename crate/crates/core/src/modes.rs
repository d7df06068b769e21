//! The three-level hierarchy of convergence to the truth and verdicts for
//! each problem: analytic on the raven tree, Monte Carlo trends elsewhere.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{FromPrimitive, One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::credence::{rat, ExactOrBounds, HyperReal, Rational, RavenPrior};
use crate::credence::hyperreal::rat_pow;
use crate::error::{config_err, Result};
use crate::norms::{check_simple_convergence, Status};

/// Modes of convergence, ordered from weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConvergenceMode {
    /// High chance of high credence near the truth.
    StochasticApproximation,
    /// High chance of high credence in exactly the truth.
    StochasticIdentification,
    /// Credence in the truth tends to 1 in every world.
    Identification,
}

impl ConvergenceMode {
    /// Strongest first.
    pub const HIERARCHY: [ConvergenceMode; 3] = [
        ConvergenceMode::Identification,
        ConvergenceMode::StochasticIdentification,
        ConvergenceMode::StochasticApproximation,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeStatus {
    /// Holds, established from a closed-form limit.
    CertifiedAnalytic,
    /// Monte Carlo estimates trend upward to a high chance; no limit asserted.
    EmpiricalTrend,
    Fails,
    Undetermined,
}

impl ModeStatus {
    pub fn is_positive(self) -> bool {
        matches!(self, ModeStatus::CertifiedAnalytic | ModeStatus::EmpiricalTrend)
    }
}

/// One row of a trend table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendRow {
    pub n: usize,
    pub estimate: f64,
    pub stderr: f64,
    /// Exact chance, where a closed form exists.
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeVerdict {
    pub mode: ConvergenceMode,
    pub status: ModeStatus,
    pub limit: Option<ExactOrBounds<HyperReal>>,
    pub diagnostics: Vec<TrendRow>,
    pub note: Option<String>,
}

impl ModeVerdict {
    fn new(mode: ConvergenceMode, status: ModeStatus) -> Self {
        ModeVerdict { mode, status, limit: None, diagnostics: Vec::new(), note: None }
    }

    fn note(mut self, s: &str) -> Self {
        self.note = Some(s.into());
        self
    }
}

/// Identification on the raven tree coincides with Simple Convergence.
pub fn raven_mode_verdict(p: &RavenPrior) -> ModeVerdict {
    let sc = check_simple_convergence(p);
    let status = match sc.status {
        Status::Holds => ModeStatus::CertifiedAnalytic,
        Status::Fails => ModeStatus::Fails,
        Status::Undetermined => ModeStatus::Undetermined,
    };
    let mut v = ModeVerdict::new(ConvergenceMode::Identification, status);
    v.limit = sc.value;
    v.note = sc.trace.last().cloned();
    v
}

/// The true bias in the two-hypothesis coin problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theta {
    /// 0.4
    Low,
    /// 0.6
    High,
}

impl Theta {
    pub fn value(self) -> f64 {
        match self {
            Theta::Low => 0.4,
            Theta::High => 0.6,
        }
    }

    pub fn from_f64(theta: f64) -> Result<Self> {
        if theta == 0.4 {
            Ok(Theta::Low)
        } else if theta == 0.6 {
            Ok(Theta::High)
        } else {
            Err(config_err("theta_true", format!("must be 0.4 or 0.6, got {theta}")))
        }
    }
}

/// Coin tossing with hypotheses `θ = 0.6` ("Yes") and `θ = 0.4` ("No").
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliConfig {
    pub theta_true: Theta,
    /// Prior credence in `θ = 0.6`.
    pub prior_yes: Rational,
    pub n: usize,
    pub trials: usize,
    /// Credence threshold is `1 - delta`.
    pub delta: f64,
    pub seed: u64,
}

impl BernoulliConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.prior_yes.is_positive() && self.prior_yes < Rational::one()) {
            return Err(config_err("prior_yes", "must lie strictly between 0 and 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(config_err("delta", format!("must lie in (0, 1), got {}", self.delta)));
        }
        if self.trials == 0 {
            return Err(config_err("trials", "at least one trial is required"));
        }
        Ok(())
    }

    fn delta_exact(&self) -> Rational {
        Rational::from_f64(self.delta).expect("validated finite")
    }
}

/// Exact posterior credence in the true hypothesis after `heads` heads in `n` tosses.
pub fn bernoulli_posterior_true(prior_yes: &Rational, theta_true: Theta, heads: usize, n: usize) -> Rational {
    // odds for θ = 0.6 are prior odds times (3/2)^(2h - n)
    let exponent = 2 * heads as i64 - n as i64;
    let lr = if exponent >= 0 {
        rat_pow(&rat(3, 2), exponent as u64)
    } else {
        rat_pow(&rat(2, 3), exponent.unsigned_abs())
    };
    let yes = prior_yes * &lr;
    let no = Rational::one() - prior_yes;
    let post_yes = &yes / (&yes + &no);
    match theta_true {
        Theta::High => post_yes,
        Theta::Low => Rational::one() - post_yes,
    }
}

/// Posterior credence in the truth after a given toss sequence (`true` = heads).
pub fn bernoulli_posterior_of_sequence(prior_yes: &Rational, theta_true: Theta, tosses: &[bool]) -> Rational {
    let heads = tosses.iter().filter(|t| **t).count();
    bernoulli_posterior_true(prior_yes, theta_true, heads, tosses.len())
}

/// For each head count, whether the posterior in the truth exceeds `1 - delta`.
fn success_table(cfg: &BernoulliConfig) -> Vec<bool> {
    let bar = Rational::one() - cfg.delta_exact();
    (0..=cfg.n)
        .map(|h| bernoulli_posterior_true(&cfg.prior_yes, cfg.theta_true, h, cfg.n) > bar)
        .collect()
}

/// Exact chance that the posterior in the truth exceeds `1 - delta`,
/// summing binomial probabilities over qualifying head counts.
pub fn bernoulli_exact_chance(cfg: &BernoulliConfig) -> Result<f64> {
    cfg.validate()?;
    let theta = cfg.theta_true.value();
    let n = cfg.n as f64;
    let log_pmf = |h: usize| {
        let h = h as f64;
        libm::lgamma(n + 1.0) - libm::lgamma(h + 1.0) - libm::lgamma(n - h + 1.0)
            + h * libm::log(theta)
            + (n - h) * libm::log(1.0 - theta)
    };
    Ok(success_table(cfg)
        .iter()
        .enumerate()
        .filter(|(_, ok)| **ok)
        .map(|(h, _)| libm::exp(log_pmf(h)))
        .sum::<f64>()
        .min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliEstimate {
    pub estimate: f64,
    /// `sqrt(p̂(1 - p̂)/R)`, never above `1/(2√R)`.
    pub stderr: f64,
    pub exact: f64,
}

/// Monte Carlo estimate of the chance of a posterior above `1 - delta` in
/// the true hypothesis.
pub fn bernoulli_stochastic_identification(cfg: &BernoulliConfig) -> Result<BernoulliEstimate> {
    cfg.validate()?;
    let table = success_table(cfg);
    let theta = cfg.theta_true.value();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let hits = (0..cfg.trials)
        .filter(|_| {
            let heads = (0..cfg.n).filter(|_| rng.random::<f64>() < theta).count();
            table[heads]
        })
        .count();
    let r = cfg.trials as f64;
    let estimate = hits as f64 / r;
    Ok(BernoulliEstimate {
        estimate,
        stderr: libm::sqrt(estimate * (1.0 - estimate) / r),
        exact: bernoulli_exact_chance(cfg)?,
    })
}

/// Estimates at several sample sizes, each with its own derived seed.
pub fn bernoulli_trend(cfg: &BernoulliConfig, sizes: &[usize]) -> Result<Vec<TrendRow>> {
    sizes
        .iter()
        .map(|&n| {
            let sub = BernoulliConfig {
                n,
                seed: crate::regression::replication_seed(cfg.seed, n),
                ..cfg.clone()
            };
            let e = bernoulli_stochastic_identification(&sub)?;
            Ok(TrendRow { n, estimate: e.estimate, stderr: e.stderr, exact: Some(e.exact) })
        })
        .collect()
}

/// Final chance estimate a trend must reach to count as positive.
pub const TREND_TARGET: f64 = 0.8;

/// Nondecreasing up to two standard errors, ending at or above [`TREND_TARGET`].
pub fn trend_is_positive(rows: &[TrendRow]) -> bool {
    let monotone = rows.windows(2).all(|w| {
        let slack = 2.0 * w[0].stderr.max(w[1].stderr);
        w[1].estimate >= w[0].estimate - slack
    });
    monotone && rows.last().is_some_and(|r| r.estimate >= TREND_TARGET)
}

fn trend_verdict(mode: ConvergenceMode, rows: Vec<TrendRow>) -> ModeVerdict {
    let status = if trend_is_positive(&rows) { ModeStatus::EmpiricalTrend } else { ModeStatus::Undetermined };
    let mut v = ModeVerdict::new(mode, status);
    v.diagnostics = rows;
    v
}

/// All three modes, strongest first, and the strongest one achieved.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyReport {
    pub problem: &'static str,
    pub verdicts: Vec<ModeVerdict>,
    pub highest: Option<ConvergenceMode>,
}

impl HierarchyReport {
    fn new(problem: &'static str, verdicts: Vec<ModeVerdict>) -> Self {
        let highest = verdicts.iter().find(|v| v.status.is_positive()).map(|v| v.mode);
        HierarchyReport { problem, verdicts, highest }
    }

    pub fn verdict(&self, mode: ConvergenceMode) -> &ModeVerdict {
        self.verdicts.iter().find(|v| v.mode == mode).expect("all modes present")
    }
}

pub fn raven_hierarchy(p: &RavenPrior) -> HierarchyReport {
    let top = raven_mode_verdict(p);
    let lower = |mode| {
        let mut v = ModeVerdict::new(mode, top.status);
        v.limit = top.limit.clone();
        v.note("evidence is deterministic within each world, so chances are 0 or 1 and this mode coincides with identification")
    };
    HierarchyReport::new(
        "raven",
        vec![
            top.clone(),
            lower(ConvergenceMode::StochasticIdentification),
            lower(ConvergenceMode::StochasticApproximation),
        ],
    )
}

pub fn bernoulli_hierarchy(cfg: &BernoulliConfig, sizes: &[usize]) -> Result<HierarchyReport> {
    let rows = bernoulli_trend(cfg, sizes)?;
    let ident = ModeVerdict::new(ConvergenceMode::Identification, ModeStatus::Fails).note(
        "toss sequences such as all tails under theta = 0.6 keep the posterior in the truth low; only their chance vanishes",
    );
    let stoch = trend_verdict(ConvergenceMode::StochasticIdentification, rows.clone());
    let approx = trend_verdict(ConvergenceMode::StochasticApproximation, rows)
        .note("the hypothesis space is discrete, so small neighborhoods of the truth contain only the truth");
    Ok(HierarchyReport::new("bernoulli", vec![ident, stoch, approx]))
}

/// Hierarchy for the regression problem from a concentration trend table.
pub fn regression_hierarchy(rows: Vec<TrendRow>) -> HierarchyReport {
    let ident = ModeVerdict::new(ConvergenceMode::Identification, ModeStatus::Fails)
        .note("not achievable in nonparametric regression (documented, not re-proved)");
    let stoch = ModeVerdict::new(ConvergenceMode::StochasticIdentification, ModeStatus::Fails).note(
        "within-model priors are continuous, so the exact true curve always has posterior probability 0",
    );
    let approx = trend_verdict(ConvergenceMode::StochasticApproximation, rows)
        .note("estimate = fraction of replications whose posterior concentration exceeds 1 - delta");
    HierarchyReport::new("regression", vec![ident, stoch, approx])
}

/// Concentration trend computed sequentially over sample sizes.
pub fn regression_trend(
    cfg: &crate::regression::RegressionConfig,
    sizes: &[usize],
) -> Result<Vec<TrendRow>> {
    sizes
        .iter()
        .map(|&n| {
            let sub = crate::regression::RegressionConfig { n, ..cfg.clone() };
            let report = crate::regression::replicate_experiment(&sub)?;
            Ok(trend_row(n, report.success_fraction, report.replications.len()))
        })
        .collect()
}

pub fn trend_row(n: usize, estimate: f64, trials: usize) -> TrendRow {
    TrendRow { n, estimate, stderr: libm::sqrt(estimate * (1.0 - estimate) / trials as f64), exact: None }
}

/// Which problem a hierarchy report is requested for.
#[derive(Debug, Clone)]
pub enum Problem {
    Raven(RavenPrior),
    Bernoulli { cfg: BernoulliConfig, sizes: Vec<usize> },
    Regression { cfg: crate::regression::RegressionConfig, sizes: Vec<usize> },
}

pub fn hierarchy_report(problem: &Problem) -> Result<HierarchyReport> {
    match problem {
        Problem::Raven(p) => Ok(raven_hierarchy(p)),
        Problem::Bernoulli { cfg, sizes } => bernoulli_hierarchy(cfg, sizes),
        Problem::Regression { cfg, sizes } => {
            cfg.validate()?;
            Ok(regression_hierarchy(regression_trend(cfg, sizes)?))
        }
    }
}

impl fmt::Display for ConvergenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConvergenceMode::Identification => "Identification",
            ConvergenceMode::StochasticIdentification => "StochasticIdentification",
            ConvergenceMode::StochasticApproximation => "StochasticApproximation",
        })
    }
}

impl fmt::Display for ModeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeStatus::CertifiedAnalytic => "CertifiedAnalytic",
            ModeStatus::EmpiricalTrend => "EmpiricalTrend",
            ModeStatus::Fails => "Fails",
            ModeStatus::Undetermined => "Undetermined",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credence::presets;
    use proptest::prelude::*;

    fn coin(theta: Theta, n: usize, trials: usize, delta: f64) -> BernoulliConfig {
        BernoulliConfig { theta_true: theta, prior_yes: rat(1, 2), n, trials, delta, seed: 17 }
    }

    #[test]
    fn ordering() {
        assert!(ConvergenceMode::Identification > ConvergenceMode::StochasticIdentification);
        assert!(ConvergenceMode::StochasticIdentification > ConvergenceMode::StochasticApproximation);
    }

    #[test]
    fn raven_verdicts() {
        let v = raven_mode_verdict(&presets::countably_additive());
        assert_eq!(v.status, ModeStatus::CertifiedAnalytic);
        let v = raven_mode_verdict(&presets::leaky());
        assert_eq!(v.status, ModeStatus::Fails);
        assert_eq!(v.limit, Some(ExactOrBounds::Exact(HyperReal::from_ratio(1, 3))));
        assert_eq!(raven_mode_verdict(&presets::dogmatic_no()).status, ModeStatus::Fails);
    }

    #[test]
    fn raven_hierarchy_monotone() {
        for p in [presets::countably_additive(), presets::leaky(), presets::dogmatic_no(), presets::infinitesimal_yes()] {
            let h = raven_hierarchy(&p);
            if h.verdict(ConvergenceMode::Identification).status == ModeStatus::CertifiedAnalytic {
                assert!(h.verdicts.iter().all(|v| v.status.is_positive()));
            }
        }
        assert_eq!(raven_hierarchy(&presets::countably_additive()).highest, Some(ConvergenceMode::Identification));
        assert_eq!(raven_hierarchy(&presets::leaky()).highest, None);
    }

    #[test]
    fn no_data_no_chance() {
        let e = bernoulli_stochastic_identification(&coin(Theta::High, 0, 100, 0.5)).unwrap();
        assert_eq!(e.estimate, 0.0);
        assert_eq!(e.exact, 0.0);
    }

    #[test]
    fn high_chance_at_thousand() {
        let e = bernoulli_stochastic_identification(&coin(Theta::High, 1000, 400, 0.05)).unwrap();
        assert!(e.estimate >= 0.95);
        assert!(e.exact >= 0.95);
        let sd = (e.exact * (1.0 - e.exact) / 400.0).sqrt();
        assert!((e.estimate - e.exact).abs() <= 2.0 * sd.max(1e-12) + 1e-12);
    }

    #[test]
    fn exact_chance_against_direct_binomial_sum() {
        // independent oracle: direct products, small n
        let cfg = coin(Theta::Low, 30, 1, 0.1);
        let mut direct = 0.0;
        for h in 0..=30usize {
            let log_odds = (2.0 * h as f64 - 30.0) * 1.5f64.ln();
            let post_low = 1.0 / (1.0 + log_odds.exp());
            if post_low > 0.9 {
                let mut c = 1.0;
                for i in 0..h {
                    c *= (30 - i) as f64 / (i + 1) as f64;
                }
                direct += c * 0.4f64.powi(h as i32) * 0.6f64.powi(30 - h as i32);
            }
        }
        assert!((bernoulli_exact_chance(&cfg).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn trend_nondecreasing() {
        let rows = bernoulli_trend(&coin(Theta::High, 0, 400, 0.05), &[10, 100, 1000]).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].estimate >= w[0].estimate - 2.0 * w[0].stderr.max(w[1].stderr));
            assert!(w[1].exact.unwrap() >= w[0].exact.unwrap());
        }
        assert!(trend_is_positive(&rows));
    }

    #[test]
    fn bernoulli_report() {
        let h = bernoulli_hierarchy(&coin(Theta::Low, 0, 400, 0.05), &[10, 100, 1000]).unwrap();
        assert_eq!(h.verdict(ConvergenceMode::Identification).status, ModeStatus::Fails);
        assert_eq!(h.verdict(ConvergenceMode::StochasticIdentification).status, ModeStatus::EmpiricalTrend);
        assert_eq!(h.highest, Some(ConvergenceMode::StochasticIdentification));
        assert!(h.verdicts.iter().all(|v| v.status != ModeStatus::CertifiedAnalytic));
    }

    #[test]
    fn invalid_coin_config() {
        let mut c = coin(Theta::High, 10, 10, 0.05);
        c.prior_yes = rat(1, 1);
        assert!(bernoulli_stochastic_identification(&c).is_err());
        assert!(Theta::from_f64(0.5).is_err());
        let c = coin(Theta::High, 10, 0, 0.05);
        assert!(c.validate().is_err());
    }

    proptest! {
        #[test]
        fn exchangeable(tosses in proptest::collection::vec(any::<bool>(), 0..60), rot in 0usize..60) {
            let prior = rat(1, 3);
            let a = bernoulli_posterior_of_sequence(&prior, Theta::High, &tosses);
            let mut permuted = tosses.clone();
            if !permuted.is_empty() {
                let k = rot % permuted.len();
                permuted.rotate_left(k);
                permuted.reverse();
            }
            prop_assert_eq!(a, bernoulli_posterior_of_sequence(&prior, Theta::High, &permuted));
        }
    }
}
