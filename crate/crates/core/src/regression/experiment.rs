//! Replicated concentration experiments. Every replication is a pure
//! function of the config and its index, so replications may run in any
//! order or in parallel.

use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::curve::{l2_distance_sq, StepCurve};
use super::data::gen_dataset;
use super::inference::RegressionPosterior;
use super::prior::ModelPrior;
use crate::error::{config_err, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionConfig {
    pub fstar: StepCurve,
    pub n: usize,
    pub tau: f64,
    pub prior: ModelPrior,
    pub eps: f64,
    pub delta: f64,
    pub samples: usize,
    pub replications: usize,
    pub master_seed: u64,
}

impl RegressionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(config_err("tau", format!("must be positive and finite, got {}", self.tau)));
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(config_err("eps", format!("must be positive, got {}", self.eps)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(config_err("delta", format!("must lie in (0, 1), got {}", self.delta)));
        }
        if self.samples == 0 {
            return Err(config_err("samples", "at least one posterior sample is required"));
        }
        if self.replications == 0 {
            return Err(config_err("replications", "at least one replication is required"));
        }
        let total: f64 = self.prior.weights().iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(config_err("prior", format!("model weights sum to {total}")));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer, used to spread replication indices over seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `index` under `master_seed`.
pub fn replication_seed(master_seed: u64, index: usize) -> u64 {
    mix(master_seed ^ mix(index as u64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationSummary {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub argmax_model: u32,
    pub argmax_posterior: f64,
    pub model_posterior: Vec<f64>,
    pub concentration: f64,
    /// `∫ |E[g | data] - fstar|²`.
    pub mean_l2_error: f64,
}

pub fn run_replication(cfg: &RegressionConfig, index: usize) -> Result<ReplicationSummary> {
    let seed = replication_seed(cfg.master_seed, index);
    let data = gen_dataset(&cfg.fstar, cfg.n, seed);
    let posterior = RegressionPosterior::fit(&data, &cfg.prior, cfg.tau)?;
    // posterior draws use their own ChaCha stream of the same seed
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let concentration = posterior.concentration(&cfg.fstar, cfg.eps, cfg.samples, &mut rng);
    let argmax_model = posterior.map_model();
    Ok(ReplicationSummary {
        index,
        seed,
        n: cfg.n,
        argmax_model,
        argmax_posterior: posterior.model_weights()[argmax_model as usize],
        model_posterior: posterior.model_weights().to_vec(),
        concentration,
        mean_l2_error: l2_distance_sq(&posterior.mean_curve(), &cfg.fstar),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub max_depth: u32,
    pub n: usize,
    pub tau: f64,
    pub eps: f64,
    pub delta: f64,
    pub samples: usize,
    pub master_seed: u64,
    pub prior_weights: Vec<f64>,
    pub replications: Vec<ReplicationSummary>,
    /// Fraction of replications with concentration above `1 - delta`.
    pub success_fraction: f64,
    /// Fraction whose most probable model is the depth of `fstar`.
    pub identified_fraction: f64,
    pub mean_concentration: f64,
    pub mean_l2_error: f64,
}

impl RunReport {
    pub fn from_replications(cfg: &RegressionConfig, replications: Vec<ReplicationSummary>) -> Self {
        let r = replications.len().max(1) as f64;
        let frac = |pred: &dyn Fn(&ReplicationSummary) -> bool| {
            replications.iter().filter(|s| pred(s)).count() as f64 / r
        };
        let success_fraction = frac(&|s| s.concentration > 1.0 - cfg.delta);
        let identified_fraction = frac(&|s| s.argmax_model == cfg.fstar.depth());
        let mean_concentration = replications.iter().map(|s| s.concentration).sum::<f64>() / r;
        let mean_l2_error = replications.iter().map(|s| s.mean_l2_error).sum::<f64>() / r;
        RunReport {
            max_depth: cfg.prior.max_depth(),
            n: cfg.n,
            tau: cfg.tau,
            eps: cfg.eps,
            delta: cfg.delta,
            samples: cfg.samples,
            master_seed: cfg.master_seed,
            prior_weights: cfg.prior.weights(),
            replications,
            success_fraction,
            identified_fraction,
            mean_concentration,
            mean_l2_error,
        }
    }

    /// Replications that concentrate above `1 - delta` on the true model.
    pub fn concentrated_on(&self, depth: u32) -> usize {
        self.replications
            .iter()
            .filter(|s| s.concentration > 1.0 - self.delta && s.argmax_model == depth)
            .count()
    }
}

/// Sequential driver; parallel drivers must produce the same report.
pub fn replicate_experiment(cfg: &RegressionConfig) -> Result<RunReport> {
    cfg.validate()?;
    let reps = (0..cfg.replications)
        .map(|i| run_replication(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunReport::from_replications(cfg, reps))
}
