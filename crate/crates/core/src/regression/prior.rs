use alloc::format;
use alloc::vec::Vec;

use crate::error::{config_err, Result};

/// Relative weight of each model below the pivot in an anti-Ockham prior:
/// low credence spread over as many as 10^100 simple models.
pub const ANTI_OCKHAM_LOW_WEIGHT: f64 = 1e-100;

/// How prior credence in `M_k` decays with `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayFamily {
    Flat,
    /// `w_k ∝ ratio^k`.
    Geometric { ratio: f64 },
    /// `w_k ∝ 1/k!`.
    Factorial,
    /// `w_k ∝ 2^(-2^k)`.
    SuperExponential,
    /// Small equal weights below `pivot`, large equal weights from `pivot` on.
    AntiOckham { pivot: u32 },
    /// User-supplied weights.
    Custom,
}

/// Prior over the models `M_0..=M_K`, stored as normalized log weights so
/// that fast-decaying families do not underflow.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPrior {
    family: DecayFamily,
    log_weights: Vec<f64>,
}

impl ModelPrior {
    pub fn from_family(family: DecayFamily, max_depth: u32) -> Result<Self> {
        let ks = 0..=max_depth;
        let raw: Vec<f64> = match family {
            DecayFamily::Flat => ks.map(|_| 0.0).collect(),
            DecayFamily::Geometric { ratio } => {
                if !(ratio > 0.0 && ratio.is_finite()) {
                    return Err(config_err("ratio", format!("geometric decay ratio must be positive, got {ratio}")));
                }
                ks.map(|k| k as f64 * libm::log(ratio)).collect()
            }
            DecayFamily::Factorial => ks.map(|k| -libm::lgamma(k as f64 + 1.0)).collect(),
            DecayFamily::SuperExponential => {
                ks.map(|k| -libm::pow(2.0, k as f64) * core::f64::consts::LN_2).collect()
            }
            DecayFamily::AntiOckham { pivot } => {
                if pivot > max_depth {
                    return Err(config_err("pivot", format!("pivot {pivot} exceeds max depth {max_depth}")));
                }
                let low = libm::log(ANTI_OCKHAM_LOW_WEIGHT);
                ks.map(|k| if k < pivot { low } else { 0.0 }).collect()
            }
            DecayFamily::Custom => {
                return Err(config_err("family", "custom priors are built from explicit weights"))
            }
        };
        Ok(ModelPrior { family, log_weights: normalize_log(&raw) })
    }

    /// Weights that must already sum to 1 within `1e-12`.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        check_weights(weights)?;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(config_err("weights", format!("prior weights sum to {sum}, not 1")));
        }
        Self::from_unnormalized(weights)
    }

    /// Any nonnegative weights with a positive sum; normalized here.
    pub fn from_unnormalized(weights: &[f64]) -> Result<Self> {
        check_weights(weights)?;
        let raw: Vec<f64> = weights.iter().map(|w| libm::log(*w)).collect();
        Ok(ModelPrior { family: DecayFamily::Custom, log_weights: normalize_log(&raw) })
    }

    pub fn family(&self) -> DecayFamily {
        self.family
    }

    pub fn max_depth(&self) -> u32 {
        (self.log_weights.len() - 1) as u32
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|l| libm::exp(*l)).collect()
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(config_err("weights", "at least one model weight is required"));
    }
    if weights.len() > 31 {
        return Err(config_err("weights", "at most 31 models (depth 30) are supported"));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(config_err("weights", "weights must be finite and nonnegative"));
    }
    if !weights.iter().any(|w| *w > 0.0) {
        return Err(config_err("weights", "weights must not all be zero"));
    }
    Ok(())
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    max + libm::log(xs.iter().map(|x| libm::exp(x - max)).sum::<f64>())
}

pub(crate) fn normalize_log(xs: &[f64]) -> Vec<f64> {
    let total = log_sum_exp(xs);
    xs.iter().map(|x| x - total).collect()
}
