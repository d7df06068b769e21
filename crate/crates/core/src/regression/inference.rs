//! Conjugate inference over the step-function hierarchy. Within `M_k` each
//! cell value has an independent `N(0, τ²)` prior and the noise variance is 1,
//! so every model's evidence and cell posteriors are closed form.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::curve::{l2_distance_sq, StepCurve};
use super::data::{cell_stats, coarsen, CellStats, Dataset};
use super::prior::{log_sum_exp, ModelPrior};
use crate::error::{config_err, Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Log evidence of one model from its per-cell statistics.
pub fn log_evidence_from_stats(stats: &[CellStats], tau: f64) -> f64 {
    let tau2 = tau * tau;
    stats
        .iter()
        .filter(|c| c.count > 0)
        .map(|c| {
            let m = c.count as f64;
            let shrink = 1.0 + m * tau2;
            -0.5 * m * LN_2PI
                - 0.5 * libm::log(shrink)
                - 0.5 * (c.sum_y2 - tau2 * c.sum_y * c.sum_y / shrink)
        })
        .sum()
}

/// `log p(y | M_depth)` with the `x` values taken as given.
pub fn log_marginal_likelihood(d: &Dataset, depth: u32, tau: f64) -> f64 {
    log_evidence_from_stats(&cell_stats(d, depth), tau)
}

/// Statistics for every depth `0..=max_depth`, coarsened from the finest.
fn stats_by_depth(d: &Dataset, max_depth: u32) -> Vec<Vec<CellStats>> {
    let mut levels = alloc::vec![cell_stats(d, max_depth)];
    for _ in 0..max_depth {
        let next = coarsen(levels.last().expect("nonempty"));
        levels.push(next);
    }
    levels.reverse();
    levels
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(config_err("tau", alloc::format!("must be positive and finite, got {tau}")))
    }
}

/// Normal posterior of one cell value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellPosterior {
    pub mean: f64,
    pub var: f64,
}

impl CellPosterior {
    pub fn from_stats(c: &CellStats, tau: f64) -> Self {
        let tau2 = tau * tau;
        let shrink = 1.0 + c.count as f64 * tau2;
        CellPosterior { mean: tau2 * c.sum_y / shrink, var: tau2 / shrink }
    }
}

/// Posterior within one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFit {
    pub depth: u32,
    pub log_evidence: f64,
    pub cells: Vec<CellPosterior>,
}

/// Full posterior over the truncated hierarchy and the curves within it.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionPosterior {
    model_weights: Vec<f64>,
    fits: Vec<ModelFit>,
}

impl RegressionPosterior {
    pub fn fit(d: &Dataset, prior: &ModelPrior, tau: f64) -> Result<Self> {
        check_tau(tau)?;
        let levels = stats_by_depth(d, prior.max_depth());
        let fits: Vec<ModelFit> = levels
            .iter()
            .enumerate()
            .map(|(k, stats)| ModelFit {
                depth: k as u32,
                log_evidence: log_evidence_from_stats(stats, tau),
                cells: stats.iter().map(|c| CellPosterior::from_stats(c, tau)).collect(),
            })
            .collect();
        let log_post: Vec<f64> = fits
            .iter()
            .zip(prior.log_weights())
            .map(|(f, lw)| f.log_evidence + lw)
            .collect();
        let total = log_sum_exp(&log_post);
        if !total.is_finite() {
            return Err(Error::AllZeroPosterior);
        }
        let model_weights: Vec<f64> = log_post.iter().map(|l| libm::exp(l - total)).collect();
        if model_weights.iter().all(|w| *w == 0.0) {
            return Err(Error::AllZeroPosterior);
        }
        Ok(RegressionPosterior { model_weights, fits })
    }

    pub fn model_weights(&self) -> &[f64] {
        &self.model_weights
    }

    pub fn fits(&self) -> &[ModelFit] {
        &self.fits
    }

    pub fn max_depth(&self) -> u32 {
        (self.fits.len() - 1) as u32
    }

    /// Most probable model; ties go to the simpler one.
    pub fn map_model(&self) -> u32 {
        let mut best = 0;
        for (k, w) in self.model_weights.iter().enumerate() {
            if *w > self.model_weights[best] {
                best = k;
            }
        }
        best as u32
    }

    fn sample_model<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (k, w) in self.model_weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return k;
            }
        }
        // rounding left a sliver above the cumulative sum
        self.model_weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
    }

    /// Draw a model, then every cell value from its normal posterior.
    pub fn sample_curve<R: Rng + ?Sized>(&self, rng: &mut R) -> StepCurve {
        let fit = &self.fits[self.sample_model(rng)];
        let values = fit
            .cells
            .iter()
            .map(|c| {
                let z: f64 = rng.sample(StandardNormal);
                c.mean + libm::sqrt(c.var) * z
            })
            .collect();
        StepCurve::new(fit.depth, values).expect("fit cells match depth")
    }

    /// Posterior mean curve, on the deepest partition.
    pub fn mean_curve(&self) -> StepCurve {
        let depth = self.max_depth();
        let mut values = alloc::vec![0.0; 1usize << depth];
        for (fit, w) in self.fits.iter().zip(&self.model_weights) {
            let shift = depth - fit.depth;
            for (i, v) in values.iter_mut().enumerate() {
                *v += w * fit.cells[i >> shift].mean;
            }
        }
        StepCurve::new(depth, values).expect("depth within limits")
    }

    /// Monte Carlo estimate of the posterior probability of the L² ball of
    /// radius `eps` around `fstar`.
    pub fn concentration<R: Rng + ?Sized>(
        &self,
        fstar: &StepCurve,
        eps: f64,
        samples: usize,
        rng: &mut R,
    ) -> f64 {
        if samples == 0 {
            return 0.0;
        }
        let inside = (0..samples)
            .filter(|_| in_neighborhood(&self.sample_curve(rng), fstar, eps))
            .count();
        inside as f64 / samples as f64
    }
}

/// `∫|g - f|² < eps²`.
pub fn in_neighborhood(g: &StepCurve, f: &StepCurve, eps: f64) -> bool {
    l2_distance_sq(g, f) < eps * eps
}

/// Posterior weights over `M_0..=M_K`.
pub fn model_posterior(d: &Dataset, prior: &ModelPrior, tau: f64) -> Result<Vec<f64>> {
    RegressionPosterior::fit(d, prior, tau).map(|p| p.model_weights)
}

pub fn sample_posterior_curve<R: Rng + ?Sized>(
    d: &Dataset,
    prior: &ModelPrior,
    tau: f64,
    rng: &mut R,
) -> Result<StepCurve> {
    Ok(RegressionPosterior::fit(d, prior, tau)?.sample_curve(rng))
}

pub fn concentration_probability<R: Rng + ?Sized>(
    d: &Dataset,
    fstar: &StepCurve,
    prior: &ModelPrior,
    tau: f64,
    eps: f64,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(config_err("eps", "must be positive"));
    }
    if samples == 0 {
        return Err(config_err("samples", "at least one posterior sample is required"));
    }
    Ok(RegressionPosterior::fit(d, prior, tau)?.concentration(fstar, eps, samples, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regression::data::gen_dataset;
    use crate::regression::prior::DecayFamily;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// `∫ Π_j N(y_j; θ, 1) N(θ; 0, τ²) dθ` by Simpson's rule.
    fn cell_evidence_quadrature(ys: &[f64], tau: f64) -> f64 {
        let lo = -12.0 * tau - 12.0;
        let hi = 12.0 * tau + 12.0;
        let n = 20_000;
        let h = (hi - lo) / n as f64;
        let density = |t: f64| {
            let lik: f64 = ys
                .iter()
                .map(|y| (-0.5 * (y - t) * (y - t)).exp() / (2.0 * core::f64::consts::PI).sqrt())
                .product();
            lik * (-0.5 * t * t / (tau * tau)).exp() / (tau * (2.0 * core::f64::consts::PI).sqrt())
        };
        let mut s = density(lo) + density(hi);
        for i in 1..n {
            s += density(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    fn quadrature_log_ml(d: &Dataset, depth: u32, tau: f64) -> f64 {
        let cells = 1usize << depth;
        let mut ys = vec![Vec::new(); cells];
        for &(x, y) in &d.points {
            ys[crate::regression::curve::cell_index(x, depth)].push(y);
        }
        ys.iter().filter(|c| !c.is_empty()).map(|c| cell_evidence_quadrature(c, tau).ln()).sum()
    }

    #[test]
    fn evidence_examples() {
        assert_eq!(log_marginal_likelihood(&Dataset::new(vec![]), 3, 1.0), 0.0);
        let d = Dataset::new(vec![(0.4, 0.0)]);
        let expected = -0.5 * (2.0 * core::f64::consts::PI).ln() - 0.5 * 2.0f64.ln();
        assert!((log_marginal_likelihood(&d, 0, 1.0) - expected).abs() < 1e-12);
        assert!((quadrature_log_ml(&d, 0, 1.0) - expected).abs() < 1e-8);
    }

    #[test]
    fn evidence_matches_quadrature() {
        let d = Dataset::new(vec![(0.1, 0.7), (0.6, -1.2), (0.65, 2.5)]);
        for depth in 0..=2 {
            for tau in [0.5, 1.0, 2.0] {
                let a = log_marginal_likelihood(&d, depth, tau);
                let b = quadrature_log_ml(&d, depth, tau);
                assert!((a - b).abs() < 1e-6, "depth {depth} tau {tau}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn empty_data_posterior_is_prior() {
        let prior = ModelPrior::from_family(DecayFamily::Factorial, 5).unwrap();
        let post = model_posterior(&Dataset::new(vec![]), &prior, 1.0).unwrap();
        for (a, b) in post.iter().zip(prior.weights()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rescaled_prior_same_posterior() {
        let f = StepCurve::new(1, vec![0.0, 1.0]).unwrap();
        let d = gen_dataset(&f, 300, 3);
        let w = [0.1, 0.2, 0.3, 0.4];
        let scaled: Vec<f64> = w.iter().map(|x| x * 37.5).collect();
        let a = model_posterior(&d, &ModelPrior::from_weights(&w).unwrap(), 1.0).unwrap();
        let b = model_posterior(&d, &ModelPrior::from_unnormalized(&scaled).unwrap(), 1.0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn selects_true_depth() {
        let f = StepCurve::new(2, vec![0.0, 1.0, -1.0, 2.0]).unwrap();
        let d = gen_dataset(&f, 2000, 2024);
        let prior = ModelPrior::from_family(DecayFamily::SuperExponential, 6).unwrap();
        let post = RegressionPosterior::fit(&d, &prior, 1.0).unwrap();
        assert_eq!(post.map_model(), 2);
        // Bayes-factor hand check against the next model
        let w = prior.weights();
        let bf = log_marginal_likelihood(&d, 2, 1.0) - log_marginal_likelihood(&d, 3, 1.0);
        assert!(bf > (w[3] / w[2]).ln());
    }

    #[test]
    fn bad_tau() {
        let prior = ModelPrior::from_family(DecayFamily::Flat, 2).unwrap();
        assert!(matches!(model_posterior(&Dataset::new(vec![]), &prior, -1.0), Err(Error::Config { field: "tau", .. })));
        assert!(model_posterior(&Dataset::new(vec![]), &prior, 0.0).is_err());
    }

    #[test]
    fn prior_predictive_samples() {
        let prior = ModelPrior::from_weights(&[1.0]).unwrap();
        let post = RegressionPosterior::fit(&Dataset::new(vec![]), &prior, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws: Vec<f64> = (0..10_000).map(|_| post.sample_curve(&mut rng).values()[0]).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!(mean.abs() < 0.04, "{mean}");
        assert!((0.94..=1.06).contains(&var), "{var}");
    }

    #[test]
    fn shrinkage_toward_cell_mean() {
        let d = Dataset::new((0..10_000).map(|i| (0.1 + 1e-6 * i as f64, 5.0)).collect());
        let prior = ModelPrior::from_weights(&[1.0]).unwrap();
        let post = RegressionPosterior::fit(&d, &prior, 1.0).unwrap();
        assert!((post.fits()[0].cells[0].mean - 5.0).abs() < 0.01);
        for m in [1u64, 10, 10_000] {
            let ybar = 2.5;
            let c = CellPosterior::from_stats(&CellStats { count: m, sum_y: ybar * m as f64, sum_y2: 0.0 }, 1.0);
            assert!((c.mean - ybar).abs() <= ybar.abs());
            if m == 10_000 {
                assert!((c.mean - ybar).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn deterministic_sampling() {
        let f = StepCurve::new(1, vec![0.0, 1.0]).unwrap();
        let d = gen_dataset(&f, 50, 1);
        let prior = ModelPrior::from_family(DecayFamily::Factorial, 3).unwrap();
        let a = sample_posterior_curve(&d, &prior, 1.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_posterior_curve(&d, &prior, 1.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn concentration_extremes() {
        let zero = StepCurve::constant(0.0);
        let d = gen_dataset(&StepCurve::constant(0.3), 40, 11);
        let point_mass = ModelPrior::from_weights(&[1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = concentration_probability(&d, &zero, &point_mass, 1e-6, 0.1, 500, &mut rng).unwrap();
        assert_eq!(c, 1.0);
        let flat = ModelPrior::from_family(DecayFamily::Flat, 4).unwrap();
        let c = concentration_probability(&d, &zero, &flat, 1.0, 1e6, 200, &mut rng).unwrap();
        assert_eq!(c, 1.0);
        assert!(concentration_probability(&d, &zero, &flat, 1.0, 0.0, 10, &mut rng).is_err());
    }

    #[test]
    fn permutation_invariance() {
        let f = StepCurve::new(2, vec![0.0, 1.0, -1.0, 2.0]).unwrap();
        let d = gen_dataset(&f, 400, 77);
        let mut rev = d.clone();
        rev.points.reverse();
        let prior = ModelPrior::from_family(DecayFamily::Geometric { ratio: 0.5 }, 5).unwrap();
        let a = model_posterior(&d, &prior, 1.0).unwrap();
        let b = model_posterior(&rev, &prior, 1.0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn occam_factor_prefers_true_depth() {
        let f = StepCurve::new(2, vec![0.0, 1.0, -1.0, 2.0]).unwrap();
        let wins = (0..50u64)
            .filter(|s| {
                let d = gen_dataset(&f, 5000, 1000 + s);
                log_marginal_likelihood(&d, 2, 1.0) > log_marginal_likelihood(&d, 3, 1.0)
            })
            .count();
        assert!(wins >= 45, "{wins}/50");
    }
}
