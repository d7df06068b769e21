//! Parallel drivers. Replications are seeded by index, so collecting in
//! index order gives reports identical to the sequential core drivers.

use fwdbayes_core::modes::{trend_row, TrendRow};
use fwdbayes_core::regression::{run_replication, RegressionConfig, RunReport};
use fwdbayes_core::Result;
use rayon::prelude::*;

pub fn replicate_experiment_par(cfg: &RegressionConfig) -> Result<RunReport> {
    cfg.validate()?;
    let reps = (0..cfg.replications)
        .into_par_iter()
        .map(|i| run_replication(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunReport::from_replications(cfg, reps))
}

/// Fraction of replications concentrating above `1 - delta`, per sample size.
pub fn concentration_trend_par(cfg: &RegressionConfig, sizes: &[usize]) -> Result<Vec<TrendRow>> {
    sizes
        .iter()
        .map(|&n| {
            let report = replicate_experiment_par(&RegressionConfig { n, ..cfg.clone() })?;
            Ok(trend_row(n, report.success_fraction, report.replications.len()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use fwdbayes_core::modes::regression_trend;
    use fwdbayes_core::regression::{replicate_experiment, DecayFamily, ModelPrior, StepCurve};

    fn cfg() -> RegressionConfig {
        RegressionConfig {
            fstar: StepCurve::new(1, vec![0.5, -0.5]).unwrap(),
            n: 150,
            tau: 1.0,
            prior: ModelPrior::from_family(DecayFamily::Factorial, 5).unwrap(),
            eps: 0.2,
            delta: 0.1,
            samples: 50,
            replications: 12,
            master_seed: 31,
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        assert_eq!(replicate_experiment_par(&cfg()).unwrap(), replicate_experiment(&cfg()).unwrap());
        let sizes = [20, 80];
        assert_eq!(concentration_trend_par(&cfg(), &sizes).unwrap(), regression_trend(&cfg(), &sizes).unwrap());
    }

    #[test]
    fn independent_of_thread_count() {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| replicate_experiment_par(&cfg()).unwrap());
        assert_eq!(single, replicate_experiment_par(&cfg()).unwrap());
    }
}
