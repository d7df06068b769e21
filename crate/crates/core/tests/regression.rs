use fwdbayes_core::modes::{hierarchy_report, ConvergenceMode, ModeStatus, Problem};
use fwdbayes_core::regression::{
    gen_dataset, model_posterior, replicate_experiment, DecayFamily, ModelPrior, RegressionConfig, StepCurve,
};

fn config(n: usize) -> RegressionConfig {
    RegressionConfig {
        fstar: StepCurve::new(1, vec![1.0, -1.0]).unwrap(),
        n,
        tau: 1.0,
        prior: ModelPrior::from_family(DecayFamily::SuperExponential, 5).unwrap(),
        eps: 0.3,
        delta: 0.1,
        samples: 200,
        replications: 20,
        master_seed: 99,
    }
}

#[test]
fn same_seed_same_report() {
    assert_eq!(replicate_experiment(&config(300)).unwrap(), replicate_experiment(&config(300)).unwrap());
    let other = RegressionConfig { master_seed: 100, ..config(300) };
    assert_ne!(replicate_experiment(&config(300)).unwrap(), replicate_experiment(&other).unwrap());
}

#[test]
fn true_model_wins_with_enough_data() {
    let cfg = config(1500);
    let data = gen_dataset(&cfg.fstar, cfg.n, 5);
    let post = model_posterior(&data, &cfg.prior, cfg.tau).unwrap();
    let best = post.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    assert_eq!(best, 1);
}

#[test]
fn regression_hierarchy_tops_out_at_approximation() {
    let problem = Problem::Regression { cfg: config(0), sizes: vec![50, 400, 1600] };
    let report = hierarchy_report(&problem).unwrap();
    assert_eq!(report.verdict(ConvergenceMode::Identification).status, ModeStatus::Fails);
    assert_eq!(report.verdict(ConvergenceMode::StochasticIdentification).status, ModeStatus::Fails);
    assert_eq!(report.verdict(ConvergenceMode::StochasticApproximation).status, ModeStatus::EmpiricalTrend);
    assert_eq!(report.highest, Some(ConvergenceMode::StochasticApproximation));
}
