//! Nonparametric regression with a hierarchy of dyadic step-function models.

pub mod curve;
pub mod data;
pub mod experiment;
pub mod inference;
pub mod prior;

pub use curve::{cell_index, eval_step, l2_distance_sq, StepCurve};
pub use data::{cell_stats, gen_dataset, CellStats, Dataset};
pub use experiment::{
    replicate_experiment, replication_seed, run_replication, RegressionConfig, ReplicationSummary,
    RunReport,
};
pub use inference::{
    concentration_probability, in_neighborhood, log_marginal_likelihood, model_posterior,
    sample_posterior_curve, CellPosterior, ModelFit, RegressionPosterior,
};
pub use prior::{DecayFamily, ModelPrior, ANTI_OCKHAM_LOW_WEIGHT};
