//! Reproducible Monte-Carlo campaigns and searches over lifts.

pub mod config;
pub mod lemmas;
pub mod search;
pub mod trials;

pub use config::{ExperimentConfig, GraphSpec, LiftMode};
pub use lemmas::{bilinear_mean_check, lemma_inequality_spot_check, LemmaKind, LemmaReport, LemmaSampler, MeanCheck};
pub use search::{
    exhaustive_signing_search, greedy_lift_growth, GrowthTrajectory, SigningSearchReport, DEFAULT_MAX_VERTICES,
};
pub use trials::{base_lambda, run_lift_trials, ExperimentReport, TrialRecord, TrialRow};
