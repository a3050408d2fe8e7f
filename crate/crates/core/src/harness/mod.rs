//! Randomised campaigns, refinement studies and the built-in worked examples.

mod campaign;
mod families;
mod fixtures;
mod refine;
mod rng;

pub use campaign::{
    run_campaign, run_trial, write_failure_corpus, CampaignReport, FuzzConfig, TrialRecord, POINTWISE_SLACK,
};
pub use families::{random_function, sample_function, Family};
pub use fixtures::{fixture_scenario, reproduce, Reproduction, ValueRow, Verdict, FIXTURE_NAMES};
pub use refine::{refine_study, ConvergenceReport, LevelResult};
pub use rng::SplitMix64;
