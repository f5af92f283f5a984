//! Constructive witnesses with machine-checkable certificates.

pub mod certificate;
pub mod prop32;
pub mod prop33;
pub mod thm41;

pub use certificate::{first_difference, replay, Certificate, CountingParams, Prop32Certificate, Prop33Certificate, ReplayReport};
pub use prop32::{
    build_prop32_embedded, build_prop32_set, counting_check, interval_recurrence, minimal_count, AnnulusConstruction,
    Comparison, ConditionTrace, CountingVerdict,
};
pub use prop33::{default_first_radius, falsify_prop33, interior_axis, prop33_witness, FalsificationReport, StrongPorosityWitness, WitnessStep};
pub use thm41::{
    bracket_level, run_thm41_trials, sample_y, sample_y_trial, summarize, thm41_witness_search, Check, SampleParams,
    Thm41Certificate, Thm41Summary, Thm41TrialConfig, Thm41Witness,
};
