//! Managerial search in organizations on NK fitness landscapes.
//!
//! Managers own contiguous blocks of an N-bit decision problem and search
//! for better partial configurations either by satisficing (sequential
//! closest-first discovery with an adaptive aspiration level and search
//! space) or by steepest-ascent hill-climbing over a fixed option set.

pub mod cli;
pub mod config;
pub mod error;
pub mod landscape;
pub mod organization;
pub mod report;
pub mod seed;
pub mod simulation;
pub mod strategies;

pub use config::{parse_config, ScenarioConfig};
pub use error::{Error, Result};
pub use landscape::{Configuration, InteractionStructure, Landscape, Pattern};
pub use organization::{
    AspirationDelta, ManagerState, NoiseModel, NoisePersistence, OrgState, PeriodOutcome, Rules,
    View,
};
pub use simulation::{run_scenario, sensitivity_sweep, RunMetrics, ScenarioSummary, Sweep};
pub use strategies::{SearchStrategy, SequencePolicy, SpaceUpdateRule, StrategyKind};
