//! Experiment orchestration: the closed perception-planning-reflection loop
//! over simulated days, preference trials on fixed scenarios, architecture
//! comparison accounting, and machine-readable outputs.

pub mod compare;
pub mod experiment;
pub mod figures;
pub mod rundir;
pub mod scenario;

pub use compare::{
    architecture_comparison, distill_for, evolve_spec_only, training_states, ComparisonRow,
    ComparisonTable, DistillOutcome, LatencyFixtures, WeakReflector,
};
pub use experiment::{
    day_seed, run_day, run_experiment, ArchMode, DayOutcome, DayReport, DecisionBackend,
    ExperimentReport, ExperimentSetup, HarnessConfig, LatencyStats,
};
pub use figures::emit_figures;
pub use rundir::{diff_run_dirs, replay_run_dir, Manifest, RunDir};
pub use scenario::{action_preference_trial, builtin_scenarios, scenario, Scenario, ScenarioId};

use crate::memory::MemoryError;
use crate::planner::PlannerError;
use crate::reflect::{ChatError, ReflectError};
use crate::reward::RewardError;
use crate::sim::SimError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Memory(#[from] MemoryError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error(transparent)]
    Reflect(#[from] ReflectError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// Exit code contract: 0 success, 2 config error, 3 fixture miss,
    /// 4 invariant violation, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Sim(SimError::Config(_)) => 2,
            HarnessError::Reflect(ReflectError::Chat(ChatError::FixtureMiss { .. })) => 3,
            HarnessError::Invariant(_) => 4,
            _ => 1,
        }
    }
}

/// Deterministic seed mixing.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}
