//! The two-level goal hierarchy: a fixed ultimate goal and versioned daily
//! goals that evolve one reflection at a time.

use serde::{Deserialize, Serialize};

/// One daily goal. `machine_hint` optionally binds the narrative to a
/// condition in the reward language; goals without hints shape only the
/// reflection prompt, never the spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyGoal {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub machine_hint: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalSet {
    /// Increments by one per reflection.
    pub version: u32,
    /// Immutable across every version of a run.
    pub ultimate_goal: String,
    pub daily_goals: Vec<DailyGoal>,
    /// The day these daily goals are meant for.
    pub effective_day: u32,
}

impl GoalSet {
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("goal set serializes")
    }
}
