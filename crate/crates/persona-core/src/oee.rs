//! Finite-horizon recurrence checking over goal-conditioned behavior
//! trajectories and the reward-rule trajectory.
//!
//! Recurrence is exact equality only: candidates are found by digest and
//! re-verified by direct comparison, so a report never rests on a hash
//! alone. The checker reports "non-recurring within horizon H", nothing
//! stronger.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::reward::RewardSpec;
use crate::sim::Action;

/// The actions executed while one daily goal was active, in order, under a
/// canonical serialization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalTrajectory {
    /// (day, index of the daily goal within that day's goal set).
    pub goal_id: (u32, u32),
    /// Canonical serialization of the executed actions.
    pub action_sequence: String,
}

impl GoalTrajectory {
    /// Builds a trajectory from actions; two equal action lists always
    /// serialize identically.
    pub fn from_actions(goal_id: (u32, u32), actions: &[Action]) -> Self {
        let parts: Vec<String> = actions.iter().map(|a| a.to_string()).collect();
        GoalTrajectory {
            goal_id,
            action_sequence: parts.join(";"),
        }
    }

    fn digest(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update(self.action_sequence.as_bytes());
        hasher.finalize().into()
    }
}

/// First recurrences found, if any; indices are 1-based positions in the
/// input lists and satisfy `i < j` with exact equality of the cited items.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub state_recurrence: Option<(usize, usize)>,
    pub rule_recurrence: Option<(usize, usize)>,
    /// Number of trajectories examined.
    pub horizon: usize,
}

impl RecurrenceReport {
    pub fn non_recurring(&self) -> bool {
        self.state_recurrence.is_none() && self.rule_recurrence.is_none()
    }
}

/// Finds the first repeating pair in `items` under `digest` + exact
/// equality, in lexicographic (j, i) order: smallest j first, then
/// smallest i.
fn first_repeat<T, D, F>(items: &[T], digest: D, eq: F) -> Option<(usize, usize)>
where
    D: Fn(&T) -> [u8; 32],
    F: Fn(&T, &T) -> bool,
{
    use std::collections::HashMap;
    let mut seen: HashMap<[u8; 32], Vec<usize>> = HashMap::new();
    for (j, item) in items.iter().enumerate() {
        let d = digest(item);
        if let Some(candidates) = seen.get(&d) {
            // Digest match is only a candidate; verify by direct comparison.
            for &i in candidates {
                if eq(&items[i], item) {
                    return Some((i + 1, j + 1));
                }
            }
        }
        seen.entry(d).or_default().push(j);
    }
    None
}

fn spec_digest(spec: &RewardSpec) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(spec.rules_canonical_json().as_bytes());
    hasher.finalize().into()
}

/// Exhaustive pairwise recurrence check over behavior trajectories and the
/// spec chain. Spec equality compares rule content, not version counters: a
/// no-op reflection leaves the rules identical even though the version
/// advanced.
pub fn oee_check(trajectories: &[GoalTrajectory], specs: &[RewardSpec]) -> RecurrenceReport {
    let state_recurrence = first_repeat(
        trajectories,
        |t| t.digest(),
        |a, b| a.action_sequence == b.action_sequence,
    );
    let rule_recurrence = first_repeat(specs, spec_digest, |a, b| {
        a.rules_canonical_json() == b.rules_canonical_json()
    });
    RecurrenceReport {
        state_recurrence,
        rule_recurrence,
        horizon: trajectories.len(),
    }
}

/// Reference implementation: brute-force pairwise comparison, for
/// cross-checking the digest path on small inputs.
pub fn oee_check_brute_force(
    trajectories: &[GoalTrajectory],
    specs: &[RewardSpec],
) -> RecurrenceReport {
    let find = |n: usize, eq: &dyn Fn(usize, usize) -> bool| {
        for j in 1..n {
            for i in 0..j {
                if eq(i, j) {
                    return Some((i + 1, j + 1));
                }
            }
        }
        None
    };
    RecurrenceReport {
        state_recurrence: find(trajectories.len(), &|i, j| {
            trajectories[i].action_sequence == trajectories[j].action_sequence
        }),
        rule_recurrence: find(specs.len(), &|i, j| {
            specs[i].rules_canonical_json() == specs[j].rules_canonical_json()
        }),
        horizon: trajectories.len(),
    }
}
