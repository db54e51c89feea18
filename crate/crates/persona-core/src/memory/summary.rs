//! Daily summaries: the digest of one day's records that reflection consumes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::sim::{Action, Category, Outcome};

use super::store::{MemoryError, MemoryStore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureNote {
    pub tick: u32,
    pub action: Action,
    pub cause: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TerminalOutcome {
    Survived,
    BatteryDepletedAtTick { tick: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailySummary {
    pub day: u32,
    /// Count of records per category; sums to the day's record count.
    pub action_counts_by_category: BTreeMap<Category, u64>,
    pub failures: Vec<FailureNote>,
    pub terminal_outcome: TerminalOutcome,
    /// (minimum battery %, final battery %) over the day.
    pub energy_profile: (f64, f64),
    pub notable_events: Vec<String>,
}

impl DailySummary {
    pub fn count(&self, category: Category) -> u64 {
        self.action_counts_by_category
            .get(&category)
            .copied()
            .unwrap_or(0)
    }

    pub fn total_records(&self) -> u64 {
        self.action_counts_by_category.values().sum()
    }

    /// Share of the day's records in `category`, as a percentage.
    pub fn share_percent(&self, category: Category) -> f64 {
        let total = self.total_records();
        if total == 0 {
            return 0.0;
        }
        self.count(category) as f64 * 100.0 / total as f64
    }

    /// Canonical digest of the summary for the long-term trace.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_vec(self).expect("summary serializes");
        let mut hasher = Sha256::new();
        hasher.update(&json);
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Computes the summary of `day` exactly from that day's records.
pub fn summarize_day(store: &MemoryStore, day: u32) -> Result<DailySummary, MemoryError> {
    let mut counts: BTreeMap<Category, u64> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut min_battery = f64::INFINITY;
    let mut final_battery = 0.0;
    let mut terminal = TerminalOutcome::Survived;
    let mut notable = Vec::new();
    let mut seen = 0u64;

    for (idx, rec) in store.records().iter().enumerate() {
        if rec.day != day {
            continue;
        }
        seen += 1;
        *counts.entry(store.category_of(idx)).or_insert(0) += 1;
        let post = rec.post_state.battery.percent();
        min_battery = min_battery.min(post.min(rec.pre_state.battery.percent()));
        final_battery = post;
        if rec.outcome == Outcome::Failure {
            let cause = if rec.post_state.battery.is_empty() {
                "battery depleted".to_string()
            } else {
                "navigation failure".to_string()
            };
            failures.push(FailureNote {
                tick: rec.tick,
                action: rec.action.clone(),
                cause,
            });
        }
        if rec.post_state.battery.is_empty() {
            terminal = TerminalOutcome::BatteryDepletedAtTick {
                tick: rec.post_state.clock,
            };
        }
        for tag in &rec.context {
            if tag.starts_with("completed:") || tag.starts_with("event:") {
                notable.push(format!("tick {}: {}", rec.tick, tag));
            }
        }
    }

    if seen == 0 {
        return Err(MemoryError::EmptyDay(day));
    }
    Ok(DailySummary {
        day,
        action_counts_by_category: counts,
        failures,
        terminal_outcome: terminal,
        energy_profile: (min_battery, final_battery),
        notable_events: notable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::EpisodicRecord;
    use crate::sim::{BatteryLevel, NodeId, Resources, TravelMethod, WorldState};

    fn state(units: u32, clock: u32) -> WorldState {
        WorldState {
            battery: BatteryLevel(units),
            motor_temp: 25.0,
            location: NodeId::new("room_101"),
            floor: 1,
            clock,
            mood: 0.0,
            pending_events: Vec::new(),
            charging: false,
        }
    }

    fn push(
        store: &mut MemoryStore,
        day: u32,
        tick: u32,
        action: Action,
        outcome: Outcome,
        post_units: u32,
    ) {
        let id = store.last_id() + 1;
        store
            .record(EpisodicRecord {
                id,
                day,
                tick,
                action,
                pre_state: state(post_units + 10, tick),
                post_state: state(post_units, tick + 1),
                outcome,
                resources: Resources {
                    time_ticks: 1,
                    energy_units: 10,
                },
                context: vec![],
            })
            .unwrap();
    }

    #[test]
    fn counts_by_category() {
        let mut store = MemoryStore::new(NodeId::new("room_101"));
        push(&mut store, 1, 0, Action::Sit, Outcome::Success, 9000);
        push(&mut store, 1, 1, Action::Idle, Outcome::Success, 8990);
        push(
            &mut store,
            1,
            2,
            Action::move_to(NodeId::new("room_103"), TravelMethod::Walk),
            Outcome::Success,
            8960,
        );
        let s = summarize_day(&store, 1).unwrap();
        assert_eq!(s.count(Category::Rest), 2);
        assert_eq!(s.count(Category::Explore), 1);
        assert_eq!(s.total_records(), 3);
        assert!(s.failures.is_empty());
        assert_eq!(s.terminal_outcome, TerminalOutcome::Survived);
    }

    #[test]
    fn battery_depletion_is_reported_with_its_tick() {
        let mut store = MemoryStore::new(NodeId::new("room_101"));
        push(&mut store, 1, 538, Action::Wander, Outcome::Success, 20);
        push(&mut store, 1, 539, Action::Wander, Outcome::Failure, 0);
        let s = summarize_day(&store, 1).unwrap();
        assert_eq!(
            s.terminal_outcome,
            TerminalOutcome::BatteryDepletedAtTick { tick: 540 }
        );
        assert_eq!(s.failures.len(), 1);
        assert_eq!(s.failures[0].cause, "battery depleted");
    }

    #[test]
    fn empty_day_is_an_error() {
        let store = MemoryStore::new(NodeId::new("room_101"));
        assert!(matches!(
            summarize_day(&store, 1),
            Err(MemoryError::EmptyDay(1))
        ));
    }

    #[test]
    fn partition_property() {
        let mut store = MemoryStore::new(NodeId::new("room_101"));
        for day in 1..=3 {
            for t in 0..5 {
                push(&mut store, day, t, Action::Idle, Outcome::Success, 9000);
            }
        }
        let total: u64 = (1..=3)
            .map(|d| summarize_day(&store, d).unwrap().total_records())
            .sum();
        assert_eq!(total, store.len() as u64);
    }
}
