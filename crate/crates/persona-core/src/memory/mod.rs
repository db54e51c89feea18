//! Episodic memory: an append-only log of executed actions, daily summaries
//! aggregated from it, and the long-term per-day trace.
//!
//! The log is line-delimited JSON with a schema header on line 1. Records are
//! append-only and carry a strictly increasing id, so any reader sees a
//! consistent prefix and the whole self-evolution loop can be replayed from
//! disk.

mod store;
mod summary;

pub use store::{MemoryError, MemoryStore, Query, LOG_SCHEMA_VERSION};
pub use summary::{summarize_day, DailySummary, FailureNote, TerminalOutcome};

use serde::{Deserialize, Serialize};

use crate::sim::{Action, Outcome, Resources, WorldState};

/// One structured episodic record: the action, its pre/post snapshots, the
/// outcome and what it cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodicRecord {
    /// Monotone sequence number, starting at 1.
    pub id: u64,
    /// Simulated day, starting at 1.
    pub day: u32,
    /// Minute of day at which the action started.
    pub tick: u32,
    pub action: Action,
    pub pre_state: WorldState,
    pub post_state: WorldState,
    pub outcome: Outcome,
    pub resources: Resources,
    /// Free-text tags (goal attribution, completed commands, ...).
    pub context: Vec<String>,
}

/// Digest line for one completed day: which goal and reward versions were
/// active and what the day looked like.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub day: u32,
    pub goal_version: u32,
    pub reward_version: u32,
    pub summary_digest: String,
}

/// Append-only per-day trace; one entry per completed day.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LongTermTrace {
    entries: Vec<TraceEntry>,
}

impl LongTermTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: TraceEntry) -> Result<(), MemoryError> {
        let expected = self.entries.last().map(|e| e.day + 1).unwrap_or(1);
        if entry.day != expected {
            return Err(MemoryError::Sequencing {
                expected: expected as u64,
                got: entry.day as u64,
            });
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }
}
