//! Observable world state and per-step outcomes.

use serde::{Deserialize, Serialize};

use super::action::Action;
use super::config::{FULL_BATTERY_UNITS, UNITS_PER_PERCENT};
use super::map::NodeId;

/// Battery charge in integer units of 0.01%.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct BatteryLevel(pub u32);

impl BatteryLevel {
    pub fn full() -> Self {
        BatteryLevel(FULL_BATTERY_UNITS)
    }

    pub fn units(self) -> u32 {
        self.0
    }

    pub fn percent(self) -> f64 {
        self.0 as f64 / UNITS_PER_PERCENT as f64
    }

    pub fn from_percent(p: f64) -> Self {
        let units = (p.clamp(0.0, 100.0) * UNITS_PER_PERCENT as f64).round() as u32;
        BatteryLevel(units.min(FULL_BATTERY_UNITS))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn saturating_sub(self, units: u32) -> Self {
        BatteryLevel(self.0.saturating_sub(units))
    }

    pub fn saturating_add(self, units: u32) -> Self {
        BatteryLevel((self.0 + units).min(FULL_BATTERY_UNITS))
    }
}

/// Category of an incoming user request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventCategory {
    ExplorationRequest,
    AffectionRequest,
    TaskRequest,
}

impl EventCategory {
    pub fn name(self) -> &'static str {
        match self {
            EventCategory::ExplorationRequest => "exploration_request",
            EventCategory::AffectionRequest => "affection_request",
            EventCategory::TaskRequest => "task_request",
        }
    }
}

/// A user command delivered to the agent at a given minute of the day.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UserEvent {
    pub tick: u32,
    pub text: String,
    pub category: EventCategory,
}

/// Fully specified simulator state.
///
/// The physical state is observed exactly; the only hidden information is
/// the RNG stream behind action-failure draws and the not-yet-delivered part
/// of the event schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub battery: BatteryLevel,
    pub motor_temp: f64,
    pub location: NodeId,
    pub floor: i32,
    /// Minutes since episode start, in [0, day_ticks].
    pub clock: u32,
    /// Emotional valence in [-1, 1].
    pub mood: f64,
    /// Commands received but not yet fulfilled, in arrival order.
    pub pending_events: Vec<UserEvent>,
    /// True during a tick spent docked on the charger.
    pub charging: bool,
}

impl WorldState {
    pub fn pending_command(&self) -> Option<&UserEvent> {
        self.pending_events.first()
    }

    pub fn has_pending(&self, category: EventCategory) -> bool {
        self.pending_events.iter().any(|e| e.category == category)
    }
}

/// Result classification of one executed step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Failure,
    /// A multi-tick action that is still in progress.
    Partial,
}

/// Time and energy spent by a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Resources {
    pub time_ticks: u32,
    /// Battery delta in units: pre - post. Negative while charging.
    pub energy_units: i64,
}

impl Resources {
    pub fn energy_percent(&self) -> f64 {
        self.energy_units as f64 / UNITS_PER_PERCENT as f64
    }
}

/// What the agent observes after a step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub state: WorldState,
    /// Events that arrived during this tick.
    pub arrived_events: Vec<UserEvent>,
    /// A user request fulfilled by this step, if any.
    pub completed_event: Option<UserEvent>,
}

/// Outcome of a single simulator tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub post_state: WorldState,
    pub observation: Observation,
    pub extrinsic_reward: f64,
    pub outcome: Outcome,
    pub resources: Resources,
}

/// Aggregate of stepping one action to completion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecOutcome {
    pub action: Action,
    pub start_tick: u32,
    pub pre_state: WorldState,
    pub post_state: WorldState,
    pub outcome: Outcome,
    pub extrinsic_reward: f64,
    pub resources: Resources,
    pub completed_event: Option<UserEvent>,
    pub arrived_events: Vec<UserEvent>,
}
