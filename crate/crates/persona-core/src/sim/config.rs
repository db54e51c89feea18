//! Simulator configuration: calibration constants, map shape, failure
//! probabilities and the day's user-event schedule.
//!
//! Battery is accounted in integer units of 0.01% so that energy bookkeeping
//! is exact: every cost in the config must be a non-negative multiple of
//! 0.01%. A full battery is 10_000 units.

use serde::{Deserialize, Serialize};
use std::path::Path;

use super::map::{BuildingMap, NodeId};
use super::state::EventCategory;

/// Battery units per percent.
pub const UNITS_PER_PERCENT: u32 = 100;
/// A full battery, in units.
pub const FULL_BATTERY_UNITS: u32 = 100 * UNITS_PER_PERCENT;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("failed to read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse config file: {0}")]
    Parse(#[from] toml::de::Error),
}

impl ConfigError {
    pub fn invalid(field: &str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

/// Per-action and per-tick battery costs, in percent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostConfig {
    /// Idle drain per tick.
    pub idle: f64,
    /// Deliberation drain per tick.
    pub think: f64,
    /// Locomotion primitive, per action.
    pub locomotion: f64,
    /// Emotional expression, per action.
    pub expression: f64,
    /// Walking travel, per tick.
    pub walk_per_tick: f64,
    /// Elevator ride, per tick.
    pub elevator_per_tick: f64,
    /// Staircase climb, per tick.
    pub stairs_per_tick: f64,
    /// Charge gained per tick while docked.
    pub charge_per_tick: f64,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig {
            idle: 0.01,
            think: 0.02,
            locomotion: 0.30,
            expression: 0.15,
            walk_per_tick: 0.08,
            elevator_per_tick: 0.05,
            stairs_per_tick: 0.12,
            charge_per_tick: 0.80,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TemperatureConfig {
    /// Ambient temperature; the motor never cools below this.
    pub ambient: f64,
    /// Rise per non-resting activity tick.
    pub rise_per_tick: f64,
    /// Linear recovery per resting tick.
    pub recovery_per_tick: f64,
    /// Hard ceiling.
    pub max: f64,
}

impl Default for TemperatureConfig {
    fn default() -> Self {
        TemperatureConfig {
            ambient: 25.0,
            rise_per_tick: 0.6,
            recovery_per_tick: 1.2,
            max: 90.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureConfig {
    /// Per-phase abort probability of the elevator ride.
    pub elevator_phase: f64,
    /// Per-floor-leg abort probability on the staircase.
    pub stairs_leg: f64,
}

impl Default for FailureConfig {
    fn default() -> Self {
        FailureConfig {
            elevator_phase: 0.05,
            stairs_leg: 0.10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapConfig {
    pub floors: i32,
    pub rooms_per_floor: u32,
    /// Home node; user interactions happen here.
    pub home: NodeId,
    /// Charging dock location. Must exist in the generated graph.
    pub charger: NodeId,
    /// Ticks to walk between two nodes on the same floor.
    pub walk_ticks: u32,
    /// Ticks to climb one floor on the staircase.
    pub stairs_ticks_per_floor: u32,
    /// Ticks one elevator phase takes.
    pub elevator_ticks_per_phase: u32,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig {
            floors: 3,
            rooms_per_floor: 4,
            home: NodeId::new("room_101"),
            charger: NodeId::new("room_101"),
            walk_ticks: 3,
            stairs_ticks_per_floor: 5,
            elevator_ticks_per_phase: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtrinsicConfig {
    /// Reward on completing a user-requested task.
    pub task_completion: f64,
    /// Reward (penalty) on episode failure.
    pub episode_failure: f64,
}

impl Default for ExtrinsicConfig {
    fn default() -> Self {
        ExtrinsicConfig {
            task_completion: 1.0,
            episode_failure: -1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoodConfig {
    pub on_task_completion: f64,
    pub on_expression: f64,
    pub on_failure: f64,
    /// Linear pull toward neutral per tick.
    pub decay_per_tick: f64,
}

impl Default for MoodConfig {
    fn default() -> Self {
        MoodConfig {
            on_task_completion: 0.2,
            on_expression: 0.02,
            on_failure: -0.1,
            decay_per_tick: 0.001,
        }
    }
}

/// A scheduled user event, delivered when the clock reaches `tick`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduledEvent {
    pub tick: u32,
    pub text: String,
    pub category: EventCategory,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub schema_version: u32,
    /// Name of the seeded RNG stream; trajectories are only portable across
    /// implementations that honor the same algorithm.
    pub rng_algorithm: String,
    /// Ticks in one simulated day (one tick = one minute).
    pub day_ticks: u32,
    #[serde(default)]
    pub map: MapConfig,
    #[serde(default)]
    pub costs: CostConfig,
    #[serde(default)]
    pub temperature: TemperatureConfig,
    #[serde(default)]
    pub failures: FailureConfig,
    #[serde(default)]
    pub extrinsic: ExtrinsicConfig,
    #[serde(default)]
    pub mood: MoodConfig,
    #[serde(default)]
    pub events: Vec<ScheduledEvent>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            schema_version: 1,
            rng_algorithm: "chacha8".to_string(),
            day_ticks: 1440,
            map: MapConfig::default(),
            costs: CostConfig::default(),
            temperature: TemperatureConfig::default(),
            failures: FailureConfig::default(),
            extrinsic: ExtrinsicConfig::default(),
            mood: MoodConfig::default(),
            events: Vec::new(),
        }
    }
}

/// Integer battery costs derived from a validated [`SimConfig`].
#[derive(Debug, Clone, Copy)]
pub struct CostUnits {
    pub idle: u32,
    pub think: u32,
    pub locomotion: u32,
    pub expression: u32,
    pub walk_per_tick: u32,
    pub elevator_per_tick: u32,
    pub stairs_per_tick: u32,
    pub charge_per_tick: u32,
}

fn percent_to_units(field: &str, value: f64) -> Result<u32, ConfigError> {
    if !value.is_finite() || value < 0.0 {
        return Err(ConfigError::invalid(field, "must be a finite value >= 0"));
    }
    let scaled = value * UNITS_PER_PERCENT as f64;
    let rounded = scaled.round();
    if (scaled - rounded).abs() > 1e-6 {
        return Err(ConfigError::invalid(
            field,
            format!("{value} is not a multiple of 0.01%"),
        ));
    }
    Ok(rounded as u32)
}

fn check_probability(field: &str, value: f64) -> Result<(), ConfigError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(ConfigError::invalid(field, "must lie in [0, 1]"));
    }
    Ok(())
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: SimConfig = toml::from_str(text)?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// The builtin default calibration shipped with the crate.
    pub fn builtin_default() -> Self {
        Self::from_toml_str(include_str!("../../assets/sim_default.toml"))
            .expect("builtin sim config must parse")
    }

    /// Validates every invariant and returns the derived integer cost table.
    pub fn validate(&self) -> Result<CostUnits, ConfigError> {
        if self.schema_version != 1 {
            return Err(ConfigError::invalid(
                "schema_version",
                format!("unsupported version {}", self.schema_version),
            ));
        }
        if self.rng_algorithm != "chacha8" {
            return Err(ConfigError::invalid(
                "rng_algorithm",
                format!("unknown algorithm `{}` (supported: chacha8)", self.rng_algorithm),
            ));
        }
        if self.day_ticks == 0 {
            return Err(ConfigError::invalid("day_ticks", "must be >= 1"));
        }
        if self.map.floors < 1 {
            return Err(ConfigError::invalid("map.floors", "must be >= 1"));
        }
        if self.map.rooms_per_floor < 1 {
            return Err(ConfigError::invalid("map.rooms_per_floor", "must be >= 1"));
        }
        if self.map.walk_ticks == 0 || self.map.stairs_ticks_per_floor == 0 {
            return Err(ConfigError::invalid(
                "map.walk_ticks",
                "travel durations must be >= 1 tick",
            ));
        }
        if self.map.elevator_ticks_per_phase == 0 {
            return Err(ConfigError::invalid(
                "map.elevator_ticks_per_phase",
                "must be >= 1 tick",
            ));
        }
        let map = self.building();
        if !map.contains(&self.map.home) {
            return Err(ConfigError::invalid(
                "map.home",
                format!("node `{}` does not exist in the building graph", self.map.home),
            ));
        }
        if !map.contains(&self.map.charger) {
            return Err(ConfigError::invalid(
                "map.charger",
                format!("node `{}` does not exist in the building graph", self.map.charger),
            ));
        }
        check_probability("failures.elevator_phase", self.failures.elevator_phase)?;
        check_probability("failures.stairs_leg", self.failures.stairs_leg)?;
        for (i, ev) in self.events.iter().enumerate() {
            if ev.tick >= self.day_ticks {
                return Err(ConfigError::invalid(
                    &format!("events[{i}].tick"),
                    format!("tick {} is outside the day [0, {})", ev.tick, self.day_ticks),
                ));
            }
        }
        let c = &self.costs;
        Ok(CostUnits {
            idle: percent_to_units("costs.idle", c.idle)?,
            think: percent_to_units("costs.think", c.think)?,
            locomotion: percent_to_units("costs.locomotion", c.locomotion)?,
            expression: percent_to_units("costs.expression", c.expression)?,
            walk_per_tick: percent_to_units("costs.walk_per_tick", c.walk_per_tick)?,
            elevator_per_tick: percent_to_units("costs.elevator_per_tick", c.elevator_per_tick)?,
            stairs_per_tick: percent_to_units("costs.stairs_per_tick", c.stairs_per_tick)?,
            charge_per_tick: percent_to_units("costs.charge_per_tick", c.charge_per_tick)?,
        })
    }

    pub fn building(&self) -> BuildingMap {
        BuildingMap::generate(self.map.floors, self.map.rooms_per_floor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        let cfg = SimConfig::default();
        let units = cfg.validate().unwrap();
        assert_eq!(units.idle, 1);
        assert_eq!(units.locomotion, 30);
        assert_eq!(units.charge_per_tick, 80);
    }

    #[test]
    fn builtin_asset_matches_defaults() {
        let cfg = SimConfig::builtin_default();
        cfg.validate().unwrap();
        assert_eq!(cfg.day_ticks, 1440);
        assert!(!cfg.events.is_empty());
    }

    #[test]
    fn missing_charger_is_a_config_error() {
        let mut cfg = SimConfig::default();
        cfg.map.charger = NodeId::new("room_999");
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("map.charger"), "{err}");
    }

    #[test]
    fn non_grid_cost_is_rejected() {
        let mut cfg = SimConfig::default();
        cfg.costs.idle = 0.013;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("costs.idle"), "{err}");
    }

    #[test]
    fn unknown_rng_is_rejected() {
        let mut cfg = SimConfig::default();
        cfg.rng_algorithm = "mt19937".into();
        assert!(cfg.validate().is_err());
    }
}
