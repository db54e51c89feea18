//! Sandbox embodiment: a deterministic, seeded simulator of a multi-floor
//! building with battery, motor temperature, charging, an abstract elevator,
//! and scheduled user events.

pub mod action;
pub mod command;
pub mod config;
pub mod elevator;
pub mod engine;
pub mod map;
pub mod state;

pub use action::{action_category, Action, ActionKind, Category, TravelMethod};
pub use command::{parse_command, tokenize, ParsedCommand};
pub use config::{ConfigError, CostUnits, ScheduledEvent, SimConfig, FULL_BATTERY_UNITS};
pub use elevator::{ElevatorFsm, ElevatorPhase};
pub use engine::{is_terminal, SimContext, SimError, Simulator};
pub use map::{BuildingMap, NodeId};
pub use state::{
    BatteryLevel, EventCategory, ExecOutcome, Observation, Outcome, Resources, StepOutcome,
    UserEvent, WorldState,
};

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet_config() -> SimConfig {
        let mut cfg = SimConfig::default();
        cfg.events.clear();
        cfg
    }

    #[test]
    fn reset_contract() {
        let sim = Simulator::new(quiet_config(), 7).unwrap();
        let s = sim.state();
        assert_eq!(s.battery, BatteryLevel::full());
        assert_eq!(s.location, NodeId::new("room_101"));
        assert_eq!(s.clock, 0);
        assert_eq!(s.floor, 1);
        assert!(!s.charging);
    }

    #[test]
    fn reset_is_deterministic() {
        let a = Simulator::new(quiet_config(), 7).unwrap();
        let b = Simulator::new(quiet_config(), 7).unwrap();
        assert_eq!(a.state(), b.state());
        let ja = serde_json::to_string(a.state()).unwrap();
        let jb = serde_json::to_string(b.state()).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn idle_drains_the_configured_cost() {
        let mut sim = Simulator::new(quiet_config(), 7).unwrap();
        let pre = sim.state().battery.units();
        let out = sim.step(&Action::Idle).unwrap();
        assert_eq!(out.post_state.battery.units(), pre - 1); // 0.01% = 1 unit
        assert_eq!(out.outcome, Outcome::Success);
        assert_eq!(out.resources.energy_units, 1);
        assert_eq!(out.post_state.clock, 1);
    }

    #[test]
    fn battery_exactly_drained_ends_the_episode() {
        let mut cfg = quiet_config();
        cfg.costs.locomotion = 0.5;
        let mut sim = Simulator::new(cfg, 7).unwrap();
        // Drain down to exactly one action's worth of charge.
        sim.state_mut_for_tests().battery = BatteryLevel(50);
        let out = sim.step(&Action::Wander).unwrap();
        assert!(out.post_state.battery.is_empty());
        assert_eq!(out.outcome, Outcome::Failure);
        assert_eq!(out.extrinsic_reward, -1.0);
        assert!(sim.is_terminal());
        assert!(matches!(
            sim.step(&Action::Idle),
            Err(SimError::EpisodeOver { .. })
        ));
    }

    #[test]
    fn charging_gains_are_linear_and_capped() {
        let mut sim = Simulator::new(quiet_config(), 7).unwrap();
        sim.state_mut_for_tests().battery = BatteryLevel(9900);
        // lie_down on the dock charges 0.8%/tick
        let out = sim.step(&Action::LieDown).unwrap();
        assert!(out.post_state.charging);
        assert_eq!(out.post_state.battery.units(), 9980);
        assert_eq!(out.resources.energy_units, -80);
        let out = sim.step(&Action::LieDown).unwrap();
        assert_eq!(out.post_state.battery.units(), 10_000); // capped at 100%
    }

    #[test]
    fn terminal_predicate() {
        let cfg = quiet_config();
        let sim = Simulator::new(cfg.clone(), 7).unwrap();
        let mut s = sim.state().clone();
        s.battery = BatteryLevel(0);
        assert!(is_terminal(&s, &cfg));
        s.battery = BatteryLevel::full();
        s.clock = 1440;
        assert!(is_terminal(&s, &cfg));
        s.clock = 600;
        s.battery = BatteryLevel::from_percent(50.0);
        assert!(!is_terminal(&s, &cfg));
    }

    #[test]
    fn same_floor_walk_takes_walk_ticks() {
        let mut sim = Simulator::new(quiet_config(), 7).unwrap();
        let action = Action::move_to(NodeId::new("room_103"), TravelMethod::Walk);
        let out = sim.execute(&action).unwrap();
        assert_eq!(out.outcome, Outcome::Success);
        assert_eq!(out.resources.time_ticks, 3);
        assert_eq!(out.post_state.location, NodeId::new("room_103"));
        // 3 ticks * 0.08% = 24 units
        assert_eq!(out.resources.energy_units, 24);
    }

    #[test]
    fn cross_floor_walk_fails_immediately() {
        let mut sim = Simulator::new(quiet_config(), 7).unwrap();
        let action = Action::move_to(NodeId::new("room_302"), TravelMethod::Walk);
        let out = sim.execute(&action).unwrap();
        assert_eq!(out.outcome, Outcome::Failure);
        assert_eq!(out.post_state.location, NodeId::new("room_101"));
        assert_eq!(out.resources.time_ticks, 1);
    }

    #[test]
    fn elevator_journey_reaches_target_floor() {
        // With per-phase failure 0.05, find a seed whose draws all succeed.
        let mut cfg = quiet_config();
        cfg.failures.elevator_phase = 0.0;
        let mut sim = Simulator::new(cfg, 7).unwrap();
        let action = Action::move_to(NodeId::new("room_302"), TravelMethod::Elevator);
        let out = sim.execute(&action).unwrap();
        assert_eq!(out.outcome, Outcome::Success);
        assert_eq!(out.post_state.floor, 3);
        assert_eq!(out.post_state.location, NodeId::new("room_302"));
        // walk 3 + 4 phases + walk 3
        assert_eq!(out.resources.time_ticks, 10);
        // 6*8 + 4*5 = 68 units
        assert_eq!(out.resources.energy_units, 68);
    }

    #[test]
    fn stairs_journey_energy_and_time() {
        let mut cfg = quiet_config();
        cfg.failures.stairs_leg = 0.0;
        let mut sim = Simulator::new(cfg, 7).unwrap();
        let action = Action::move_to(NodeId::new("room_201"), TravelMethod::Stairs);
        let out = sim.execute(&action).unwrap();
        assert_eq!(out.outcome, Outcome::Success);
        assert_eq!(out.post_state.floor, 2);
        // walk 3 + climb 5 + walk 3
        assert_eq!(out.resources.time_ticks, 11);
        // 6*8 + 5*12 = 108 units
        assert_eq!(out.resources.energy_units, 108);
    }

    #[test]
    fn elevator_step_happy_path() {
        let mut cfg = quiet_config();
        cfg.failures.elevator_phase = 0.0;
        let mut sim = Simulator::new(cfg, 7).unwrap();
        // Walk to the elevator first.
        sim.execute(&Action::move_to(NodeId::new("elevator_1"), TravelMethod::Walk))
            .unwrap();
        let fsm = ElevatorFsm::begin(3);
        let (fsm, out) = sim.elevator_step(fsm).unwrap();
        assert_eq!(fsm.phase, ElevatorPhase::Wait);
        assert_eq!(out.outcome, Outcome::Partial);
        let (fsm, _) = sim.elevator_step(fsm).unwrap();
        assert_eq!(fsm.phase, ElevatorPhase::EnterSelect);
        let (fsm, _) = sim.elevator_step(fsm).unwrap();
        assert_eq!(fsm.phase, ElevatorPhase::ExitRelocalize);
        let (_, out) = sim.elevator_step(fsm).unwrap();
        assert_eq!(out.outcome, Outcome::Success);
        assert_eq!(out.post_state.floor, 3);
        assert_eq!(out.post_state.location, NodeId::new("elevator_3"));
    }

    #[test]
    fn elevator_step_away_from_elevator_is_an_error() {
        let mut sim = Simulator::new(quiet_config(), 7).unwrap();
        let err = sim.elevator_step(ElevatorFsm::begin(2)).unwrap_err();
        assert!(matches!(err, SimError::NotAtElevator { .. }));
    }

    #[test]
    fn elevator_wait_phase_failure_fixture() {
        // Frozen RNG trace: with seed 3 and failure probability 0.30 the
        // first draw succeeds and the second (wait phase) fails.
        let mut cfg = quiet_config();
        cfg.failures.elevator_phase = 0.30;
        let mut sim = Simulator::new(cfg.clone(), 3).unwrap();
        sim.execute(&Action::move_to(NodeId::new("elevator_1"), TravelMethod::Walk))
            .unwrap();
        let fsm = ElevatorFsm::begin(3);
        let (fsm, out) = sim.elevator_step(fsm).unwrap();
        assert_eq!(out.outcome, Outcome::Partial, "call phase succeeds");
        assert_eq!(fsm.phase, ElevatorPhase::Wait);
        let (_, out) = sim.elevator_step(fsm).unwrap();
        assert_eq!(out.outcome, Outcome::Failure, "wait phase fails");
        assert_eq!(out.post_state.floor, 1, "agent remains on origin floor");
    }

    #[test]
    fn trajectories_are_deterministic() {
        let script = [
            Action::Wander,
            Action::move_to(NodeId::new("room_204"), TravelMethod::Stairs),
            Action::ExpressHappy,
            Action::move_to(NodeId::new("room_101"), TravelMethod::Elevator),
            Action::LieDown,
        ];
        let run = |seed| {
            let mut sim = Simulator::new(SimConfig::builtin_default(), seed).unwrap();
            let mut outs = Vec::new();
            for a in &script {
                outs.push(sim.execute(a).unwrap());
            }
            serde_json::to_string(&outs).unwrap()
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42), run(43));
    }

    #[test]
    fn temperature_recovers_to_ambient_and_never_undershoots() {
        let mut sim = Simulator::new(quiet_config(), 7).unwrap();
        for _ in 0..40 {
            sim.step(&Action::Wander).unwrap();
        }
        let hot = sim.state().motor_temp;
        assert!(hot > 25.0);
        let mut prev = hot;
        // Recovery bound: ceil((max-ambient)/recovery_per_tick) ticks.
        for _ in 0..60 {
            sim.step(&Action::Idle).unwrap();
            let t = sim.state().motor_temp;
            assert!(t <= prev, "temperature must not rise during rest");
            assert!(t >= 25.0, "temperature never drops below ambient");
            prev = t;
        }
        assert_eq!(sim.state().motor_temp, 25.0);
    }

    #[test]
    fn scheduled_event_arrives_and_completes() {
        let mut cfg = quiet_config();
        cfg.events.push(ScheduledEvent {
            tick: 2,
            text: "please check room_103".into(),
            category: EventCategory::TaskRequest,
        });
        let mut sim = Simulator::new(cfg, 7).unwrap();
        sim.step(&Action::Idle).unwrap();
        let out = sim.step(&Action::Idle).unwrap();
        assert_eq!(out.observation.arrived_events.len(), 1);
        assert_eq!(sim.state().pending_events.len(), 1);
        let out = sim
            .execute(&Action::move_to(NodeId::new("room_103"), TravelMethod::Walk))
            .unwrap();
        assert_eq!(out.extrinsic_reward, 1.0);
        assert!(out.completed_event.is_some());
        assert!(sim.state().pending_events.is_empty());
    }

    #[test]
    fn affection_request_completes_at_home_only() {
        let mut cfg = quiet_config();
        cfg.events.push(ScheduledEvent {
            tick: 0,
            text: "come cuddle".into(),
            category: EventCategory::AffectionRequest,
        });
        let mut sim = Simulator::new(cfg, 7).unwrap();
        assert_eq!(sim.state().pending_events.len(), 1);
        // Away from home, affection does not complete the request.
        sim.execute(&Action::move_to(NodeId::new("room_102"), TravelMethod::Walk))
            .unwrap();
        let out = sim.step(&Action::Nuzzle).unwrap();
        assert_eq!(out.extrinsic_reward, 0.0);
        assert_eq!(sim.state().pending_events.len(), 1);
        // Back home it does.
        sim.execute(&Action::move_to(NodeId::new("room_101"), TravelMethod::Walk))
            .unwrap();
        let out = sim.step(&Action::Cuddle).unwrap();
        assert_eq!(out.extrinsic_reward, 1.0);
        assert!(sim.state().pending_events.is_empty());
    }

    #[test]
    fn energy_bookkeeping_is_exact() {
        let mut sim = Simulator::new(SimConfig::builtin_default(), 11).unwrap();
        let initial = sim.state().battery.units() as i64;
        let script = [
            Action::Wander,
            Action::ExpressHappy,
            Action::move_to(NodeId::new("room_303"), TravelMethod::Stairs),
            Action::move_to(NodeId::new("room_101"), TravelMethod::Elevator),
            Action::LieDown,
            Action::LieDown,
            Action::Think,
        ];
        let mut spent = 0i64;
        for a in &script {
            let out = sim.execute(a).unwrap();
            spent += out.resources.energy_units;
        }
        let finl = sim.state().battery.units() as i64;
        assert_eq!(initial - spent, finl);
    }
}
