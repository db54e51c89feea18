//! Fixed scenario states for controlled action-preference trials.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::planner::{mcts_search, Belief, PlannerConfig, RuleOracle, SandboxModel};
use crate::reward::{RewardInputs, RewardSpec};
use crate::sim::{
    BatteryLevel, Category, EventCategory, NodeId, SimContext, UserEvent, WorldState,
};

use super::{splitmix64, HarnessError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioId {
    A,
    B,
    C,
}

impl ScenarioId {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Some(ScenarioId::A),
            "B" => Some(ScenarioId::B),
            "C" => Some(ScenarioId::C),
            _ => None,
        }
    }
}

/// One fixed state input presented identically to every personality.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: ScenarioId,
    pub state: WorldState,
}

/// The three shipped scenarios:
///
/// * A: high battery, good mood, at home, nothing pending;
/// * B: an exploration command under low battery;
/// * C: an affection request while away from home.
pub fn builtin_scenarios(ctx: &SimContext) -> Vec<Scenario> {
    let base = |battery: f64, mood: f64, location: &str, floor: i32| WorldState {
        battery: BatteryLevel::from_percent(battery),
        motor_temp: ctx.config.temperature.ambient,
        location: NodeId::new(location),
        floor,
        clock: 600,
        mood,
        pending_events: Vec::new(),
        charging: false,
    };
    let mut b_state = base(42.0, 0.0, "room_103", 1);
    b_state.pending_events.push(UserEvent {
        tick: 600,
        text: "go explore room_302 by elevator".into(),
        category: EventCategory::ExplorationRequest,
    });
    let mut c_state = base(70.0, 0.2, "room_202", 2);
    c_state.pending_events.push(UserEvent {
        tick: 600,
        text: "come cuddle with me".into(),
        category: EventCategory::AffectionRequest,
    });
    vec![
        Scenario {
            id: ScenarioId::A,
            state: base(95.0, 0.8, "room_101", 1),
        },
        Scenario {
            id: ScenarioId::B,
            state: b_state,
        },
        Scenario {
            id: ScenarioId::C,
            state: c_state,
        },
    ]
}

pub fn scenario(ctx: &SimContext, id: ScenarioId) -> Scenario {
    builtin_scenarios(ctx)
        .into_iter()
        .find(|s| s.id == id)
        .expect("all scenario ids shipped")
}

/// Runs the planner `n` times on the fixed scenario with distinct seeds and
/// returns the per-category counts of the selected root actions.
pub fn action_preference_trial(
    ctx: &Arc<SimContext>,
    spec: &RewardSpec,
    scenario: &Scenario,
    n: u32,
    base_seed: u64,
    planner: &PlannerConfig,
) -> Result<BTreeMap<Category, u32>, HarnessError> {
    if n < 1 {
        return Err(HarnessError::Config("trial count must be >= 1".into()));
    }
    let model = SandboxModel::new(ctx.clone());
    let oracle = RuleOracle::new(spec.clone());
    let home = ctx.home().clone();
    let reward_fn = |b: &Belief, a: &crate::sim::Action, extrinsic: f64| {
        oracle.spec.evaluate_intrinsic(&RewardInputs {
            state: &b.observed,
            action: a,
            home: &home,
        }) + extrinsic
    };
    let belief = Belief::new(scenario.state.clone());
    let mut counts: BTreeMap<Category, u32> = BTreeMap::new();
    for trial in 0..n {
        let seed = splitmix64(base_seed ^ ((trial as u64 + 1) << 24));
        let (action, _) = mcts_search(&model, &belief, &oracle, &oracle, &reward_fn, planner, seed)?;
        *counts.entry(ctx.category_of(&action)).or_insert(0) += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::SimConfig;

    #[test]
    fn scenarios_are_valid_states() {
        let ctx = SimContext::new(SimConfig::builtin_default()).unwrap();
        for s in builtin_scenarios(&ctx) {
            assert!(ctx.map.contains(&s.state.location), "{:?}", s.id);
            assert!(s.state.battery.percent() <= 100.0);
            assert!(!crate::sim::is_terminal(&s.state, &ctx.config));
        }
    }

    #[test]
    fn tied_rewards_still_report_deterministically() {
        // A spec with no rules ties every action; the trial must complete
        // and be reproducible.
        let ctx = SimContext::new(SimConfig::builtin_default()).unwrap();
        let spec = RewardSpec::new(vec![]);
        let sc = scenario(&ctx, ScenarioId::A);
        let planner = PlannerConfig {
            iteration_budget: 40,
            rollout_depth: 4,
            ..PlannerConfig::default()
        };
        let a = action_preference_trial(&ctx, &spec, &sc, 5, 7, &planner).unwrap();
        let b = action_preference_trial(&ctx, &spec, &sc, 5, 7, &planner).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values().sum::<u32>(), 5);
    }
}
