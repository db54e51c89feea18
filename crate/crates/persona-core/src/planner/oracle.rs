//! Prior and value oracles.
//!
//! The deterministic rule-based oracle ranks candidate actions by the
//! current intrinsic-reward spec and estimates values with a greedy
//! heuristic rollout through the model. An LLM could stand behind the same
//! two traits; every hermetic run uses this one.

use rand_chacha::ChaCha8Rng;

use crate::reward::{RewardInputs, RewardSpec};
use crate::sim::{parse_command, Action, ActionKind, EventCategory, NodeId, TravelMethod};

use super::model::{Belief, SandboxModel};
use super::{BeliefModel, PlannerConfig, PriorOracle, ValueOracle};

/// Prior oracle defined by a closure; handy for tests and toy problems.
pub struct FnPriorOracle<F>(pub F);

impl<M, F> PriorOracle<M> for FnPriorOracle<F>
where
    M: BeliefModel,
    F: Fn(&M::Belief) -> Result<Vec<(M::Action, f64)>, String>,
{
    fn candidates(&self, _model: &M, belief: &M::Belief) -> Result<Vec<(M::Action, f64)>, String> {
        (self.0)(belief)
    }
}

/// Value oracle that always answers the same number.
pub struct ConstValueOracle(pub f64);

impl<M: BeliefModel> ValueOracle<M> for ConstValueOracle {
    fn value(
        &self,
        _model: &M,
        _belief: &M::Belief,
        _rng: &mut ChaCha8Rng,
        _config: &PlannerConfig,
    ) -> Result<f64, String> {
        Ok(self.0)
    }
}

/// How the rule oracle estimates leaf values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RolloutPolicy {
    /// Greedy one-step-lookahead rollout through the model.
    GreedyEnvironment,
    /// No rollout; leaves score zero (pure tree search).
    None,
}

/// The deterministic rule-based oracle: priors are a softmax over the
/// intrinsic spec's scores; values come from a discounted greedy rollout in
/// the simulator dynamics.
#[derive(Debug, Clone)]
pub struct RuleOracle {
    pub spec: RewardSpec,
    pub rollout: RolloutPolicy,
    /// Softmax temperature over intrinsic scores.
    pub temperature: f64,
}

impl RuleOracle {
    pub fn new(spec: RewardSpec) -> Self {
        RuleOracle {
            spec,
            rollout: RolloutPolicy::GreedyEnvironment,
            temperature: 0.5,
        }
    }

    fn intrinsic(&self, model: &SandboxModel, belief: &Belief, action: &Action) -> f64 {
        self.spec.evaluate_intrinsic(&RewardInputs {
            state: &belief.observed,
            action,
            home: model.home(),
        })
    }

    /// The full candidate set for a belief: every single-tick kind, plus
    /// navigation candidates for home, pending commands and nearby rooms.
    fn enumerate(&self, model: &SandboxModel, belief: &Belief) -> Vec<Action> {
        let ctx = model.context();
        let state = &belief.observed;
        let mut actions: Vec<Action> = ActionKind::ALL
            .iter()
            .filter_map(|k| Action::from_kind(*k))
            .collect();

        let here = &state.location;
        let home = ctx.home().clone();
        let best_method = |target: &NodeId| -> TravelMethod {
            let target_floor = ctx.map.floor_of(target).unwrap_or(state.floor);
            if target_floor == state.floor {
                TravelMethod::Walk
            } else {
                TravelMethod::Elevator
            }
        };

        // Returning home, by the cheap route and (cross-floor) the stairs
        // alternative.
        if here != &home {
            actions.push(Action::move_to(home.clone(), best_method(&home)));
            if ctx.map.floor_of(&home) != Some(state.floor) {
                actions.push(Action::move_to(home.clone(), TravelMethod::Stairs));
            }
        }

        // Every pending navigation command contributes its target.
        for ev in &state.pending_events {
            if matches!(
                ev.category,
                EventCategory::ExplorationRequest | EventCategory::TaskRequest
            ) {
                let parsed = parse_command(&ev.text, &ctx.map);
                if let Some(target) = parsed.target {
                    if &target != here {
                        let method = match parsed.method {
                            Some(m)
                                if m != TravelMethod::Walk
                                    || ctx.map.floor_of(&target) == Some(state.floor) =>
                            {
                                m
                            }
                            _ => best_method(&target),
                        };
                        let action = Action::move_to(target, method);
                        if !actions.contains(&action) {
                            actions.push(action);
                        }
                    }
                }
            }
        }

        // A couple of self-directed excursions: the next room around on this
        // floor, and the matching room one floor over.
        let rooms: Vec<&NodeId> = ctx
            .map
            .rooms()
            .filter(|n| n.floor == state.floor && &n.id != here)
            .map(|n| &n.id)
            .collect();
        if let Some(room) = rooms.first() {
            let action = Action::move_to((*room).clone(), TravelMethod::Walk);
            if !actions.contains(&action) {
                actions.push(action);
            }
        }
        let other_floor = if state.floor < ctx.map.floors() {
            state.floor + 1
        } else {
            state.floor - 1
        };
        if other_floor >= 1 {
            if let Some(room) = ctx.map.rooms().find(|n| n.floor == other_floor) {
                let action = Action::move_to(room.id.clone(), TravelMethod::Elevator);
                if !actions.contains(&action) {
                    actions.push(action);
                }
            }
        }

        actions
    }
}

impl PriorOracle<SandboxModel> for RuleOracle {
    fn candidates(
        &self,
        model: &SandboxModel,
        belief: &Belief,
    ) -> Result<Vec<(Action, f64)>, String> {
        let actions = self.enumerate(model, belief);
        if actions.is_empty() {
            return Err("no candidate actions".to_string());
        }
        let scores: Vec<f64> = actions
            .iter()
            .map(|a| self.intrinsic(model, belief, a))
            .collect();
        // Softmax over scores; stable sort keeps enumeration order on ties.
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores
            .iter()
            .map(|s| ((s - max) / self.temperature).exp())
            .collect();
        let z: f64 = exps.iter().sum();
        let mut ranked: Vec<(Action, f64)> = actions
            .into_iter()
            .zip(exps)
            .map(|(a, e)| (a, e / z))
            .collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        Ok(ranked)
    }
}

impl ValueOracle<SandboxModel> for RuleOracle {
    fn value(
        &self,
        model: &SandboxModel,
        belief: &Belief,
        rng: &mut ChaCha8Rng,
        config: &PlannerConfig,
    ) -> Result<f64, String> {
        if self.rollout == RolloutPolicy::None {
            return Ok(0.0);
        }
        let mut b = belief.clone();
        let mut total = 0.0;
        let mut disc = 1.0;
        for _ in 0..config.rollout_depth {
            if model.is_terminal(&b) {
                total += disc * model.terminal_value(&b);
                return Ok(total);
            }
            // Greedy step: the action with the best immediate intrinsic
            // score (candidate list is already ranked).
            let action = self
                .candidates(model, &b)?
                .into_iter()
                .next()
                .map(|(a, _)| a)
                .ok_or_else(|| "empty rollout candidates".to_string())?;
            let transition = model.step(&b, &action, rng)?;
            let reward = self.intrinsic(model, &b, &action) + transition.extrinsic;
            total += disc * reward;
            disc *= config.discount.powi(transition.ticks.max(1) as i32);
            b = transition.next;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reward::{Provenance, RewardRule};
    use crate::sim::{SimConfig, Simulator};
    use rand::SeedableRng;

    fn oracle_with(rules: Vec<RewardRule>) -> (SandboxModel, Belief, RuleOracle) {
        let sim = Simulator::new(SimConfig::builtin_default(), 7).unwrap();
        let model = SandboxModel::new(sim.context().clone());
        let belief = Belief::new(sim.state().clone());
        (model, belief, RuleOracle::new(RewardSpec::new(rules)))
    }

    fn rule(id: &str, cond: &str, w: f64) -> RewardRule {
        RewardRule::new(id, cond, w, Provenance::PersonalityPreference).unwrap()
    }

    #[test]
    fn priors_are_a_distribution_and_ranked() {
        let (model, belief, oracle) = oracle_with(vec![rule("r", "category == rest", 1.0)]);
        let cands = oracle.candidates(&model, &belief).unwrap();
        let sum: f64 = cands.iter().map(|(_, p)| p).sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!(cands.windows(2).all(|w| w[0].1 >= w[1].1));
        assert!(cands.iter().all(|(_, p)| *p >= 0.0));
        // Rest-category actions outrank the others.
        let top_kind = cands[0].0.kind();
        assert!(
            matches!(
                top_kind,
                ActionKind::Idle
                    | ActionKind::Sit
                    | ActionKind::LieDown
                    | ActionKind::Stand
                    | ActionKind::Stretch
            ),
            "top candidate {top_kind:?}"
        );
    }

    #[test]
    fn pending_command_contributes_a_navigation_candidate() {
        let (model, mut belief, oracle) = oracle_with(vec![]);
        belief.observed.pending_events.push(crate::sim::UserEvent {
            tick: 10,
            text: "go to room_302 by elevator".into(),
            category: EventCategory::ExplorationRequest,
        });
        let cands = oracle.candidates(&model, &belief).unwrap();
        assert!(cands.iter().any(|(a, _)| matches!(
            a,
            Action::MoveTo { location, method }
                if location == &NodeId::new("room_302") && *method == TravelMethod::Elevator
        )));
    }

    #[test]
    fn greedy_rollout_accumulates_discounted_rewards() {
        let (model, belief, mut oracle) = oracle_with(vec![rule("r", "category == rest", 1.0)]);
        oracle.rollout = RolloutPolicy::GreedyEnvironment;
        let cfg = PlannerConfig {
            rollout_depth: 5,
            discount: 0.5,
            ..PlannerConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = oracle.value(&model, &belief, &mut rng, &cfg).unwrap();
        // Greedy policy rests every step: sum of 1.0 * 0.5^t for t in 0..5.
        let expected: f64 = (0..5).map(|t| 0.5f64.powi(t)).sum();
        assert!((v - expected).abs() < 1e-9, "v = {v}");
    }
}
