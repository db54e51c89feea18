//! The planner's generative model of the sandbox.
//!
//! Planning operates on beliefs: the exactly-observed physical state plus
//! the command history. Hidden information (failure draws, the rest of the
//! day's event schedule) is sampled by the model from the search's own RNG
//! stream, never from the environment's.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::sim::{
    EventCategory, NodeId, Outcome, SimContext, Simulator, UserEvent, WorldState,
};

use super::BeliefModel;

/// What the planner knows: the observed state and the events seen so far.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    pub observed: WorldState,
    pub event_history: Vec<UserEvent>,
}

impl Belief {
    pub fn new(observed: WorldState) -> Self {
        let event_history = observed.pending_events.clone();
        Belief {
            observed,
            event_history,
        }
    }

    /// The command currently awaiting a response, if any.
    pub fn pending_command(&self) -> Option<&UserEvent> {
        self.observed.pending_command()
    }

    /// Folds a new observation into the belief, keeping the event history.
    pub fn advance(&self, observed: WorldState, arrived: &[UserEvent]) -> Belief {
        let mut event_history = self.event_history.clone();
        event_history.extend(arrived.iter().cloned());
        Belief {
            observed,
            event_history,
        }
    }
}

/// Canonical hashable digest of a belief's planning-relevant content.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BeliefKey {
    battery_units: u32,
    temp_bits: u64,
    location: NodeId,
    floor: i32,
    clock: u32,
    mood_bits: u64,
    charging: bool,
    pending: Vec<(u32, EventCategory, String)>,
}

impl BeliefKey {
    pub fn of(state: &WorldState) -> Self {
        BeliefKey {
            battery_units: state.battery.units(),
            temp_bits: state.motor_temp.to_bits(),
            location: state.location.clone(),
            floor: state.floor,
            clock: state.clock,
            mood_bits: state.mood.to_bits(),
            charging: state.charging,
            pending: state
                .pending_events
                .iter()
                .map(|e| (e.tick, e.category, e.text.clone()))
                .collect(),
        }
    }
}

/// One sampled model transition.
#[derive(Debug, Clone)]
pub struct ModelTransition<B> {
    pub next: B,
    /// Extrinsic reward collected over the whole action (a multi-tick
    /// journey is one decision epoch).
    pub extrinsic: f64,
    pub outcome: Outcome,
    pub ticks: u32,
}

/// Generative model backed by the simulator dynamics, with scheduled-event
/// delivery disabled: the planner cannot see the future schedule.
#[derive(Debug, Clone)]
pub struct SandboxModel {
    ctx: Arc<SimContext>,
}

impl SandboxModel {
    pub fn new(ctx: Arc<SimContext>) -> Self {
        SandboxModel { ctx }
    }

    pub fn context(&self) -> &Arc<SimContext> {
        &self.ctx
    }

    pub fn home(&self) -> &NodeId {
        self.ctx.home()
    }
}

impl BeliefModel for SandboxModel {
    type Belief = Belief;
    type Action = crate::sim::Action;
    type Key = BeliefKey;

    fn key(&self, belief: &Self::Belief) -> Self::Key {
        BeliefKey::of(&belief.observed)
    }

    fn is_terminal(&self, belief: &Self::Belief) -> bool {
        crate::sim::is_terminal(&belief.observed, &self.ctx.config)
    }

    fn step(
        &self,
        belief: &Self::Belief,
        action: &Self::Action,
        rng: &mut ChaCha8Rng,
    ) -> Result<ModelTransition<Self::Belief>, String> {
        let mut sim = Simulator::planning_copy(self.ctx.clone(), belief.observed.clone(), 0);
        // Borrow the caller's stream so every draw stays on it.
        sim.swap_rng(rng);
        let exec = sim.execute(action);
        sim.swap_rng(rng);
        let exec = exec.map_err(|e| e.to_string())?;
        Ok(ModelTransition {
            next: Belief {
                observed: exec.post_state.clone(),
                event_history: belief.event_history.clone(),
            },
            extrinsic: exec.extrinsic_reward,
            outcome: exec.outcome,
            ticks: exec.resources.time_ticks,
        })
    }
}
