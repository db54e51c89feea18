//! The sandbox simulator: deterministic, seeded dynamics over the building
//! graph, with battery, temperature, charging, the elevator state machine
//! and scheduled user events.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::action::{action_category, Action, ActionKind, Category, TravelMethod};
use super::command::parse_command;
use super::config::{ConfigError, CostUnits, SimConfig};
use super::elevator::{ElevatorFsm, ElevatorPhase};
use super::map::{BuildingMap, NodeId};
use super::state::{
    BatteryLevel, EventCategory, ExecOutcome, Observation, Outcome, Resources, StepOutcome,
    UserEvent, WorldState,
};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("episode is over (battery {battery_percent}%, clock {clock})")]
    EpisodeOver { battery_percent: f64, clock: u32 },
    #[error("agent is at `{at}`, not at an elevator node")]
    NotAtElevator { at: NodeId },
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
}

/// Immutable per-episode context shared between the live simulator and
/// planning copies.
#[derive(Debug)]
pub struct SimContext {
    pub config: SimConfig,
    pub costs: CostUnits,
    pub map: BuildingMap,
}

impl SimContext {
    pub fn new(config: SimConfig) -> Result<Arc<Self>, ConfigError> {
        let costs = config.validate()?;
        let map = config.building();
        Ok(Arc::new(SimContext { config, costs, map }))
    }

    pub fn home(&self) -> &NodeId {
        &self.config.map.home
    }

    pub fn charger(&self) -> &NodeId {
        &self.config.map.charger
    }

    pub fn category_of(&self, action: &Action) -> Category {
        action_category(action, self.home())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum LegKind {
    Walk { dest: NodeId, dest_floor: i32 },
    ElevatorPhase { phase: ElevatorPhase, target_floor: i32 },
    Stairs { to_floor: i32 },
}

#[derive(Debug, Clone)]
struct Leg {
    kind: LegKind,
    ticks_left: u32,
    started: bool,
}

#[derive(Debug, Clone)]
struct Journey {
    action: Action,
    legs: Vec<Leg>,
    current: usize,
}

/// One seeded episode of the sandbox.
#[derive(Debug, Clone)]
pub struct Simulator {
    ctx: Arc<SimContext>,
    state: WorldState,
    rng: ChaCha8Rng,
    journey: Option<Journey>,
    /// Scheduled events not yet delivered (sorted by tick, cursor-advanced).
    schedule: Arc<Vec<UserEvent>>,
    schedule_cursor: usize,
}

impl Simulator {
    /// Starts a fresh episode. Identical `(config, seed)` produce
    /// bit-identical initial states and trajectories.
    pub fn new(config: SimConfig, seed: u64) -> Result<Self, SimError> {
        let ctx = SimContext::new(config)?;
        Ok(Self::with_context(ctx, seed))
    }

    pub fn with_context(ctx: Arc<SimContext>, seed: u64) -> Self {
        let mut schedule: Vec<UserEvent> = ctx
            .config
            .events
            .iter()
            .map(|e| UserEvent {
                tick: e.tick,
                text: e.text.clone(),
                category: e.category,
            })
            .collect();
        schedule.sort_by_key(|e| e.tick);

        let home = ctx.home().clone();
        let floor = ctx.map.floor_of(&home).expect("home validated");
        let mut state = WorldState {
            battery: BatteryLevel::full(),
            motor_temp: ctx.config.temperature.ambient,
            location: home,
            floor,
            clock: 0,
            mood: 0.0,
            pending_events: Vec::new(),
            charging: false,
        };
        // Events scheduled for tick 0 are already waiting when the day starts.
        let mut cursor = 0;
        while cursor < schedule.len() && schedule[cursor].tick == 0 {
            state.pending_events.push(schedule[cursor].clone());
            cursor += 1;
        }
        Simulator {
            ctx,
            state,
            rng: ChaCha8Rng::seed_from_u64(seed),
            journey: None,
            schedule: Arc::new(schedule),
            schedule_cursor: cursor,
        }
    }

    /// A planning copy: same dynamics, its own RNG, no scheduled-event
    /// delivery (the future schedule is hidden from the planner).
    pub fn planning_copy(ctx: Arc<SimContext>, state: WorldState, seed: u64) -> Self {
        Simulator {
            ctx,
            state,
            rng: ChaCha8Rng::seed_from_u64(seed),
            journey: None,
            schedule: Arc::new(Vec::new()),
            schedule_cursor: 0,
        }
    }

    pub fn context(&self) -> &Arc<SimContext> {
        &self.ctx
    }

    pub fn state(&self) -> &WorldState {
        &self.state
    }

    #[cfg(test)]
    pub(crate) fn state_mut_for_tests(&mut self) -> &mut WorldState {
        &mut self.state
    }

    /// Exchanges the simulator's RNG with the caller's, so planning copies
    /// can draw from (and return) a shared search stream.
    pub fn swap_rng(&mut self, rng: &mut ChaCha8Rng) {
        std::mem::swap(&mut self.rng, rng);
    }

    pub fn is_terminal(&self) -> bool {
        is_terminal(&self.state, &self.ctx.config)
    }

    fn check_live(&self) -> Result<(), SimError> {
        if self.is_terminal() {
            return Err(SimError::EpisodeOver {
                battery_percent: self.state.battery.percent(),
                clock: self.state.clock,
            });
        }
        Ok(())
    }

    /// Advances the world by exactly one tick under `action`.
    ///
    /// Multi-tick actions (`move_to`) report `Outcome::Partial` until the
    /// journey completes or aborts; callers continue by passing the same
    /// action again. Passing a different action cancels the journey.
    pub fn step(&mut self, action: &Action) -> Result<StepOutcome, SimError> {
        self.check_live()?;
        let pre = self.state.clone();

        if let Some(j) = &self.journey {
            if &j.action != action {
                self.journey = None;
            }
        }

        let mut tick = TickEffects::default();
        match action {
            Action::MoveTo { location, method } => {
                if self.journey.is_none() {
                    self.journey = Some(self.plan_journey(action, location, *method)?);
                }
                self.journey_tick(&mut tick);
            }
            single => self.single_tick(single, &mut tick),
        }

        Ok(self.finish_tick(pre, tick))
    }

    /// Runs `action` to completion, aggregating all of its ticks.
    pub fn execute(&mut self, action: &Action) -> Result<ExecOutcome, SimError> {
        let pre_state = self.state.clone();
        let start_tick = pre_state.clock;
        let mut extrinsic = 0.0;
        let mut ticks = 0u32;
        let mut completed = None;
        let mut arrived = Vec::new();
        let outcome = loop {
            let step = self.step(action)?;
            extrinsic += step.extrinsic_reward;
            ticks += step.resources.time_ticks;
            arrived.extend(step.observation.arrived_events);
            if step.observation.completed_event.is_some() {
                completed = step.observation.completed_event;
            }
            match step.outcome {
                Outcome::Partial if !self.is_terminal() => continue,
                Outcome::Partial => break Outcome::Failure,
                done => break done,
            }
        };
        let post_state = self.state.clone();
        let energy = pre_state.battery.units() as i64 - post_state.battery.units() as i64;
        Ok(ExecOutcome {
            action: action.clone(),
            start_tick,
            pre_state,
            post_state,
            outcome,
            extrinsic_reward: extrinsic,
            resources: Resources {
                time_ticks: ticks,
                energy_units: energy,
            },
            completed_event: completed,
            arrived_events: arrived,
        })
    }

    /// Executes one phase of an elevator ride. The agent must currently be
    /// at an elevator node. On success the FSM advances one phase (the final
    /// phase relocates the agent to the target floor); a seeded failure draw
    /// aborts the ride and leaves the agent on the origin floor.
    pub fn elevator_step(
        &mut self,
        fsm: ElevatorFsm,
    ) -> Result<(ElevatorFsm, StepOutcome), SimError> {
        self.check_live()?;
        if !self.ctx.map.is_elevator(&self.state.location) {
            return Err(SimError::NotAtElevator {
                at: self.state.location.clone(),
            });
        }
        let pre = self.state.clone();
        let mut tick = TickEffects::default();
        let failed = self.rng.gen::<f64>() < self.ctx.config.failures.elevator_phase;
        tick.cost_units = self.ctx.costs.elevator_per_tick;
        tick.motor_active = true;
        let next_fsm;
        if failed {
            tick.outcome = Outcome::Failure;
            next_fsm = fsm;
        } else if fsm.is_final_phase() {
            self.state.floor = fsm.target_floor;
            self.state.location = self.ctx.map.elevator_on(fsm.target_floor);
            tick.outcome = Outcome::Success;
            next_fsm = fsm;
        } else {
            tick.outcome = Outcome::Partial;
            next_fsm = ElevatorFsm {
                phase: fsm.phase.next().expect("non-final phase has a successor"),
                target_floor: fsm.target_floor,
            };
        }
        let outcome = self.finish_tick(pre, tick);
        Ok((next_fsm, outcome))
    }

    fn plan_journey(
        &self,
        action: &Action,
        target: &NodeId,
        method: TravelMethod,
    ) -> Result<Journey, SimError> {
        let map = &self.ctx.map;
        let target_floor = map
            .floor_of(target)
            .ok_or_else(|| SimError::UnknownNode(target.clone()))?;
        let here = &self.state.location;
        let here_floor = self.state.floor;
        let walk_ticks = self.ctx.config.map.walk_ticks;
        let mut legs = Vec::new();

        let walk_leg = |dest: &NodeId, floor: i32| Leg {
            kind: LegKind::Walk {
                dest: dest.clone(),
                dest_floor: floor,
            },
            ticks_left: walk_ticks,
            started: false,
        };

        if here_floor == target_floor {
            // Same floor: plain walk regardless of method.
            legs.push(walk_leg(target, target_floor));
        } else {
            match method {
                TravelMethod::Walk => {
                    // Cannot walk across floors; the attempt fails on the spot.
                    legs.clear();
                }
                TravelMethod::Elevator => {
                    let lobby = map.elevator_on(here_floor);
                    if here != &lobby {
                        legs.push(walk_leg(&lobby, here_floor));
                    }
                    for phase in ElevatorPhase::ORDER {
                        legs.push(Leg {
                            kind: LegKind::ElevatorPhase {
                                phase,
                                target_floor,
                            },
                            ticks_left: self.ctx.config.map.elevator_ticks_per_phase,
                            started: false,
                        });
                    }
                    let exit = map.elevator_on(target_floor);
                    if target != &exit {
                        legs.push(walk_leg(target, target_floor));
                    }
                }
                TravelMethod::Stairs => {
                    let base = map.stairs_on(here_floor);
                    if here != &base {
                        legs.push(walk_leg(&base, here_floor));
                    }
                    let dir = if target_floor > here_floor { 1 } else { -1 };
                    let mut f = here_floor;
                    while f != target_floor {
                        f += dir;
                        legs.push(Leg {
                            kind: LegKind::Stairs { to_floor: f },
                            ticks_left: self.ctx.config.map.stairs_ticks_per_floor,
                            started: false,
                        });
                    }
                    let top = map.stairs_on(target_floor);
                    if target != &top {
                        legs.push(walk_leg(target, target_floor));
                    }
                }
            }
        }

        Ok(Journey {
            action: action.clone(),
            legs,
            current: 0,
        })
    }

    fn journey_tick(&mut self, tick: &mut TickEffects) {
        let mut journey = self.journey.take().expect("journey planned");

        // Walking across floors was rejected at planning time (empty legs
        // on a cross-floor walk); the attempt consumes one tick and fails.
        // An empty plan for an already-reached target succeeds immediately.
        if journey.legs.is_empty() {
            let (target, _) = journey_target(&journey.action);
            tick.cost_units = self.ctx.costs.walk_per_tick;
            tick.motor_active = true;
            if &self.state.location == target {
                tick.outcome = Outcome::Success;
                tick.arrived_at = Some(target.clone());
            } else {
                tick.outcome = Outcome::Failure;
            }
            return;
        }

        let leg = &mut journey.legs[journey.current];
        tick.cost_units = match leg.kind {
            LegKind::Walk { .. } => self.ctx.costs.walk_per_tick,
            LegKind::ElevatorPhase { .. } => self.ctx.costs.elevator_per_tick,
            LegKind::Stairs { .. } => self.ctx.costs.stairs_per_tick,
        };
        tick.motor_active = true;

        if !leg.started {
            leg.started = true;
            let fail_prob = match leg.kind {
                LegKind::ElevatorPhase { .. } => Some(self.ctx.config.failures.elevator_phase),
                LegKind::Stairs { .. } => Some(self.ctx.config.failures.stairs_leg),
                LegKind::Walk { .. } => None,
            };
            if let Some(p) = fail_prob {
                if self.rng.gen::<f64>() < p {
                    // Ride or climb aborts; the agent holds its position.
                    tick.outcome = Outcome::Failure;
                    return;
                }
            }
        }

        leg.ticks_left -= 1;
        if leg.ticks_left == 0 {
            match &leg.kind {
                LegKind::Walk { dest, dest_floor } => {
                    self.state.location = dest.clone();
                    self.state.floor = *dest_floor;
                }
                LegKind::ElevatorPhase {
                    phase,
                    target_floor,
                } => {
                    if *phase == ElevatorPhase::ExitRelocalize {
                        self.state.floor = *target_floor;
                        self.state.location = self.ctx.map.elevator_on(*target_floor);
                    }
                }
                LegKind::Stairs { to_floor } => {
                    self.state.floor = *to_floor;
                    self.state.location = self.ctx.map.stairs_on(*to_floor);
                }
            }
            journey.current += 1;
        }

        if journey.current == journey.legs.len() {
            tick.outcome = Outcome::Success;
            tick.arrived_at = Some(self.state.location.clone());
        } else {
            tick.outcome = Outcome::Partial;
            self.journey = Some(journey);
        }
    }

    fn single_tick(&mut self, action: &Action, tick: &mut TickEffects) {
        let kind = action.kind();
        let docked = kind == ActionKind::LieDown && &self.state.location == self.ctx.charger();
        if docked {
            tick.charging = true;
        } else {
            tick.cost_units = match kind {
                ActionKind::Idle => self.ctx.costs.idle,
                ActionKind::Think => self.ctx.costs.think,
                k if k.is_locomotion() => self.ctx.costs.locomotion,
                k if k.is_expression() => self.ctx.costs.expression,
                _ => unreachable!("move_to handled separately"),
            };
        }
        let category = self.ctx.category_of(action);
        tick.motor_active = !(category == Category::Rest || kind == ActionKind::Think);
        tick.outcome = Outcome::Success;

        if category == Category::Affection && &self.state.location == self.ctx.home() {
            if let Some(pos) = self
                .state
                .pending_events
                .iter()
                .position(|e| e.category == EventCategory::AffectionRequest)
            {
                tick.completed_event = Some(self.state.pending_events.remove(pos));
            }
        }
        if category == Category::Affection || category == Category::PositiveEmotion {
            tick.mood_delta += self.ctx.config.mood.on_expression;
        }
    }

    /// Applies battery/temperature/mood/clock bookkeeping shared by every
    /// tick, delivers scheduled events, and assembles the outcome.
    fn finish_tick(&mut self, pre: WorldState, mut tick: TickEffects) -> StepOutcome {
        // Battery.
        if tick.charging {
            self.state.battery = self
                .state
                .battery
                .saturating_add(self.ctx.costs.charge_per_tick);
        } else {
            self.state.battery = self.state.battery.saturating_sub(tick.cost_units);
        }
        self.state.charging = tick.charging;

        // A drained battery ends the episode as a failure.
        let mut extrinsic = 0.0;
        if self.state.battery.is_empty() && !pre.battery.is_empty() {
            extrinsic += self.ctx.config.extrinsic.episode_failure;
            tick.outcome = Outcome::Failure;
            tick.mood_delta += self.ctx.config.mood.on_failure;
            self.journey = None;
        }

        // Arrival can complete a pending navigation request.
        if let Some(arrived) = &tick.arrived_at {
            if tick.completed_event.is_none() {
                if let Some(pos) = self.state.pending_events.iter().position(|e| {
                    matches!(
                        e.category,
                        EventCategory::ExplorationRequest | EventCategory::TaskRequest
                    ) && parse_command(&e.text, &self.ctx.map).target.as_ref() == Some(arrived)
                }) {
                    tick.completed_event = Some(self.state.pending_events.remove(pos));
                }
            }
        }
        if tick.completed_event.is_some() {
            extrinsic += self.ctx.config.extrinsic.task_completion;
            tick.mood_delta += self.ctx.config.mood.on_task_completion;
        }
        if tick.outcome == Outcome::Failure && !self.state.battery.is_empty() {
            tick.mood_delta += self.ctx.config.mood.on_failure;
        }

        // Temperature.
        let t = &self.ctx.config.temperature;
        if tick.motor_active && !tick.charging {
            self.state.motor_temp = (self.state.motor_temp + t.rise_per_tick).min(t.max);
        } else {
            self.state.motor_temp = (self.state.motor_temp - t.recovery_per_tick).max(t.ambient);
        }

        // Mood: event delta, then linear pull toward neutral.
        let decay = self.ctx.config.mood.decay_per_tick;
        let mut mood = self.state.mood + tick.mood_delta;
        if mood > 0.0 {
            mood = (mood - decay).max(0.0);
        } else if mood < 0.0 {
            mood = (mood + decay).min(0.0);
        }
        self.state.mood = mood.clamp(-1.0, 1.0);

        // Clock advances exactly one tick; scheduled events then arrive.
        self.state.clock += 1;
        let mut arrived_events = Vec::new();
        while self.schedule_cursor < self.schedule.len()
            && self.schedule[self.schedule_cursor].tick <= self.state.clock
        {
            let ev = self.schedule[self.schedule_cursor].clone();
            self.state.pending_events.push(ev.clone());
            arrived_events.push(ev);
            self.schedule_cursor += 1;
        }

        let energy = pre.battery.units() as i64 - self.state.battery.units() as i64;
        StepOutcome {
            post_state: self.state.clone(),
            observation: Observation {
                state: self.state.clone(),
                arrived_events,
                completed_event: tick.completed_event.clone(),
            },
            extrinsic_reward: extrinsic,
            outcome: tick.outcome,
            resources: Resources {
                time_ticks: 1,
                energy_units: energy,
            },
        }
    }
}

fn journey_target(action: &Action) -> (&NodeId, TravelMethod) {
    match action {
        Action::MoveTo { location, method } => (location, *method),
        _ => unreachable!("journeys only exist for move_to"),
    }
}

/// True when the episode has ended: a drained battery or the end of the day.
pub fn is_terminal(state: &WorldState, config: &SimConfig) -> bool {
    state.battery.is_empty() || state.clock >= config.day_ticks
}

#[derive(Debug)]
struct TickEffects {
    cost_units: u32,
    charging: bool,
    motor_active: bool,
    outcome: Outcome,
    mood_delta: f64,
    completed_event: Option<UserEvent>,
    arrived_at: Option<NodeId>,
}

impl Default for TickEffects {
    fn default() -> Self {
        TickEffects {
            cost_units: 0,
            charging: false,
            motor_active: false,
            outcome: Outcome::Success,
            mood_delta: 0.0,
            completed_event: None,
            arrived_at: None,
        }
    }
}
