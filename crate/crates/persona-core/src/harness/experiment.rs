//! The day loop and the multi-day experiment around it.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::memory::{summarize_day, DailySummary, EpisodicRecord, LongTermTrace, MemoryStore, TraceEntry};
use crate::personality::{CapabilityCatalog, PersonalityProfile};
use crate::planner::{
    mcts_search, Belief, DistilledPolicy, PlannerConfig, RuleOracle, SandboxModel,
};
use crate::reflect::{ReflectionInput, Reflector};
use crate::reward::{RewardInputs, RewardSpec};
use crate::sim::{Category, SimContext, Simulator};

use super::{splitmix64, HarnessError};

/// Architecture variant under measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchMode {
    /// One big model does everything: a simulated cloud call per decision.
    AllCloudSim,
    /// Everything on-device with a capacity-limited reflector.
    AllEdgeSim,
    /// Deliberation on-device, one reflection call per day.
    Hybrid,
}

impl ArchMode {
    pub fn name(self) -> &'static str {
        match self {
            ArchMode::AllCloudSim => "all_cloud_sim",
            ArchMode::AllEdgeSim => "all_edge_sim",
            ArchMode::Hybrid => "hybrid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all_cloud_sim" | "all-cloud-sim" | "cloud" => Some(ArchMode::AllCloudSim),
            "all_edge_sim" | "all-edge-sim" | "edge" => Some(ArchMode::AllEdgeSim),
            "hybrid" => Some(ArchMode::Hybrid),
            _ => None,
        }
    }
}

/// How per-tick decisions are made.
pub enum DecisionBackend {
    /// Full deliberation: belief-state MCTS under the rule oracle.
    Mcts { config: PlannerConfig },
    /// The distilled two-head policy (no search, no network).
    Distilled { policy: DistilledPolicy },
}

/// Harness-level knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarnessConfig {
    /// Planner settings for in-day decisions. A smaller budget than the
    /// planner's bench default keeps full-day deliberation inside the
    /// experiment time budgets.
    pub decision_planner: PlannerConfig,
    /// Audit the reward wiring every n-th decision.
    pub audit_every: u32,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            decision_planner: PlannerConfig {
                iteration_budget: 64,
                rollout_depth: 12,
                ..PlannerConfig::default()
            },
            audit_every: 97,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct LatencyStats {
    pub count: u64,
    pub mean_seconds: f64,
    pub max_seconds: f64,
}

impl LatencyStats {
    pub fn record(&mut self, seconds: f64) {
        self.count += 1;
        self.mean_seconds += (seconds - self.mean_seconds) / self.count as f64;
        self.max_seconds = self.max_seconds.max(seconds);
    }
}

/// Per-day results.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DayReport {
    pub day: u32,
    pub survival_ticks: u32,
    pub final_battery_percent: f64,
    pub min_battery_percent: f64,
    /// Category shares in percent; sums to 100 within rounding.
    pub category_shares: BTreeMap<Category, f64>,
    pub records: u64,
    pub failures: usize,
    pub goal_version: u32,
    pub spec_version: u32,
}

/// The experiment's machine-readable result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub personality: String,
    pub mode: ArchMode,
    pub seed: u64,
    pub reflector: String,
    pub days: Vec<DayReport>,
    /// Reflection (cloud) calls divided by completed days.
    pub chat_calls_per_day: f64,
    /// Simulated-cloud decision calls per day (all_cloud_sim accounting).
    pub decision_calls_per_day: f64,
    /// Wall-clock decision latency, measured in-process. Never persisted:
    /// run directories stay byte-deterministic.
    #[serde(skip)]
    pub decision_latency: Option<LatencyStats>,
}

impl ExperimentReport {
    pub fn day(&self, day: u32) -> &DayReport {
        &self.days[(day - 1) as usize]
    }
}

/// Seed for one simulated day of an experiment.
pub fn day_seed(seed: u64, day: u32) -> u64 {
    splitmix64(seed ^ (day as u64).wrapping_mul(0xA076_1D64_78BD_642F))
}

fn decision_seed(day_seed: u64, clock: u32) -> u64 {
    splitmix64(day_seed ^ 0x9E37 ^ ((clock as u64) << 17))
}

/// Everything `run_day` needs.
pub struct ExperimentSetup {
    pub ctx: Arc<SimContext>,
    pub harness: HarnessConfig,
}

/// What one day produced.
pub struct DayOutcome {
    pub summary: DailySummary,
    pub survival_ticks: u32,
    pub decisions: u64,
    pub decision_latency: LatencyStats,
}

/// Runs one simulated day: plan at every decision point (multi-tick actions
/// run to completion), execute, and record every action to the store.
#[allow(clippy::too_many_arguments)]
pub fn run_day(
    setup: &ExperimentSetup,
    day: u32,
    seed: u64,
    goals: &crate::reflect::GoalSet,
    spec: &RewardSpec,
    backend: &DecisionBackend,
    store: &mut MemoryStore,
) -> Result<DayOutcome, HarnessError> {
    let ctx = &setup.ctx;
    let dseed = day_seed(seed, day);
    let mut sim = Simulator::with_context(ctx.clone(), dseed);
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

    // Hints of the active daily goals, parsed once for attribution tags.
    let goal_hints: Vec<(usize, crate::reward::Condition)> = goals
        .daily_goals
        .iter()
        .enumerate()
        .filter_map(|(i, g)| {
            g.machine_hint
                .as_ref()
                .and_then(|h| crate::reward::Condition::parse(h).ok())
                .map(|c| (i + 1, c))
        })
        .collect();

    let mut belief = Belief::new(sim.state().clone());
    let mut decisions = 0u64;
    let mut latency = LatencyStats::default();

    while !sim.is_terminal() {
        let clock = sim.state().clock;
        let started = Instant::now();
        let action = match backend {
            DecisionBackend::Mcts { config } => {
                let (action, _) = mcts_search(
                    &model,
                    &belief,
                    &oracle,
                    &oracle,
                    &reward_fn,
                    config,
                    decision_seed(dseed, clock),
                )?;
                action
            }
            DecisionBackend::Distilled { policy } => policy.infer(ctx, &belief, None).action,
        };
        latency.record(started.elapsed().as_secs_f64());
        decisions += 1;

        // Reward-wiring audit: the planner's callback must equal
        // evaluate_intrinsic + extrinsic under the installed spec.
        if setup.harness.audit_every > 0 && decisions % setup.harness.audit_every as u64 == 0 {
            let via_planner = reward_fn(&belief, &action, 0.25);
            let direct = crate::reward::total_reward(
                spec.evaluate_intrinsic(&RewardInputs {
                    state: &belief.observed,
                    action: &action,
                    home: ctx.home(),
                }),
                0.25,
            )?;
            if via_planner != direct {
                return Err(HarnessError::Invariant(format!(
                    "reward wiring mismatch at tick {clock}: {via_planner} vs {direct}"
                )));
            }
        }

        let exec = sim.execute(&action)?;

        let mut context = Vec::new();
        let attributed = goal_hints
            .iter()
            .find(|(_, cond)| {
                cond.eval(&RewardInputs {
                    state: &exec.pre_state,
                    action: &action,
                    home: ctx.home(),
                })
            })
            .map(|(i, _)| *i)
            .unwrap_or(0);
        context.push(format!("goal:day{day}:g{attributed}"));
        if let Some(ev) = &exec.completed_event {
            context.push(format!("completed:{}", ev.text));
        }
        for ev in &exec.arrived_events {
            context.push(format!("event:{}", ev.text));
        }

        store.record(EpisodicRecord {
            id: store.last_id() + 1,
            day,
            tick: exec.start_tick,
            action: exec.action.clone(),
            pre_state: exec.pre_state.clone(),
            post_state: exec.post_state.clone(),
            outcome: exec.outcome,
            resources: exec.resources,
            context,
        })?;

        belief = belief.advance(exec.post_state.clone(), &exec.arrived_events);
    }

    let survival_ticks = sim.state().clock.min(ctx.config.day_ticks);
    let summary = summarize_day(store, day)?;
    Ok(DayOutcome {
        summary,
        survival_ticks,
        decisions,
        decision_latency: latency,
    })
}

fn day_report(day: u32, outcome: &DayOutcome, goal_version: u32, spec_version: u32) -> DayReport {
    let s = &outcome.summary;
    let total = s.total_records().max(1) as f64;
    let category_shares = Category::ALL
        .iter()
        .map(|c| (*c, s.count(*c) as f64 * 100.0 / total))
        .collect();
    DayReport {
        day,
        survival_ticks: outcome.survival_ticks,
        final_battery_percent: s.energy_profile.1,
        min_battery_percent: s.energy_profile.0,
        category_shares,
        records: s.total_records(),
        failures: s.failures.len(),
        goal_version,
        spec_version,
    }
}

/// Runs the full multi-day loop: day, summary, reflection, patch install,
/// next day. Artifacts are persisted into `run` when provided.
#[allow(clippy::too_many_arguments)]
pub fn run_experiment(
    setup: &ExperimentSetup,
    personality: &PersonalityProfile,
    capabilities: &CapabilityCatalog,
    days: u32,
    seed: u64,
    mode: ArchMode,
    reflector: &mut dyn Reflector,
    backend_for_day: &mut dyn FnMut(u32, &RewardSpec) -> DecisionBackend,
    run: Option<&super::rundir::RunDir>,
) -> Result<ExperimentReport, HarnessError> {
    if days < 1 {
        return Err(HarnessError::Config("days must be >= 1".into()));
    }
    let (mut goals, mut spec) = reflector.generate_initial_goals(personality, capabilities)?;
    spec.validate()
        .map_err(|e| HarnessError::Invariant(format!("initial spec invalid: {e:?}")))?;

    let mut store = match run {
        Some(run) => MemoryStore::create(&run.episodic_log(), setup.ctx.home().clone())?,
        None => MemoryStore::new(setup.ctx.home().clone()),
    };
    if let Some(run) = run {
        run.save_spec(&spec)?;
        run.save_goals(&goals)?;
    }

    let mut trace = LongTermTrace::new();
    let mut day_reports = Vec::new();
    let mut reflections = 0u64;
    let mut decision_calls = 0u64;
    let mut latency = LatencyStats::default();

    for day in 1..=days {
        let backend = backend_for_day(day, &spec);
        let outcome = run_day(setup, day, seed, &goals, &spec, &backend, &mut store)?;
        decision_calls += outcome.decisions;
        if outcome.decision_latency.count > 0 {
            // Merge day latency into the experiment aggregate.
            let d = &outcome.decision_latency;
            let total = latency.count + d.count;
            latency.mean_seconds = (latency.mean_seconds * latency.count as f64
                + d.mean_seconds * d.count as f64)
                / total as f64;
            latency.max_seconds = latency.max_seconds.max(d.max_seconds);
            latency.count = total;
        }
        day_reports.push(day_report(day, &outcome, goals.version, spec.version));
        trace.push(TraceEntry {
            day,
            goal_version: goals.version,
            reward_version: spec.version,
            summary_digest: outcome.summary.digest(),
        })?;

        // One reflection per completed day, including the last.
        let input = ReflectionInput {
            personality: personality.clone(),
            capabilities: capabilities.clone(),
            summary: outcome.summary,
            current_goals: goals.clone(),
            current_spec: spec.clone(),
        };
        let output = reflector.reflect(&input)?;
        output.validate_against(&input)?;
        reflections += 1;
        if let Some(run) = run {
            run.save_reflection(day, &output)?;
        }
        spec = spec.apply_patch(&output.patch)?;
        goals = output.next_goals;
        if let Some(run) = run {
            run.save_spec(&spec)?;
            run.save_goals(&goals)?;
        }
    }

    let report = ExperimentReport {
        personality: personality.name.clone(),
        mode,
        seed,
        reflector: reflector.name().to_string(),
        days: day_reports,
        chat_calls_per_day: reflections as f64 / days as f64,
        decision_calls_per_day: decision_calls as f64 / days as f64,
        decision_latency: Some(latency),
    };
    if let Some(run) = run {
        run.save_trace(&trace)?;
        run.save_report(&report)?;
    }
    Ok(report)
}
