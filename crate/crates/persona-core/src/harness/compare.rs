//! Architecture comparison: the same closed loop under three deployment
//! shapes, with call and latency accounting.
//!
//! Latency for the simulated cloud and edge deployments comes from fixture
//! constants (never slept); the distilled policy's latency is measured
//! live. The edge variant models its limited reflection capacity by
//! truncating the reflector's edit table: battery-threshold and wind-down
//! edits are dropped, so its specs never learn to conserve charge.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::personality::{CapabilityCatalog, PersonalityProfile};
use crate::planner::{collect_dataset, train_distilled, Belief, PlannerConfig, RuleOracle, SandboxModel};
use crate::reflect::{
    GoalSet, ReflectError, ReflectionInput, ReflectionOutput, Reflector, RuleBasedReflector,
};
use crate::reward::{PatchEdit, RewardSpec};
use crate::sim::{BatteryLevel, EventCategory, NodeId, SimContext, UserEvent, WorldState};

use super::experiment::{
    run_experiment, ArchMode, DecisionBackend, ExperimentReport, ExperimentSetup,
};
use super::HarnessError;

/// Per-call latency fixtures, in seconds. Accounting only; tests never
/// sleep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LatencyFixtures {
    pub cloud_seconds: f64,
    pub edge_seconds: f64,
}

impl Default for LatencyFixtures {
    fn default() -> Self {
        LatencyFixtures {
            cloud_seconds: 25.64,
            edge_seconds: 3.54,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub mode: ArchMode,
    pub chat_calls_per_day: f64,
    pub mean_decision_latency_seconds: f64,
    pub final_day_survival_ticks: u32,
    pub final_day_final_battery: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub personality: String,
    pub days: u32,
    pub seed: u64,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn row(&self, mode: ArchMode) -> &ComparisonRow {
        self.rows.iter().find(|r| r.mode == mode).expect("all modes present")
    }
}

/// The capacity-limited reflector stand-in: same table, but every edit that
/// moves a battery threshold or installs conservation/wind-down rules is
/// discarded.
pub struct WeakReflector {
    inner: RuleBasedReflector,
}

impl WeakReflector {
    pub fn new(inner: RuleBasedReflector) -> Self {
        WeakReflector { inner }
    }

    fn is_conservation_edit(edit: &PatchEdit) -> bool {
        let id = match edit {
            PatchEdit::Add { rule } => &rule.id,
            PatchEdit::Remove { rule_id }
            | PatchEdit::Scale { rule_id, .. }
            | PatchEdit::SetWeight { rule_id, .. } => rule_id,
        };
        id.starts_with("battery_") || id.starts_with("evening_")
    }
}

impl Reflector for WeakReflector {
    fn generate_initial_goals(
        &mut self,
        personality: &PersonalityProfile,
        capabilities: &CapabilityCatalog,
    ) -> Result<(GoalSet, RewardSpec), ReflectError> {
        self.inner.generate_initial_goals(personality, capabilities)
    }

    fn reflect(&mut self, input: &ReflectionInput) -> Result<ReflectionOutput, ReflectError> {
        let mut output = self.inner.reflect(input)?;
        output.patch.edits.retain(|e| !Self::is_conservation_edit(e));
        Ok(output)
    }

    fn name(&self) -> &'static str {
        "rule-based-truncated"
    }
}

/// Deterministic grid of training states for distillation: batteries around
/// every threshold, a spread of places, clock phases and pending commands.
pub fn training_states(ctx: &SimContext) -> Vec<Belief> {
    let batteries = [5.0, 15.0, 25.0, 32.0, 38.0, 45.0, 60.0, 75.0, 95.0];
    let places: Vec<(&str, i32)> = [
        ("room_101", 1),
        ("room_103", 1),
        ("room_202", 2),
        ("elevator_2", 2),
        ("room_302", 3),
    ]
    .into_iter()
    .filter(|(loc, _)| ctx.map.contains(&NodeId::new(*loc)))
    .collect();
    let clocks = [240u32, 600, 900, 1200];
    let commands: [Option<(EventCategory, &str)>; 6] = [
        None,
        None,
        Some((EventCategory::TaskRequest, "please check room_204 by elevator")),
        Some((EventCategory::ExplorationRequest, "go explore room_301 by stairs")),
        Some((EventCategory::AffectionRequest, "come cuddle with me")),
        Some((EventCategory::TaskRequest, "inspect room_102 for me")),
    ];
    let mut out = Vec::new();
    for battery in batteries {
        for &(loc, floor) in &places {
            for clock in clocks {
                for cmd in &commands {
                    let mut state = WorldState {
                        battery: BatteryLevel::from_percent(battery),
                        motor_temp: 31.0,
                        location: NodeId::new(loc),
                        floor,
                        clock,
                        mood: 0.3,
                        pending_events: Vec::new(),
                        charging: false,
                    };
                    if let Some((category, text)) = cmd {
                        state.pending_events.push(UserEvent {
                            tick: clock,
                            text: (*text).to_string(),
                            category: *category,
                        });
                    }
                    out.push(Belief::new(state));
                }
            }
        }
    }
    out
}

/// Evolves the personality with the full reflector, distills a policy from
/// the evolved spec, and returns (policy, final spec, train/holdout
/// agreement).
pub fn distill_for(
    setup: &ExperimentSetup,
    personality: &PersonalityProfile,
    capabilities: &CapabilityCatalog,
    days: u32,
    seed: u64,
    teacher_config: &PlannerConfig,
) -> Result<DistillOutcome, HarnessError> {
    let mut reflector = RuleBasedReflector::for_world(
        setup.ctx.home().clone(),
        setup.ctx.config.day_ticks,
    );
    let mut backend = |_day: u32, _spec: &RewardSpec| DecisionBackend::Mcts {
        config: setup.harness.decision_planner,
    };
    let report = run_experiment(
        setup,
        personality,
        capabilities,
        days,
        seed,
        ArchMode::Hybrid,
        &mut reflector,
        &mut backend,
        None,
    )?;
    // Rebuild the final spec by replaying the same reflections.
    let (_, final_spec) = evolve_spec_only(setup, personality, capabilities, days, seed)?;

    let model = SandboxModel::new(setup.ctx.clone());
    let oracle = RuleOracle::new(final_spec.clone());
    let states = training_states(&setup.ctx);
    let dataset = collect_dataset(&model, &oracle, &states, teacher_config, seed)?;

    let train: crate::planner::Dataset = crate::planner::Dataset {
        examples: dataset
            .examples
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == 0)
            .map(|(_, e)| e.clone())
            .collect(),
    };
    let holdout: Vec<_> = dataset
        .examples
        .iter()
        .enumerate()
        .filter(|(i, _)| i % 2 == 1)
        .map(|(_, e)| e.clone())
        .collect();

    let (policy, train_report) = train_distilled(&train)?;
    let mut agree = 0usize;
    let mut valid_bio = true;
    for (i, ex) in holdout.iter().enumerate() {
        let belief = &states[i * 2 + 1];
        let text = belief.pending_command().map(|e| e.text.clone());
        let out = policy.infer(&setup.ctx, belief, text.as_deref());
        if crate::planner::distill::actions_agree(&out.action, &ex.teacher) {
            agree += 1;
        }
        let labels: Vec<_> = out.slots.iter().map(|(_, l)| *l).collect();
        if !crate::planner::distill::is_valid_bio(&labels) {
            valid_bio = false;
        }
    }
    Ok(DistillOutcome {
        policy,
        final_spec,
        training_agreement: train_report.training_agreement,
        holdout_agreement: agree as f64 / holdout.len().max(1) as f64,
        holdout_size: holdout.len(),
        bio_always_valid: valid_bio,
        evolution_report: report,
    })
}

pub struct DistillOutcome {
    pub policy: crate::planner::DistilledPolicy,
    pub final_spec: RewardSpec,
    pub training_agreement: f64,
    pub holdout_agreement: f64,
    pub holdout_size: usize,
    pub bio_always_valid: bool,
    pub evolution_report: ExperimentReport,
}

/// Replays the standard evolution to obtain the final (goals, spec) without
/// recording anything.
pub fn evolve_spec_only(
    setup: &ExperimentSetup,
    personality: &PersonalityProfile,
    capabilities: &CapabilityCatalog,
    days: u32,
    seed: u64,
) -> Result<(GoalSet, RewardSpec), HarnessError> {
    let mut reflector = RuleBasedReflector::for_world(
        setup.ctx.home().clone(),
        setup.ctx.config.day_ticks,
    );
    let mut goals_spec: Option<(GoalSet, RewardSpec)> = None;
    let mut backend = |_day: u32, _spec: &RewardSpec| DecisionBackend::Mcts {
        config: setup.harness.decision_planner,
    };
    // Run the loop; capture the evolving artifacts via a wrapper reflector.
    struct Tap<'a> {
        inner: &'a mut RuleBasedReflector,
        last: &'a mut Option<(GoalSet, RewardSpec)>,
    }
    impl Reflector for Tap<'_> {
        fn generate_initial_goals(
            &mut self,
            personality: &PersonalityProfile,
            capabilities: &CapabilityCatalog,
        ) -> Result<(GoalSet, RewardSpec), ReflectError> {
            let out = self.inner.generate_initial_goals(personality, capabilities)?;
            *self.last = Some(out.clone());
            Ok(out)
        }
        fn reflect(&mut self, input: &ReflectionInput) -> Result<ReflectionOutput, ReflectError> {
            let output = self.inner.reflect(input)?;
            let spec = input
                .current_spec
                .apply_patch(&output.patch)
                .map_err(ReflectError::Reward)?;
            *self.last = Some((output.next_goals.clone(), spec));
            Ok(output)
        }
        fn name(&self) -> &'static str {
            self.inner.name()
        }
    }
    let mut tap = Tap {
        inner: &mut reflector,
        last: &mut goals_spec,
    };
    run_experiment(
        setup,
        personality,
        capabilities,
        days,
        seed,
        ArchMode::Hybrid,
        &mut tap,
        &mut backend,
        None,
    )?;
    goals_spec.ok_or_else(|| HarnessError::Invariant("no reflection ran".into()))
}

/// Runs all three architecture variants and assembles the comparison table.
pub fn architecture_comparison(
    ctx: Arc<SimContext>,
    personality: &PersonalityProfile,
    capabilities: &CapabilityCatalog,
    days: u32,
    seed: u64,
    fixtures: LatencyFixtures,
) -> Result<ComparisonTable, HarnessError> {
    let setup = ExperimentSetup {
        ctx,
        harness: super::experiment::HarnessConfig::default(),
    };
    let mut rows = Vec::new();

    // all_cloud_sim: full deliberation, full reflection; every decision is
    // accounted as one cloud call at the cloud fixture latency.
    {
        let mut reflector = RuleBasedReflector::for_world(
            setup.ctx.home().clone(),
            setup.ctx.config.day_ticks,
        );
        let mut backend = |_d: u32, _s: &RewardSpec| DecisionBackend::Mcts {
            config: setup.harness.decision_planner,
        };
        let report = run_experiment(
            &setup,
            personality,
            capabilities,
            days,
            seed,
            ArchMode::AllCloudSim,
            &mut reflector,
            &mut backend,
            None,
        )?;
        let last = report.days.last().expect("days >= 1");
        rows.push(ComparisonRow {
            mode: ArchMode::AllCloudSim,
            // The collapsed pipeline answers every decision (and the daily
            // goal setting) from the cloud.
            chat_calls_per_day: report.decision_calls_per_day + report.chat_calls_per_day,
            mean_decision_latency_seconds: fixtures.cloud_seconds,
            final_day_survival_ticks: last.survival_ticks,
            final_day_final_battery: last.final_battery_percent,
        });
    }

    // all_edge_sim: no cloud calls; the weak reflector never learns to
    // conserve charge.
    {
        let mut reflector = WeakReflector::new(RuleBasedReflector::for_world(
            setup.ctx.home().clone(),
            setup.ctx.config.day_ticks,
        ));
        let mut backend = |_d: u32, _s: &RewardSpec| DecisionBackend::Mcts {
            config: setup.harness.decision_planner,
        };
        let report = run_experiment(
            &setup,
            personality,
            capabilities,
            days,
            seed,
            ArchMode::AllEdgeSim,
            &mut reflector,
            &mut backend,
            None,
        )?;
        let last = report.days.last().expect("days >= 1");
        rows.push(ComparisonRow {
            mode: ArchMode::AllEdgeSim,
            chat_calls_per_day: 0.0,
            mean_decision_latency_seconds: fixtures.edge_seconds,
            final_day_survival_ticks: last.survival_ticks,
            final_day_final_battery: last.final_battery_percent,
        });
    }

    // hybrid: distilled per-tick decisions, one reflection call per day.
    {
        let distilled = distill_for(
            &setup,
            personality,
            capabilities,
            days,
            seed,
            &setup.harness.decision_planner,
        )?;
        let mut reflector = RuleBasedReflector::for_world(
            setup.ctx.home().clone(),
            setup.ctx.config.day_ticks,
        );
        let policy = distilled.policy;
        let mut backend = move |_d: u32, _s: &RewardSpec| DecisionBackend::Distilled {
            policy: policy.clone(),
        };
        let report = run_experiment(
            &setup,
            personality,
            capabilities,
            days,
            seed,
            ArchMode::Hybrid,
            &mut reflector,
            &mut backend,
            None,
        )?;
        let last = report.days.last().expect("days >= 1");
        rows.push(ComparisonRow {
            mode: ArchMode::Hybrid,
            chat_calls_per_day: report.chat_calls_per_day,
            mean_decision_latency_seconds: report
                .decision_latency
                .map(|l| l.mean_seconds)
                .unwrap_or(0.0),
            final_day_survival_ticks: last.survival_ticks,
            final_day_final_battery: last.final_battery_percent,
        });
    }

    Ok(ComparisonTable {
        personality: personality.name.clone(),
        days,
        seed,
        rows,
    })
}
