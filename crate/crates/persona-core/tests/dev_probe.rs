// Temporary development probe; removed before release.

use std::sync::Arc;

use persona_core::harness::{
    run_experiment, ArchMode, DecisionBackend, ExperimentSetup, HarnessConfig,
};
use persona_core::personality::{builtin_prototypes, CapabilityCatalog};
use persona_core::reflect::RuleBasedReflector;
use persona_core::sim::{SimConfig, SimContext};

#[test]
#[ignore]
fn probe_three_day_loop() {
    let ctx: Arc<SimContext> = SimContext::new(SimConfig::builtin_default()).unwrap();
    let setup = ExperimentSetup {
        ctx: ctx.clone(),
        harness: HarnessConfig::default(),
    };
    let caps = CapabilityCatalog::standard();
    for p in builtin_prototypes() {
        let started = std::time::Instant::now();
        let mut reflector =
            RuleBasedReflector::for_world(ctx.home().clone(), ctx.config.day_ticks);
        let mut backend = |_d: u32, _s: &persona_core::reward::RewardSpec| DecisionBackend::Mcts {
            config: setup.harness.decision_planner,
        };
        let report = run_experiment(
            &setup,
            &p,
            &caps,
            3,
            7,
            ArchMode::Hybrid,
            &mut reflector,
            &mut backend,
            None,
        )
        .unwrap();
        println!(
            "== {} ({:.1}s wall)",
            report.personality,
            started.elapsed().as_secs_f64()
        );
        for d in &report.days {
            println!(
                "  day {}: survival {} ticks, final {:.1}%, min {:.1}%, records {}, failures {}, shares {:?}",
                d.day,
                d.survival_ticks,
                d.final_battery_percent,
                d.min_battery_percent,
                d.records,
                d.failures,
                d.category_shares
                    .iter()
                    .map(|(c, s)| format!("{c}:{s:.1}"))
                    .collect::<Vec<_>>()
            );
        }
    }
}

use persona_core::harness::run_day;
use persona_core::memory::MemoryStore;
use persona_core::personality::prototype;

#[test]
#[ignore]
fn probe_day3_tail_and_cautious_explore() {
    let ctx: Arc<SimContext> = SimContext::new(SimConfig::builtin_default()).unwrap();
    let setup = ExperimentSetup {
        ctx: ctx.clone(),
        harness: HarnessConfig::default(),
    };
    let caps = CapabilityCatalog::standard();

    for name in ["Lazy", "Playful", "Cautious"] {
        let p = prototype(name).unwrap();
        // evolve across 3 days manually to keep the store
        let mut reflector =
            RuleBasedReflector::for_world(ctx.home().clone(), ctx.config.day_ticks);
        use persona_core::reflect::{ReflectionInput, Reflector};
        let (mut goals, mut spec) = reflector.generate_initial_goals(&p, &caps).unwrap();
        let mut store = MemoryStore::new(ctx.home().clone());
        for day in 1..=3u32 {
            let backend = DecisionBackend::Mcts {
                config: setup.harness.decision_planner,
            };
            let out = run_day(&setup, day, 7, &goals, &spec, &backend, &mut store).unwrap();
            let input = ReflectionInput {
                personality: p.clone(),
                capabilities: caps.clone(),
                summary: out.summary,
                current_goals: goals.clone(),
                current_spec: spec.clone(),
            };
            let o = reflector.reflect(&input).unwrap();
            spec = spec.apply_patch(&o.patch).unwrap();
            goals = o.next_goals;
        }
        println!("===== {name}: final spec rules:");
        for r in &spec.rules {
            println!("  {} {:+.2} when {}", r.id, r.weight, r.condition.source());
        }
        println!("===== {name}: day-3 records from tick 1100 on (subsampled):");
        let mut shown = 0;
        for rec in store.records().iter().filter(|r| r.day == 3 && r.tick >= 1100) {
            if shown % 5 == 0 || rec.tick > 1420 {
                println!(
                    "  tick {:4} {:24} -> battery {:5.1}% loc {} charging {}",
                    rec.tick,
                    rec.action.to_string(),
                    rec.post_state.battery.percent(),
                    rec.post_state.location,
                    rec.post_state.charging
                );
            }
            shown += 1;
        }
        println!("===== {name}: day-2 records around tick 1110:");
        for rec in store.records().iter().filter(|r| r.day == 2) {
            if (1090..=1130).contains(&rec.tick) {
                println!(
                    "  tick {:4} {:26} pre_batt {:5.1} mood {:+.2} pending {:?}",
                    rec.tick,
                    rec.action.to_string(),
                    rec.pre_state.battery.percent(),
                    rec.pre_state.mood,
                    rec.pre_state
                        .pending_events
                        .iter()
                        .map(|e| e.text.as_str())
                        .collect::<Vec<_>>()
                );
            }
        }
        println!("===== {name}: day-2 records with battery < 22%:");
        for rec in store.records().iter().filter(|r| r.day == 2) {
            if rec.post_state.battery.percent() < 22.0 {
                println!(
                    "  tick {:4} {:28} -> {:5.1}% loc {} outcome {:?}",
                    rec.tick,
                    rec.action.to_string(),
                    rec.post_state.battery.percent(),
                    rec.post_state.location,
                    rec.outcome
                );
            }
        }
        println!("===== {name}: explore-category records (all days):");
        for (i, rec) in store.records().iter().enumerate() {
            if store.category_of(i) == persona_core::sim::Category::Explore {
                if name == "Cautious" {
                    println!(
                        "  day {} tick {:4} {} (battery {:.1}%)",
                        rec.day,
                        rec.tick,
                        rec.action,
                        rec.pre_state.battery.percent()
                    );
                }
            }
        }
    }
}
