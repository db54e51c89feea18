//! The reflection prompt: a deterministic template embedding the
//! personality, capabilities, current goals, the day's summary and the
//! current reward rules, followed by the required output schema.

use std::fmt::Write;

use super::ReflectionInput;

/// Builds the full reflection prompt. Byte-identical inputs produce a
/// byte-identical prompt.
pub fn build_reflection_prompt(input: &ReflectionInput) -> String {
    let mut p = String::new();
    let s = &input.summary;

    writeln!(p, "You are the self-reflection module of an autonomous robot dog.").unwrap();
    writeln!(p).unwrap();
    writeln!(p, "## Personality").unwrap();
    writeln!(p, "{}", input.personality.description).unwrap();
    writeln!(p).unwrap();
    writeln!(p, "## Ultimate goal").unwrap();
    writeln!(p, "{}", input.current_goals.ultimate_goal).unwrap();
    writeln!(p).unwrap();
    writeln!(p, "## Today's goals (day {})", input.current_goals.effective_day).unwrap();
    for g in &input.current_goals.daily_goals {
        match &g.machine_hint {
            Some(hint) => writeln!(p, "- [{}] {} (hint: {hint})", g.id, g.text).unwrap(),
            None => writeln!(p, "- [{}] {}", g.id, g.text).unwrap(),
        }
    }
    writeln!(p).unwrap();
    writeln!(p, "## What the body can do").unwrap();
    for c in &input.capabilities.entries {
        writeln!(
            p,
            "- {} (cost {:?}; preconditions: {})",
            c.kind, c.cost_class, c.preconditions
        )
        .unwrap();
    }
    writeln!(p).unwrap();
    writeln!(p, "## Day {} summary", s.day).unwrap();
    writeln!(p, "outcome: {:?}", s.terminal_outcome).unwrap();
    writeln!(
        p,
        "battery: minimum {:.1}%, final {:.1}%",
        s.energy_profile.0, s.energy_profile.1
    )
    .unwrap();
    writeln!(p, "actions by category:").unwrap();
    for (category, count) in &s.action_counts_by_category {
        writeln!(p, "- {category}: {count}").unwrap();
    }
    writeln!(p, "failures ({}):", s.failures.len()).unwrap();
    for f in &s.failures {
        writeln!(p, "- tick {}: {} ({})", f.tick, f.action, f.cause).unwrap();
    }
    if !s.notable_events.is_empty() {
        writeln!(p, "notable events:").unwrap();
        for ev in &s.notable_events {
            writeln!(p, "- {ev}").unwrap();
        }
    }
    writeln!(p).unwrap();
    writeln!(
        p,
        "## Current reward rules (spec version {})",
        input.current_spec.version
    )
    .unwrap();
    for r in &input.current_spec.rules {
        writeln!(
            p,
            "- id={} weight={:+.3} when: {} [{:?}]",
            r.id,
            r.weight,
            r.condition.source(),
            r.provenance
        )
        .unwrap();
    }
    writeln!(p).unwrap();
    writeln!(p, "## Your task").unwrap();
    writeln!(
        p,
        "Evaluate the day against the personality and goals, then answer with ONE JSON \
         document and nothing else, using exactly this shape:"
    )
    .unwrap();
    writeln!(
        p,
        r#"{{
  "next_goals": {{
    "version": {next_goal_version},
    "ultimate_goal": "<copy the ultimate goal verbatim>",
    "effective_day": {next_day},
    "daily_goals": [
      {{"id": "g1", "text": "...", "machine_hint": "<optional condition>"}}
    ]
  }},
  "patch": {{
    "base_version": {spec_version},
    "edits": [
      {{"op": "add", "rule": {{"id": "...", "condition": "...", "weight": 0.0, "provenance": "constraint_penalty"}}}},
      {{"op": "remove", "rule_id": "..."}},
      {{"op": "scale", "rule_id": "...", "factor": 1.5}},
      {{"op": "set_weight", "rule_id": "...", "weight": 1.0}}
    ]
  }},
  "rationale": "<one short paragraph>"
}}"#,
        next_goal_version = input.current_goals.version + 1,
        next_day = s.day + 1,
        spec_version = input.current_spec.version,
    )
    .unwrap();
    writeln!(
        p,
        "Conditions use the closed rule language (battery/temp/clock/mood comparisons, \
         location/floor/category/kind equality, pending flags, `&&`). Do not change the \
         ultimate goal. Edits may only reference existing rule ids."
    )
    .unwrap();
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::{DailySummary, TerminalOutcome};
    use crate::personality::{prototype, CapabilityCatalog};
    use crate::reflect::{Reflector, RuleBasedReflector};
    use std::collections::BTreeMap;

    fn sample_input() -> ReflectionInput {
        let mut r = RuleBasedReflector::new();
        let p = prototype("Playful").unwrap();
        let caps = CapabilityCatalog::standard();
        let (goals, spec) = r.generate_initial_goals(&p, &caps).unwrap();
        let mut counts = BTreeMap::new();
        counts.insert(crate::sim::Category::Explore, 42);
        ReflectionInput {
            personality: p,
            capabilities: caps,
            summary: DailySummary {
                day: 1,
                action_counts_by_category: counts,
                failures: vec![crate::memory::FailureNote {
                    tick: 321,
                    action: crate::sim::Action::move_to(
                        crate::sim::NodeId::new("room_302"),
                        crate::sim::TravelMethod::Elevator,
                    ),
                    cause: "navigation failure".into(),
                }],
                terminal_outcome: TerminalOutcome::BatteryDepletedAtTick { tick: 700 },
                energy_profile: (0.0, 0.0),
                notable_events: vec![],
            },
            current_goals: goals,
            current_spec: spec,
        }
    }

    #[test]
    fn prompt_embeds_personality_goals_failures_and_rules() {
        let input = sample_input();
        let prompt = build_reflection_prompt(&input);
        // All three personality sentences arrive verbatim.
        assert!(prompt.contains(&input.personality.description));
        assert!(prompt.contains(&input.current_goals.ultimate_goal));
        assert!(prompt.contains("tick 321"));
        assert!(prompt.contains("navigation failure"));
        assert!(prompt.contains("goal_survey"));
        assert!(prompt.contains("\"base_version\": 0"));
    }

    #[test]
    fn prompt_is_deterministic() {
        let input = sample_input();
        assert_eq!(build_reflection_prompt(&input), build_reflection_prompt(&input));
    }
}
