//! Strict parsing of the reflector's structured output.
//!
//! The document must be exactly `{next_goals, patch, rationale}` with no
//! extra or missing fields; free-text answers are rejected rather than
//! heuristically salvaged, so every accepted output replays.

use serde::Deserialize;

use crate::reward::{PatchEdit, Provenance, RewardPatch, RewardRule};

use super::goals::{DailyGoal, GoalSet};
use super::{ReflectError, ReflectionOutput};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireOutput {
    next_goals: WireGoals,
    patch: WirePatch,
    rationale: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireGoals {
    version: u32,
    ultimate_goal: String,
    effective_day: u32,
    daily_goals: Vec<WireGoal>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireGoal {
    id: String,
    text: String,
    #[serde(default)]
    machine_hint: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WirePatch {
    base_version: u32,
    edits: Vec<WireEdit>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum WireEdit {
    Add { rule: WireRule },
    Remove { rule_id: String },
    Scale { rule_id: String, factor: f64 },
    SetWeight { rule_id: String, weight: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireRule {
    id: String,
    condition: String,
    weight: f64,
    provenance: Provenance,
}

fn schema_err(field: &str, reason: impl Into<String>) -> ReflectError {
    ReflectError::Schema {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// Parses one structured reflection response. Schema violations name the
/// offending field; the raw text rides along for diagnostics.
pub fn parse_reflection_response(text: &str) -> Result<ReflectionOutput, ReflectError> {
    let wire: WireOutput = serde_json::from_str(text).map_err(|e| ReflectError::Unparseable {
        reason: e.to_string(),
        raw: text.chars().take(400).collect(),
    })?;

    let mut edits = Vec::with_capacity(wire.patch.edits.len());
    for edit in wire.patch.edits {
        edits.push(match edit {
            WireEdit::Add { rule } => {
                let rule = RewardRule::new(&rule.id, &rule.condition, rule.weight, rule.provenance)
                    .map_err(|e| schema_err("patch.edits.rule.condition", e.to_string()))?;
                PatchEdit::Add { rule }
            }
            WireEdit::Remove { rule_id } => PatchEdit::Remove { rule_id },
            WireEdit::Scale { rule_id, factor } => {
                if !factor.is_finite() {
                    return Err(schema_err("patch.edits.factor", "must be finite"));
                }
                PatchEdit::Scale { rule_id, factor }
            }
            WireEdit::SetWeight { rule_id, weight } => {
                if !weight.is_finite() {
                    return Err(schema_err("patch.edits.weight", "must be finite"));
                }
                PatchEdit::SetWeight { rule_id, weight }
            }
        });
    }

    if wire.next_goals.daily_goals.is_empty() {
        return Err(schema_err("next_goals.daily_goals", "must not be empty"));
    }
    let daily_goals = wire
        .next_goals
        .daily_goals
        .into_iter()
        .map(|g| {
            if let Some(hint) = &g.machine_hint {
                crate::reward::Condition::parse(hint)
                    .map_err(|e| schema_err("next_goals.daily_goals.machine_hint", e.to_string()))?;
            }
            Ok(DailyGoal {
                id: g.id,
                text: g.text,
                machine_hint: g.machine_hint,
            })
        })
        .collect::<Result<Vec<_>, ReflectError>>()?;

    Ok(ReflectionOutput {
        next_goals: GoalSet {
            version: wire.next_goals.version,
            ultimate_goal: wire.next_goals.ultimate_goal,
            daily_goals,
            effective_day: wire.next_goals.effective_day,
        },
        patch: RewardPatch {
            base_version: wire.patch.base_version,
            edits,
        },
        rationale: wire.rationale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{
        "next_goals": {
            "version": 1,
            "ultimate_goal": "Stay a good dog.",
            "effective_day": 2,
            "daily_goals": [
                {"id": "g1", "text": "Recharge before 30%.", "machine_hint": "battery < 30"}
            ]
        },
        "patch": {
            "base_version": 0,
            "edits": [
                {"op": "add", "rule": {"id": "red_line", "condition": "battery < 40 && category == explore", "weight": -2.0, "provenance": "constraint_penalty"}},
                {"op": "scale", "rule_id": "pref_rest", "factor": 1.5}
            ]
        },
        "rationale": "Died at dusk; tighten the margins."
    }"#;

    #[test]
    fn well_formed_response_parses() {
        let out = parse_reflection_response(GOOD).unwrap();
        assert_eq!(out.next_goals.version, 1);
        assert_eq!(out.patch.edits.len(), 2);
        assert_eq!(out.rationale, "Died at dusk; tighten the margins.");
    }

    #[test]
    fn missing_next_goals_is_a_schema_error() {
        let text = r#"{"patch": {"base_version": 0, "edits": []}, "rationale": "x"}"#;
        let err = parse_reflection_response(text).unwrap_err();
        assert!(err.to_string().contains("next_goals"), "{err}");
    }

    #[test]
    fn extra_fields_are_rejected() {
        let text = GOOD.replace(
            "\"rationale\": \"Died at dusk; tighten the margins.\"",
            "\"rationale\": \"x\", \"mood\": \"great\"",
        );
        assert!(parse_reflection_response(&text).is_err());
    }

    #[test]
    fn free_text_is_rejected_with_the_raw_payload() {
        let err = parse_reflection_response("I think the dog should rest more.").unwrap_err();
        match err {
            ReflectError::Unparseable { raw, .. } => assert!(raw.contains("rest more")),
            other => panic!("expected Unparseable, got {other}"),
        }
    }

    #[test]
    fn bad_condition_in_add_is_rejected() {
        let text = GOOD.replace("battery < 40 && category == explore", "battery < banana");
        let err = parse_reflection_response(&text).unwrap_err();
        assert!(err.to_string().contains("condition"), "{err}");
    }
}
