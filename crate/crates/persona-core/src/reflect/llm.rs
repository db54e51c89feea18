//! Reflection backed by a chat endpoint (live, captured, or replayed).

use crate::personality::{CapabilityCatalog, PersonalityProfile};
use crate::reward::RewardSpec;

use super::chat::{ChatClient, ChatExchange};
use super::goals::GoalSet;
use super::prompt::build_reflection_prompt;
use super::schema::parse_reflection_response;
use super::{ReflectError, ReflectionInput, ReflectionOutput, Reflector};

/// LLM-backed reflector. Exchanges are retained for call accounting.
pub struct LlmReflector {
    pub client: ChatClient,
    pub exchanges: Vec<ChatExchange>,
}

impl LlmReflector {
    pub fn new(client: ChatClient) -> Self {
        LlmReflector {
            client,
            exchanges: Vec::new(),
        }
    }

    fn initial_prompt(personality: &PersonalityProfile, capabilities: &CapabilityCatalog) -> String {
        use std::fmt::Write;
        let mut p = String::new();
        writeln!(p, "You are the self-reflection module of an autonomous robot dog.").unwrap();
        writeln!(p).unwrap();
        writeln!(p, "## Personality").unwrap();
        writeln!(p, "{}", personality.description).unwrap();
        writeln!(p).unwrap();
        writeln!(p, "## What the body can do").unwrap();
        for c in &capabilities.entries {
            writeln!(p, "- {} (cost {:?}; preconditions: {})", c.kind, c.cost_class, c.preconditions)
                .unwrap();
        }
        writeln!(p).unwrap();
        writeln!(
            p,
            "## Your task\nInvent the dog's ultimate goal, its first daily goals (day 1), and \
             an initial reward rule set expressing its personality. Answer with ONE JSON \
             document of the reflection schema: next_goals must use version 0 and \
             effective_day 1; patch must use base_version 0 and contain only `add` edits \
             (they build the initial rule set); rationale explains the character reading."
        )
        .unwrap();
        p
    }
}

impl Reflector for LlmReflector {
    fn generate_initial_goals(
        &mut self,
        personality: &PersonalityProfile,
        capabilities: &CapabilityCatalog,
    ) -> Result<(GoalSet, RewardSpec), ReflectError> {
        let prompt = Self::initial_prompt(personality, capabilities);
        let exchange = self.client.chat(&prompt)?;
        let parsed = parse_reflection_response(&exchange.response)?;
        self.exchanges.push(exchange);
        if parsed.next_goals.version != 0 || parsed.next_goals.effective_day != 1 {
            return Err(ReflectError::BadOutput(
                "initial goals must be version 0, effective day 1".to_string(),
            ));
        }
        // The initial patch builds the version-0 spec from nothing.
        let mut rules = Vec::new();
        for edit in &parsed.patch.edits {
            match edit {
                crate::reward::PatchEdit::Add { rule } => rules.push(rule.clone()),
                other => {
                    return Err(ReflectError::BadOutput(format!(
                        "initial patch may only add rules, got {other:?}"
                    )))
                }
            }
        }
        let spec = RewardSpec::new(rules);
        spec.validate()
            .map_err(|errs| ReflectError::BadOutput(format!("{errs:?}")))?;
        Ok((parsed.next_goals, spec))
    }

    fn reflect(&mut self, input: &ReflectionInput) -> Result<ReflectionOutput, ReflectError> {
        input.validate()?;
        let prompt = build_reflection_prompt(input);
        let exchange = self.client.chat(&prompt)?;
        let parsed = parse_reflection_response(&exchange.response)?;
        self.exchanges.push(exchange);
        parsed.validate_against(input)?;
        Ok(parsed)
    }

    fn name(&self) -> &'static str {
        "llm"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::{DailySummary, TerminalOutcome};
    use crate::personality::prototype;
    use crate::reflect::chat::{ChatExchange, FixtureStore, ProviderTag};
    use crate::reflect::RuleBasedReflector;
    use std::collections::BTreeMap;

    /// Records a synthetic exchange for a prompt, then replays it.
    #[test]
    fn fixture_backed_reflection_round_trip() {
        let mut rb = RuleBasedReflector::new();
        let p = prototype("Lazy").unwrap();
        let caps = crate::personality::CapabilityCatalog::standard();
        let (goals, spec) = rb.generate_initial_goals(&p, &caps).unwrap();
        let mut counts = BTreeMap::new();
        counts.insert(crate::sim::Category::Rest, 3);
        let input = ReflectionInput {
            personality: p,
            capabilities: caps,
            summary: DailySummary {
                day: 1,
                action_counts_by_category: counts,
                failures: vec![],
                terminal_outcome: TerminalOutcome::Survived,
                energy_profile: (55.0, 90.0),
                notable_events: vec![],
            },
            current_goals: goals.clone(),
            current_spec: spec,
        };
        let prompt = build_reflection_prompt(&input);
        let response = serde_json::json!({
            "next_goals": {
                "version": 1,
                "ultimate_goal": goals.ultimate_goal,
                "effective_day": 2,
                "daily_goals": [
                    {"id": "g1", "text": "Nap with one eye open.", "machine_hint": "category == rest"}
                ]
            },
            "patch": {
                "base_version": 0,
                "edits": [
                    {"op": "scale", "rule_id": "pref_rest", "factor": 1.2}
                ]
            },
            "rationale": "A good day for a lazy dog."
        });

        let dir = tempfile::tempdir().unwrap();
        let store = FixtureStore::new(dir.path());
        store
            .store(&ChatExchange {
                prompt: prompt.clone(),
                response: response.to_string(),
                latency_seconds: 12.5,
                provider_tag: ProviderTag::Fixture,
            })
            .unwrap();

        let mut reflector = LlmReflector::new(ChatClient::Fixture(store));
        let out = reflector.reflect(&input).unwrap();
        assert_eq!(out.next_goals.version, 1);
        assert_eq!(out.patch.edits.len(), 1);
        assert_eq!(reflector.exchanges.len(), 1);
        assert_eq!(reflector.exchanges[0].latency_seconds, 12.5);
    }

    #[test]
    fn fixture_miss_is_loud() {
        let dir = tempfile::tempdir().unwrap();
        let mut reflector = LlmReflector::new(ChatClient::Fixture(FixtureStore::new(dir.path())));
        let p = prototype("Lazy").unwrap();
        let caps = crate::personality::CapabilityCatalog::standard();
        let err = reflector.generate_initial_goals(&p, &caps).unwrap_err();
        assert!(err.to_string().contains("fixture miss"), "{err}");
    }
}
