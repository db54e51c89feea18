//! Nightly reflection: turns a personality into initial goals and rewards,
//! then revises both from each day's episodic summary.
//!
//! The `Reflector` trait has two implementations: a deterministic rule-based
//! reflector used by every hermetic run, and an LLM-backed reflector that
//! speaks a strict structured-output schema over a record/replay chat
//! client.

pub mod chat;
pub mod goals;
pub mod llm;
pub mod prompt;
pub mod rule_based;
pub mod schema;

pub use chat::{ChatClient, ChatError, ChatExchange, FixtureStore, LiveChatClient, ProviderTag};
pub use goals::{DailyGoal, GoalSet};
pub use llm::LlmReflector;
pub use prompt::build_reflection_prompt;
pub use rule_based::RuleBasedReflector;
pub use schema::parse_reflection_response;

use crate::memory::DailySummary;
use crate::personality::{CapabilityCatalog, PersonalityProfile};
use crate::reward::{RewardError, RewardPatch, RewardSpec};

/// Ticks before end of day at which the evening wind-down rules engage.
pub const WINDDOWN_LEAD_TICKS: u32 = 300;

#[derive(Debug, thiserror::Error)]
pub enum ReflectError {
    #[error("reflection input invariant violated: {0}")]
    BadInput(String),
    #[error("reflector output invariant violated: {0}")]
    BadOutput(String),
    #[error("structured output schema violation: field `{field}`: {reason}")]
    Schema { field: String, reason: String },
    #[error("patch refers to unknown rule id `{0}`")]
    UnknownRule(String),
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error(transparent)]
    Chat(#[from] chat::ChatError),
    #[error("unparseable reflector response: {reason}; raw text: {raw}")]
    Unparseable { reason: String, raw: String },
}

/// Everything a reflection sees.
#[derive(Debug, Clone)]
pub struct ReflectionInput {
    pub personality: PersonalityProfile,
    pub capabilities: CapabilityCatalog,
    pub summary: DailySummary,
    pub current_goals: GoalSet,
    pub current_spec: RewardSpec,
}

impl ReflectionInput {
    pub fn validate(&self) -> Result<(), ReflectError> {
        if self.summary.day != self.current_goals.effective_day {
            return Err(ReflectError::BadInput(format!(
                "summary day {} does not match goals effective day {}",
                self.summary.day, self.current_goals.effective_day
            )));
        }
        Ok(())
    }
}

/// What a reflection produces: next goals, a reward patch, and the
/// reflector's own account of why.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ReflectionOutput {
    pub next_goals: GoalSet,
    pub patch: RewardPatch,
    pub rationale: String,
}

impl ReflectionOutput {
    /// Output invariants relative to the input that produced it.
    pub fn validate_against(&self, input: &ReflectionInput) -> Result<(), ReflectError> {
        if self.patch.base_version != input.current_spec.version {
            return Err(ReflectError::BadOutput(format!(
                "patch base version {} does not match spec version {}",
                self.patch.base_version, input.current_spec.version
            )));
        }
        if self.next_goals.effective_day != input.summary.day + 1 {
            return Err(ReflectError::BadOutput(format!(
                "next goals effective day {} must be {}",
                self.next_goals.effective_day,
                input.summary.day + 1
            )));
        }
        if self.next_goals.version != input.current_goals.version + 1 {
            return Err(ReflectError::BadOutput(format!(
                "goal version {} must be {}",
                self.next_goals.version,
                input.current_goals.version + 1
            )));
        }
        if self.next_goals.ultimate_goal != input.current_goals.ultimate_goal {
            return Err(ReflectError::BadOutput(
                "ultimate goal must never change across reflections".to_string(),
            ));
        }
        // Every referenced rule id must exist in the current spec.
        for edit in &self.patch.edits {
            let id = match edit {
                crate::reward::PatchEdit::Remove { rule_id }
                | crate::reward::PatchEdit::Scale { rule_id, .. }
                | crate::reward::PatchEdit::SetWeight { rule_id, .. } => Some(rule_id),
                crate::reward::PatchEdit::Add { .. } => None,
            };
            if let Some(id) = id {
                if input.current_spec.rule(id).is_none() {
                    return Err(ReflectError::UnknownRule(id.clone()));
                }
            }
        }
        Ok(())
    }
}

/// The reflection backend.
pub trait Reflector {
    /// Produces the day-1 goal hierarchy and the version-0 reward spec from
    /// the personality and capability inputs.
    fn generate_initial_goals(
        &mut self,
        personality: &PersonalityProfile,
        capabilities: &CapabilityCatalog,
    ) -> Result<(GoalSet, RewardSpec), ReflectError>;

    /// Runs one end-of-day reflection.
    fn reflect(&mut self, input: &ReflectionInput) -> Result<ReflectionOutput, ReflectError>;

    /// Name for reports and manifests.
    fn name(&self) -> &'static str;
}
