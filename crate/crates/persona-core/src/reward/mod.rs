//! The composite reward: a declarative intrinsic-reward spec evaluated
//! against (state, action), summed with extrinsic feedback, and evolved by
//! incremental patches.

pub mod condition;

pub use condition::{Clause, CmpOp, Condition, ConditionParseError, NumField, RewardInputs};

use serde::{Deserialize, Serialize};

use crate::sim::{ActionKind, Category};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RewardError {
    #[error("duplicate rule id `{0}`")]
    DuplicateRule(String),
    #[error("rule `{rule_id}`: weight {weight} is not finite")]
    NonFiniteWeight { rule_id: String, weight: f64 },
    #[error("rule `{rule_id}`: {source}")]
    BadCondition {
        rule_id: String,
        source: ConditionParseError,
    },
    #[error("stale patch: base version {patch_base} does not match spec version {spec_version}")]
    StalePatch { patch_base: u32, spec_version: u32 },
    #[error("patch references unknown rule id `{0}`")]
    UnknownRule(String),
    #[error("non-finite reward input")]
    NonFinite,
}

/// Where a rule came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    PersonalityPreference,
    GoalIncentive,
    ConstraintPenalty,
    MemoryAdjustment,
}

/// One weighted rule: if the condition holds for (state, action), the weight
/// joins the intrinsic sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardRule {
    pub id: String,
    pub condition: Condition,
    pub weight: f64,
    pub provenance: Provenance,
}

impl RewardRule {
    pub fn new(
        id: &str,
        condition: &str,
        weight: f64,
        provenance: Provenance,
    ) -> Result<Self, RewardError> {
        let condition = Condition::parse(condition).map_err(|source| RewardError::BadCondition {
            rule_id: id.to_string(),
            source,
        })?;
        Ok(RewardRule {
            id: id.to_string(),
            condition,
            weight,
            provenance,
        })
    }
}

/// The declarative intrinsic-reward document: an ordered rule list with a
/// version that advances by one per applied patch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RewardSpec {
    pub version: u32,
    pub rules: Vec<RewardRule>,
}

impl RewardSpec {
    pub fn new(rules: Vec<RewardRule>) -> Self {
        RewardSpec { version: 0, rules }
    }

    pub fn rule(&self, id: &str) -> Option<&RewardRule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// Enforces all spec invariants: unique ids, finite weights.
    pub fn validate(&self) -> Result<(), Vec<RewardError>> {
        let mut errors = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for rule in &self.rules {
            if !seen.insert(rule.id.clone()) {
                errors.push(RewardError::DuplicateRule(rule.id.clone()));
            }
            if !rule.weight.is_finite() {
                errors.push(RewardError::NonFiniteWeight {
                    rule_id: rule.id.clone(),
                    weight: rule.weight,
                });
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    /// Sum of weights of all rules whose condition holds. Pure: identical
    /// inputs always produce the identical sum.
    pub fn evaluate_intrinsic(&self, inputs: &RewardInputs<'_>) -> f64 {
        self.rules
            .iter()
            .filter(|r| r.condition.eval(inputs))
            .map(|r| r.weight)
            .sum()
    }

    /// Applies a patch, returning the successor spec. The original is
    /// untouched; edits apply strictly in order.
    pub fn apply_patch(&self, patch: &RewardPatch) -> Result<RewardSpec, RewardError> {
        if patch.base_version != self.version {
            return Err(RewardError::StalePatch {
                patch_base: patch.base_version,
                spec_version: self.version,
            });
        }
        let mut rules = self.rules.clone();
        for edit in &patch.edits {
            match edit {
                PatchEdit::Add { rule } => {
                    if rules.iter().any(|r| r.id == rule.id) {
                        return Err(RewardError::DuplicateRule(rule.id.clone()));
                    }
                    if !rule.weight.is_finite() {
                        return Err(RewardError::NonFiniteWeight {
                            rule_id: rule.id.clone(),
                            weight: rule.weight,
                        });
                    }
                    rules.push(rule.clone());
                }
                PatchEdit::Remove { rule_id } => {
                    let before = rules.len();
                    rules.retain(|r| &r.id != rule_id);
                    if rules.len() == before {
                        return Err(RewardError::UnknownRule(rule_id.clone()));
                    }
                }
                PatchEdit::Scale { rule_id, factor } => {
                    let rule = rules
                        .iter_mut()
                        .find(|r| &r.id == rule_id)
                        .ok_or_else(|| RewardError::UnknownRule(rule_id.clone()))?;
                    rule.weight *= factor;
                    if !rule.weight.is_finite() {
                        return Err(RewardError::NonFiniteWeight {
                            rule_id: rule_id.clone(),
                            weight: rule.weight,
                        });
                    }
                }
                PatchEdit::SetWeight { rule_id, weight } => {
                    let rule = rules
                        .iter_mut()
                        .find(|r| &r.id == rule_id)
                        .ok_or_else(|| RewardError::UnknownRule(rule_id.clone()))?;
                    if !weight.is_finite() {
                        return Err(RewardError::NonFiniteWeight {
                            rule_id: rule_id.clone(),
                            weight: *weight,
                        });
                    }
                    rule.weight = *weight;
                }
            }
        }
        Ok(RewardSpec {
            version: self.version + 1,
            rules,
        })
    }

    /// Canonical byte representation, used for replay equality and digests.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reward spec serializes")
    }

    /// Rule content without the version counter; two specs with equal rule
    /// lists are the same point in rule space even if reached on different
    /// days.
    pub fn rules_canonical_json(&self) -> String {
        serde_json::to_string_pretty(&self.rules).expect("rules serialize")
    }

    /// Total |weight| committed to battery-conditioned conservation: penalty
    /// rules mentioning battery, plus battery-gated incentives on returning
    /// home, resting or docking.
    pub fn battery_conservation_mass(&self) -> f64 {
        self.rules
            .iter()
            .filter(|r| r.condition.mentions_battery())
            .filter(|r| {
                r.weight < 0.0
                    || r.condition.requires_category(Category::Return)
                    || r.condition.requires_category(Category::Rest)
                    || r.condition.requires_kind(ActionKind::LieDown)
            })
            .map(|r| r.weight.abs())
            .sum()
    }
}

/// Composite reward: exact sum of the intrinsic and extrinsic terms.
pub fn total_reward(intrinsic: f64, extrinsic: f64) -> Result<f64, RewardError> {
    if !intrinsic.is_finite() || !extrinsic.is_finite() {
        return Err(RewardError::NonFinite);
    }
    Ok(intrinsic + extrinsic)
}

/// One edit inside a patch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum PatchEdit {
    Add { rule: RewardRule },
    Remove { rule_id: String },
    Scale { rule_id: String, factor: f64 },
    SetWeight { rule_id: String, weight: f64 },
}

/// Incremental edits against a specific spec version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardPatch {
    pub base_version: u32,
    pub edits: Vec<PatchEdit>,
}

impl RewardPatch {
    pub fn empty(base_version: u32) -> Self {
        RewardPatch {
            base_version,
            edits: Vec::new(),
        }
    }
}
