//! Personality profiles and the agent's capability catalog.
//!
//! A profile is three sentences of natural language plus an analytical trait
//! anchor on (openness, neuroticism, conscientiousness). The sentences are
//! the only personality input the reflector sees; the anchor is metadata for
//! analysis and for the rule-based reflector's openness gate.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

use crate::sim::{ActionKind, ConfigError};

/// Five-level trait scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TraitLevel {
    Low,
    LowMed,
    Med,
    MedHigh,
    High,
}

impl TraitLevel {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Low" => Some(TraitLevel::Low),
            "Low-Med" => Some(TraitLevel::LowMed),
            "Med" => Some(TraitLevel::Med),
            "Med-High" => Some(TraitLevel::MedHigh),
            "High" => Some(TraitLevel::High),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TraitLevel::Low => "Low",
            TraitLevel::LowMed => "Low-Med",
            TraitLevel::Med => "Med",
            TraitLevel::MedHigh => "Med-High",
            TraitLevel::High => "High",
        }
    }
}

impl fmt::Display for TraitLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// (openness, neuroticism, conscientiousness) anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraitAnchor {
    pub openness: TraitLevel,
    pub neuroticism: TraitLevel,
    pub conscientiousness: TraitLevel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonalityProfile {
    pub name: String,
    /// Exactly three sentences.
    pub description: String,
    pub trait_anchor: TraitAnchor,
}

#[derive(Debug, thiserror::Error)]
pub enum PersonalityError {
    #[error("profile `{profile}`: {reason}")]
    Invalid { profile: String, reason: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Counts sentences as non-empty segments ending in `.`, `!` or `?`.
pub fn sentence_count(text: &str) -> usize {
    text.split(['.', '!', '?'])
        .filter(|s| !s.trim().is_empty())
        .count()
}

impl PersonalityProfile {
    /// Enforces every profile invariant, reporting each violation.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut problems = Vec::new();
        if self.name.trim().is_empty() {
            problems.push("name must be non-empty".to_string());
        }
        let sentences = sentence_count(&self.description);
        if sentences != 3 {
            problems.push(format!(
                "description must be exactly three sentences, found {sentences}"
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems)
        }
    }
}

#[derive(Debug, Deserialize)]
struct ProfileFile {
    profile: Vec<ProfileEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileEntry {
    name: String,
    description: String,
    openness: String,
    neuroticism: String,
    conscientiousness: String,
}

fn parse_profiles(text: &str) -> Result<Vec<PersonalityProfile>, PersonalityError> {
    let file: ProfileFile = toml::from_str(text)
        .map_err(|e| PersonalityError::Config(ConfigError::invalid("profiles", e.to_string())))?;
    let mut out = Vec::new();
    for entry in file.profile {
        let level = |field: &str, value: &str| {
            TraitLevel::parse(value).ok_or_else(|| PersonalityError::Invalid {
                profile: entry.name.clone(),
                reason: format!("{field} level `{value}` is not on the five-level scale"),
            })
        };
        let profile = PersonalityProfile {
            trait_anchor: TraitAnchor {
                openness: level("openness", &entry.openness)?,
                neuroticism: level("neuroticism", &entry.neuroticism)?,
                conscientiousness: level("conscientiousness", &entry.conscientiousness)?,
            },
            name: entry.name,
            description: entry.description,
        };
        profile.validate().map_err(|problems| PersonalityError::Invalid {
            profile: profile.name.clone(),
            reason: problems.join("; "),
        })?;
        out.push(profile);
    }
    Ok(out)
}

/// Loads the five shipped prototypes from a config file.
pub fn load_prototypes(path: &Path) -> Result<Vec<PersonalityProfile>, PersonalityError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        PersonalityError::Config(ConfigError::invalid(
            "prototype file",
            format!("{}: {e}", path.display()),
        ))
    })?;
    parse_profiles(&text)
}

/// The prototypes compiled into the crate (same content as the shipped
/// config file).
pub fn builtin_prototypes() -> Vec<PersonalityProfile> {
    parse_profiles(include_str!("../assets/personalities.toml"))
        .expect("builtin prototypes must parse")
}

pub fn prototype(name: &str) -> Option<PersonalityProfile> {
    builtin_prototypes()
        .into_iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
}

/// How costly an action class is, for the capability catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostClass {
    Minimal,
    Low,
    Medium,
    High,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Capability {
    pub kind: ActionKind,
    pub preconditions: String,
    pub cost_class: CostClass,
}

/// The full catalog of what the agent can do: one entry per action kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapabilityCatalog {
    pub entries: Vec<Capability>,
}

impl CapabilityCatalog {
    /// Builds the catalog for the standard 19-action repertoire.
    pub fn standard() -> Self {
        let entry = |kind: ActionKind| {
            let (preconditions, cost_class) = match kind {
                ActionKind::Idle => ("none; charges nothing by itself", CostClass::Minimal),
                ActionKind::Think => ("none; pure deliberation, no motion", CostClass::Minimal),
                ActionKind::LieDown => (
                    "none; docks and charges when performed on the charging pad",
                    CostClass::Low,
                ),
                ActionKind::Sit | ActionKind::Stand | ActionKind::Stretch => {
                    ("room must allow posture change", CostClass::Low)
                }
                ActionKind::Wander | ActionKind::Patrol => {
                    ("free floor space in the current room", CostClass::Medium)
                }
                ActionKind::LookAround | ActionKind::SniffAround => {
                    ("none; scans the current room", CostClass::Low)
                }
                k if k.is_expression() => ("an audience nearby is nice to have", CostClass::Low),
                ActionKind::MoveTo => (
                    "target must be a mapped node; elevator/stairs methods require the \
                     respective landing and cross-floor routes",
                    CostClass::High,
                ),
                _ => unreachable!(),
            };
            Capability {
                kind,
                preconditions: preconditions.to_string(),
                cost_class,
            }
        };
        CapabilityCatalog {
            entries: ActionKind::ALL.into_iter().map(entry).collect(),
        }
    }

    /// Checks the catalog covers every action kind exactly once.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut problems = Vec::new();
        for kind in ActionKind::ALL {
            let n = self.entries.iter().filter(|e| e.kind == kind).count();
            if n != 1 {
                problems.push(format!("kind {kind} appears {n} times"));
            }
        }
        if self.entries.len() != ActionKind::ALL.len() {
            problems.push(format!(
                "catalog has {} entries, expected {}",
                self.entries.len(),
                ActionKind::ALL.len()
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_prototypes_have_the_published_anchors() {
        let protos = builtin_prototypes();
        assert_eq!(protos.len(), 5);
        let anchor = |name: &str| {
            protos
                .iter()
                .find(|p| p.name == name)
                .unwrap_or_else(|| panic!("missing prototype {name}"))
                .trait_anchor
        };
        use TraitLevel::*;
        assert_eq!(
            anchor("Lazy"),
            TraitAnchor { openness: Low, neuroticism: MedHigh, conscientiousness: Low }
        );
        assert_eq!(
            anchor("Playful"),
            TraitAnchor { openness: High, neuroticism: Med, conscientiousness: Med }
        );
        assert_eq!(
            anchor("Cautious"),
            TraitAnchor { openness: Low, neuroticism: High, conscientiousness: MedHigh }
        );
        assert_eq!(
            anchor("Working"),
            TraitAnchor { openness: Low, neuroticism: Med, conscientiousness: High }
        );
        assert_eq!(
            anchor("Curious"),
            TraitAnchor { openness: High, neuroticism: Med, conscientiousness: LowMed }
        );
    }

    #[test]
    fn every_description_is_three_sentences() {
        for p in builtin_prototypes() {
            assert!(p.validate().is_ok(), "{} failed validation", p.name);
            assert_eq!(sentence_count(&p.description), 3, "{}", p.name);
        }
    }

    #[test]
    fn two_sentence_description_is_rejected() {
        let text = r#"
            [[profile]]
            name = "Terse"
            description = "Short one. Short two."
            openness = "Low"
            neuroticism = "Med"
            conscientiousness = "High"
        "#;
        let err = parse_profiles(text).unwrap_err();
        assert!(err.to_string().contains("three sentences"), "{err}");
    }

    #[test]
    fn off_scale_level_is_rejected() {
        let text = r#"
            [[profile]]
            name = "Odd"
            description = "One. Two. Three."
            openness = "Extreme"
            neuroticism = "Med"
            conscientiousness = "High"
        "#;
        let err = parse_profiles(text).unwrap_err();
        assert!(err.to_string().contains("five-level scale"), "{err}");
    }

    #[test]
    fn empty_name_is_rejected() {
        let text = r#"
            [[profile]]
            name = ""
            description = "One. Two. Three."
            openness = "Low"
            neuroticism = "Med"
            conscientiousness = "High"
        "#;
        assert!(parse_profiles(text).is_err());
    }

    #[test]
    fn missing_file_is_a_config_error() {
        let err = load_prototypes(Path::new("/nonexistent/profiles.toml")).unwrap_err();
        assert!(matches!(err, PersonalityError::Config(_)));
    }

    #[test]
    fn capability_catalog_is_a_bijection_over_kinds() {
        let catalog = CapabilityCatalog::standard();
        catalog.validate().unwrap();
        assert_eq!(catalog.entries.len(), 19);
    }
}
