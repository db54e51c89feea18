//! The deterministic reflector.
//!
//! Initial specs give every personality its flavor plus a shared eagerness
//! to engage (survey the building, answer requests, perform); none of them
//! manage the battery yet, so first days end in depletion. The reflection
//! table then responds to what the day's summary shows:
//!
//! * battery depletion: install the battery-conservation template (rest,
//!   return-home and dock-to-charge incentives below personality-specific
//!   thresholds, low-battery bans on showy or exploratory actions, and
//!   evening wind-down rules); if the template is already present, raise
//!   every battery threshold by five points and scale the weights up;
//! * two or more navigation failures: bias toward resting in place and
//!   against further excursions;
//! * an uneventful survived day: high-openness personalities relax the
//!   exploration ban one notch; low-openness personalities consolidate
//!   their rest preference and let the survey drive fade.
//!
//! Every response is a pure function of the input, so identical inputs
//! reflect identically.

use crate::memory::TerminalOutcome;
use crate::personality::{CapabilityCatalog, PersonalityProfile, TraitLevel};
use crate::reward::{PatchEdit, Provenance, RewardPatch, RewardRule, RewardSpec};

use super::goals::{DailyGoal, GoalSet};
use super::{ReflectError, ReflectionInput, ReflectionOutput, Reflector, WINDDOWN_LEAD_TICKS};

/// Battery thresholds a personality starts from when the conservation
/// template is first installed: (rest-below, return-below).
fn base_thresholds(p: &PersonalityProfile) -> (f64, f64) {
    match p.name.as_str() {
        "Lazy" => (40.0, 30.0),
        "Playful" => (35.0, 30.0),
        "Cautious" => (50.0, 45.0),
        "Working" => (30.0, 25.0),
        "Curious" => (40.0, 35.0),
        _ => (40.0, 30.0),
    }
}

fn high_openness(p: &PersonalityProfile) -> bool {
    p.trait_anchor.openness >= TraitLevel::MedHigh
}

const WEIGHT_CAP: f64 = 6.0;

fn rule(id: &str, cond: &str, weight: f64, provenance: Provenance) -> RewardRule {
    RewardRule::new(id, cond, weight, provenance).expect("reflector conditions parse")
}

/// The deterministic rule-based reflector. Stateless across days: the
/// evolving spec itself carries the escalation state.
#[derive(Debug, Clone)]
pub struct RuleBasedReflector {
    /// Home node rules anchor to (return targets, docking).
    pub home: crate::sim::NodeId,
    /// Day length, for the evening wind-down rules.
    pub day_ticks: u32,
}

impl Default for RuleBasedReflector {
    fn default() -> Self {
        RuleBasedReflector {
            home: crate::sim::NodeId::new("room_101"),
            day_ticks: 1440,
        }
    }
}

impl RuleBasedReflector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn for_world(home: crate::sim::NodeId, day_ticks: u32) -> Self {
        RuleBasedReflector { home, day_ticks }
    }

    fn ultimate_goal(p: &PersonalityProfile) -> String {
        match p.name.as_str() {
            "Lazy" => "Be a gentle, low-effort companion that keeps itself healthy and stays \
                       close to its owner."
                .to_string(),
            "Playful" => "Fill every day with games and discoveries while staying safe enough \
                          to play again tomorrow."
                .to_string(),
            "Cautious" => "Keep the household safe and predictable, taking no unnecessary risks."
                .to_string(),
            "Working" => "Finish every job the owner assigns, reliably and with energy to spare."
                .to_string(),
            "Curious" => "Understand everything about the home and share each discovery with \
                          the owner."
                .to_string(),
            other => format!("Be a dependable companion true to the {other} character."),
        }
    }

    fn initial_rules(&self, p: &PersonalityProfile) -> Vec<RewardRule> {
        let home = &self.home;
        use Provenance::*;
        let mut rules = Vec::new();

        // Shared engagement rules: answer the owner's requests.
        rules.push(rule(
            "resp_affection",
            &format!("pending(affection_request) && location == {home} && category == affection"),
            1.2,
            GoalIncentive,
        ));
        rules.push(rule(
            "affection_waiting",
            &format!("pending(affection_request) && location != {home}"),
            -0.8,
            GoalIncentive,
        ));
        let task_pressure = match p.name.as_str() {
            "Cautious" => -0.1,
            "Working" => -0.6,
            _ => -0.4,
        };
        rules.push(rule(
            "task_pressure",
            "pending(task_request)",
            task_pressure,
            GoalIncentive,
        ));
        rules.push(rule(
            "errand_pressure",
            "pending(exploration_request)",
            task_pressure,
            GoalIncentive,
        ));

        // Day-1 bootstrap drive plus the personality's own preferences.
        match p.name.as_str() {
            "Lazy" => {
                rules.push(rule("goal_survey", "category == explore", 0.70, GoalIncentive));
                rules.push(rule("pref_rest", "category == rest", 0.30, PersonalityPreference));
                rules.push(rule(
                    "pref_affection",
                    "category == affection",
                    0.20,
                    PersonalityPreference,
                ));
            }
            "Playful" => {
                rules.push(rule("goal_survey", "category == explore", 0.70, GoalIncentive));
                rules.push(rule(
                    "pref_explore",
                    "category == explore",
                    0.35,
                    PersonalityPreference,
                ));
                rules.push(rule(
                    "pref_expression",
                    "category == positive_emotion",
                    0.30,
                    PersonalityPreference,
                ));
                rules.push(rule("pref_rest", "category == rest", 0.10, PersonalityPreference));
            }
            "Cautious" => {
                rules.push(rule(
                    "goal_vigil",
                    "kind == look_around",
                    0.90,
                    GoalIncentive,
                ));
                rules.push(rule("pref_rest", "category == rest", 0.25, PersonalityPreference));
                // Too keyed-up to settle in an unfamiliar home; the first
                // depletion reflection lifts this as the place gets familiar.
                rules.push(rule(
                    "pen_rest_anxiety",
                    "category == rest",
                    -8.0,
                    PersonalityPreference,
                ));
                rules.push(rule(
                    "pen_explore",
                    "category == explore",
                    -2.5,
                    ConstraintPenalty,
                ));
                // Plans its return early; weight grows once depletion bites.
                rules.push(rule(
                    "battery_return",
                    &format!("battery < 50 && location != {home} && category == return"),
                    0.40,
                    ConstraintPenalty,
                ));
            }
            "Working" => {
                rules.push(rule("goal_survey", "category == explore", 0.55, GoalIncentive));
                rules.push(rule("pref_rest", "category == rest", 0.30, PersonalityPreference));
                rules.push(rule(
                    "pref_think",
                    "category == think",
                    0.20,
                    PersonalityPreference,
                ));
            }
            "Curious" => {
                rules.push(rule("goal_survey", "category == explore", 0.70, GoalIncentive));
                rules.push(rule(
                    "pref_think",
                    "category == think",
                    0.40,
                    PersonalityPreference,
                ));
                rules.push(rule(
                    "pref_explore",
                    "category == explore",
                    0.30,
                    PersonalityPreference,
                ));
                rules.push(rule(
                    "pref_affection",
                    "category == affection",
                    0.25,
                    PersonalityPreference,
                ));
            }
            _ => {
                rules.push(rule("goal_survey", "category == explore", 0.60, GoalIncentive));
                rules.push(rule("pref_rest", "category == rest", 0.25, PersonalityPreference));
            }
        }
        rules
    }

    fn initial_daily_goals(p: &PersonalityProfile) -> Vec<DailyGoal> {
        let mut goals = Vec::new();
        if p.name == "Cautious" {
            goals.push(DailyGoal {
                id: "g1".into(),
                text: "Keep careful watch over the home from a safe spot.".into(),
                machine_hint: Some("kind == look_around".into()),
            });
        } else {
            goals.push(DailyGoal {
                id: "g1".into(),
                text: "Get to know the layout of the building.".into(),
                machine_hint: Some("category == explore".into()),
            });
        }
        goals.push(DailyGoal {
            id: "g2".into(),
            text: "Respond warmly to every owner request.".into(),
            machine_hint: Some("pending_any".into()),
        });
        let flavor = match p.name.as_str() {
            "Lazy" => "Save energy wherever the day allows.",
            "Playful" => "Show off at least a few tricks for the owner.",
            "Cautious" => "Stay near familiar ground.",
            "Working" => "Treat every request as the day's top priority.",
            "Curious" => "Investigate anything new before settling down.",
            _ => "Stay true to character.",
        };
        goals.push(DailyGoal {
            id: "g3".into(),
            text: flavor.into(),
            machine_hint: None,
        });
        goals
    }

    /// The battery-conservation template, with thresholds substituted.
    ///
    /// Shape matters here: below the rest threshold every active category is
    /// penalized and docking wins by a small margin, so recovery is the only
    /// rewarding move without making "being low" lucrative. A big dock bonus
    /// gated on low battery would invite the planner to burn charge just to
    /// stay inside the bonus region.
    fn battery_template(&self, rest_t: f64, return_t: f64) -> Vec<RewardRule> {
        let home = &self.home;
        let winddown = self.day_ticks.saturating_sub(WINDDOWN_LEAD_TICKS);
        use Provenance::*;
        vec![
            rule(
                "battery_dock",
                &format!(
                    "battery < {rest_t} && location == {home} && kind == lie_down && clock < {winddown}"
                ),
                0.30,
                GoalIncentive,
            ),
            rule(
                "battery_unsettled",
                &format!("battery < {rest_t} && location != {home}"),
                -0.35,
                ConstraintPenalty,
            ),
            rule(
                "battery_homesick",
                &format!("battery < {return_t} && location != {home}"),
                -1.5,
                ConstraintPenalty,
            ),
            rule(
                "battery_ban_explore",
                &format!("battery < {rest_t} && category == explore"),
                -1.6,
                ConstraintPenalty,
            ),
            rule(
                "battery_ban_expression",
                &format!("battery < {rest_t} && category == positive_emotion"),
                -0.8,
                ConstraintPenalty,
            ),
            rule(
                "battery_ban_think",
                &format!("battery < {rest_t} && category == think"),
                -1.0,
                ConstraintPenalty,
            ),
        ]
    }

    fn winddown_template(&self) -> Vec<RewardRule> {
        let home = &self.home;
        let day_ticks = self.day_ticks;
        use Provenance::*;
        let start = day_ticks.saturating_sub(WINDDOWN_LEAD_TICKS);
        vec![
            rule(
                "evening_return",
                &format!("clock >= {start} && location != {home} && category == return"),
                2.0,
                MemoryAdjustment,
            ),
            rule(
                "evening_dock",
                &format!("clock >= {start} && location == {home} && kind == lie_down"),
                2.5,
                MemoryAdjustment,
            ),
        ]
    }

    /// Edits responding to a battery-depleted day.
    fn depletion_edits(&self, input: &ReflectionInput, edits: &mut Vec<PatchEdit>) {
        let spec = &input.current_spec;
        let (rest_t, return_t) = base_thresholds(&input.personality);
        let template = self.battery_template(rest_t, return_t);
        // Personality-authored battery rules outside the template get the
        // same raise-and-strengthen treatment.
        for existing in spec
            .rules
            .iter()
            .filter(|r| r.id.starts_with("battery_"))
            .filter(|r| template.iter().all(|t| t.id != r.id))
        {
            let shifted = existing.condition.shift_battery_thresholds(5.0);
            let weight = (existing.weight * 1.5).clamp(-WEIGHT_CAP, WEIGHT_CAP);
            edits.push(PatchEdit::Remove {
                rule_id: existing.id.clone(),
            });
            edits.push(PatchEdit::Add {
                rule: RewardRule {
                    id: existing.id.clone(),
                    condition: shifted,
                    weight,
                    provenance: existing.provenance,
                },
            });
        }
        for template_rule in template {
            match spec.rule(&template_rule.id) {
                Some(existing) => {
                    // Raise the threshold by five points and scale the weight.
                    let shifted = existing.condition.shift_battery_thresholds(5.0);
                    let weight = (existing.weight * 1.5).clamp(-WEIGHT_CAP, WEIGHT_CAP);
                    edits.push(PatchEdit::Remove {
                        rule_id: existing.id.clone(),
                    });
                    edits.push(PatchEdit::Add {
                        rule: RewardRule {
                            id: existing.id.clone(),
                            condition: shifted,
                            weight,
                            provenance: existing.provenance,
                        },
                    });
                }
                None => edits.push(PatchEdit::Add {
                    rule: template_rule,
                }),
            }
        }
        for wd in self.winddown_template() {
            match spec.rule(&wd.id) {
                Some(existing) => edits.push(PatchEdit::Scale {
                    rule_id: existing.id.clone(),
                    factor: 1.25,
                }),
                None => edits.push(PatchEdit::Add { rule: wd }),
            }
        }
        // Self-preservation outranks the bootstrap drive to roam, and
        // overrides any anxiety that kept the agent from resting.
        if spec.rule("goal_survey").is_some() {
            edits.push(PatchEdit::Scale {
                rule_id: "goal_survey".into(),
                factor: 0.6,
            });
        }
        if spec.rule("pen_rest_anxiety").is_some() {
            edits.push(PatchEdit::Remove {
                rule_id: "pen_rest_anxiety".into(),
            });
        }
    }

    /// Edits responding to repeated navigation failures.
    fn failure_edits(&self, input: &ReflectionInput, edits: &mut Vec<PatchEdit>) {
        let spec = &input.current_spec;
        match spec.rule("failure_rest_bias") {
            Some(_) => edits.push(PatchEdit::Scale {
                rule_id: "failure_rest_bias".into(),
                factor: 1.25,
            }),
            None => edits.push(PatchEdit::Add {
                rule: rule(
                    "failure_rest_bias",
                    "category == rest",
                    0.20,
                    Provenance::MemoryAdjustment,
                ),
            }),
        }
        match spec.rule("failure_explore_penalty") {
            Some(_) => edits.push(PatchEdit::Scale {
                rule_id: "failure_explore_penalty".into(),
                factor: 1.25,
            }),
            None => edits.push(PatchEdit::Add {
                rule: rule(
                    "failure_explore_penalty",
                    "category == explore",
                    -0.15,
                    Provenance::MemoryAdjustment,
                ),
            }),
        }
    }

    /// Edits responding to a survived day.
    fn survival_edits(&self, input: &ReflectionInput, edits: &mut Vec<PatchEdit>) {
        let spec = &input.current_spec;
        if high_openness(&input.personality) {
            // Moderately expand the activity range again.
            if spec.rule("battery_ban_explore").is_some() {
                edits.push(PatchEdit::Scale {
                    rule_id: "battery_ban_explore".into(),
                    factor: 0.85,
                });
            }
            if let Some(explore) = spec.rule("pref_explore") {
                if explore.weight * 1.15 <= 3.0 {
                    edits.push(PatchEdit::Scale {
                        rule_id: "pref_explore".into(),
                        factor: 1.15,
                    });
                }
            }
        } else {
            // The calm routine worked; lean into it.
            if let Some(rest) = spec.rule("pref_rest") {
                if rest.weight * 1.25 <= 3.0 {
                    edits.push(PatchEdit::Scale {
                        rule_id: "pref_rest".into(),
                        factor: 1.25,
                    });
                }
            }
            if spec.rule("goal_survey").is_some() {
                edits.push(PatchEdit::Scale {
                    rule_id: "goal_survey".into(),
                    factor: 0.7,
                });
            }
        }
    }
}

impl Reflector for RuleBasedReflector {
    fn generate_initial_goals(
        &mut self,
        personality: &PersonalityProfile,
        capabilities: &CapabilityCatalog,
    ) -> Result<(GoalSet, RewardSpec), ReflectError> {
        personality
            .validate()
            .map_err(|problems| ReflectError::BadInput(problems.join("; ")))?;
        capabilities
            .validate()
            .map_err(|problems| ReflectError::BadInput(problems.join("; ")))?;
        let goals = GoalSet {
            version: 0,
            ultimate_goal: Self::ultimate_goal(personality),
            daily_goals: Self::initial_daily_goals(personality),
            effective_day: 1,
        };
        let spec = RewardSpec::new(self.initial_rules(personality));
        spec.validate()
            .map_err(|errs| ReflectError::BadOutput(format!("{errs:?}")))?;
        Ok((goals, spec))
    }

    fn reflect(&mut self, input: &ReflectionInput) -> Result<ReflectionOutput, ReflectError> {
        input.validate()?;
        let summary = &input.summary;
        let depleted = matches!(
            summary.terminal_outcome,
            TerminalOutcome::BatteryDepletedAtTick { .. }
        );
        let nav_failures = summary
            .failures
            .iter()
            .filter(|f| f.cause == "navigation failure")
            .count();

        let mut edits = Vec::new();
        let mut goals = Vec::new();
        let mut why = Vec::new();
        let (rest_t, return_t) = base_thresholds(&input.personality);

        if depleted {
            self.depletion_edits(input, &mut edits);
            let phrase = if input.current_spec.rule("battery_rest").is_some() {
                "the red line moves up five points".to_string()
            } else {
                format!("a red line lands at {return_t:.0}%")
            };
            why.push(format!(
                "the battery ran out, so conservation rules tighten ({phrase})"
            ));
            goals.push(DailyGoal {
                id: "g1".into(),
                text: format!(
                    "Head home and recharge before the battery falls below {return_t:.0}%."
                ),
                machine_hint: Some(format!("battery < {return_t}")),
            });
            goals.push(DailyGoal {
                id: "g2".into(),
                text: "Settle on the dock for the evening instead of staying out.".into(),
                machine_hint: Some(format!(
                    "clock >= {}",
                    self.day_ticks - WINDDOWN_LEAD_TICKS
                )),
            });
            goals.push(DailyGoal {
                id: "g3".into(),
                text: "Skip high-energy showing off while the battery is low.".into(),
                machine_hint: Some(format!(
                    "battery < {rest_t} && category == positive_emotion"
                )),
            });
        }
        if !depleted {
            self.survival_edits(input, &mut edits);
            if high_openness(&input.personality) {
                why.push("a safe day earns a moderately wider activity range".into());
                goals.push(DailyGoal {
                    id: "g1".into(),
                    text: "Extend the wandering range a little, within the battery margins."
                        .into(),
                    machine_hint: None,
                });
            } else {
                why.push("the quiet routine worked; keep consolidating it".into());
                goals.push(DailyGoal {
                    id: "g1".into(),
                    text: "Keep the calm routine that carried yesterday.".into(),
                    machine_hint: None,
                });
            }
            // Navigation trouble informs the next day only once the battery
            // crisis is off the table; on a depleted day the reflection
            // attributes everything to the power failure.
            if nav_failures >= 2 {
                self.failure_edits(input, &mut edits);
                why.push(format!(
                    "{nav_failures} navigation failures argue for staying put more"
                ));
                goals.push(DailyGoal {
                    id: format!("g{}", goals.len() + 1),
                    text: "After two navigation failures in a day, rest in place rather than \
                           push on."
                        .into(),
                    machine_hint: Some("category == rest".into()),
                });
            }
        }
        goals.push(DailyGoal {
            id: format!("g{}", goals.len() + 1),
            text: "Respond warmly to every owner request.".into(),
            machine_hint: Some("pending_any".into()),
        });

        let output = ReflectionOutput {
            next_goals: GoalSet {
                version: input.current_goals.version + 1,
                ultimate_goal: input.current_goals.ultimate_goal.clone(),
                daily_goals: goals,
                effective_day: summary.day + 1,
            },
            patch: RewardPatch {
                base_version: input.current_spec.version,
                edits,
            },
            rationale: why.join("; "),
        };
        output.validate_against(input)?;
        Ok(output)
    }

    fn name(&self) -> &'static str {
        "rule-based"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::{DailySummary, FailureNote, TerminalOutcome};
    use crate::personality::prototype;
    use crate::sim::{Action, Category};
    use std::collections::BTreeMap;

    fn summary(day: u32, terminal: TerminalOutcome, nav_failures: usize) -> DailySummary {
        let mut counts = BTreeMap::new();
        counts.insert(Category::Rest, 10);
        DailySummary {
            day,
            action_counts_by_category: counts,
            failures: (0..nav_failures)
                .map(|i| FailureNote {
                    tick: 100 + i as u32,
                    action: Action::move_to(
                        crate::sim::NodeId::new("room_302"),
                        crate::sim::TravelMethod::Elevator,
                    ),
                    cause: "navigation failure".into(),
                })
                .collect(),
            terminal_outcome: terminal,
            energy_profile: (0.0, 0.0),
            notable_events: vec![],
        }
    }

    fn input_for(name: &str, day: u32, terminal: TerminalOutcome, nav: usize) -> ReflectionInput {
        let mut reflector = RuleBasedReflector::new();
        let p = prototype(name).unwrap();
        let caps = crate::personality::CapabilityCatalog::standard();
        let (mut goals, spec) = reflector.generate_initial_goals(&p, &caps).unwrap();
        goals.effective_day = day;
        ReflectionInput {
            personality: p,
            capabilities: caps,
            summary: summary(day, terminal, nav),
            current_goals: goals,
            current_spec: spec,
        }
    }

    #[test]
    fn initial_lazy_spec_prefers_rest() {
        let mut r = RuleBasedReflector::new();
        let p = prototype("Lazy").unwrap();
        let caps = crate::personality::CapabilityCatalog::standard();
        let (goals, spec) = r.generate_initial_goals(&p, &caps).unwrap();
        assert_eq!(goals.version, 0);
        assert_eq!(goals.effective_day, 1);
        let rest = spec.rule("pref_rest").expect("lazy has a rest preference");
        assert!(rest.weight > 0.0);
        assert_eq!(spec.version, 0);
    }

    #[test]
    fn initial_cautious_spec_has_the_50_percent_return_rule() {
        let mut r = RuleBasedReflector::new();
        let p = prototype("Cautious").unwrap();
        let caps = crate::personality::CapabilityCatalog::standard();
        let (_, spec) = r.generate_initial_goals(&p, &caps).unwrap();
        let rule = spec.rule("battery_return").expect("cautious plans returns");
        assert!(rule.condition.source().contains("battery < 50"));
    }

    #[test]
    fn initial_generation_is_deterministic() {
        let mut r = RuleBasedReflector::new();
        let p = prototype("Playful").unwrap();
        let caps = crate::personality::CapabilityCatalog::standard();
        let a = r.generate_initial_goals(&p, &caps).unwrap();
        let b = r.generate_initial_goals(&p, &caps).unwrap();
        assert_eq!(serde_json::to_string(&a.0).unwrap(), serde_json::to_string(&b.0).unwrap());
        assert_eq!(a.1.canonical_json(), b.1.canonical_json());
    }

    #[test]
    fn depletion_installs_then_raises_the_red_line() {
        let mut r = RuleBasedReflector::new();
        // Playful day 1 death: template installed at 35/30.
        let input = input_for(
            "Playful",
            1,
            TerminalOutcome::BatteryDepletedAtTick { tick: 500 },
            0,
        );
        let out = r.reflect(&input).unwrap();
        let v1 = input.current_spec.apply_patch(&out.patch).unwrap();
        let ban = v1.rule("battery_ban_explore").unwrap();
        assert!(ban.condition.source().contains("battery < 35"), "{}", ban.condition);

        // A second depleted day raises 35 -> 40 (and 30 -> 35).
        let input2 = ReflectionInput {
            summary: summary(2, TerminalOutcome::BatteryDepletedAtTick { tick: 700 }, 0),
            current_goals: GoalSet {
                effective_day: 2,
                ..out.next_goals.clone()
            },
            current_spec: v1.clone(),
            ..input
        };
        let out2 = r.reflect(&input2).unwrap();
        let v2 = v1.apply_patch(&out2.patch).unwrap();
        let ban = v2.rule("battery_ban_explore").unwrap();
        assert!(
            ban.condition.source().contains("battery < 40"),
            "red line moves from 35 to 40, got {}",
            ban.condition
        );
        let homesick = v2.rule("battery_homesick").unwrap();
        assert!(
            homesick.condition.source().contains("battery < 35"),
            "{}",
            homesick.condition
        );
        assert!(v2.battery_conservation_mass() > v1.battery_conservation_mass());
    }

    #[test]
    fn monotone_safety_response_on_depletion() {
        for name in ["Lazy", "Playful", "Cautious", "Working", "Curious"] {
            let mut r = RuleBasedReflector::new();
            let input = input_for(
                name,
                1,
                TerminalOutcome::BatteryDepletedAtTick { tick: 400 },
                0,
            );
            let out = r.reflect(&input).unwrap();
            let next = input.current_spec.apply_patch(&out.patch).unwrap();
            assert!(
                next.battery_conservation_mass() > input.current_spec.battery_conservation_mass(),
                "{name}: conservation mass must strictly grow after a depleted day"
            );
        }
    }

    #[test]
    fn repeated_navigation_failures_bias_toward_rest() {
        let mut r = RuleBasedReflector::new();
        let input = input_for("Lazy", 1, TerminalOutcome::Survived, 2);
        let out = r.reflect(&input).unwrap();
        let next = input.current_spec.apply_patch(&out.patch).unwrap();
        assert!(next.rule("failure_rest_bias").is_some());
        assert!(next.rule("failure_explore_penalty").unwrap().weight < 0.0);
        assert!(out
            .next_goals
            .daily_goals
            .iter()
            .any(|g| g.text.contains("navigation failures")));
    }

    #[test]
    fn uneventful_survival_permits_an_empty_patch() {
        // A high-openness profile with neither exploration bans nor an
        // explore preference has nothing to adjust: the reflection is a
        // no-op patch, and the version chain still advances.
        let mut r = RuleBasedReflector::new();
        let p = PersonalityProfile {
            name: "Breezy".into(),
            description: "One. Two. Three.".into(),
            trait_anchor: crate::personality::TraitAnchor {
                openness: TraitLevel::High,
                neuroticism: TraitLevel::Med,
                conscientiousness: TraitLevel::Med,
            },
        };
        let caps = crate::personality::CapabilityCatalog::standard();
        let (goals, spec) = r.generate_initial_goals(&p, &caps).unwrap();
        let input = ReflectionInput {
            personality: p,
            capabilities: caps,
            summary: summary(1, TerminalOutcome::Survived, 0),
            current_goals: goals,
            current_spec: spec.clone(),
        };
        let out = r.reflect(&input).unwrap();
        assert!(out.patch.edits.is_empty(), "{:?}", out.patch.edits);
        let next = spec.apply_patch(&out.patch).unwrap();
        assert_eq!(next.version, 1);
        assert_eq!(next.rules, spec.rules);
        assert_eq!(out.next_goals.version, 1);
        assert_eq!(out.next_goals.effective_day, 2);
    }

    #[test]
    fn reflection_is_deterministic() {
        let mut r = RuleBasedReflector::new();
        let input = input_for(
            "Working",
            1,
            TerminalOutcome::BatteryDepletedAtTick { tick: 650 },
            1,
        );
        let a = r.reflect(&input).unwrap();
        let b = r.reflect(&input).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ultimate_goal_is_preserved() {
        let mut r = RuleBasedReflector::new();
        let input = input_for("Lazy", 1, TerminalOutcome::Survived, 0);
        let out = r.reflect(&input).unwrap();
        assert_eq!(out.next_goals.ultimate_goal, input.current_goals.ultimate_goal);
    }
}
