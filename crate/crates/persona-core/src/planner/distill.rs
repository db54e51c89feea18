//! Policy distillation: MCTS-labeled datasets, the compact two-head student
//! (multi-label intent + BIO slot filling), and its serialization.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::sim::{Action, ActionKind, NodeId, SimContext, TravelMethod};

use super::features::{
    featurize, token_features, tokenize_command, FEATURE_LEN, TOKEN_FEATURE_LEN,
};
use super::model::{Belief, SandboxModel};
use super::oracle::RuleOracle;
use super::{mcts_search, PlannerConfig, PlannerError};

/// BIO tags over command tokens for the two slot types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlotLabel {
    O,
    BLocation,
    ILocation,
    BMethod,
    IMethod,
}

impl SlotLabel {
    pub const ALL: [SlotLabel; 5] = [
        SlotLabel::O,
        SlotLabel::BLocation,
        SlotLabel::ILocation,
        SlotLabel::BMethod,
        SlotLabel::IMethod,
    ];

    fn index(self) -> usize {
        Self::ALL.iter().position(|l| *l == self).unwrap()
    }

    /// May `self` follow `prev` in a valid BIO sequence?
    pub fn may_follow(self, prev: SlotLabel) -> bool {
        match self {
            SlotLabel::ILocation => {
                matches!(prev, SlotLabel::BLocation | SlotLabel::ILocation)
            }
            SlotLabel::IMethod => matches!(prev, SlotLabel::BMethod | SlotLabel::IMethod),
            _ => true,
        }
    }
}

/// Checks BIO validity of a whole sequence.
pub fn is_valid_bio(labels: &[SlotLabel]) -> bool {
    let mut prev = SlotLabel::O;
    for l in labels {
        if !l.may_follow(prev) {
            return false;
        }
        prev = *l;
    }
    true
}

/// One supervised pair: belief features, command tokens with gold labels,
/// and the teacher's chosen action.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetExample {
    pub features: Vec<f64>,
    pub tokens: Vec<String>,
    pub token_labels: Vec<SlotLabel>,
    pub teacher: Action,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Dataset {
    pub examples: Vec<DatasetExample>,
}

impl Dataset {
    /// JSON-lines serialization: a header line, then one example per line.
    pub fn save(&self, path: &Path) -> Result<(), std::io::Error> {
        use std::io::Write;
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "{}", serde_json::json!({"schema": "distill-dataset", "version": 1}))?;
        for ex in &self.examples {
            writeln!(w, "{}", serde_json::to_string(ex)?)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, std::io::Error> {
        let text = std::fs::read_to_string(path)?;
        let mut examples = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            examples.push(serde_json::from_str(line).map_err(|e| {
                std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("line {}: {e}", i + 1),
                )
            })?);
        }
        Ok(Dataset { examples })
    }
}

/// Labels `states` with an MCTS teacher: one (features, action, slots) pair
/// per state. Slot labels come from the teacher's `move_to` payload matched
/// against the pending command's tokens.
pub fn collect_dataset(
    model: &SandboxModel,
    oracle: &RuleOracle,
    states: &[Belief],
    config: &PlannerConfig,
    seed: u64,
) -> Result<Dataset, PlannerError> {
    let spec = oracle.spec.clone();
    let home = model.home().clone();
    let reward_fn = |b: &Belief, a: &Action, extrinsic: f64| {
        spec.evaluate_intrinsic(&crate::reward::RewardInputs {
            state: &b.observed,
            action: a,
            home: &home,
        }) + extrinsic
    };
    let mut examples = Vec::with_capacity(states.len());
    for (i, belief) in states.iter().enumerate() {
        let (teacher, _) = mcts_search(
            model,
            belief,
            oracle,
            oracle,
            &reward_fn,
            config,
            seed.wrapping_add(i as u64),
        )?;
        let features = featurize(model.context(), belief);
        let tokens = belief
            .pending_command()
            .map(|ev| tokenize_command(&ev.text))
            .unwrap_or_default();
        let token_labels = label_tokens(&tokens, &teacher);
        examples.push(DatasetExample {
            features,
            tokens,
            token_labels,
            teacher,
        });
    }
    Ok(Dataset { examples })
}

/// Gold BIO labels: tokens equal to the teacher's target node id get
/// B-location, tokens naming its travel method get B-method.
pub fn label_tokens(tokens: &[String], teacher: &Action) -> Vec<SlotLabel> {
    let mut labels = vec![SlotLabel::O; tokens.len()];
    if let Action::MoveTo { location, method } = teacher {
        for (i, tok) in tokens.iter().enumerate() {
            if tok == location.as_str() && !labels.contains(&SlotLabel::BLocation) {
                labels[i] = SlotLabel::BLocation;
            } else if TravelMethod::parse(tok) == Some(*method)
                && !labels.contains(&SlotLabel::BMethod)
            {
                labels[i] = SlotLabel::BMethod;
            }
        }
    }
    labels
}

/// The distilled two-head student: independent logistic heads per action
/// kind (multi-label intent) and a softmax head per token over BIO labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistilledPolicy {
    pub format: String,
    pub version: u32,
    /// One weight row per action kind, `ActionKind::ALL` order.
    pub intent_weights: Vec<Vec<f64>>,
    /// One weight row per slot label, `SlotLabel::ALL` order.
    pub slot_weights: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub examples: usize,
    /// Share of training examples where the student's intent matches the
    /// teacher's action kind.
    pub training_agreement: f64,
    /// Action kinds absent from the dataset.
    pub missing_kinds: Vec<ActionKind>,
    pub warnings: Vec<String>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Trains the two heads with deterministic full-batch gradient descent.
pub fn train_distilled(dataset: &Dataset) -> Result<(DistilledPolicy, TrainReport), PlannerError> {
    if dataset.examples.is_empty() {
        return Err(PlannerError::EmptyDataset);
    }
    let n = dataset.examples.len();
    let kinds = ActionKind::ALL;
    let mut warnings = Vec::new();

    // Intent head: one-vs-rest logistic regression per kind.
    let mut intent_weights = vec![vec![0.0; FEATURE_LEN]; kinds.len()];
    let targets: Vec<usize> = dataset
        .examples
        .iter()
        .map(|ex| kinds.iter().position(|k| *k == ex.teacher.kind()).unwrap())
        .collect();

    let missing_kinds: Vec<ActionKind> = kinds
        .iter()
        .filter(|k| !targets.iter().any(|t| kinds[*t] == **k))
        .cloned()
        .collect();
    if !missing_kinds.is_empty() {
        warnings.push(format!(
            "{} action kinds unrepresented in the dataset",
            missing_kinds.len()
        ));
    }
    let distinct: std::collections::HashSet<usize> = targets.iter().copied().collect();
    if distinct.len() == 1 {
        warnings.push("degenerate dataset: a single teacher action kind".to_string());
    }

    let lr = 0.8;
    let epochs = 400;
    for _ in 0..epochs {
        let mut grads = vec![vec![0.0; FEATURE_LEN]; kinds.len()];
        for (ex, target) in dataset.examples.iter().zip(&targets) {
            for (k, w) in intent_weights.iter().enumerate() {
                let y = if k == *target { 1.0 } else { 0.0 };
                let p = sigmoid(dot(w, &ex.features));
                let err = p - y;
                for (g, xf) in grads[k].iter_mut().zip(&ex.features) {
                    *g += err * xf;
                }
            }
        }
        for (w, g) in intent_weights.iter_mut().zip(&grads) {
            for (wi, gi) in w.iter_mut().zip(g) {
                *wi -= lr * gi / n as f64;
            }
        }
    }

    // Slot head: multinomial logistic regression over token labels.
    let mut slot_weights = vec![vec![0.0; TOKEN_FEATURE_LEN]; SlotLabel::ALL.len()];
    let mut token_xs: Vec<Vec<f64>> = Vec::new();
    let mut token_ys: Vec<usize> = Vec::new();
    for ex in &dataset.examples {
        for i in 0..ex.tokens.len() {
            token_xs.push(token_features(&ex.tokens, i));
            token_ys.push(ex.token_labels[i].index());
        }
    }
    if !token_xs.is_empty() {
        let m = token_xs.len();
        for _ in 0..400 {
            let mut grads = vec![vec![0.0; TOKEN_FEATURE_LEN]; SlotLabel::ALL.len()];
            for (x, y) in token_xs.iter().zip(&token_ys) {
                let logits: Vec<f64> = slot_weights.iter().map(|w| dot(w, x)).collect();
                let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
                let z: f64 = exps.iter().sum();
                for (k, e) in exps.iter().enumerate() {
                    let p = e / z;
                    let err = p - if k == *y { 1.0 } else { 0.0 };
                    for (g, xf) in grads[k].iter_mut().zip(x) {
                        *g += err * xf;
                    }
                }
            }
            for (w, g) in slot_weights.iter_mut().zip(&grads) {
                for (wi, gi) in w.iter_mut().zip(g) {
                    *wi -= 1.0 * gi / m as f64;
                }
            }
        }
    }

    let policy = DistilledPolicy {
        format: "distilled-policy".to_string(),
        version: 1,
        intent_weights,
        slot_weights,
    };

    let agree = dataset
        .examples
        .iter()
        .filter(|ex| policy.intent_kind(&ex.features) == ex.teacher.kind())
        .count();
    let report = TrainReport {
        examples: n,
        training_agreement: agree as f64 / n as f64,
        missing_kinds,
        warnings,
    };
    Ok((policy, report))
}

/// Inference result: the selected action, decoded slots, and whether the
/// BIO fallback fired.
#[derive(Debug, Clone, PartialEq)]
pub struct InferOutcome {
    pub action: Action,
    pub slots: Vec<(String, SlotLabel)>,
    /// Set when a `move_to` intent had no decodable location and inference
    /// fell back to the best non-navigation intent.
    pub fell_back: bool,
}

impl DistilledPolicy {
    /// Per-kind intent probabilities, `ActionKind::ALL` order.
    pub fn intent_probs(&self, features: &[f64]) -> Vec<f64> {
        self.intent_weights
            .iter()
            .map(|w| sigmoid(dot(w, features)))
            .collect()
    }

    pub fn intent_kind(&self, features: &[f64]) -> ActionKind {
        let probs = self.intent_probs(features);
        let mut best = 0;
        for (i, p) in probs.iter().enumerate() {
            if *p > probs[best] {
                best = i;
            }
        }
        ActionKind::ALL[best]
    }

    fn best_non_move_to(&self, features: &[f64]) -> ActionKind {
        let probs = self.intent_probs(features);
        let mut best = None;
        for (i, p) in probs.iter().enumerate() {
            if ActionKind::ALL[i] == ActionKind::MoveTo {
                continue;
            }
            match best {
                Some((_, bp)) if *p <= bp => {}
                _ => best = Some((i, *p)),
            }
        }
        ActionKind::ALL[best.expect("non-move_to kinds exist").0]
    }

    /// Labels tokens with the best valid BIO sequence (greedy, constrained).
    pub fn decode_slots(&self, tokens: &[String]) -> Vec<(String, SlotLabel)> {
        let mut prev = SlotLabel::O;
        let mut out = Vec::with_capacity(tokens.len());
        for i in 0..tokens.len() {
            let x = token_features(tokens, i);
            let mut best: Option<(SlotLabel, f64)> = None;
            for label in SlotLabel::ALL {
                if !label.may_follow(prev) {
                    continue;
                }
                let score = dot(&self.slot_weights[label.index()], &x);
                match best {
                    Some((_, s)) if score <= s => {}
                    _ => best = Some((label, score)),
                }
            }
            let label = best.expect("O is always valid").0;
            out.push((tokens[i].clone(), label));
            prev = label;
        }
        out
    }

    /// Low-latency action selection: intent argmax, then slot decoding for
    /// navigation intents. With no command text, a `move_to` intent is a
    /// self-directed return home. A command whose BIO labels produce no
    /// usable location falls back to the best non-navigation intent.
    pub fn infer(
        &self,
        ctx: &SimContext,
        belief: &Belief,
        command_text: Option<&str>,
    ) -> InferOutcome {
        let features = featurize(ctx, belief);
        let kind = self.intent_kind(&features);
        if kind != ActionKind::MoveTo {
            return InferOutcome {
                action: Action::from_kind(kind).expect("non-move_to kind"),
                slots: Vec::new(),
                fell_back: false,
            };
        }

        let text_owned;
        let text = match command_text {
            Some(t) => Some(t),
            None => match belief.pending_command() {
                Some(ev) => {
                    text_owned = ev.text.clone();
                    Some(text_owned.as_str())
                }
                None => None,
            },
        };

        let default_method = |target: &NodeId| {
            if ctx.map.floor_of(target) == Some(belief.observed.floor) {
                TravelMethod::Walk
            } else {
                TravelMethod::Elevator
            }
        };

        match text {
            None => {
                // Self-directed navigation: return to home base.
                let home = ctx.home().clone();
                let method = default_method(&home);
                InferOutcome {
                    action: Action::move_to(home, method),
                    slots: Vec::new(),
                    fell_back: false,
                }
            }
            Some(text) => {
                let tokens = tokenize_command(text);
                let slots = self.decode_slots(&tokens);
                let location = slots
                    .iter()
                    .find(|(_, l)| *l == SlotLabel::BLocation)
                    .map(|(t, _)| NodeId::new(t.clone()))
                    .filter(|n| ctx.map.contains(n));
                match location {
                    Some(target) => {
                        let method = slots
                            .iter()
                            .find(|(_, l)| *l == SlotLabel::BMethod)
                            .and_then(|(t, _)| TravelMethod::parse(t))
                            .unwrap_or_else(|| default_method(&target));
                        InferOutcome {
                            action: Action::move_to(target, method),
                            slots,
                            fell_back: false,
                        }
                    }
                    None => {
                        let kind = self.best_non_move_to(&features);
                        InferOutcome {
                            action: Action::from_kind(kind).expect("non-move_to"),
                            slots,
                            fell_back: true,
                        }
                    }
                }
            }
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), std::io::Error> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: &Path) -> Result<Self, std::io::Error> {
        let text = std::fs::read_to_string(path)?;
        let policy: DistilledPolicy = serde_json::from_str(&text)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        if policy.format != "distilled-policy" || policy.version != 1 {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("unsupported policy format {}@{}", policy.format, policy.version),
            ));
        }
        Ok(policy)
    }
}

/// Exact agreement between a student decision and its teacher's.
pub fn actions_agree(student: &Action, teacher: &Action) -> bool {
    student == teacher
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{SimConfig, Simulator};

    #[test]
    fn bio_validity_rules() {
        use SlotLabel::*;
        assert!(is_valid_bio(&[O, BLocation, ILocation, O, BMethod]));
        assert!(!is_valid_bio(&[O, ILocation]));
        assert!(!is_valid_bio(&[BLocation, IMethod]));
        assert!(is_valid_bio(&[]));
    }

    #[test]
    fn gold_labels_from_teacher_payload() {
        let tokens = tokenize_command("go to room_302 by elevator");
        let teacher = Action::move_to(NodeId::new("room_302"), TravelMethod::Elevator);
        let labels = label_tokens(&tokens, &teacher);
        assert_eq!(
            labels,
            vec![
                SlotLabel::O,
                SlotLabel::O,
                SlotLabel::BLocation,
                SlotLabel::O,
                SlotLabel::BMethod
            ]
        );
        assert!(is_valid_bio(&labels));
        // Non-navigation teachers produce all-O labels.
        assert_eq!(
            label_tokens(&tokens, &Action::Idle),
            vec![SlotLabel::O; 5]
        );
    }

    #[test]
    fn empty_dataset_is_an_error() {
        assert!(matches!(
            train_distilled(&Dataset::default()),
            Err(PlannerError::EmptyDataset)
        ));
    }

    #[test]
    fn separable_toy_dataset_trains_to_full_agreement() {
        // Two classes split by the battery feature: rest at low battery,
        // wander at high battery.
        let sim = Simulator::new(SimConfig::builtin_default(), 7).unwrap();
        let ctx = sim.context().clone();
        let mut examples = Vec::new();
        for i in 0..40 {
            let mut state = sim.state().clone();
            let high = i % 2 == 0;
            state.battery =
                crate::sim::BatteryLevel::from_percent(if high { 90.0 } else { 15.0 });
            let belief = Belief::new(state);
            examples.push(DatasetExample {
                features: featurize(&ctx, &belief),
                tokens: vec![],
                token_labels: vec![],
                teacher: if high { Action::Wander } else { Action::Sit },
            });
        }
        let (policy, report) = train_distilled(&Dataset { examples }).unwrap();
        assert_eq!(report.training_agreement, 1.0, "separable data fits exactly");
        assert!(!report.missing_kinds.is_empty());
        // And inference follows the boundary.
        let mut state = sim.state().clone();
        state.battery = crate::sim::BatteryLevel::from_percent(10.0);
        let out = policy.infer(&ctx, &Belief::new(state), None);
        assert_eq!(out.action, Action::Sit);
    }

    #[test]
    fn degenerate_single_class_warns_but_trains() {
        let sim = Simulator::new(SimConfig::builtin_default(), 7).unwrap();
        let ctx = sim.context().clone();
        let belief = Belief::new(sim.state().clone());
        let examples = vec![
            DatasetExample {
                features: featurize(&ctx, &belief),
                tokens: vec![],
                token_labels: vec![],
                teacher: Action::Idle,
            };
            5
        ];
        let (_, report) = train_distilled(&Dataset { examples }).unwrap();
        assert!(report.warnings.iter().any(|w| w.contains("degenerate")));
    }

    #[test]
    fn policy_round_trips_through_disk() {
        let sim = Simulator::new(SimConfig::builtin_default(), 7).unwrap();
        let ctx = sim.context().clone();
        let belief = Belief::new(sim.state().clone());
        let examples = vec![DatasetExample {
            features: featurize(&ctx, &belief),
            tokens: vec![],
            token_labels: vec![],
            teacher: Action::Idle,
        }];
        let (policy, _) = train_distilled(&Dataset { examples }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("policy.json");
        policy.save(&path).unwrap();
        let loaded = DistilledPolicy::load(&path).unwrap();
        assert_eq!(loaded.intent_weights, policy.intent_weights);
    }
}
