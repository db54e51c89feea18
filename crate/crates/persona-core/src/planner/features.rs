//! Hand-designed features for the distilled policy.
//!
//! The belief featurizer exposes exactly the quantities reward rules can
//! condition on (battery thresholds, clock phase, location class, pending
//! commands), so a linear student can imitate a rule-driven teacher. Token
//! features feed the slot head.

use crate::sim::{parse_command, tokenize, SimContext, TravelMethod};

use super::model::Belief;

/// Number of belief features.
pub const FEATURE_LEN: usize = 27;

pub type FeatureVector = Vec<f64>;

/// Battery thresholds mirrored as indicator features; these match the
/// thresholds the reflector's rules move through.
const BATTERY_CUTS: [f64; 7] = [20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0];

pub fn featurize(ctx: &SimContext, belief: &Belief) -> FeatureVector {
    let s = &belief.observed;
    let day = ctx.config.day_ticks as f64;
    let winddown = ctx.config.day_ticks.saturating_sub(300);
    let battery = s.battery.percent();
    let mut f = Vec::with_capacity(FEATURE_LEN);
    f.push(1.0); // bias
    f.push(battery / 100.0);
    for cut in BATTERY_CUTS {
        f.push(if battery < cut { 1.0 } else { 0.0 });
    }
    f.push(if battery > 80.0 { 1.0 } else { 0.0 });
    f.push(s.motor_temp / 100.0);
    f.push(s.mood);
    f.push(if &s.location == ctx.home() { 1.0 } else { 0.0 });
    f.push(if s.charging { 1.0 } else { 0.0 });
    f.push(s.clock as f64 / day);
    f.push(if s.clock >= winddown { 1.0 } else { 0.0 });
    let home_floor = ctx.map.floor_of(ctx.home()).unwrap_or(1);
    f.push(if s.floor == home_floor { 1.0 } else { 0.0 });
    f.push(if ctx.map.is_elevator(&s.location) { 1.0 } else { 0.0 });
    f.push(if ctx.map.is_stairs(&s.location) { 1.0 } else { 0.0 });

    let mut pending = [0.0; 3];
    for ev in &s.pending_events {
        match ev.category {
            crate::sim::EventCategory::ExplorationRequest => pending[0] = 1.0,
            crate::sim::EventCategory::AffectionRequest => pending[1] = 1.0,
            crate::sim::EventCategory::TaskRequest => pending[2] = 1.0,
        }
    }
    f.extend_from_slice(&pending);
    f.push(if s.pending_events.is_empty() { 0.0 } else { 1.0 });

    // First pending navigation target, if parseable.
    let mut target_same_floor = 0.0;
    let mut target_is_here = 0.0;
    for ev in &s.pending_events {
        let parsed = parse_command(&ev.text, &ctx.map);
        if let Some(target) = parsed.target {
            if ctx.map.floor_of(&target) == Some(s.floor) {
                target_same_floor = 1.0;
            }
            if target == s.location {
                target_is_here = 1.0;
            }
            break;
        }
    }
    f.push(target_same_floor);
    f.push(target_is_here);
    f.push(if s.motor_temp > 60.0 { 1.0 } else { 0.0 });
    f.push(if s.mood > 0.5 { 1.0 } else { 0.0 });

    debug_assert_eq!(f.len(), FEATURE_LEN);
    f
}

/// Number of per-token features.
pub const TOKEN_FEATURE_LEN: usize = 8;

const LOCATION_CUES: [&str; 7] = ["to", "at", "into", "near", "check", "explore", "inspect"];
const METHOD_CUES: [&str; 5] = ["by", "via", "using", "take", "on"];

/// Tokenizes a command for slot labeling; same splitting as the command
/// parser so labels line up with what the simulator understands.
pub fn tokenize_command(text: &str) -> Vec<String> {
    tokenize(text)
}

/// Whether a token is shaped like a building node id. Token features are
/// deliberately map-free so a trained slot head is not tied to one floor
/// plan; decoded locations are still validated against the live map.
fn looks_like_node_id(token: &str) -> bool {
    ["room_", "elevator_", "stairs_"]
        .iter()
        .any(|p| token.starts_with(p) && token.len() > p.len())
}

pub fn token_features(tokens: &[String], index: usize) -> FeatureVector {
    let token = &tokens[index];
    let prev = if index > 0 { tokens[index - 1].as_str() } else { "" };
    let mut f = Vec::with_capacity(TOKEN_FEATURE_LEN);
    f.push(1.0); // bias
    f.push(if looks_like_node_id(token) { 1.0 } else { 0.0 });
    f.push(if TravelMethod::parse(token).is_some() { 1.0 } else { 0.0 });
    f.push(if LOCATION_CUES.contains(&prev) { 1.0 } else { 0.0 });
    f.push(if METHOD_CUES.contains(&prev) { 1.0 } else { 0.0 });
    f.push(index as f64 / tokens.len().max(1) as f64);
    f.push(if token.chars().any(|c| c.is_ascii_digit()) { 1.0 } else { 0.0 });
    f.push(if token.starts_with("room_") { 1.0 } else { 0.0 });
    debug_assert_eq!(f.len(), TOKEN_FEATURE_LEN);
    f
}
