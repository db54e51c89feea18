//! Lightweight parsing of natural-language user commands.
//!
//! Commands name places by node id ("go to room_302 by elevator"), so the
//! parser is a token scan: the first token that names a node in the building
//! becomes the target, the first token naming a travel method becomes the
//! method. The same tokenizer feeds the slot-filling labels of the distilled
//! policy, keeping the two views of a command consistent.

use super::action::TravelMethod;
use super::map::{BuildingMap, NodeId};

/// Splits text into lowercase word tokens; underscores stay inside tokens so
/// node ids survive intact.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|t| !t.is_empty())
        .map(|t| t.to_ascii_lowercase())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedCommand {
    pub target: Option<NodeId>,
    pub method: Option<TravelMethod>,
}

pub fn parse_command(text: &str, map: &BuildingMap) -> ParsedCommand {
    let mut parsed = ParsedCommand::default();
    for token in tokenize(text) {
        if parsed.target.is_none() {
            let candidate = NodeId::new(token.clone());
            if map.contains(&candidate) {
                parsed.target = Some(candidate);
                continue;
            }
        }
        if parsed.method.is_none() {
            if let Some(m) = TravelMethod::parse(&token) {
                parsed.method = Some(m);
            }
        }
    }
    parsed
}
