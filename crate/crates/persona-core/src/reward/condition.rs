//! The closed condition language reward rules are written in.
//!
//! A condition is a conjunction of clauses over the observable state and the
//! candidate action. The grammar (EBNF, also in `docs/condition-language.md`):
//!
//! ```text
//! condition := clause { "&&" clause }
//! clause    := "true"
//!            | "charging" | "not_charging"
//!            | "pending_any" | "no_pending"
//!            | "pending" "(" event_category ")"
//!            | "category" "==" category_name
//!            | "kind" "==" kind_name
//!            | "location" ("==" | "!=") node_id
//!            | "floor" ("==" | "!=") integer
//!            | num_field cmp number
//! num_field := "battery" | "temp" | "clock" | "mood"
//! cmp       := "<" | "<=" | ">" | ">=" | "==" | "!="
//! event_category := "exploration_request" | "affection_request" | "task_request"
//! ```
//!
//! `battery` compares in percent, `temp` in degrees, `clock` in ticks and
//! `mood` in its raw [-1, 1] range. Conditions serialize as their canonical
//! source text, so a parsed condition always round-trips byte-identically.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::sim::{
    action_category, Action, ActionKind, Category, EventCategory, NodeId, WorldState,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("condition parse error at `{at}`: {reason}")]
pub struct ConditionParseError {
    pub at: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumField {
    Battery,
    Temp,
    Clock,
    Mood,
}

impl NumField {
    fn name(self) -> &'static str {
        match self {
            NumField::Battery => "battery",
            NumField::Temp => "temp",
            NumField::Clock => "clock",
            NumField::Mood => "mood",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    fn name(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    fn apply(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Clause {
    True,
    Charging(bool),
    PendingAny(bool),
    Pending(EventCategory),
    CategoryIs(Category),
    KindIs(ActionKind),
    Location { node: NodeId, negated: bool },
    Floor { floor: i32, negated: bool },
    Compare { field: NumField, op: CmpOp, value: f64 },
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::True => write!(f, "true"),
            Clause::Charging(true) => write!(f, "charging"),
            Clause::Charging(false) => write!(f, "not_charging"),
            Clause::PendingAny(true) => write!(f, "pending_any"),
            Clause::PendingAny(false) => write!(f, "no_pending"),
            Clause::Pending(cat) => write!(f, "pending({})", cat.name()),
            Clause::CategoryIs(c) => write!(f, "category == {}", c.name()),
            Clause::KindIs(k) => write!(f, "kind == {}", k.name()),
            Clause::Location { node, negated } => {
                write!(f, "location {} {}", if *negated { "!=" } else { "==" }, node)
            }
            Clause::Floor { floor, negated } => {
                write!(f, "floor {} {}", if *negated { "!=" } else { "==" }, floor)
            }
            Clause::Compare { field, op, value } => {
                write!(f, "{} {} {}", field.name(), op.name(), value)
            }
        }
    }
}

/// The inputs a condition is evaluated against.
#[derive(Debug, Clone, Copy)]
pub struct RewardInputs<'a> {
    pub state: &'a WorldState,
    pub action: &'a Action,
    pub home: &'a NodeId,
}

/// A parsed conjunction; keeps its canonical source form.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    clauses: Vec<Clause>,
    source: String,
}

impl Condition {
    pub fn always() -> Self {
        Condition {
            clauses: vec![Clause::True],
            source: "true".to_string(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConditionParseError> {
        let clauses = parse_clauses(text)?;
        let source = clauses
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" && ");
        Ok(Condition { clauses, source })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// True iff every clause holds for `inputs`. Pure.
    pub fn eval(&self, inputs: &RewardInputs<'_>) -> bool {
        self.clauses.iter().all(|clause| match clause {
            Clause::True => true,
            Clause::Charging(want) => inputs.state.charging == *want,
            Clause::PendingAny(want) => !inputs.state.pending_events.is_empty() == *want,
            Clause::Pending(cat) => inputs.state.has_pending(*cat),
            Clause::CategoryIs(c) => action_category(inputs.action, inputs.home) == *c,
            Clause::KindIs(k) => inputs.action.kind() == *k,
            Clause::Location { node, negated } => {
                (&inputs.state.location == node) != *negated
            }
            Clause::Floor { floor, negated } => (inputs.state.floor == *floor) != *negated,
            Clause::Compare { field, op, value } => {
                let lhs = match field {
                    NumField::Battery => inputs.state.battery.percent(),
                    NumField::Temp => inputs.state.motor_temp,
                    NumField::Clock => inputs.state.clock as f64,
                    NumField::Mood => inputs.state.mood,
                };
                op.apply(lhs, *value)
            }
        })
    }

    /// Whether any clause compares the battery level.
    pub fn mentions_battery(&self) -> bool {
        self.clauses
            .iter()
            .any(|c| matches!(c, Clause::Compare { field: NumField::Battery, .. }))
    }

    /// Whether any clause pins the action to `category`.
    pub fn requires_category(&self, category: Category) -> bool {
        self.clauses
            .iter()
            .any(|c| matches!(c, Clause::CategoryIs(x) if *x == category))
    }

    pub fn requires_kind(&self, kind: ActionKind) -> bool {
        self.clauses
            .iter()
            .any(|c| matches!(c, Clause::KindIs(x) if *x == kind))
    }

    /// Rewrites battery thresholds by `delta` percent (clamped to [0, 100]),
    /// returning the new condition. Unchanged if no battery clause exists.
    pub fn shift_battery_thresholds(&self, delta: f64) -> Condition {
        let clauses: Vec<Clause> = self
            .clauses
            .iter()
            .map(|c| match c {
                Clause::Compare {
                    field: NumField::Battery,
                    op,
                    value,
                } => Clause::Compare {
                    field: NumField::Battery,
                    op: *op,
                    value: (value + delta).clamp(0.0, 100.0),
                },
                other => other.clone(),
            })
            .collect();
        let source = clauses
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" && ");
        Condition { clauses, source }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.source)
    }
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for Condition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Condition::parse(&text).map_err(serde::de::Error::custom)
    }
}

fn err(at: &str, reason: impl Into<String>) -> ConditionParseError {
    ConditionParseError {
        at: at.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Number(f64),
    Op(CmpOp),
    And,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<Token>, ConditionParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            tokens.push(Token::Ident(chars[start..i].iter().collect()));
        } else if c.is_ascii_digit() || c == '-' || c == '+' {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 = text
                .parse()
                .map_err(|_| err(&text, "not a number"))?;
            tokens.push(Token::Number(value));
        } else {
            match c {
                '(' => {
                    tokens.push(Token::LParen);
                    i += 1;
                }
                ')' => {
                    tokens.push(Token::RParen);
                    i += 1;
                }
                '&' => {
                    if chars.get(i + 1) == Some(&'&') {
                        tokens.push(Token::And);
                        i += 2;
                    } else {
                        return Err(err("&", "expected `&&`"));
                    }
                }
                '<' | '>' | '=' | '!' => {
                    let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
                    let (op, len) = match two.as_str() {
                        "<=" => (CmpOp::Le, 2),
                        ">=" => (CmpOp::Ge, 2),
                        "==" => (CmpOp::Eq, 2),
                        "!=" => (CmpOp::Ne, 2),
                        _ if c == '<' => (CmpOp::Lt, 1),
                        _ if c == '>' => (CmpOp::Gt, 1),
                        _ => return Err(err(&two, "unknown operator")),
                    };
                    tokens.push(Token::Op(op));
                    i += len;
                }
                _ => return Err(err(&c.to_string(), "unexpected character")),
            }
        }
    }
    Ok(tokens)
}

fn parse_clauses(text: &str) -> Result<Vec<Clause>, ConditionParseError> {
    let tokens = lex(text)?;
    if tokens.is_empty() {
        return Err(err(text, "empty condition"));
    }
    let mut clauses = Vec::new();
    let mut pos = 0;
    loop {
        let (clause, next) = parse_clause(&tokens, pos)?;
        clauses.push(clause);
        pos = next;
        match tokens.get(pos) {
            None => break,
            Some(Token::And) => pos += 1,
            Some(other) => return Err(err(&format!("{other:?}"), "expected `&&` or end")),
        }
    }
    Ok(clauses)
}

fn parse_clause(tokens: &[Token], pos: usize) -> Result<(Clause, usize), ConditionParseError> {
    let ident = match tokens.get(pos) {
        Some(Token::Ident(s)) => s.as_str(),
        other => return Err(err(&format!("{other:?}"), "expected a field or flag")),
    };
    match ident {
        "true" => Ok((Clause::True, pos + 1)),
        "charging" => Ok((Clause::Charging(true), pos + 1)),
        "not_charging" => Ok((Clause::Charging(false), pos + 1)),
        "pending_any" => Ok((Clause::PendingAny(true), pos + 1)),
        "no_pending" => Ok((Clause::PendingAny(false), pos + 1)),
        "pending" => {
            let cat = match (tokens.get(pos + 1), tokens.get(pos + 2), tokens.get(pos + 3)) {
                (Some(Token::LParen), Some(Token::Ident(name)), Some(Token::RParen)) => {
                    match name.as_str() {
                        "exploration_request" => EventCategory::ExplorationRequest,
                        "affection_request" => EventCategory::AffectionRequest,
                        "task_request" => EventCategory::TaskRequest,
                        other => return Err(err(other, "unknown event category")),
                    }
                }
                _ => return Err(err("pending", "expected `pending(<event category>)`")),
            };
            Ok((Clause::Pending(cat), pos + 4))
        }
        "category" => {
            let (op, name, next) = eq_ident(tokens, pos, "category")?;
            if op != CmpOp::Eq {
                return Err(err("category", "only `==` is supported"));
            }
            let cat = Category::parse(&name)
                .ok_or_else(|| err(&name, "unknown action category"))?;
            Ok((Clause::CategoryIs(cat), next))
        }
        "kind" => {
            let (op, name, next) = eq_ident(tokens, pos, "kind")?;
            if op != CmpOp::Eq {
                return Err(err("kind", "only `==` is supported"));
            }
            let kind = ActionKind::parse(&name)
                .ok_or_else(|| err(&name, "unknown action kind"))?;
            Ok((Clause::KindIs(kind), next))
        }
        "location" => {
            let (op, name, next) = eq_ident(tokens, pos, "location")?;
            let negated = match op {
                CmpOp::Eq => false,
                CmpOp::Ne => true,
                _ => return Err(err("location", "only `==` / `!=` are supported")),
            };
            Ok((
                Clause::Location {
                    node: NodeId::new(name),
                    negated,
                },
                next,
            ))
        }
        "floor" => {
            let op = match tokens.get(pos + 1) {
                Some(Token::Op(op)) => *op,
                _ => return Err(err("floor", "expected comparison operator")),
            };
            let negated = match op {
                CmpOp::Eq => false,
                CmpOp::Ne => true,
                _ => return Err(err("floor", "only `==` / `!=` are supported")),
            };
            let floor = match tokens.get(pos + 2) {
                Some(Token::Number(n)) if n.fract() == 0.0 => *n as i32,
                _ => return Err(err("floor", "expected an integer")),
            };
            Ok((Clause::Floor { floor, negated }, pos + 3))
        }
        "battery" | "temp" | "clock" | "mood" => {
            let field = match ident {
                "battery" => NumField::Battery,
                "temp" => NumField::Temp,
                "clock" => NumField::Clock,
                _ => NumField::Mood,
            };
            let op = match tokens.get(pos + 1) {
                Some(Token::Op(op)) => *op,
                _ => return Err(err(ident, "expected comparison operator")),
            };
            let value = match tokens.get(pos + 2) {
                Some(Token::Number(n)) => *n,
                Some(Token::Ident(word)) => {
                    return Err(err(word, format!("`{word}` is not a number")))
                }
                _ => return Err(err(ident, "expected a number")),
            };
            Ok((Clause::Compare { field, op, value }, pos + 3))
        }
        other => Err(err(other, "unknown field or flag")),
    }
}

fn eq_ident(
    tokens: &[Token],
    pos: usize,
    what: &str,
) -> Result<(CmpOp, String, usize), ConditionParseError> {
    let op = match tokens.get(pos + 1) {
        Some(Token::Op(op)) => *op,
        _ => return Err(err(what, "expected `==` or `!=`")),
    };
    let name = match tokens.get(pos + 2) {
        Some(Token::Ident(s)) => s.clone(),
        _ => return Err(err(what, "expected an identifier")),
    };
    Ok((op, name, pos + 3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::BatteryLevel;

    fn state(battery_percent: f64) -> WorldState {
        WorldState {
            battery: BatteryLevel::from_percent(battery_percent),
            motor_temp: 30.0,
            location: NodeId::new("room_101"),
            floor: 1,
            clock: 100,
            mood: 0.5,
            pending_events: Vec::new(),
            charging: false,
        }
    }

    fn eval(cond: &str, battery: f64, action: &Action) -> bool {
        let c = Condition::parse(cond).unwrap();
        let s = state(battery);
        let home = NodeId::new("room_101");
        c.eval(&RewardInputs {
            state: &s,
            action,
            home: &home,
        })
    }

    #[test]
    fn comparisons_and_conjunction() {
        assert!(eval("battery < 40", 30.0, &Action::Idle));
        assert!(!eval("battery < 40", 55.0, &Action::Idle));
        assert!(eval("battery < 40 && category == rest", 30.0, &Action::Sit));
        assert!(!eval("battery < 40 && category == rest", 30.0, &Action::Wander));
        assert!(eval("clock >= 100 && mood > 0", 50.0, &Action::Idle));
    }

    #[test]
    fn location_and_kind() {
        assert!(eval("location == room_101", 50.0, &Action::Idle));
        assert!(!eval("location != room_101", 50.0, &Action::Idle));
        assert!(eval("kind == lie_down", 50.0, &Action::LieDown));
    }

    #[test]
    fn category_of_move_to_depends_on_home() {
        let go_home = Action::move_to(NodeId::new("room_101"), crate::sim::TravelMethod::Walk);
        let go_away = Action::move_to(NodeId::new("room_302"), crate::sim::TravelMethod::Stairs);
        assert!(eval("category == return", 50.0, &go_home));
        assert!(eval("category == explore", 50.0, &go_away));
    }

    #[test]
    fn parse_error_on_nonsense() {
        let e = Condition::parse("battery < banana").unwrap_err();
        assert!(e.to_string().contains("banana"), "{e}");
        assert!(Condition::parse("altitude > 3").is_err());
        assert!(Condition::parse("").is_err());
    }

    #[test]
    fn canonical_source_round_trips() {
        let c = Condition::parse("battery<40&&category==return").unwrap();
        assert_eq!(c.source(), "battery < 40 && category == return");
        let re = Condition::parse(c.source()).unwrap();
        assert_eq!(c, re);
        let json = serde_json::to_string(&c).unwrap();
        let back: Condition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn threshold_shift() {
        let c = Condition::parse("battery < 35 && category == explore").unwrap();
        let shifted = c.shift_battery_thresholds(5.0);
        assert_eq!(shifted.source(), "battery < 40 && category == explore");
    }
}
