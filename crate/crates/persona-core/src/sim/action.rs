//! The discrete action space and its reporting categories.

use serde::{Deserialize, Serialize};
use std::fmt;

use super::map::NodeId;

/// Travel method for a `move_to` action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TravelMethod {
    Walk,
    Elevator,
    Stairs,
}

impl fmt::Display for TravelMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TravelMethod::Walk => write!(f, "walk"),
            TravelMethod::Elevator => write!(f, "elevator"),
            TravelMethod::Stairs => write!(f, "stairs"),
        }
    }
}

impl TravelMethod {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "walk" => Some(TravelMethod::Walk),
            "elevator" => Some(TravelMethod::Elevator),
            "stairs" => Some(TravelMethod::Stairs),
            _ => None,
        }
    }
}

/// One of the 19 discrete action kinds.
///
/// The repertoire is: `idle`, a deliberation primitive (`think`), eight
/// locomotion primitives, eight emotional expressions, and the parameterized
/// `move_to`. Kind carries no payload; see [`Action`] for the `move_to`
/// parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Idle,
    Think,
    // locomotion primitives
    Sit,
    LieDown,
    Stand,
    Stretch,
    Wander,
    Patrol,
    LookAround,
    SniffAround,
    // emotional expressions
    ExpressHappy,
    WagTail,
    PlayBow,
    JumpCheer,
    Nuzzle,
    OfferPaw,
    LeanIn,
    Cuddle,
    // parameterized navigation
    MoveTo,
}

impl ActionKind {
    /// All 19 kinds in stable order. Tie-breaks throughout the planner use
    /// this ordering, so it must never change silently.
    pub const ALL: [ActionKind; 19] = [
        ActionKind::Idle,
        ActionKind::Think,
        ActionKind::Sit,
        ActionKind::LieDown,
        ActionKind::Stand,
        ActionKind::Stretch,
        ActionKind::Wander,
        ActionKind::Patrol,
        ActionKind::LookAround,
        ActionKind::SniffAround,
        ActionKind::ExpressHappy,
        ActionKind::WagTail,
        ActionKind::PlayBow,
        ActionKind::JumpCheer,
        ActionKind::Nuzzle,
        ActionKind::OfferPaw,
        ActionKind::LeanIn,
        ActionKind::Cuddle,
        ActionKind::MoveTo,
    ];

    pub fn is_locomotion(self) -> bool {
        matches!(
            self,
            ActionKind::Sit
                | ActionKind::LieDown
                | ActionKind::Stand
                | ActionKind::Stretch
                | ActionKind::Wander
                | ActionKind::Patrol
                | ActionKind::LookAround
                | ActionKind::SniffAround
        )
    }

    pub fn is_expression(self) -> bool {
        matches!(
            self,
            ActionKind::ExpressHappy
                | ActionKind::WagTail
                | ActionKind::PlayBow
                | ActionKind::JumpCheer
                | ActionKind::Nuzzle
                | ActionKind::OfferPaw
                | ActionKind::LeanIn
                | ActionKind::Cuddle
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ActionKind::Idle => "idle",
            ActionKind::Think => "think",
            ActionKind::Sit => "sit",
            ActionKind::LieDown => "lie_down",
            ActionKind::Stand => "stand",
            ActionKind::Stretch => "stretch",
            ActionKind::Wander => "wander",
            ActionKind::Patrol => "patrol",
            ActionKind::LookAround => "look_around",
            ActionKind::SniffAround => "sniff_around",
            ActionKind::ExpressHappy => "express_happy",
            ActionKind::WagTail => "wag_tail",
            ActionKind::PlayBow => "play_bow",
            ActionKind::JumpCheer => "jump_cheer",
            ActionKind::Nuzzle => "nuzzle",
            ActionKind::OfferPaw => "offer_paw",
            ActionKind::LeanIn => "lean_in",
            ActionKind::Cuddle => "cuddle",
            ActionKind::MoveTo => "move_to",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        ActionKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A concrete action: a kind plus, for `move_to` only, its payload.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    Idle,
    Think,
    Sit,
    LieDown,
    Stand,
    Stretch,
    Wander,
    Patrol,
    LookAround,
    SniffAround,
    ExpressHappy,
    WagTail,
    PlayBow,
    JumpCheer,
    Nuzzle,
    OfferPaw,
    LeanIn,
    Cuddle,
    MoveTo { location: NodeId, method: TravelMethod },
}

impl Action {
    pub fn kind(&self) -> ActionKind {
        match self {
            Action::Idle => ActionKind::Idle,
            Action::Think => ActionKind::Think,
            Action::Sit => ActionKind::Sit,
            Action::LieDown => ActionKind::LieDown,
            Action::Stand => ActionKind::Stand,
            Action::Stretch => ActionKind::Stretch,
            Action::Wander => ActionKind::Wander,
            Action::Patrol => ActionKind::Patrol,
            Action::LookAround => ActionKind::LookAround,
            Action::SniffAround => ActionKind::SniffAround,
            Action::ExpressHappy => ActionKind::ExpressHappy,
            Action::WagTail => ActionKind::WagTail,
            Action::PlayBow => ActionKind::PlayBow,
            Action::JumpCheer => ActionKind::JumpCheer,
            Action::Nuzzle => ActionKind::Nuzzle,
            Action::OfferPaw => ActionKind::OfferPaw,
            Action::LeanIn => ActionKind::LeanIn,
            Action::Cuddle => ActionKind::Cuddle,
            Action::MoveTo { .. } => ActionKind::MoveTo,
        }
    }

    pub fn from_kind(kind: ActionKind) -> Option<Action> {
        match kind {
            ActionKind::Idle => Some(Action::Idle),
            ActionKind::Think => Some(Action::Think),
            ActionKind::Sit => Some(Action::Sit),
            ActionKind::LieDown => Some(Action::LieDown),
            ActionKind::Stand => Some(Action::Stand),
            ActionKind::Stretch => Some(Action::Stretch),
            ActionKind::Wander => Some(Action::Wander),
            ActionKind::Patrol => Some(Action::Patrol),
            ActionKind::LookAround => Some(Action::LookAround),
            ActionKind::SniffAround => Some(Action::SniffAround),
            ActionKind::ExpressHappy => Some(Action::ExpressHappy),
            ActionKind::WagTail => Some(Action::WagTail),
            ActionKind::PlayBow => Some(Action::PlayBow),
            ActionKind::JumpCheer => Some(Action::JumpCheer),
            ActionKind::Nuzzle => Some(Action::Nuzzle),
            ActionKind::OfferPaw => Some(Action::OfferPaw),
            ActionKind::LeanIn => Some(Action::LeanIn),
            ActionKind::Cuddle => Some(Action::Cuddle),
            ActionKind::MoveTo => None,
        }
    }

    pub fn move_to(location: NodeId, method: TravelMethod) -> Action {
        Action::MoveTo { location, method }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::MoveTo { location, method } => write!(f, "move_to({location}, {method})"),
            other => write!(f, "{}", other.kind()),
        }
    }
}

/// Reporting category an action falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Rest,
    Explore,
    Affection,
    Return,
    Think,
    PositiveEmotion,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::Rest,
        Category::Explore,
        Category::Affection,
        Category::Return,
        Category::Think,
        Category::PositiveEmotion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Rest => "rest",
            Category::Explore => "explore",
            Category::Affection => "affection",
            Category::Return => "return",
            Category::Think => "think",
            Category::PositiveEmotion => "positive_emotion",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Category::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Total mapping from actions to reporting categories.
///
/// `move_to` splits on destination: the home node counts as Return, anywhere
/// else as Explore. Every other kind has a fixed category.
pub fn action_category(action: &Action, home: &NodeId) -> Category {
    match action {
        Action::Idle | Action::Sit | Action::LieDown | Action::Stand | Action::Stretch => {
            Category::Rest
        }
        Action::Wander | Action::Patrol => Category::Explore,
        Action::Think | Action::LookAround | Action::SniffAround => Category::Think,
        Action::ExpressHappy | Action::WagTail | Action::PlayBow | Action::JumpCheer => {
            Category::PositiveEmotion
        }
        Action::Nuzzle | Action::OfferPaw | Action::LeanIn | Action::Cuddle => Category::Affection,
        Action::MoveTo { location, .. } => {
            if location == home {
                Category::Return
            } else {
                Category::Explore
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn home() -> NodeId {
        NodeId::new("room_101")
    }

    #[test]
    fn exactly_19_kinds() {
        assert_eq!(ActionKind::ALL.len(), 19);
        let mut seen = std::collections::HashSet::new();
        for k in ActionKind::ALL {
            assert!(seen.insert(k), "duplicate kind {k:?}");
        }
    }

    #[test]
    fn category_mapping_is_total_and_single_valued() {
        for kind in ActionKind::ALL {
            let actions = match kind {
                ActionKind::MoveTo => vec![
                    Action::move_to(home(), TravelMethod::Walk),
                    Action::move_to(NodeId::new("room_302"), TravelMethod::Elevator),
                ],
                k => vec![Action::from_kind(k).unwrap()],
            };
            for a in actions {
                // must not panic, and must be stable
                let c1 = action_category(&a, &home());
                let c2 = action_category(&a, &home());
                assert_eq!(c1, c2);
            }
        }
    }

    #[test]
    fn fixed_category_anchors() {
        assert_eq!(action_category(&Action::Idle, &home()), Category::Rest);
        assert_eq!(
            action_category(&Action::move_to(home(), TravelMethod::Walk), &home()),
            Category::Return
        );
        assert_eq!(
            action_category(&Action::ExpressHappy, &home()),
            Category::PositiveEmotion
        );
        assert_eq!(
            action_category(
                &Action::move_to(NodeId::new("room_204"), TravelMethod::Stairs),
                &home()
            ),
            Category::Explore
        );
        assert_eq!(action_category(&Action::Nuzzle, &home()), Category::Affection);
        assert_eq!(action_category(&Action::Think, &home()), Category::Think);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ActionKind::ALL {
            assert_eq!(ActionKind::parse(k.name()), Some(k));
        }
        assert_eq!(ActionKind::parse("fly"), None);
    }
}
