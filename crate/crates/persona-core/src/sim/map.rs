//! The multi-floor building graph the agent moves through.
//!
//! The map is generated parametrically: `floors` floors, each with
//! `rooms_per_floor` rooms plus one elevator landing and one staircase
//! landing. Node ids follow a fixed scheme (`room_101` is room 01 on floor 1,
//! `elevator_2` is the landing on floor 2) so that user commands, reward
//! conditions and log records all name the same places.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Identifier of a node in the building graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn new(s: impl Into<String>) -> Self {
        NodeId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Room,
    Elevator,
    Stairs,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    pub floor: i32,
    pub class: NodeClass,
}

/// Parametric building graph.
#[derive(Debug, Clone)]
pub struct BuildingMap {
    nodes: Vec<Node>,
    floors: i32,
    rooms_per_floor: u32,
}

impl BuildingMap {
    pub fn generate(floors: i32, rooms_per_floor: u32) -> Self {
        let mut nodes = Vec::new();
        for f in 1..=floors {
            for r in 1..=rooms_per_floor {
                nodes.push(Node {
                    id: NodeId::new(format!("room_{f}{r:02}")),
                    floor: f,
                    class: NodeClass::Room,
                });
            }
            nodes.push(Node {
                id: NodeId::new(format!("elevator_{f}")),
                floor: f,
                class: NodeClass::Elevator,
            });
            nodes.push(Node {
                id: NodeId::new(format!("stairs_{f}")),
                floor: f,
                class: NodeClass::Stairs,
            });
        }
        BuildingMap {
            nodes,
            floors,
            rooms_per_floor,
        }
    }

    pub fn floors(&self) -> i32 {
        self.floors
    }

    pub fn rooms_per_floor(&self) -> u32 {
        self.rooms_per_floor
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.nodes.iter().find(|n| &n.id == id)
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.node(id).is_some()
    }

    pub fn floor_of(&self, id: &NodeId) -> Option<i32> {
        self.node(id).map(|n| n.floor)
    }

    pub fn is_elevator(&self, id: &NodeId) -> bool {
        matches!(self.node(id), Some(n) if n.class == NodeClass::Elevator)
    }

    pub fn is_stairs(&self, id: &NodeId) -> bool {
        matches!(self.node(id), Some(n) if n.class == NodeClass::Stairs)
    }

    pub fn elevator_on(&self, floor: i32) -> NodeId {
        NodeId::new(format!("elevator_{floor}"))
    }

    pub fn stairs_on(&self, floor: i32) -> NodeId {
        NodeId::new(format!("stairs_{floor}"))
    }

    /// All room nodes, in generation order.
    pub fn rooms(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.class == NodeClass::Room)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_map_shape() {
        let map = BuildingMap::generate(3, 4);
        // 4 rooms + elevator + stairs per floor
        assert_eq!(map.nodes().len(), 18);
        assert!(map.contains(&NodeId::new("room_101")));
        assert!(map.contains(&NodeId::new("room_304")));
        assert!(map.contains(&NodeId::new("elevator_2")));
        assert!(map.contains(&NodeId::new("stairs_3")));
        assert!(!map.contains(&NodeId::new("room_105")));
        assert_eq!(map.floor_of(&NodeId::new("room_302")), Some(3));
    }
}
