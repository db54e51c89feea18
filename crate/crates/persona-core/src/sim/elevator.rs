//! Four-phase elevator interaction modeled as a small finite state machine.

use serde::{Deserialize, Serialize};

/// Phases of one elevator ride, in the only legal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElevatorPhase {
    Call,
    Wait,
    EnterSelect,
    ExitRelocalize,
}

impl ElevatorPhase {
    pub const ORDER: [ElevatorPhase; 4] = [
        ElevatorPhase::Call,
        ElevatorPhase::Wait,
        ElevatorPhase::EnterSelect,
        ElevatorPhase::ExitRelocalize,
    ];

    /// The phase following this one; `None` after the final phase.
    pub fn next(self) -> Option<ElevatorPhase> {
        match self {
            ElevatorPhase::Call => Some(ElevatorPhase::Wait),
            ElevatorPhase::Wait => Some(ElevatorPhase::EnterSelect),
            ElevatorPhase::EnterSelect => Some(ElevatorPhase::ExitRelocalize),
            ElevatorPhase::ExitRelocalize => None,
        }
    }
}

/// State of an in-progress elevator ride.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElevatorFsm {
    pub phase: ElevatorPhase,
    pub target_floor: i32,
}

impl ElevatorFsm {
    pub fn begin(target_floor: i32) -> Self {
        ElevatorFsm {
            phase: ElevatorPhase::Call,
            target_floor,
        }
    }

    /// True once the ride has executed its final phase.
    pub fn is_final_phase(&self) -> bool {
        self.phase == ElevatorPhase::ExitRelocalize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phases_advance_only_in_listed_order() {
        // Exhaustive enumeration: from each phase the only successor is the
        // next one in ORDER, and the final phase terminates.
        for (i, phase) in ElevatorPhase::ORDER.iter().enumerate() {
            match phase.next() {
                Some(next) => assert_eq!(next, ElevatorPhase::ORDER[i + 1]),
                None => assert_eq!(i, ElevatorPhase::ORDER.len() - 1),
            }
        }
    }

    #[test]
    fn ride_begins_at_call() {
        let fsm = ElevatorFsm::begin(3);
        assert_eq!(fsm.phase, ElevatorPhase::Call);
        assert_eq!(fsm.target_floor, 3);
        assert!(!fsm.is_final_phase());
    }
}
