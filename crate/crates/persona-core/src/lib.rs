//! Personality-conditioned autonomous agent, desk-scale.
//!
//! The crate wires three layers into a closed loop. A reflection layer turns
//! a personality description into goals and a declarative intrinsic-reward
//! spec, and revises both nightly from episodic memory. A planning layer
//! selects actions by belief-state tree search over a composite
//! intrinsic+extrinsic reward, and can be distilled into a fast two-head
//! policy. An embodiment layer executes actions in a seeded sandbox building
//! and records every outcome. A recurrence checker and an experiment harness
//! sit on top.

pub mod harness;
pub mod memory;
pub mod oee;
pub mod personality;
pub mod reward;
pub mod planner;
pub mod reflect;
pub mod sim;
