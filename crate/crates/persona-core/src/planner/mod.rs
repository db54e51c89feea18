//! The deliberative planner: belief-state Monte Carlo tree search with
//! pluggable prior/value oracles, plus training-data collection and a
//! distilled two-head policy for low-latency decisions.

pub mod distill;
pub mod features;
pub mod mcts;
pub mod model;
pub mod oracle;
pub mod tree;

pub use distill::{
    collect_dataset, train_distilled, Dataset, DatasetExample, DistilledPolicy, InferOutcome,
    SlotLabel, TrainReport,
};
pub use features::{featurize, tokenize_command, FeatureVector, FEATURE_LEN};
pub use mcts::{mcts_search, simulate_rollout, VisitStats};
pub use model::{Belief, BeliefKey, ModelTransition, SandboxModel};
pub use oracle::{ConstValueOracle, FnPriorOracle, RolloutPolicy, RuleOracle};
pub use tree::{uct_score, EdgeStats, Node, PathStep, SearchTree};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlannerError {
    #[error("uct counts out of domain (n_parent={n_parent}, n_edge={n_edge})")]
    UctDomain { n_parent: u64, n_edge: u64 },
    #[error("oracle failure at iteration {iteration}: {message}")]
    Oracle { iteration: u32, message: String },
    #[error("model failure at iteration {iteration}: {message}")]
    Model { iteration: u32, message: String },
    #[error("expansion produced no candidates")]
    EmptyCandidates,
    #[error("node is already expanded")]
    AlreadyExpanded,
    #[error("path is not part of the tree")]
    PathNotInTree,
    #[error("cannot search from a terminal belief")]
    TerminalBelief,
    #[error("invalid planner config: {0}")]
    Config(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("policy not trained")]
    Untrained,
}

/// Search hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    /// UCT exploration constant `c`.
    pub exploration_constant: f64,
    /// Discount per decision epoch.
    pub discount: f64,
    /// Search iterations per decision.
    pub iteration_budget: u32,
    /// Horizon of heuristic rollouts, in decision epochs.
    pub rollout_depth: u32,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            exploration_constant: 1.414,
            discount: 0.99,
            iteration_budget: 300,
            rollout_depth: 20,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), PlannerError> {
        if self.iteration_budget < 1 {
            return Err(PlannerError::Config("iteration_budget must be >= 1".into()));
        }
        if !(self.exploration_constant > 0.0 && self.exploration_constant.is_finite()) {
            return Err(PlannerError::Config(
                "exploration_constant must be positive and finite".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.discount) {
            return Err(PlannerError::Config("discount must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// A generative model over beliefs: the planner's view of the world.
pub trait BeliefModel {
    type Belief: Clone;
    type Action: Clone + PartialEq + std::fmt::Debug;
    type Key: Eq + std::hash::Hash + Clone;

    /// Canonical digest of a belief, used to key search-tree nodes.
    fn key(&self, belief: &Self::Belief) -> Self::Key;

    fn is_terminal(&self, belief: &Self::Belief) -> bool;

    /// Reward-to-go at a terminal belief (usually zero: terminal penalties
    /// ride on the transition into the terminal state).
    fn terminal_value(&self, _belief: &Self::Belief) -> f64 {
        0.0
    }

    /// Samples one transition. The returned reward is the extrinsic part
    /// only; the search composes it with the intrinsic term via its reward
    /// callback.
    fn step(
        &self,
        belief: &Self::Belief,
        action: &Self::Action,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> Result<ModelTransition<Self::Belief>, String>;
}

/// Ranked candidate actions with prior probabilities (nonnegative, summing
/// to at most one).
pub trait PriorOracle<M: BeliefModel + ?Sized> {
    fn candidates(
        &self,
        model: &M,
        belief: &M::Belief,
    ) -> Result<Vec<(M::Action, f64)>, String>;
}

/// Scalar value estimate of a belief.
pub trait ValueOracle<M: BeliefModel + ?Sized> {
    fn value(
        &self,
        model: &M,
        belief: &M::Belief,
        rng: &mut rand_chacha::ChaCha8Rng,
        config: &PlannerConfig,
    ) -> Result<f64, String>;
}
