//! The search loop: selection, expansion, simulation, backpropagation.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tree::{PathStep, SearchTree};
use super::{BeliefModel, PlannerConfig, PlannerError, PriorOracle, ValueOracle};

/// Per-root-edge statistics exposed after a search.
#[derive(Debug, Clone)]
pub struct VisitStats<A> {
    pub edges: Vec<RootEdge<A>>,
    pub iterations: u32,
    pub root_visits: u64,
    pub tree_nodes: usize,
}

#[derive(Debug, Clone)]
pub struct RootEdge<A> {
    pub action: A,
    pub prior: f64,
    pub visits: u64,
    pub q: f64,
}

/// Leaf evaluation: a terminal belief yields its terminal reward exactly;
/// anything else is referred to the value oracle (which applies its own
/// internal discounting, e.g. over a heuristic rollout).
pub fn simulate_rollout<M, V>(
    model: &M,
    belief: &M::Belief,
    oracle: &V,
    config: &PlannerConfig,
    rng: &mut ChaCha8Rng,
) -> Result<f64, String>
where
    M: BeliefModel,
    V: ValueOracle<M> + ?Sized,
{
    if model.is_terminal(belief) {
        return Ok(model.terminal_value(belief));
    }
    oracle.value(model, belief, rng, config)
}

/// Selection never runs deeper than this many edges; beliefs carry a clock
/// so real searches terminate long before, but a defensive cap keeps toy
/// models with cyclic keys from spinning.
const MAX_SELECTION_DEPTH: usize = 512;

/// Runs a full search from `root` and returns the most-visited root action
/// together with the root visit statistics. Deterministic for a fixed seed
/// and deterministic oracles.
pub fn mcts_search<M, P, V, F>(
    model: &M,
    root: &M::Belief,
    priors: &P,
    values: &V,
    reward_fn: F,
    config: &PlannerConfig,
    seed: u64,
) -> Result<(M::Action, VisitStats<M::Action>), PlannerError>
where
    M: BeliefModel,
    P: PriorOracle<M> + ?Sized,
    V: ValueOracle<M> + ?Sized,
    F: Fn(&M::Belief, &M::Action, f64) -> f64,
{
    config.validate()?;
    if model.is_terminal(root) {
        return Err(PlannerError::TerminalBelief);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree: SearchTree<M::Key, M::Action> = SearchTree::new();
    let mut beliefs: HashMap<M::Key, M::Belief> = HashMap::new();

    let root_key = model.key(root);
    beliefs.insert(root_key.clone(), root.clone());

    let oracle_err = |iteration: u32| {
        move |message: String| PlannerError::Oracle { iteration, message }
    };
    let model_err = |iteration: u32| {
        move |message: String| PlannerError::Model { iteration, message }
    };

    // Expand the root and credit its expansion visit.
    let candidates = priors.candidates(model, root).map_err(oracle_err(0))?;
    tree.expand(&root_key, candidates)?;
    let v0 = simulate_rollout(model, root, values, config, &mut rng).map_err(oracle_err(0))?;
    tree.backpropagate(&[], &root_key, v0)?;

    for iteration in 1..=config.iteration_budget {
        let mut path: Vec<PathStep<M::Key>> = Vec::new();
        let mut belief = root.clone();
        let mut key = root_key.clone();

        // Selection: descend through expanded nodes.
        let leaf_value = loop {
            if model.is_terminal(&belief) {
                break model.terminal_value(&belief);
            }
            let node = tree.node(&key).expect("path nodes exist");
            if !node.expanded {
                // Expansion: attach candidates, then simulate.
                let candidates = priors
                    .candidates(model, &belief)
                    .map_err(oracle_err(iteration))?;
                tree.expand(&key, candidates)?;
                break simulate_rollout(model, &belief, values, config, &mut rng)
                    .map_err(oracle_err(iteration))?;
            }
            if path.len() >= MAX_SELECTION_DEPTH {
                break simulate_rollout(model, &belief, values, config, &mut rng)
                    .map_err(oracle_err(iteration))?;
            }
            let edge_idx = tree.select_edge(&key, config.exploration_constant)?;
            let action = tree.node(&key).expect("node exists").edges[edge_idx]
                .action
                .clone();
            let transition = model
                .step(&belief, &action, &mut rng)
                .map_err(model_err(iteration))?;
            let reward = reward_fn(&belief, &action, transition.extrinsic);
            // Semi-Markov discounting: an action spanning k ticks earns
            // gamma^k, so long journeys cannot compress time.
            let discount = config.discount.powi(transition.ticks.max(1) as i32);
            path.push(PathStep {
                node: key.clone(),
                edge: edge_idx,
                reward,
                discount,
            });
            belief = transition.next;
            key = model.key(&belief);
            if !tree.contains(&key) {
                tree.ensure_node(&key);
                beliefs.insert(key.clone(), belief.clone());
                if model.is_terminal(&belief) {
                    break model.terminal_value(&belief);
                }
                // New leaf: expand immediately so its own visit is counted,
                // then simulate from it.
                let candidates = priors
                    .candidates(model, &belief)
                    .map_err(oracle_err(iteration))?;
                tree.expand(&key, candidates)?;
                break simulate_rollout(model, &belief, values, config, &mut rng)
                    .map_err(oracle_err(iteration))?;
            }
        };

        tree.backpropagate(&path, &key, leaf_value)?;
    }

    // The action with the highest visit count wins; ties break by prior,
    // then by stable candidate order.
    let root_node = tree.node(&root_key).expect("root exists");
    let mut best = 0usize;
    for (i, e) in root_node.edges.iter().enumerate() {
        let b = &root_node.edges[best];
        if e.visits > b.visits || (e.visits == b.visits && e.prior > b.prior) {
            best = i;
        }
    }
    let stats = VisitStats {
        edges: root_node
            .edges
            .iter()
            .map(|e| RootEdge {
                action: e.action.clone(),
                prior: e.prior,
                visits: e.visits,
                q: e.q,
            })
            .collect(),
        iterations: config.iteration_budget,
        root_visits: root_node.visits,
        tree_nodes: tree.len(),
    };
    debug_assert!(tree.check_visit_invariant().is_ok());
    Ok((root_node.edges[best].action.clone(), stats))
}
