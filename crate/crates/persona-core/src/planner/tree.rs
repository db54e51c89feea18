//! The search tree: per-node visit counts, per-edge statistics, UCT scoring,
//! expansion and backpropagation.
//!
//! Counting convention: a node's visit count includes its own expansion
//! visit, so `N(s) = sum_a N(s,a) + 1` holds at every expanded node after
//! any number of iterations.

use std::collections::HashMap;
use std::hash::Hash;

use super::PlannerError;

/// Upper-confidence score of an edge: `q + c * sqrt(ln(n_parent) / n_edge)`.
///
/// Both counts must be at least one; unvisited edges are chosen by
/// prior-weighted tie-break before ever being scored.
pub fn uct_score(q: f64, n_parent: u64, n_edge: u64, c: f64) -> Result<f64, PlannerError> {
    if n_parent < 1 || n_edge < 1 {
        return Err(PlannerError::UctDomain { n_parent, n_edge });
    }
    Ok(q + c * ((n_parent as f64).ln() / n_edge as f64).sqrt())
}

#[derive(Debug, Clone)]
pub struct EdgeStats<A> {
    pub action: A,
    pub prior: f64,
    pub visits: u64,
    /// Running mean of backed-up returns through this edge.
    pub q: f64,
}

#[derive(Debug, Clone)]
pub struct Node<K, A> {
    pub key: K,
    pub visits: u64,
    pub expanded: bool,
    pub edges: Vec<EdgeStats<A>>,
}

/// One step of a root-to-leaf path: the node passed through, the edge taken,
/// the immediate reward collected on that edge, and the discount that the
/// transition's duration earns (gamma raised to the ticks consumed, so
/// multi-tick actions discount time correctly).
#[derive(Debug, Clone)]
pub struct PathStep<K> {
    pub node: K,
    pub edge: usize,
    pub reward: f64,
    pub discount: f64,
}

#[derive(Debug, Clone)]
pub struct SearchTree<K, A> {
    nodes: HashMap<K, Node<K, A>>,
}

impl<K: Eq + Hash + Clone, A: Clone> Default for SearchTree<K, A> {
    fn default() -> Self {
        SearchTree {
            nodes: HashMap::new(),
        }
    }
}

impl<K: Eq + Hash + Clone, A: Clone> SearchTree<K, A> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, key: &K) -> bool {
        self.nodes.contains_key(key)
    }

    pub fn node(&self, key: &K) -> Option<&Node<K, A>> {
        self.nodes.get(key)
    }

    /// Inserts an unexpanded node if absent.
    pub fn ensure_node(&mut self, key: &K) -> &mut Node<K, A> {
        self.nodes.entry(key.clone()).or_insert_with(|| Node {
            key: key.clone(),
            visits: 0,
            expanded: false,
            edges: Vec::new(),
        })
    }

    /// Attaches prior-ranked candidate edges to an unexpanded node, with
    /// `N(s,a) = 0` and `Q = 0`.
    pub fn expand(&mut self, key: &K, candidates: Vec<(A, f64)>) -> Result<(), PlannerError> {
        if candidates.is_empty() {
            return Err(PlannerError::EmptyCandidates);
        }
        let node = self.ensure_node(key);
        if node.expanded {
            return Err(PlannerError::AlreadyExpanded);
        }
        node.expanded = true;
        node.edges = candidates
            .into_iter()
            .map(|(action, prior)| EdgeStats {
                action,
                prior,
                visits: 0,
                q: 0.0,
            })
            .collect();
        Ok(())
    }

    /// Picks the edge to follow from an expanded node: unvisited edges first
    /// (highest prior, then lowest index), then maximum UCT (ties by prior,
    /// then index).
    pub fn select_edge(&self, key: &K, c: f64) -> Result<usize, PlannerError> {
        let node = self.nodes.get(key).ok_or(PlannerError::PathNotInTree)?;
        if !node.expanded || node.edges.is_empty() {
            return Err(PlannerError::PathNotInTree);
        }
        // Unvisited edges take precedence, ordered by prior.
        let mut best_unvisited: Option<(usize, f64)> = None;
        for (i, e) in node.edges.iter().enumerate() {
            if e.visits == 0 {
                match best_unvisited {
                    Some((_, p)) if e.prior <= p => {}
                    _ => best_unvisited = Some((i, e.prior)),
                }
            }
        }
        if let Some((i, _)) = best_unvisited {
            return Ok(i);
        }
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for (i, e) in node.edges.iter().enumerate() {
            let score = uct_score(e.q, node.visits, e.visits, c)?;
            let better = score > best_score
                || (score == best_score && e.prior > node.edges[best].prior);
            if better {
                best = i;
                best_score = score;
            }
        }
        Ok(best)
    }

    /// Backs one return up a root-to-leaf path.
    ///
    /// Every edge on the path has its visit count bumped and its Q updated
    /// to the running mean of the discounted return from that edge; every
    /// node on the path (including the leaf) gains one visit. Off-path edges
    /// are untouched.
    pub fn backpropagate(
        &mut self,
        path: &[PathStep<K>],
        leaf: &K,
        leaf_value: f64,
    ) -> Result<(), PlannerError> {
        // Verify the path first so a structural error mutates nothing.
        for step in path {
            let node = self.nodes.get(&step.node).ok_or(PlannerError::PathNotInTree)?;
            if step.edge >= node.edges.len() {
                return Err(PlannerError::PathNotInTree);
            }
        }
        if !self.nodes.contains_key(leaf) {
            return Err(PlannerError::PathNotInTree);
        }

        // Discounted return at each edge, computed tail-first.
        let mut returns = vec![0.0; path.len()];
        let mut g = leaf_value;
        for (i, step) in path.iter().enumerate().rev() {
            g = step.reward + step.discount * g;
            returns[i] = g;
        }

        for (step, g) in path.iter().zip(returns) {
            let node = self.nodes.get_mut(&step.node).expect("verified above");
            node.visits += 1;
            let edge = &mut node.edges[step.edge];
            edge.visits += 1;
            edge.q += (g - edge.q) / edge.visits as f64;
        }
        let leaf_node = self.nodes.get_mut(leaf).expect("verified above");
        leaf_node.visits += 1;
        Ok(())
    }

    /// Checks `N(s) = sum_a N(s,a) + 1` at every expanded node.
    pub fn check_visit_invariant(&self) -> Result<(), String> {
        for node in self.nodes.values() {
            if !node.expanded {
                continue;
            }
            let edge_sum: u64 = node.edges.iter().map(|e| e.visits).sum();
            if node.visits != edge_sum + 1 {
                return Err(format!(
                    "node visits {} != edge sum {} + 1",
                    node.visits, edge_sum
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uct_matches_hand_computed_value() {
        let got = uct_score(0.5, 100, 10, 1.0).unwrap();
        let expected = 0.5 + (100f64.ln() / 10.0).sqrt();
        assert!((got - expected).abs() < 1e-15);
        // ln 1 = 0: score collapses to q
        assert_eq!(uct_score(0.7, 1, 1, 2.0).unwrap(), 0.7);
    }

    #[test]
    fn uct_is_monotone_in_edge_visits() {
        let few = uct_score(0.4, 1000, 5, 1.4).unwrap();
        let many = uct_score(0.4, 1000, 50, 1.4).unwrap();
        assert!(few > many);
    }

    #[test]
    fn uct_domain_errors() {
        assert!(matches!(
            uct_score(0.0, 0, 1, 1.0),
            Err(PlannerError::UctDomain { .. })
        ));
        assert!(matches!(
            uct_score(0.0, 1, 0, 1.0),
            Err(PlannerError::UctDomain { .. })
        ));
    }

    #[test]
    fn expand_attaches_priors_verbatim() {
        let mut tree: SearchTree<u32, &'static str> = SearchTree::new();
        tree.expand(&0, vec![("a", 0.5), ("b", 0.3), ("c", 0.2)]).unwrap();
        let node = tree.node(&0).unwrap();
        assert_eq!(node.edges.len(), 3);
        assert_eq!(node.edges[0].prior, 0.5);
        assert_eq!(node.edges[1].prior, 0.3);
        assert_eq!(node.edges[2].prior, 0.2);
        assert!(node.edges.iter().all(|e| e.visits == 0 && e.q == 0.0));
    }

    #[test]
    fn re_expansion_is_an_error() {
        let mut tree: SearchTree<u32, &'static str> = SearchTree::new();
        tree.expand(&0, vec![("a", 1.0)]).unwrap();
        assert!(matches!(
            tree.expand(&0, vec![("b", 1.0)]),
            Err(PlannerError::AlreadyExpanded)
        ));
    }

    #[test]
    fn empty_candidates_is_an_error() {
        let mut tree: SearchTree<u32, &'static str> = SearchTree::new();
        assert!(matches!(
            tree.expand(&0, vec![]),
            Err(PlannerError::EmptyCandidates)
        ));
    }

    #[test]
    fn backprop_running_mean() {
        let mut tree: SearchTree<u32, &'static str> = SearchTree::new();
        tree.expand(&0, vec![("a", 1.0)]).unwrap();
        tree.ensure_node(&1);
        // Two backups through the same edge: values 1.0 then 0.0.
        let path = vec![PathStep { node: 0, edge: 0, reward: 0.0, discount: 1.0 }];
        tree.backpropagate(&path, &1, 1.0).unwrap();
        let e = &tree.node(&0).unwrap().edges[0];
        assert_eq!((e.visits, e.q), (1, 1.0));
        tree.backpropagate(&path, &1, 0.0).unwrap();
        let e = &tree.node(&0).unwrap().edges[0];
        assert_eq!((e.visits, e.q), (2, 0.5));
    }

    #[test]
    fn backprop_leaves_off_path_edges_untouched() {
        let mut tree: SearchTree<u32, &'static str> = SearchTree::new();
        tree.expand(&0, vec![("a", 0.6), ("b", 0.4)]).unwrap();
        tree.ensure_node(&1);
        let path = vec![PathStep { node: 0, edge: 0, reward: 0.0, discount: 0.9 }];
        tree.backpropagate(&path, &1, 1.0).unwrap();
        let node = tree.node(&0).unwrap();
        assert_eq!(node.edges[1].visits, 0);
        assert_eq!(node.edges[1].q, 0.0);
    }

    #[test]
    fn backprop_discounts_along_the_path() {
        // root -a-> mid -b-> leaf with leaf value v and zero rewards:
        // root edge sees gamma^2 * v.
        let mut tree: SearchTree<u32, &'static str> = SearchTree::new();
        tree.expand(&0, vec![("a", 1.0)]).unwrap();
        tree.expand(&1, vec![("b", 1.0)]).unwrap();
        tree.ensure_node(&2);
        let gamma = 0.9;
        let path = vec![
            PathStep { node: 0, edge: 0, reward: 0.0, discount: gamma },
            PathStep { node: 1, edge: 0, reward: 0.0, discount: gamma },
        ];
        let v = 2.0;
        tree.backpropagate(&path, &2, v).unwrap();
        let root_q = tree.node(&0).unwrap().edges[0].q;
        assert!((root_q - gamma * gamma * v).abs() < 1e-12);
        let mid_q = tree.node(&1).unwrap().edges[0].q;
        assert!((mid_q - gamma * v).abs() < 1e-12);
    }

    #[test]
    fn bad_path_is_a_structural_error() {
        let mut tree: SearchTree<u32, &'static str> = SearchTree::new();
        tree.expand(&0, vec![("a", 1.0)]).unwrap();
        let path = vec![PathStep { node: 7, edge: 0, reward: 0.0, discount: 1.0 }];
        assert!(matches!(
            tree.backpropagate(&path, &0, 0.0),
            Err(PlannerError::PathNotInTree)
        ));
    }

    #[test]
    fn selection_prefers_least_visited_under_equal_q() {
        let mut tree: SearchTree<u32, &'static str> = SearchTree::new();
        tree.expand(&0, vec![("a", 0.5), ("b", 0.5)]).unwrap();
        // The root's own expansion visit (empty path, root as leaf).
        tree.backpropagate(&[], &0, 0.0).unwrap();
        tree.ensure_node(&1);
        tree.ensure_node(&2);
        // Visit both once (equal Q = 0), then edge a twice more.
        tree.backpropagate(&[PathStep { node: 0, edge: 0, reward: 0.0, discount: 1.0 }], &1, 0.0).unwrap();
        tree.backpropagate(&[PathStep { node: 0, edge: 1, reward: 0.0, discount: 1.0 }], &2, 0.0).unwrap();
        tree.backpropagate(&[PathStep { node: 0, edge: 0, reward: 0.0, discount: 1.0 }], &1, 0.0).unwrap();
        let chosen = tree.select_edge(&0, 1.4).unwrap();
        assert_eq!(chosen, 1, "least-visited edge wins when Q ties");
        tree.check_visit_invariant().unwrap();
    }
}
