use rand::Rng;

use super::{McConfig, SearchOutcome, SearchState, Searcher};
use crate::formula::Formula;
use crate::sls::GlobalBest;

/// A move: the value given to the next variable.
pub type Action = bool;

#[inline]
fn slot(a: Action) -> usize {
    a as usize
}

/// UCT statistics of one tree state. Index 0 is the `false` move.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchNode {
    pub q: [f64; 2],
    pub n: [u32; 2],
    /// Expansion visit plus every simulation passing through the node.
    pub visits: u32,
    pub children: [Option<Box<SearchNode>>; 2],
    /// Every state below this node has been scored at least once.
    pub exhausted: bool,
}

impl SearchNode {
    fn expanded() -> Self {
        SearchNode {
            visits: 1,
            ..SearchNode::default()
        }
    }

    pub fn child(&self, a: Action) -> Option<&SearchNode> {
        self.children[slot(a)].as_deref()
    }

    /// Running-mean backup of `value` for move `a`.
    pub fn update(&mut self, a: Action, value: f64) {
        let i = slot(a);
        let n = self.n[i] as f64;
        self.q[i] = (n * self.q[i] + value) / (n + 1.0);
        self.n[i] += 1;
        self.visits += 1;
    }
}

/// `Q + c * sqrt(ln(total) / (N + 1))`, with the log term taken as 0 when
/// `total` is 0.
pub fn uct_score(q: f64, n: u32, total: u32, c: f64) -> f64 {
    let log = if total == 0 { 0.0 } else { (total as f64).ln() };
    q + c * (log / (n as f64 + 1.0)).sqrt()
}

/// Arg-max of the UCT score over both moves; ties go to `false`.
pub fn uct_select_values(q: [f64; 2], n: [u32; 2], total: u32, c: f64) -> Action {
    uct_score(q[1], n[1], total, c) > uct_score(q[0], n[0], total, c)
}

pub fn uct_select(node: &SearchNode, exploration_c: f64) -> Action {
    uct_select_values(node.q, node.n, node.visits, exploration_c)
}

/// `Q(s, ·)` scaled to sum to one; uniform when every entry is zero.
pub fn normalize(q: [f64; 2]) -> [f64; 2] {
    let sum = q[0] + q[1];
    if sum > 0.0 {
        [q[0] / sum, q[1] / sum]
    } else {
        [0.5, 0.5]
    }
}

fn expand<R: Rng + ?Sized>(s: &mut Searcher<'_, R>, prefix: &[bool]) -> SearchNode {
    s.rollout(prefix);
    SearchNode::expanded()
}

/// One descent from `node` (the state `prefix`): select by UCT, expand or
/// score the first state outside the tree, and back the value up.
fn simulate<R: Rng + ?Sized>(s: &mut Searcher<'_, R>, node: &mut SearchNode, prefix: &mut Vec<bool>) -> f64 {
    let n = s.formula.num_variables();
    let a = uct_select(node, s.cfg.exploration_c);
    prefix.push(a);
    let child_terminal = prefix.len() == n;
    let value = if child_terminal {
        s.score_complete(prefix)
    } else {
        match node.children[slot(a)].as_deref_mut() {
            Some(child) => simulate(s, child, prefix),
            None => {
                let (v, _) = s.rollout(prefix);
                node.children[slot(a)] = Some(Box::new(SearchNode::expanded()));
                v
            }
        }
    };
    prefix.pop();
    node.update(a, value);
    node.exhausted = [false, true].iter().all(|&b| {
        if child_terminal {
            node.n[slot(b)] > 0
        } else {
            node.child(b).is_some_and(|c| c.exhausted)
        }
    });
    value
}

/// Runs up to `simulations_per_step` simulations from `state` (fewer if the
/// budget or the subtree runs out) and returns the normalized `Q` policy
/// with the grown node. A missing `node` is created with one rollout.
pub fn mcts_search<R: Rng + ?Sized>(
    state: &SearchState<'_>,
    node: Option<SearchNode>,
    cfg: &McConfig,
    global: &GlobalBest,
    rng: &mut R,
) -> ([f64; 2], SearchNode) {
    assert!(!state.is_terminal(), "search needs a non-terminal root");
    let mut s = Searcher::new(state.formula(), cfg, global, rng);
    let mut prefix = state.prefix().to_vec();
    let mut root = node.unwrap_or_else(|| expand(&mut s, &prefix));
    step(&mut s, &mut root, &mut prefix);
    (normalize(root.q), root)
}

fn step<R: Rng + ?Sized>(s: &mut Searcher<'_, R>, root: &mut SearchNode, prefix: &mut Vec<bool>) {
    for _ in 0..s.cfg.simulations_per_step {
        if s.should_stop() || root.exhausted {
            break;
        }
        simulate(s, root, prefix);
    }
}

/// A single tree grown from the root until the budget runs out (or the whole
/// tree has been enumerated).
pub fn uctmax<R: Rng + ?Sized>(
    formula: &Formula,
    cfg: &McConfig,
    global: &GlobalBest,
    rng: &mut R,
) -> SearchOutcome {
    let mut s = Searcher::new(formula, cfg, global, rng);
    let mut prefix = Vec::new();
    let mut root = expand(&mut s, &prefix);
    if formula.num_variables() > 0 {
        while !s.should_stop() && !root.exhausted {
            simulate(&mut s, &mut root, &mut prefix);
        }
    }
    s.finish()
}

/// Nested MCTS: one search per decision, committing the move with the
/// larger normalized `Q` (ties to `false`) and continuing in the chosen
/// subtree. Passes restart from the root while budget remains.
pub fn nmcts<R: Rng + ?Sized>(
    formula: &Formula,
    cfg: &McConfig,
    global: &GlobalBest,
    rng: &mut R,
) -> SearchOutcome {
    let n = formula.num_variables();
    let mut s = Searcher::new(formula, cfg, global, rng);
    'passes: while !s.should_stop() {
        let mut prefix: Vec<bool> = Vec::with_capacity(n);
        let mut node: Option<SearchNode> = None;
        while prefix.len() < n {
            let mut root = match node.take() {
                Some(r) => r,
                None => expand(&mut s, &prefix),
            };
            step(&mut s, &mut root, &mut prefix);
            if s.should_stop() {
                break 'passes;
            }
            let policy = normalize(root.q);
            let a = policy[1] > policy[0];
            prefix.push(a);
            node = root.children[slot(a)].take().map(|b| *b);
        }
        s.score_complete(&prefix);
    }
    s.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::rollout::RolloutPolicy;
    use crate::sls::SlsConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn formula(n: usize, clauses: &[&[i64]]) -> Formula {
        Formula::from_dimacs_clauses(n, clauses.iter().map(|c| c.to_vec())).unwrap()
    }

    #[test]
    fn symmetric_start_picks_false() {
        assert!(!uct_select_values([0.0, 0.0], [0, 0], 0, 1.0));
        assert!(!uct_select(&SearchNode::expanded(), 1.0));
    }

    #[test]
    fn worked_uct_example() {
        // 0.5 + sqrt(ln 8 / 4) = 1.2210, 0.5 + sqrt(ln 8 / 1) = 1.9420.
        let u0 = uct_score(0.5, 3, 8, 1.0);
        let u1 = uct_score(0.5, 0, 8, 1.0);
        assert!((u0 - 1.2210).abs() < 1e-4, "{u0}");
        assert!((u1 - 1.9420).abs() < 1e-4, "{u1}");
        assert!(uct_select_values([0.5, 0.5], [3, 0], 8, 1.0));
    }

    #[test]
    fn zero_exploration_is_greedy() {
        assert!(!uct_select_values([0.9, 0.1], [1, 100], 101, 0.0));
        assert!(uct_select_values([0.1, 0.9], [100, 1], 101, 0.0));
    }

    #[test]
    fn backup_is_running_mean() {
        let mut node = SearchNode::expanded();
        let values = [0.2, 0.9, 0.4, 0.7];
        for v in values {
            node.update(true, v);
        }
        assert_eq!(node.n, [0, 4]);
        assert!((node.q[1] - 0.55).abs() < 1e-12);
        assert_eq!(node.visits, 5);
    }

    #[test]
    fn normalize_policy() {
        assert_eq!(normalize([0.0, 0.0]), [0.5, 0.5]);
        let p = normalize([0.3, 0.1]);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
        assert!((p[0] - 0.75).abs() < 1e-12);
    }

    fn cfg(sims: u32, budget: Budget) -> McConfig {
        McConfig {
            simulations_per_step: sims,
            budget,
            rollout: RolloutPolicy::walksat(SlsConfig::default()),
            ..McConfig::default()
        }
    }

    #[test]
    fn one_simulation_visits_one_action() {
        // Unsatisfiable, so the first rollout cannot end the search.
        let f = formula(4, &[&[1, 2], &[-3, 4], &[2, -4], &[3], &[-3]]);
        let g = GlobalBest::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (policy, root) = mcts_search(&SearchState::root(&f), None, &cfg(1, Budget::Rollouts(1000)), &g, &mut rng);
        let mut n = root.n;
        n.sort();
        assert_eq!(n, [0, 1]);
        assert_eq!(root.visits, 2);
        assert!((policy[0] + policy[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn visit_totals_add_up() {
        fn check(node: &SearchNode) {
            assert_eq!(node.visits, 1 + node.n[0] + node.n[1]);
            for c in node.children.iter().flatten() {
                check(c);
            }
        }
        let f = formula(6, &[&[1, 2, -3], &[-1, 4], &[5, -6], &[-2, -5], &[3, 6]]);
        let g = GlobalBest::new();
        let c = McConfig {
            rollout: RolloutPolicy::random(),
            ..cfg(50, Budget::Rollouts(10_000))
        };
        let (_, root) = mcts_search(&SearchState::root(&f), None, &c, &g, &mut ChaCha8Rng::seed_from_u64(1));
        check(&root);
    }

    #[test]
    fn x1_true_dominates() {
        // x1 = true leaves one clause unsatisfied, x1 = false leaves two.
        let f = formula(2, &[&[1], &[1, 2], &[2], &[-2]]);
        let c = McConfig {
            squared_reward: true,
            rollout: RolloutPolicy::random(),
            ..cfg(200, Budget::Rollouts(100_000))
        };
        let g = GlobalBest::new();
        let (policy, _) = mcts_search(&SearchState::root(&f), None, &c, &g, &mut ChaCha8Rng::seed_from_u64(2));
        assert!(policy[1] > policy[0], "{policy:?}");
    }

    #[test]
    fn uctmax_zero_budget_still_reports() {
        let f = formula(3, &[&[1, 2], &[-1, 3]]);
        let g = GlobalBest::new();
        let out = uctmax(&f, &cfg(100, Budget::Seconds(0.0)), &g, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(out.best_unsat, f.count_unsat(&out.values));
        assert_eq!(out.total_rollouts, 1);
    }

    #[test]
    fn uctmax_enumerates_tiny_unsat_instance() {
        let f = formula(2, &[&[1], &[-1], &[2], &[-2]]);
        let g = GlobalBest::new();
        let out = uctmax(&f, &cfg(100, Budget::Flips(u64::MAX)), &g, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(out.best_unsat, 2);
    }

    #[test]
    fn nmcts_single_variable() {
        let f = formula(1, &[&[1], &[-1]]);
        let g = GlobalBest::new();
        let out = nmcts(&f, &cfg(10, Budget::Rollouts(50)), &g, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(out.best_unsat, 1);
        assert!(out.total_rollouts >= 50);
    }
}
