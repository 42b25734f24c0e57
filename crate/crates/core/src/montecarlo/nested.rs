use std::collections::VecDeque;

use rand::Rng;

use super::{McConfig, SearchOutcome, SearchState, Searcher};
use crate::formula::Formula;
use crate::sls::GlobalBest;

/// Emitted after every committed move of a nested search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NestedEvent {
    pub level: u32,
    /// Depth of the state the move was played from.
    pub depth: usize,
    pub best_score: f64,
}

struct Nested<'s, 'a, R: Rng + ?Sized> {
    search: &'s mut Searcher<'a, R>,
    zero: bool,
    observer: &'s mut dyn FnMut(&NestedEvent),
}

impl<R: Rng + ?Sized> Nested<'_, '_, R> {
    /// Level-`level` search from `prefix` (restored on return). Returns the
    /// best score and the moves played from `prefix`; a budget cut-off
    /// completes the line along the best known sequence.
    fn search(&mut self, prefix: &mut Vec<bool>, level: u32) -> (f64, Vec<bool>) {
        let n = self.search.formula.num_variables();
        let start = prefix.len();
        if start == n {
            return (self.search.score_complete(prefix), Vec::new());
        }

        let mut best_score = f64::NEG_INFINITY;
        let mut best_seq: VecDeque<bool> = VecDeque::new();
        while prefix.len() < n && !self.search.should_stop() {
            let high = if self.zero {
                self.sample_here(prefix, level)
            } else {
                self.try_moves(prefix, level)
            };
            let chosen = match high {
                Some((score, first, rest)) if score > best_score => {
                    best_score = score;
                    best_seq = rest.into();
                    first
                }
                _ => match best_seq.pop_front() {
                    Some(m) => m,
                    None => break,
                },
            };
            (self.observer)(&NestedEvent {
                level,
                depth: prefix.len(),
                best_score,
            });
            prefix.push(chosen);
        }
        if prefix.len() < n && best_score > f64::NEG_INFINITY {
            prefix.extend(best_seq);
        }
        let played = prefix.split_off(start);
        (best_score, played)
    }

    /// Evaluates each child move; returns the best (score, move, sequence
    /// after the move).
    fn try_moves(&mut self, prefix: &mut Vec<bool>, level: u32) -> Option<(f64, bool, Vec<bool>)> {
        let mut high: Option<(f64, bool, Vec<bool>)> = None;
        for m in [false, true] {
            if self.search.should_stop() {
                break;
            }
            prefix.push(m);
            let (score, seq) = if level == 1 {
                let (score, values) = self.search.rollout(prefix);
                (score, values[prefix.len()..].to_vec())
            } else {
                self.search(prefix, level - 1)
            };
            prefix.pop();
            if high.as_ref().is_none_or(|h| score > h.0) {
                high = Some((score, m, seq));
            }
        }
        high.filter(|h| h.0 > f64::NEG_INFINITY)
    }

    /// Zero-nested variant: `t` estimates of the current state itself;
    /// returns the best (score, first move, remaining moves).
    fn sample_here(&mut self, prefix: &mut Vec<bool>, level: u32) -> Option<(f64, bool, Vec<bool>)> {
        let mut high: Option<(f64, Vec<bool>)> = None;
        for _ in 0..self.search.cfg.znmcs_samples {
            if self.search.should_stop() {
                break;
            }
            let (score, seq) = if level == 1 {
                let (score, values) = self.search.rollout(prefix);
                (score, values[prefix.len()..].to_vec())
            } else {
                self.search(prefix, level - 1)
            };
            if seq.is_empty() {
                continue;
            }
            if high.as_ref().is_none_or(|h| score > h.0) {
                high = Some((score, seq));
            }
        }
        high.filter(|h| h.0 > f64::NEG_INFINITY).map(|(score, mut seq)| {
            let first = seq.remove(0);
            (score, first, seq)
        })
    }
}

fn nested_call<R: Rng + ?Sized>(
    state: &SearchState<'_>,
    level: u32,
    cfg: &McConfig,
    global: &GlobalBest,
    rng: &mut R,
    zero: bool,
    observer: &mut dyn FnMut(&NestedEvent),
) -> (f64, Vec<bool>) {
    assert!(level >= 1, "nesting level starts at 1");
    let mut s = Searcher::new(state.formula(), cfg, global, rng);
    let mut prefix = state.prefix().to_vec();
    Nested {
        search: &mut s,
        zero,
        observer,
    }
    .search(&mut prefix, level)
}

/// Nested Monte Carlo search from `state`: at each step every move is
/// scored by a rollout (level 1) or a lower-level search, and the best
/// sequence found so far is followed when no move improves on it.
/// Returns the best score and the moves played from `state`.
pub fn nmcs<R: Rng + ?Sized>(
    state: &SearchState<'_>,
    level: u32,
    cfg: &McConfig,
    global: &GlobalBest,
    rng: &mut R,
) -> (f64, Vec<bool>) {
    nested_call(state, level, cfg, global, rng, false, &mut |_| {})
}

pub fn nmcs_traced<R: Rng + ?Sized>(
    state: &SearchState<'_>,
    level: u32,
    cfg: &McConfig,
    global: &GlobalBest,
    rng: &mut R,
    observer: &mut dyn FnMut(&NestedEvent),
) -> (f64, Vec<bool>) {
    nested_call(state, level, cfg, global, rng, false, observer)
}

/// Zero-nested variant of [`nmcs`]: each step draws `znmcs_samples`
/// estimates of the current state itself, without playing a move first.
pub fn znmcs<R: Rng + ?Sized>(
    state: &SearchState<'_>,
    level: u32,
    cfg: &McConfig,
    global: &GlobalBest,
    rng: &mut R,
) -> (f64, Vec<bool>) {
    nested_call(state, level, cfg, global, rng, true, &mut |_| {})
}

pub fn znmcs_traced<R: Rng + ?Sized>(
    state: &SearchState<'_>,
    level: u32,
    cfg: &McConfig,
    global: &GlobalBest,
    rng: &mut R,
    observer: &mut dyn FnMut(&NestedEvent),
) -> (f64, Vec<bool>) {
    nested_call(state, level, cfg, global, rng, true, observer)
}

/// Repeats top-level nested searches from the root until the budget runs out.
pub(super) fn run_nested<R: Rng + ?Sized>(
    formula: &Formula,
    cfg: &McConfig,
    global: &GlobalBest,
    rng: &mut R,
    zero: bool,
) -> SearchOutcome {
    let mut s = Searcher::new(formula, cfg, global, rng);
    let mut observer = |_: &NestedEvent| {};
    let mut nested = Nested {
        search: &mut s,
        zero,
        observer: &mut observer,
    };
    loop {
        nested.search(&mut Vec::new(), cfg.nmcs_level);
        if nested.search.should_stop() {
            break;
        }
    }
    s.finish()
}
