//! Omega-automata layer: parity-to-Buchi conversion, Safra/Piterman
//! determinization, complementation by priority shift, and exact lasso-word
//! acceptance oracles used throughout the tests.

use std::collections::{HashMap, HashSet};

use crate::formula::FormulaId;
use crate::tracking::{Letter, TrackingNpa};

mod hoa;
mod safra;
pub use hoa::{dump_dpa, dump_npa};
pub use safra::{complement, determinize, Dpa, DpaStateId};

/// Buchi state: a closure formula in the initial copy (`copy == 0`) or in
/// the copy that has guessed the dominating even priority `copy`.
pub type NbaState = (FormulaId, u32);

/// Buchi automaton with transition-based acceptance, equivalent to the
/// tracking automaton: a run guesses a dominating even priority and a point
/// after which all priorities stay below it while it recurs infinitely often.
#[derive(Debug, Clone)]
pub struct Nba {
    pub npa: TrackingNpa,
    evens: Vec<u32>,
}

/// Conversion from the nondeterministic parity automaton; the state count is
/// bounded by `n * (k/2 + 1) + n`.
pub fn parity_to_buchi(npa: TrackingNpa) -> Nba {
    let evens = npa.even_priorities();
    Nba { npa, evens }
}

impl Nba {
    pub fn initial(&self) -> NbaState {
        (self.npa.initial(), 0)
    }

    /// Upper bound on reachable states.
    pub fn states_bound(&self) -> usize {
        self.npa.num_states() * (1 + self.evens.len())
    }

    /// Successors with their acceptance flags.
    pub fn succ(&self, state: NbaState, letter: &Letter) -> Vec<(NbaState, bool)> {
        let (phi, copy) = state;
        let mut out = Vec::new();
        for succ in self.npa.delta(phi, letter) {
            let p = self.npa.priority(phi, letter, succ);
            if copy == 0 {
                out.push(((succ, 0), false));
                for &e in &self.evens {
                    if p <= e {
                        out.push(((succ, e), p == e));
                    }
                }
            } else if p <= copy {
                out.push(((succ, copy), p == copy));
            }
        }
        out
    }
}

/// Exact acceptance of `prefix . cycle^omega` by the tracking automaton:
/// true iff some run has an even maximal infinitely-recurring priority.
/// Decided on the product of the state set with word positions by a
/// per-priority cycle search.
pub fn lasso_accepts_npa(npa: &TrackingNpa, prefix: &[Letter], cycle: &[Letter]) -> bool {
    assert!(!cycle.is_empty(), "lasso loop must be nonempty");
    let total = prefix.len() + cycle.len();
    let letter = |pos: usize| -> &Letter {
        if pos < prefix.len() {
            &prefix[pos]
        } else {
            &cycle[pos - prefix.len()]
        }
    };
    let next = |pos: usize| -> usize {
        if pos + 1 < total {
            pos + 1
        } else {
            prefix.len()
        }
    };
    // Reachable product nodes.
    let start = (npa.initial(), 0usize);
    let mut reach: HashSet<(FormulaId, usize)> = HashSet::new();
    let mut stack = vec![start];
    reach.insert(start);
    while let Some((q, pos)) = stack.pop() {
        for succ in npa.delta(q, letter(pos)) {
            let node = (succ, next(pos));
            if reach.insert(node) {
                stack.push(node);
            }
        }
    }
    // For each even priority p: restrict loop-part edges to priority <= p and
    // look for a cycle through an edge of priority exactly p.
    let evens: Vec<u32> = (1..=npa.max_priority()).filter(|p| p % 2 == 0).collect();
    for &p in &evens {
        let nodes: Vec<(FormulaId, usize)> =
            reach.iter().copied().filter(|(_, pos)| *pos >= prefix.len()).collect();
        let idx: HashMap<(FormulaId, usize), usize> =
            nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut edges: Vec<(usize, usize, u32)> = Vec::new();
        for &(q, pos) in &nodes {
            for succ in npa.delta(q, letter(pos)) {
                let prio = npa.priority(q, letter(pos), succ);
                if prio <= p {
                    if let Some(&j) = idx.get(&(succ, next(pos))) {
                        edges.push((idx[&(q, pos)], j, prio));
                    }
                }
            }
        }
        let comp = scc(nodes.len(), &edges);
        if edges.iter().any(|&(u, v, prio)| prio == p && comp[u] == comp[v]) {
            return true;
        }
    }
    false
}

/// Exact acceptance of a lasso by the Buchi automaton: a reachable cycle
/// containing an accepting transition.
pub fn lasso_accepts_nba(nba: &Nba, prefix: &[Letter], cycle: &[Letter]) -> bool {
    assert!(!cycle.is_empty());
    let total = prefix.len() + cycle.len();
    let letter = |pos: usize| -> &Letter {
        if pos < prefix.len() {
            &prefix[pos]
        } else {
            &cycle[pos - prefix.len()]
        }
    };
    let next = |pos: usize| -> usize {
        if pos + 1 < total {
            pos + 1
        } else {
            prefix.len()
        }
    };
    let start = (nba.initial(), 0usize);
    let mut reach: HashSet<(NbaState, usize)> = HashSet::new();
    let mut stack = vec![start];
    reach.insert(start);
    while let Some((q, pos)) = stack.pop() {
        for (succ, _) in nba.succ(q, letter(pos)) {
            let node = (succ, next(pos));
            if reach.insert(node) {
                stack.push(node);
            }
        }
    }
    let nodes: Vec<(NbaState, usize)> =
        reach.iter().copied().filter(|(_, pos)| *pos >= prefix.len()).collect();
    let idx: HashMap<(NbaState, usize), usize> =
        nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let mut edges: Vec<(usize, usize, bool)> = Vec::new();
    for &(q, pos) in &nodes {
        for (succ, acc) in nba.succ(q, letter(pos)) {
            if let Some(&j) = idx.get(&(succ, next(pos))) {
                edges.push((idx[&(q, pos)], j, acc));
            }
        }
    }
    let comp = scc(nodes.len(), &edges.iter().map(|&(u, v, _)| (u, v, 0u32)).collect::<Vec<_>>());
    edges.iter().any(|&(u, v, acc)| acc && comp[u] == comp[v])
}

/// Strongly connected components by Kosaraju; returns a component id per node.
/// Shared with model extraction for cycle-parity validation.
pub(crate) fn scc(n: usize, edges: &[(usize, usize, u32)]) -> Vec<usize> {
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    for &(u, v, _) in edges {
        fwd[u].push(v);
        bwd[v].push(u);
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        // Iterative post-order.
        let mut stack = vec![(s, 0usize)];
        seen[s] = true;
        while let Some(&mut (u, ref mut i)) = stack.last_mut() {
            if *i < fwd[u].len() {
                let v = fwd[u][*i];
                *i += 1;
                if !seen[v] {
                    seen[v] = true;
                    stack.push((v, 0));
                }
            } else {
                order.push(u);
                stack.pop();
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = c;
        while let Some(u) = stack.pop() {
            for &v in &bwd[u] {
                if comp[v] == usize::MAX {
                    comp[v] = c;
                    stack.push(v);
                }
            }
        }
        c += 1;
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Closure};
    use crate::logic::LogicKind;
    use crate::tracking::TrackingNpa;

    fn npa(src: &str) -> TrackingNpa {
        let f = parse(src, LogicKind::Kripke).unwrap();
        TrackingNpa::build(Closure::build(&f))
    }

    #[test]
    fn mu_unfolding_lasso_is_a_bad_branch() {
        let a = npa("mu X. <> X");
        let chi = a.initial();
        let dia = a.delta(chi, &Letter::Unfold(chi))[0];
        let cycle = vec![Letter::Unfold(chi), Letter::select([(dia, 0)])];
        assert!(lasso_accepts_npa(&a, &[], &cycle));
        let nba = parity_to_buchi(a);
        assert!(lasso_accepts_nba(&nba, &[], &cycle));
    }

    #[test]
    fn nu_unfolding_lasso_is_good() {
        let a = npa("nu X. <> X");
        let chi = a.initial();
        let dia = a.delta(chi, &Letter::Unfold(chi))[0];
        let cycle = vec![Letter::Unfold(chi), Letter::select([(dia, 0)])];
        assert!(!lasso_accepts_npa(&a, &[], &cycle));
        let nba = parity_to_buchi(a);
        assert!(!lasso_accepts_nba(&nba, &[], &cycle));
    }

    #[test]
    fn dead_traces_reject() {
        let a = npa("mu X. <> X");
        let chi = a.initial();
        // never select the diamond: the trace dies, no run exists
        let cycle = vec![Letter::Unfold(chi), Letter::select([])];
        assert!(!lasso_accepts_npa(&a, &[], &cycle));
    }

    #[test]
    fn fixpoint_free_nba_is_empty() {
        let a = npa("<> p & [] q");
        let chi = a.initial();
        let nba = parity_to_buchi(a);
        assert!(nba.evens.is_empty());
        let cycle = vec![Letter::Conj(chi)];
        assert!(!lasso_accepts_nba(&nba, &[], &cycle));
    }

    #[test]
    fn nba_size_bound() {
        let src = "nu X. mu Y. ((p & <> X) | <> Y)";
        let f = parse(src, LogicKind::Kripke).unwrap();
        let n = f.size();
        let k = crate::formula::alternation_depth(&f) as usize;
        let a = TrackingNpa::build(Closure::build(&f));
        let nba = parity_to_buchi(a);
        assert!(nba.states_bound() <= n * (k / 2 + 1) + n);
    }
}
