//! On-the-fly Safra/Piterman determinization with transition-based parity
//! priorities, plus complementation by shifting every priority up by one.
//!
//! Macro-states are compact history trees: nodes carry disjoint subsets of
//! Buchi states, children refine their parent, and node names record creation
//! order (parents and older siblings have smaller names; names are compacted
//! after removals, order-preserved). A transition spawns a child per node
//! holding the accepting successors, prunes states claimed by older siblings,
//! removes empty nodes, and collapses a node whose children cover it (a
//! "green flash"). The emitted priority reflects the most significant event:
//! a death at name `q` is bad, a green flash at `q` is good, smaller names
//! dominate. A run is accepted iff the highest priority seen infinitely often
//! is even, which happens exactly when some node eventually survives forever
//! and flashes green infinitely often.
//!
//! The macro-state table is built on demand and memoized; only letters the
//! tableau actually asks for are ever evaluated. The table is a single-writer
//! structure: all mutation goes through `&mut self`.

use std::collections::{BTreeSet, HashMap};

use crate::formula::FormulaId;
use crate::tracking::Letter;

use super::{Nba, NbaState};

pub type DpaStateId = u32;

const NEUTRAL: u32 = 1;

/// A compact history tree. `nodes[i]` is the node named `i + 1`; the parent
/// field holds the parent's index (`usize::MAX` at the root). The empty tree
/// is the rejecting sink.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Tree {
    nodes: Vec<(usize, BTreeSet<NbaState>)>,
}

impl Tree {
    fn sink() -> Tree {
        Tree { nodes: Vec::new() }
    }

    fn initial(q0: NbaState) -> Tree {
        let mut label = BTreeSet::new();
        label.insert(q0);
        Tree { nodes: vec![(usize::MAX, label)] }
    }
}

/// Deterministic parity automaton over the tracking alphabet, built lazily.
#[derive(Debug)]
pub struct Dpa {
    pub nba: Nba,
    trees: Vec<Tree>,
    index: HashMap<Tree, DpaStateId>,
    trans: HashMap<(DpaStateId, Letter), (DpaStateId, u32)>,
    initial: DpaStateId,
    /// Bound on node names, fixing the priority scale.
    name_bound: usize,
    /// 0 for the plain determinization, 1 after complementation.
    offset: u32,
}

/// Safra/Piterman determinization of the Buchi automaton. Priorities before
/// complementation lie in `0..2nk-1` territory: neutral steps emit 1 and
/// event priorities stay within twice the tree-name bound.
pub fn determinize(nba: Nba) -> Dpa {
    let name_bound = nba.states_bound();
    let initial_tree = Tree::initial(nba.initial());
    let mut dpa = Dpa {
        nba,
        trees: Vec::new(),
        index: HashMap::new(),
        trans: HashMap::new(),
        initial: 0,
        name_bound,
        offset: 0,
    };
    dpa.initial = dpa.intern(initial_tree);
    dpa
}

/// Complementation: every transition priority is increased by one, flipping
/// the parity of each run's dominating priority.
pub fn complement(mut dpa: Dpa) -> Dpa {
    dpa.offset += 1;
    dpa
}

impl Dpa {
    pub fn initial(&self) -> DpaStateId {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.trees.len()
    }

    /// Macro-state label: the tracking-automaton formulas alive in the tree.
    /// The initial-copy projection of the root is the full projection, since
    /// guessing copies never outrun the initial copy.
    pub fn label(&self, id: DpaStateId) -> BTreeSet<FormulaId> {
        let tree = &self.trees[id as usize];
        match tree.nodes.first() {
            None => BTreeSet::new(),
            Some((_, root)) => root.iter().filter(|(_, copy)| *copy == 0).map(|(f, _)| *f).collect(),
        }
    }

    /// All emitted priorities lie in `1..=priority_bound()`.
    pub fn priority_bound(&self) -> u32 {
        2 * self.name_bound as u32 + self.offset
    }

    fn intern(&mut self, tree: Tree) -> DpaStateId {
        if let Some(&id) = self.index.get(&tree) {
            return id;
        }
        let id = self.trees.len() as DpaStateId;
        self.index.insert(tree.clone(), id);
        self.trees.push(tree);
        id
    }

    /// Deterministic transition: successor macro-state and priority.
    pub fn step(&mut self, id: DpaStateId, letter: &Letter) -> (DpaStateId, u32) {
        if let Some(&(succ, base)) = self.trans.get(&(id, letter.clone())) {
            return (succ, base + self.offset);
        }
        let (tree, base) = self.transition(&self.trees[id as usize].clone(), letter);
        let succ = self.intern(tree);
        self.trans.insert((id, letter.clone()), (succ, base));
        (succ, base + self.offset)
    }

    fn good(&self, name: usize) -> u32 {
        2 * (self.name_bound - name) as u32 + 2
    }

    fn bad(&self, name: usize) -> u32 {
        2 * (self.name_bound - name) as u32 + 3
    }

    fn transition(&self, tree: &Tree, letter: &Letter) -> (Tree, u32) {
        let m_old = tree.nodes.len();
        if m_old == 0 {
            return (Tree::sink(), NEUTRAL);
        }
        // Successor labels plus one spawned child per node carrying the
        // accepting successors.
        let mut parents: Vec<usize> = tree.nodes.iter().map(|(p, _)| *p).collect();
        let mut labels: Vec<BTreeSet<NbaState>> = Vec::with_capacity(m_old);
        let mut spawns: Vec<BTreeSet<NbaState>> = Vec::with_capacity(m_old);
        for (_, old_label) in &tree.nodes {
            let mut next = BTreeSet::new();
            let mut acc = BTreeSet::new();
            for &q in old_label {
                for (succ, accepting) in self.nba.succ(q, letter) {
                    next.insert(succ);
                    if accepting {
                        acc.insert(succ);
                    }
                }
            }
            labels.push(next);
            spawns.push(acc);
        }
        for (i, acc) in spawns.into_iter().enumerate() {
            if !acc.is_empty() {
                parents.push(i);
                labels.push(acc);
            }
        }
        let total = labels.len();
        // Top-down restoration: intersect with the parent, then drop states
        // already claimed by older siblings. Parents and older siblings have
        // smaller indices, so one ascending pass suffices.
        let mut claimed: Vec<BTreeSet<NbaState>> = vec![BTreeSet::new(); total];
        for i in 0..total {
            let p = parents[i];
            if p != usize::MAX {
                let keep: BTreeSet<NbaState> = labels[i]
                    .iter()
                    .filter(|q| labels[p].contains(q) && !claimed[p].contains(q))
                    .copied()
                    .collect();
                labels[i] = keep.clone();
                claimed[p].extend(keep);
            }
        }
        let alive: Vec<bool> = labels.iter().map(|l| !l.is_empty()).collect();
        if !alive[0] {
            // Root death: all runs are gone; the sink loops at the neutral
            // priority, so the entering edge needs no event of its own.
            return (Tree::sink(), NEUTRAL);
        }
        // Deaths score only for pre-existing nodes.
        let death = (0..m_old).find(|&i| !alive[i]).map(|i| i + 1);
        // Green flash: an alive node exactly covered by its alive children.
        let mut child_union: Vec<BTreeSet<NbaState>> = vec![BTreeSet::new(); total];
        for i in 0..total {
            let p = parents[i];
            if alive[i] && p != usize::MAX {
                child_union[p].extend(labels[i].iter().copied());
            }
        }
        let green: Vec<bool> = (0..total)
            .map(|i| alive[i] && !child_union[i].is_empty() && child_union[i] == labels[i])
            .collect();
        let flash = (0..total).find(|&i| green[i]).map(|i| i + 1);
        // Remove strict descendants of green nodes (not scored as deaths).
        let mut dropped = vec![false; total];
        for i in 0..total {
            let p = parents[i];
            if p != usize::MAX && (green[p] || dropped[p]) {
                dropped[i] = true;
            }
        }
        // Compact the survivors, preserving name order.
        let mut rename = vec![usize::MAX; total];
        let mut nodes = Vec::new();
        for i in 0..total {
            if alive[i] && !dropped[i] {
                rename[i] = nodes.len();
                let p = parents[i];
                let np = if p == usize::MAX { usize::MAX } else { rename[p] };
                nodes.push((np, std::mem::take(&mut labels[i])));
            }
        }
        let priority = match (death, flash) {
            (None, None) => NEUTRAL,
            (Some(e), None) => self.bad(e),
            (None, Some(f)) => self.good(f),
            (Some(e), Some(f)) => {
                if e < f {
                    self.bad(e)
                } else {
                    self.good(f)
                }
            }
        };
        (Tree { nodes }, priority)
    }

    /// Memoized transitions leaving a state, priorities at the current
    /// complementation offset.
    pub fn reached_transitions_from(&self, id: DpaStateId) -> Vec<(Letter, DpaStateId, u32)> {
        let mut out: Vec<(Letter, DpaStateId, u32)> = self
            .trans
            .iter()
            .filter(|((src, _), _)| *src == id)
            .map(|((_, letter), &(succ, base))| (letter.clone(), succ, base + self.offset))
            .collect();
        out.sort_by_key(|(l, _, _)| format!("{l}"));
        out
    }

    /// Exact lasso acceptance: run the prefix, then iterate the cycle until a
    /// (state, position) pair repeats; accept iff the highest priority on the
    /// repeating segment is even.
    pub fn run_lasso(&mut self, prefix: &[Letter], cycle: &[Letter]) -> bool {
        assert!(!cycle.is_empty());
        let mut st = self.initial;
        for l in prefix {
            st = self.step(st, l).0;
        }
        let mut seen: HashMap<(DpaStateId, usize), usize> = HashMap::new();
        let mut prios: Vec<u32> = Vec::new();
        let mut pos = 0usize;
        loop {
            if let Some(&first) = seen.get(&(st, pos)) {
                let max = prios[first..].iter().max().copied().unwrap_or(NEUTRAL);
                return max % 2 == 0;
            }
            seen.insert((st, pos), prios.len());
            let (next, p) = self.step(st, &cycle[pos]);
            prios.push(p);
            st = next;
            pos = (pos + 1) % cycle.len();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Closure};
    use crate::logic::LogicKind;
    use crate::omega::{lasso_accepts_npa, parity_to_buchi};
    use crate::tracking::TrackingNpa;

    fn dpa_for(src: &str) -> (TrackingNpa, Dpa) {
        let f = parse(src, LogicKind::Kripke).unwrap();
        let npa = TrackingNpa::build(Closure::build(&f));
        let dpa = complement(determinize(parity_to_buchi(npa.clone())));
        (npa, dpa)
    }

    #[test]
    fn complemented_dpa_flips_the_mu_lasso() {
        let (npa, mut dpa) = dpa_for("mu X. <> X");
        let chi = npa.initial();
        let dia = npa.delta(chi, &Letter::Unfold(chi))[0];
        let cycle = vec![Letter::Unfold(chi), Letter::select([(dia, 0)])];
        assert!(lasso_accepts_npa(&npa, &[], &cycle));
        assert!(!dpa.run_lasso(&[], &cycle));
        // the dead-trace lasso is good
        let dead = vec![Letter::Unfold(chi), Letter::select([])];
        assert!(!lasso_accepts_npa(&npa, &[], &dead));
        assert!(dpa.run_lasso(&[], &dead));
    }

    #[test]
    fn complemented_dpa_accepts_the_nu_lasso() {
        let (npa, mut dpa) = dpa_for("nu X. <> X");
        let chi = npa.initial();
        let dia = npa.delta(chi, &Letter::Unfold(chi))[0];
        let cycle = vec![Letter::Unfold(chi), Letter::select([(dia, 0)])];
        assert!(!lasso_accepts_npa(&npa, &[], &cycle));
        assert!(dpa.run_lasso(&[], &cycle));
    }

    #[test]
    fn labels_cohere_with_npa_successors() {
        let (npa, mut dpa) = dpa_for("nu X. mu Y. ((p & <> X) | <> Y)");
        // Walk a few steps and check l(delta(v, sigma)) matches the union of
        // NPA successors of l(v).
        let mut frontier = vec![dpa.initial()];
        let mut visited = std::collections::HashSet::new();
        visited.insert(dpa.initial());
        for _ in 0..4 {
            let mut next_frontier = Vec::new();
            for &v in &frontier {
                let label = dpa.label(v);
                for letter in npa.letters_for(&label).letters() {
                    let (succ, _) = dpa.step(v, &letter);
                    let expect: BTreeSet<FormulaId> =
                        label.iter().flat_map(|&q| npa.delta(q, &letter)).collect();
                    assert_eq!(dpa.label(succ), expect, "label coherence at letter {letter}");
                    if visited.insert(succ) {
                        next_frontier.push(succ);
                    }
                }
            }
            frontier = next_frontier;
        }
    }

    #[test]
    fn sink_accepts_everything_after_complement() {
        let (npa, mut dpa) = dpa_for("mu X. <> X");
        let chi = npa.initial();
        // kill all traces, then loop on anything
        let prefix = vec![Letter::Unfold(chi), Letter::select([])];
        let cycle = vec![Letter::select([])];
        assert!(dpa.run_lasso(&prefix, &cycle));
    }

    #[test]
    fn priorities_stay_in_range() {
        let (npa, mut dpa) = dpa_for("nu X. mu Y. ((p & <> X) | <> Y)");
        let bound = dpa.priority_bound();
        let mut stack = vec![dpa.initial()];
        let mut seen = std::collections::HashSet::new();
        seen.insert(dpa.initial());
        let mut steps = 0;
        while let Some(v) = stack.pop() {
            if steps > 2000 {
                break;
            }
            let label = dpa.label(v);
            for letter in npa.letters_for(&label).letters() {
                let (succ, p) = dpa.step(v, &letter);
                steps += 1;
                assert!((1..=bound).contains(&p), "priority {} out of range", p);
                if seen.insert(succ) {
                    stack.push(succ);
                }
            }
        }
    }
}
