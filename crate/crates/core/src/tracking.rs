//! The nondeterministic tracking parity automaton over the Fischer-Ladner
//! closure.
//!
//! Nodes are closure formulas; letters either decompose one non-modal formula
//! (disjunct choice, conjunction step, fixpoint unfolding) or select a set of
//! modal-literal argument occurrences to track across a modal step. A trace
//! at a selected literal moves to the selected argument; a modal literal that
//! is not selected has no successor, so its trace dies. Priorities count only
//! fixpoint unfoldings, at the unfolded formula's alternation level.
//!
//! Selections are sets of (literal, argument index) pairs; for unary
//! operators this is exactly the powerset-of-literals alphabet, while n-ary
//! operators select each tracked argument position separately.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::formula::{Closure, Formula, FormulaId};

/// A set of selected (modal literal, argument position) pairs.
pub type Selection = Arc<BTreeSet<(FormulaId, u8)>>;

/// Alphabet letters of the tracking automaton.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Letter {
    /// Choose disjunct `b` of the given or-formula.
    Disj(FormulaId, bool),
    /// Split the given and-formula into both conjuncts.
    Conj(FormulaId),
    /// Unfold the given fixpoint formula.
    Unfold(FormulaId),
    /// Modal step tracking the selected argument occurrences.
    Select(Selection),
}

impl Letter {
    pub fn select<I: IntoIterator<Item = (FormulaId, u8)>>(items: I) -> Letter {
        Letter::Select(Arc::new(items.into_iter().collect()))
    }
}

/// What a node's label contributes to the alphabet: either the one or two
/// letters decomposing its fixed non-modal formula, or all selections over
/// its modal-literal argument positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeLetters {
    Decompose(Vec<Letter>),
    /// Base pairs; the letters are all subsets of this list.
    Selections(Vec<(FormulaId, u8)>),
}

impl NodeLetters {
    /// Materializes the letters; exponential for selections, so callers cap
    /// the label size.
    pub fn letters(&self) -> Vec<Letter> {
        match self {
            NodeLetters::Decompose(ls) => ls.clone(),
            NodeLetters::Selections(base) => {
                let n = base.len();
                assert!(n < 64, "selection base too large to enumerate");
                (0u64..(1 << n))
                    .map(|mask| {
                        Letter::select(
                            base.iter()
                                .enumerate()
                                .filter(|(i, _)| mask & (1 << i) != 0)
                                .map(|(_, &p)| p),
                        )
                    })
                    .collect()
            }
        }
    }
}

/// The tracking automaton: states are the closure, the initial state is the
/// target formula, transitions are computed on demand and never materialized
/// over the full selection alphabet.
#[derive(Debug, Clone)]
pub struct TrackingNpa {
    pub closure: Closure,
    /// Alternation level per closure formula, for fixpoint literals.
    levels: Vec<Option<u32>>,
}

impl TrackingNpa {
    pub fn build(closure: Closure) -> TrackingNpa {
        let levels = (0..closure.len() as FormulaId).map(|id| closure.fixpoint_level(id)).collect();
        TrackingNpa { closure, levels }
    }

    pub fn initial(&self) -> FormulaId {
        self.closure.origin
    }

    pub fn num_states(&self) -> usize {
        self.closure.len()
    }

    /// All priorities lie in `1..=max_priority()`.
    pub fn max_priority(&self) -> u32 {
        self.closure.k.max(1)
    }

    /// The even priorities that occur, ascending; these drive the Buchi
    /// conversion.
    pub fn even_priorities(&self) -> Vec<u32> {
        let mut evens: Vec<u32> = self
            .levels
            .iter()
            .flatten()
            .copied()
            .filter(|l| l % 2 == 0)
            .collect();
        evens.sort_unstable();
        evens.dedup();
        evens
    }

    /// Transition relation. Non-matching decomposition letters keep a trace
    /// in place; selections kill everything except selected argument
    /// occurrences of modal literals.
    pub fn delta(&self, state: FormulaId, letter: &Letter) -> Vec<FormulaId> {
        match letter {
            Letter::Select(sel) => match self.closure.get(state) {
                Formula::Modal(_, args) if !args.is_empty() => {
                    let kids = self.closure.children(state);
                    (0..args.len() as u8)
                        .filter(|i| sel.contains(&(state, *i)))
                        .map(|i| kids[i as usize])
                        .collect()
                }
                _ => Vec::new(),
            },
            Letter::Disj(phi, b) => {
                if state == *phi {
                    vec![self.closure.children(state)[*b as usize]]
                } else {
                    vec![state]
                }
            }
            Letter::Conj(phi) => {
                if state == *phi {
                    self.closure.children(state)
                } else {
                    vec![state]
                }
            }
            Letter::Unfold(phi) => {
                if state == *phi {
                    self.closure.children(state)
                } else {
                    vec![state]
                }
            }
        }
    }

    /// Transition priority: 1 unless a fixpoint literal moves, in which case
    /// its alternation level.
    pub fn priority(&self, state: FormulaId, _letter: &Letter, succ: FormulaId) -> u32 {
        match self.levels[state as usize] {
            Some(level) if succ != state => level,
            _ => 1,
        }
    }

    /// The letters that matter at a node label: decomposition of the fixed
    /// non-modal formula (the least one in closure order) when present,
    /// otherwise all selections over the label's argument positions.
    pub fn letters_for(&self, label: &BTreeSet<FormulaId>) -> NodeLetters {
        if let Some(&psi) = label.iter().find(|&&id| !self.closure.get(id).is_modal_literal()) {
            let letters = match self.closure.get(psi) {
                Formula::Or(..) => vec![Letter::Disj(psi, false), Letter::Disj(psi, true)],
                Formula::And(..) => vec![Letter::Conj(psi)],
                Formula::Mu(..) | Formula::Nu(..) => vec![Letter::Unfold(psi)],
                other => unreachable!("non-modal, non-decomposable formula {other}"),
            };
            return NodeLetters::Decompose(letters);
        }
        let mut base = Vec::new();
        for &id in label {
            if let Formula::Modal(_, args) = self.closure.get(id) {
                for i in 0..args.len() as u8 {
                    base.push((id, i));
                }
            }
        }
        NodeLetters::Selections(base)
    }

    /// The fixed non-modal formula decomposed at a pre-state label.
    pub fn psi_v(&self, label: &BTreeSet<FormulaId>) -> Option<FormulaId> {
        label.iter().copied().find(|&id| !self.closure.get(id).is_modal_literal())
    }

    pub fn display(&self, id: FormulaId) -> &Formula {
        self.closure.get(id)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Disj(id, b) => write!(f, "or#{}:{}", id, *b as u8),
            Letter::Conj(id) => write!(f, "and#{}", id),
            Letter::Unfold(id) => write!(f, "unfold#{}", id),
            Letter::Select(sel) => {
                write!(f, "sel{{")?;
                for (i, (id, k)) in sel.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}.{}", id, k)?;
                }
                write!(f, "}}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::logic::LogicKind;

    fn npa(src: &str) -> TrackingNpa {
        let f = parse(src, LogicKind::Kripke).unwrap();
        TrackingNpa::build(Closure::build(&f))
    }

    #[test]
    fn unfold_step_moves_with_alternation_priority() {
        let a = npa("mu X. <> X");
        let chi = a.initial();
        let letter = Letter::Unfold(chi);
        let succs = a.delta(chi, &letter);
        assert_eq!(succs.len(), 1);
        let unfolded = succs[0];
        assert_ne!(unfolded, chi);
        assert_eq!(a.priority(chi, &letter, unfolded), 2);
        // non-matching formulas stay in place at priority 1
        assert_eq!(a.delta(unfolded, &letter), vec![unfolded]);
        assert_eq!(a.priority(unfolded, &letter, unfolded), 1);
    }

    #[test]
    fn selections_track_only_selected_literals() {
        let a = npa("mu X. <> X");
        let chi = a.initial();
        let dia = a.delta(chi, &Letter::Unfold(chi))[0];
        // dia = <>(mu X. <> X)
        let selected = Letter::select([(dia, 0)]);
        assert_eq!(a.delta(dia, &selected), vec![chi]);
        let empty = Letter::select([]);
        assert!(a.delta(dia, &empty).is_empty());
    }

    #[test]
    fn conjunction_letters_are_nondeterministic() {
        let a = npa("<> p & [] q");
        let chi = a.initial();
        let succs = a.delta(chi, &Letter::Conj(chi));
        assert_eq!(succs.len(), 2);
        // a different formula is unaffected by the letter
        let other = succs[0];
        assert_eq!(a.delta(other, &Letter::Conj(chi)), vec![other]);
    }

    #[test]
    fn letters_for_prestate_and_state_labels() {
        let a = npa("<> p & [] q");
        let chi = a.initial();
        let pre: BTreeSet<_> = [chi].into_iter().collect();
        match a.letters_for(&pre) {
            NodeLetters::Decompose(ls) => assert_eq!(ls, vec![Letter::Conj(chi)]),
            other => panic!("expected decomposition, got {:?}", other),
        }
        let kids = a.delta(chi, &Letter::Conj(chi));
        let state: BTreeSet<_> = kids.iter().copied().collect();
        match a.letters_for(&state) {
            NodeLetters::Selections(base) => {
                assert_eq!(base.len(), 2);
                assert_eq!(a.letters_for(&state).letters().len(), 4);
            }
            other => panic!("expected selections, got {:?}", other),
        }
    }

    #[test]
    fn disjunction_letters_choose() {
        let a = npa("p | q");
        let chi = a.initial();
        let l0 = a.delta(chi, &Letter::Disj(chi, false));
        let l1 = a.delta(chi, &Letter::Disj(chi, true));
        assert_eq!(l0.len(), 1);
        assert_eq!(l1.len(), 1);
        assert_ne!(l0, l1);
    }

    #[test]
    fn priorities_stay_within_alternation_depth() {
        let a = npa("nu X. mu Y. ((p & <> X) | <> Y)");
        let k = a.max_priority();
        assert_eq!(k, 3);
        for id in 0..a.num_states() as FormulaId {
            let label: BTreeSet<_> = [id].into_iter().collect();
            for letter in a.letters_for(&label).letters() {
                for succ in a.delta(id, &letter) {
                    let p = a.priority(id, &letter, succ);
                    assert!((1..=k).contains(&p));
                    if succ == id {
                        assert_eq!(p, 1);
                    }
                }
            }
        }
    }
}
