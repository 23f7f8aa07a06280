//! Concrete coalgebra models, their extraction from a recorded tableau
//! strategy, and the mu-calculus model checker used as the verification
//! oracle for every SAT verdict.
//!
//! Extraction follows the recorded choices into a pre-semi-tableau: each
//! pre-state keeps its admitted branch, each state the selections backing its
//! one-step witness. Pre-state chains are then collapsed into their first
//! reachable state and the witness is re-indexed along the collapse, summing
//! weights and probabilities when two successors land on the same state.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::formula::Formula;
use crate::logic::{parse_rat, rat_str, LogicKind, ModalOp, Rat};
use crate::tableau::{NodeId, NodeKind, NodeStrategy, Tableau};
use crate::tracking::Letter;
use crate::onestep::OneStepWitness;

/// A finite pointed coalgebra for one of the three semantic domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coalgebra {
    Kripke {
        succs: Vec<Vec<usize>>,
        atoms: Vec<BTreeSet<String>>,
        root: usize,
    },
    Multigraph {
        weights: Vec<Vec<(usize, u64)>>,
        atoms: Vec<BTreeSet<String>>,
        root: usize,
    },
    Markov {
        rows: Vec<Vec<(usize, Rat)>>,
        atoms: Vec<BTreeSet<String>>,
        root: usize,
    },
}

impl Coalgebra {
    pub fn len(&self) -> usize {
        match self {
            Coalgebra::Kripke { atoms, .. }
            | Coalgebra::Multigraph { atoms, .. }
            | Coalgebra::Markov { atoms, .. } => atoms.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn root(&self) -> usize {
        match self {
            Coalgebra::Kripke { root, .. }
            | Coalgebra::Multigraph { root, .. }
            | Coalgebra::Markov { root, .. } => *root,
        }
    }

    pub fn atoms(&self, state: usize) -> &BTreeSet<String> {
        match self {
            Coalgebra::Kripke { atoms, .. }
            | Coalgebra::Multigraph { atoms, .. }
            | Coalgebra::Markov { atoms, .. } => &atoms[state],
        }
    }

    /// The semantic domain this model lives in.
    pub fn domain(&self) -> &'static str {
        match self {
            Coalgebra::Kripke { .. } => "kripke",
            Coalgebra::Multigraph { .. } => "multigraph",
            Coalgebra::Markov { .. } => "markov",
        }
    }

    fn supports(&self, kind: LogicKind) -> bool {
        matches!(
            (self, kind),
            (Coalgebra::Kripke { .. }, LogicKind::Kripke)
                | (Coalgebra::Multigraph { .. }, LogicKind::Graded)
                | (Coalgebra::Multigraph { .. }, LogicKind::Presburger)
                | (Coalgebra::Markov { .. }, LogicKind::Probabilistic)
                | (Coalgebra::Markov { .. }, LogicKind::PolyProb)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("operator {0} does not match the model's branching type {1}")]
    WrongLogic(String, &'static str),
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error("free fixpoint variable {0} during checking")]
    FreeVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("strategy missing for node {0} (internal invariant violation)")]
    MissingStrategy(NodeId),
    #[error("pre-state cycle without modal steps (internal invariant violation)")]
    PrestateCycle,
    #[error("strategy subgraph contains an odd-dominated cycle at priority {0}")]
    BadCycle(u32),
    #[error("witness successor collapses to a missing state (internal invariant violation)")]
    MissingState,
}

/// The sub-automaton picked by the strategy: resolved disjunctions, kept
/// selections, no pre-state-only cycles.
#[derive(Debug, Clone)]
pub struct PreSemiTableau {
    /// All reachable nodes (W).
    pub nodes: Vec<NodeId>,
    /// Kept transitions with their priorities (L, a subset of delta).
    pub edges: Vec<(NodeId, Letter, NodeId, u32)>,
    /// W restricted to states; these become the model carrier.
    pub states: Vec<NodeId>,
    /// The first state reachable by L-steps from each node.
    pub collapse: HashMap<NodeId, NodeId>,
}

/// Follows the recorded strategy from the root, checks the pre-semi-tableau
/// invariants, and resolves the pre-state collapse.
pub fn extract_pst(
    t: &Tableau,
    strategy: &HashMap<NodeId, NodeStrategy>,
) -> Result<PreSemiTableau, ExtractError> {
    let root = t.root();
    let mut nodes = Vec::new();
    let mut seen: BTreeSet<NodeId> = BTreeSet::new();
    let mut edges = Vec::new();
    let mut queue = VecDeque::new();
    queue.push_back(root);
    seen.insert(root);
    while let Some(v) = queue.pop_front() {
        nodes.push(v);
        let strat = strategy.get(&v).ok_or(ExtractError::MissingStrategy(v))?;
        let mut kept: Vec<(Letter, NodeId)> = Vec::new();
        match strat {
            NodeStrategy::Branch { letter, succ } => kept.push((letter.clone(), *succ)),
            NodeStrategy::State { parts, witness } => {
                for i in support(witness) {
                    let part = &parts[i];
                    kept.push((part.letter.clone(), part.succ));
                }
            }
        }
        for (letter, succ) in kept {
            let prio = t
                .node_succs(v)
                .iter()
                .find(|(l, s, _)| *l == letter && *s == succ)
                .map(|&(_, _, p)| p)
                .expect("kept edge comes from the expansion");
            edges.push((v, letter, succ, prio));
            if seen.insert(succ) {
                queue.push_back(succ);
            }
        }
    }
    // No L-cycle through pre-states only: pre-states have exactly one edge,
    // so it suffices to follow chains.
    let succ_of: HashMap<NodeId, NodeId> = edges
        .iter()
        .filter(|(v, ..)| t.node_kind(*v) == NodeKind::Prestate)
        .map(|(v, _, s, _)| (*v, *s))
        .collect();
    let mut collapse: HashMap<NodeId, NodeId> = HashMap::new();
    for &start in &nodes {
        let mut path = Vec::new();
        let mut cur = start;
        loop {
            if let Some(&done) = collapse.get(&cur) {
                for p in path {
                    collapse.insert(p, done);
                }
                break;
            }
            if t.node_kind(cur) == NodeKind::State {
                collapse.insert(cur, cur);
                for p in path {
                    collapse.insert(p, cur);
                }
                break;
            }
            if path.contains(&cur) {
                return Err(ExtractError::PrestateCycle);
            }
            path.push(cur);
            cur = *succ_of.get(&cur).ok_or(ExtractError::MissingStrategy(cur))?;
        }
    }
    // Every cycle of the kept subgraph must have an even maximal priority;
    // otherwise some least fixpoint would be deferred forever.
    let index: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let priorities: BTreeSet<u32> = edges.iter().map(|&(_, _, _, p)| p).collect();
    for &p in priorities.iter().filter(|&&p| p % 2 == 1) {
        let sub: Vec<(usize, usize, u32)> = edges
            .iter()
            .filter(|&&(_, _, _, q)| q <= p)
            .map(|&(v, _, s, q)| (index[&v], index[&s], q))
            .collect();
        let comp = crate::omega::scc(nodes.len(), &sub);
        if sub.iter().any(|&(u, v, q)| q == p && comp[u] == comp[v]) {
            return Err(ExtractError::BadCycle(p));
        }
    }
    let states: Vec<NodeId> =
        nodes.iter().copied().filter(|&v| t.node_kind(v) == NodeKind::State).collect();
    Ok(PreSemiTableau { nodes, edges, states, collapse })
}

/// Indices of the nonzero entries of a witness.
fn support(w: &OneStepWitness) -> Vec<usize> {
    match w {
        OneStepWitness::Subset(s) => s.clone(),
        OneStepWitness::Multiset(weights) => {
            weights.iter().enumerate().filter(|(_, &w)| w > 0).map(|(i, _)| i).collect()
        }
        OneStepWitness::Distribution(probs) => probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > Rat::zero())
            .map(|(i, _)| i)
            .collect(),
    }
}

/// Builds the concrete model over the pre-semi-tableau's states: each state's
/// stored witness is re-indexed from successor nodes to their collapse
/// states, summing multiplicities that land on the same state.
pub fn build_model(
    t: &Tableau,
    pst: &PreSemiTableau,
    strategy: &HashMap<NodeId, NodeStrategy>,
    kind: LogicKind,
) -> Result<Coalgebra, ExtractError> {
    let index: HashMap<NodeId, usize> =
        pst.states.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let closure = t.closure();
    let mut atoms: Vec<BTreeSet<String>> = Vec::with_capacity(pst.states.len());
    for &node in &pst.states {
        let mut set = BTreeSet::new();
        for &fid in t.node_label(node) {
            if let Formula::Atom(a, true) = closure.get(fid) {
                set.insert(a.clone());
            }
        }
        atoms.push(set);
    }
    let target_state = |succ: NodeId| -> Result<usize, ExtractError> {
        let state = pst.collapse.get(&succ).ok_or(ExtractError::MissingState)?;
        index.get(state).copied().ok_or(ExtractError::MissingState)
    };
    let root = *index
        .get(pst.collapse.get(&t.root()).ok_or(ExtractError::MissingState)?)
        .ok_or(ExtractError::MissingState)?;
    match kind {
        LogicKind::Kripke => {
            let mut succs = Vec::with_capacity(pst.states.len());
            for &node in &pst.states {
                let mut out: BTreeSet<usize> = BTreeSet::new();
                if let Some(NodeStrategy::State { parts, witness }) = strategy.get(&node) {
                    for i in support(witness) {
                        out.insert(target_state(parts[i].succ)?);
                    }
                }
                succs.push(out.into_iter().collect());
            }
            Ok(Coalgebra::Kripke { succs, atoms, root })
        }
        LogicKind::Graded | LogicKind::Presburger => {
            let mut rows = Vec::with_capacity(pst.states.len());
            for &node in &pst.states {
                let mut out: BTreeMap<usize, u64> = BTreeMap::new();
                if let Some(NodeStrategy::State { parts, witness }) = strategy.get(&node) {
                    if let OneStepWitness::Multiset(weights) = witness {
                        for (i, &w) in weights.iter().enumerate() {
                            if w > 0 {
                                *out.entry(target_state(parts[i].succ)?).or_insert(0) += w;
                            }
                        }
                    }
                }
                rows.push(out.into_iter().collect());
            }
            Ok(Coalgebra::Multigraph { weights: rows, atoms, root })
        }
        LogicKind::Probabilistic | LogicKind::PolyProb => {
            let mut rows = Vec::with_capacity(pst.states.len());
            for &node in &pst.states {
                let mut out: BTreeMap<usize, Rat> = BTreeMap::new();
                if let Some(NodeStrategy::State { parts, witness }) = strategy.get(&node) {
                    if let OneStepWitness::Distribution(probs) = witness {
                        for (i, p) in probs.iter().enumerate() {
                            if *p > Rat::zero() {
                                *out.entry(target_state(parts[i].succ)?).or_insert_with(Rat::zero) +=
                                    p.clone();
                            }
                        }
                    }
                }
                let total: Rat = out.values().cloned().sum();
                if total != Rat::one() {
                    return Err(ExtractError::MissingState);
                }
                rows.push(out.into_iter().collect());
            }
            Ok(Coalgebra::Markov { rows, atoms, root })
        }
    }
}

/// Exact denotation of a closed formula by Kleene iteration on the finite
/// model; modal operators evaluate their concrete predicate lifting.
pub fn model_check(m: &Coalgebra, f: &Formula) -> Result<BTreeSet<usize>, ModelError> {
    let mut env: HashMap<String, BTreeSet<usize>> = HashMap::new();
    eval(m, f, &mut env)
}

/// Convenience: does the formula hold at the model's root?
pub fn holds_at_root(m: &Coalgebra, f: &Formula) -> Result<bool, ModelError> {
    Ok(model_check(m, f)?.contains(&m.root()))
}

fn eval(
    m: &Coalgebra,
    f: &Formula,
    env: &mut HashMap<String, BTreeSet<usize>>,
) -> Result<BTreeSet<usize>, ModelError> {
    let n = m.len();
    let full = || (0..n).collect::<BTreeSet<usize>>();
    match f {
        Formula::Bot => Ok(BTreeSet::new()),
        Formula::Top => Ok(full()),
        Formula::Atom(a, pol) => Ok((0..n)
            .filter(|&s| m.atoms(s).contains(a) == *pol)
            .collect()),
        Formula::Var(x) => env.get(x).cloned().ok_or_else(|| ModelError::FreeVariable(x.clone())),
        Formula::Neg(g) => {
            let inner = eval(m, g, env)?;
            Ok(full().difference(&inner).copied().collect())
        }
        Formula::And(l, r) => {
            let a = eval(m, l, env)?;
            let b = eval(m, r, env)?;
            Ok(a.intersection(&b).copied().collect())
        }
        Formula::Or(l, r) => {
            let a = eval(m, l, env)?;
            let b = eval(m, r, env)?;
            Ok(a.union(&b).copied().collect())
        }
        Formula::Modal(op, args) => {
            let sets: Vec<BTreeSet<usize>> =
                args.iter().map(|a| eval(m, a, env)).collect::<Result<_, _>>()?;
            (0..n).map(|s| lifting(m, s, op, &sets).map(|b| (s, b))).try_fold(
                BTreeSet::new(),
                |mut acc, r| {
                    let (s, b) = r?;
                    if b {
                        acc.insert(s);
                    }
                    Ok(acc)
                },
            )
        }
        Formula::Mu(x, body) | Formula::Nu(x, body) => {
            // Unfolded formulas may shadow binder names, so the previous
            // binding is restored afterwards rather than dropped.
            let mut cur = if matches!(f, Formula::Mu(..)) { BTreeSet::new() } else { full() };
            let saved = env.get(x).cloned();
            let result = loop {
                env.insert(x.clone(), cur.clone());
                let next = eval(m, body, env)?;
                if next == cur {
                    break cur;
                }
                cur = next;
            };
            match saved {
                Some(prev) => env.insert(x.clone(), prev),
                None => env.remove(x),
            };
            Ok(result)
        }
    }
}

/// Evaluates one modal literal's lifting at a single state.
fn lifting(
    m: &Coalgebra,
    state: usize,
    op: &ModalOp,
    sets: &[BTreeSet<usize>],
) -> Result<bool, ModelError> {
    if !m.supports(op.kind()) {
        return Err(ModelError::WrongLogic(op.to_string(), m.domain()));
    }
    match (m, op) {
        (Coalgebra::Kripke { succs, .. }, ModalOp::Dia) => {
            Ok(succs[state].iter().any(|t| sets[0].contains(t)))
        }
        (Coalgebra::Kripke { succs, .. }, ModalOp::Box) => {
            Ok(succs[state].iter().all(|t| sets[0].contains(t)))
        }
        (Coalgebra::Multigraph { weights, .. }, _) => {
            let mass = |inside: bool, set: &BTreeSet<usize>| -> u128 {
                weights[state]
                    .iter()
                    .filter(|(t, _)| set.contains(t) == inside)
                    .map(|&(_, w)| w as u128)
                    .sum()
            };
            match op {
                ModalOp::GDia(k) => Ok(mass(true, &sets[0]) > *k as u128),
                ModalOp::GBox(k) => Ok(mass(false, &sets[0]) <= *k as u128),
                ModalOp::LSum(coeffs, b) => {
                    let sum: u128 = coeffs
                        .iter()
                        .zip(sets)
                        .map(|(&c, set)| c as u128 * mass(true, set))
                        .sum();
                    Ok(sum > *b as u128)
                }
                ModalOp::MSum(coeffs, b) => {
                    let sum: u128 = coeffs
                        .iter()
                        .zip(sets)
                        .map(|(&c, set)| c as u128 * mass(false, set))
                        .sum();
                    Ok(sum <= *b as u128)
                }
                other => Err(ModelError::WrongLogic(other.to_string(), m.domain())),
            }
        }
        (Coalgebra::Markov { rows, .. }, _) => {
            let mass = |inside: bool, set: &BTreeSet<usize>| -> Rat {
                rows[state]
                    .iter()
                    .filter(|(t, _)| set.contains(t) == inside)
                    .map(|(_, p)| p.clone())
                    .sum()
            };
            match op {
                ModalOp::PDia(p) => Ok(mass(true, &sets[0]) > *p),
                ModalOp::PBox(p) => Ok(mass(false, &sets[0]) <= *p),
                ModalOp::PolyL(poly, b) => {
                    let point: Vec<Rat> = sets.iter().map(|set| mass(true, set)).collect();
                    Ok(poly.eval(&point) > *b)
                }
                ModalOp::PolyM(poly, b) => {
                    let point: Vec<Rat> = sets.iter().map(|set| mass(false, set)).collect();
                    Ok(poly.eval(&point) <= *b)
                }
                other => Err(ModelError::WrongLogic(other.to_string(), m.domain())),
            }
        }
        (_, other) => Err(ModelError::WrongLogic(other.to_string(), m.domain())),
    }
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    logic: String,
    root: usize,
    states: Vec<StateJson>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    id: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    atoms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    successors: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<WeightJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dist: Option<Vec<ProbJson>>,
}

#[derive(Serialize, Deserialize)]
struct WeightJson {
    to: usize,
    weight: u64,
}

#[derive(Serialize, Deserialize)]
struct ProbJson {
    to: usize,
    /// Exact rational as `p/q`, kept as a string to avoid float loss.
    prob: String,
}

impl Coalgebra {
    pub fn to_json(&self) -> String {
        let states: Vec<StateJson> = (0..self.len())
            .map(|s| {
                let atoms = self.atoms(s).iter().cloned().collect();
                match self {
                    Coalgebra::Kripke { succs, .. } => StateJson {
                        id: s,
                        atoms,
                        successors: Some(succs[s].clone()),
                        weights: None,
                        dist: None,
                    },
                    Coalgebra::Multigraph { weights, .. } => StateJson {
                        id: s,
                        atoms,
                        successors: None,
                        weights: Some(
                            weights[s].iter().map(|&(to, weight)| WeightJson { to, weight }).collect(),
                        ),
                        dist: None,
                    },
                    Coalgebra::Markov { rows, .. } => StateJson {
                        id: s,
                        atoms,
                        successors: None,
                        weights: None,
                        dist: Some(
                            rows[s]
                                .iter()
                                .map(|(to, p)| ProbJson { to: *to, prob: rat_str(p) })
                                .collect(),
                        ),
                    },
                }
            })
            .collect();
        let doc = ModelJson {
            logic: match self {
                Coalgebra::Kripke { .. } => "kripke".into(),
                Coalgebra::Multigraph { .. } => "graded".into(),
                Coalgebra::Markov { .. } => "probabilistic".into(),
            },
            root: self.root(),
            states,
        };
        serde_json::to_string_pretty(&doc).expect("model serialization")
    }

    pub fn from_json(text: &str) -> Result<Coalgebra, ModelError> {
        let doc: ModelJson =
            serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))?;
        let n = doc.states.len();
        if doc.root >= n {
            return Err(ModelError::Malformed("root out of range".into()));
        }
        let mut sorted = doc.states;
        sorted.sort_by_key(|s| s.id);
        if sorted.iter().enumerate().any(|(i, s)| s.id != i) {
            return Err(ModelError::Malformed("state ids must be 0..n-1".into()));
        }
        let atoms: Vec<BTreeSet<String>> =
            sorted.iter().map(|s| s.atoms.iter().cloned().collect()).collect();
        let check = |to: usize| -> Result<usize, ModelError> {
            if to < n {
                Ok(to)
            } else {
                Err(ModelError::Malformed(format!("successor {to} out of range")))
            }
        };
        match LogicKind::parse(&doc.logic) {
            Some(LogicKind::Kripke) => {
                let succs = sorted
                    .iter()
                    .map(|s| {
                        s.successors
                            .clone()
                            .unwrap_or_default()
                            .into_iter()
                            .map(check)
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Coalgebra::Kripke { succs, atoms, root: doc.root })
            }
            Some(LogicKind::Graded) | Some(LogicKind::Presburger) => {
                let weights = sorted
                    .iter()
                    .map(|s| {
                        s.weights
                            .as_deref()
                            .unwrap_or_default()
                            .iter()
                            .map(|w| check(w.to).map(|t| (t, w.weight)))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Coalgebra::Multigraph { weights, atoms, root: doc.root })
            }
            Some(LogicKind::Probabilistic) | Some(LogicKind::PolyProb) => {
                let rows = sorted
                    .iter()
                    .map(|s| {
                        s.dist
                            .as_deref()
                            .unwrap_or_default()
                            .iter()
                            .map(|p| {
                                let prob = parse_rat(&p.prob).ok_or_else(|| {
                                    ModelError::Malformed(format!("bad rational {}", p.prob))
                                })?;
                                check(p.to).map(|t| (t, prob))
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<Vec<_>>, _>>()?;
                for row in &rows {
                    let total: Rat = row.iter().map(|(_, p)| p.clone()).sum();
                    if total != Rat::one() {
                        return Err(ModelError::Malformed(format!(
                            "markov row sums to {} instead of 1",
                            rat_str(&total)
                        )));
                    }
                }
                Ok(Coalgebra::Markov { rows, atoms, root: doc.root })
            }
            None => Err(ModelError::Malformed(format!("unknown logic {}", doc.logic))),
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph model {\n  rankdir=LR;\n");
        for s in 0..self.len() {
            let atoms =
                self.atoms(s).iter().cloned().collect::<Vec<_>>().join(",");
            let shape = if s == self.root() { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  s{} [shape={},label=\"{}:{{{}}}\"];", s, shape, s, atoms);
        }
        match self {
            Coalgebra::Kripke { succs, .. } => {
                for (s, row) in succs.iter().enumerate() {
                    for t in row {
                        let _ = writeln!(out, "  s{} -> s{};", s, t);
                    }
                }
            }
            Coalgebra::Multigraph { weights, .. } => {
                for (s, row) in weights.iter().enumerate() {
                    for (t, w) in row {
                        let _ = writeln!(out, "  s{} -> s{} [label=\"{}\"];", s, t, w);
                    }
                }
            }
            Coalgebra::Markov { rows, .. } => {
                for (s, row) in rows.iter().enumerate() {
                    for (t, p) in row {
                        let _ = writeln!(out, "  s{} -> s{} [label=\"{}\"];", s, t, rat_str(p));
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, unfold};
    use crate::logic::rat;

    fn kripke(succs: Vec<Vec<usize>>, atoms: Vec<Vec<&str>>, root: usize) -> Coalgebra {
        Coalgebra::Kripke {
            succs,
            atoms: atoms
                .into_iter()
                .map(|a| a.into_iter().map(str::to_string).collect())
                .collect(),
            root,
        }
    }

    #[test]
    fn deadlock_satisfies_every_box() {
        let m = kripke(vec![vec![]], vec![vec![]], 0);
        let f = parse("[] (p & ~p)", LogicKind::Kripke).unwrap();
        assert!(holds_at_root(&m, &f).unwrap());
        let g = parse("<> true", LogicKind::Kripke).unwrap();
        assert!(!holds_at_root(&m, &g).unwrap());
    }

    #[test]
    fn fairness_holds_on_a_two_state_cycle() {
        // p holds on state 0 only; the cycle 0 -> 1 -> 0 visits it forever.
        let m = kripke(vec![vec![1], vec![0]], vec![vec!["p"], vec![]], 0);
        let f = parse("nu X. mu Y. ((p & <> X) | <> Y)", LogicKind::Kripke).unwrap();
        let sem = model_check(&m, &f).unwrap();
        assert!(sem.contains(&0));
        assert!(sem.contains(&1));
    }

    #[test]
    fn one_state_markov_chain_thresholds() {
        let m = Coalgebra::Markov {
            rows: vec![vec![(0, rat(1, 1))]],
            atoms: vec![BTreeSet::new()],
            root: 0,
        };
        let f = parse("<1/2> true", LogicKind::Probabilistic).unwrap();
        assert!(holds_at_root(&m, &f).unwrap());
        let g = parse("<1> true", LogicKind::Probabilistic).unwrap();
        assert!(!holds_at_root(&m, &g).unwrap(), "1 > 1 must fail");
    }

    #[test]
    fn unfolding_does_not_change_semantics() {
        let m = kripke(vec![vec![0, 1], vec![1]], vec![vec!["p"], vec![]], 0);
        for src in ["nu X. <> X", "mu X. (p | [] X)", "nu X. mu Y. ((p & <> X) | <> Y)"] {
            let f = parse(src, LogicKind::Kripke).unwrap();
            let u = unfold(&f).unwrap();
            assert_eq!(model_check(&m, &f).unwrap(), model_check(&m, &u).unwrap(), "{}", src);
        }
    }

    #[test]
    fn wrong_logic_operator_is_reported() {
        let m = kripke(vec![vec![]], vec![vec![]], 0);
        let f = parse("<2> true", LogicKind::Graded).unwrap();
        assert!(matches!(model_check(&m, &f), Err(ModelError::WrongLogic(..))));
    }

    #[test]
    fn multigraph_counts_with_weights() {
        let m = Coalgebra::Multigraph {
            weights: vec![vec![(0, 2)]],
            atoms: vec![[String::from("p")].into_iter().collect()],
            root: 0,
        };
        let f = parse("nu X. (p & <1> X)", LogicKind::Graded).unwrap();
        assert!(holds_at_root(&m, &f).unwrap());
        let g = parse("<2> true", LogicKind::Graded).unwrap();
        assert!(!holds_at_root(&m, &g).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let m = Coalgebra::Markov {
            rows: vec![vec![(0, rat(1, 2)), (1, rat(1, 2))], vec![(1, rat(1, 1))]],
            atoms: vec![BTreeSet::new(), [String::from("p")].into_iter().collect()],
            root: 0,
        };
        let text = m.to_json();
        let back = Coalgebra::from_json(&text).unwrap();
        assert_eq!(m, back);
        assert!(text.contains("1/2"), "rationals serialize as p/q strings");
    }

    #[test]
    fn bad_markov_rows_are_rejected() {
        let text = r#"{"logic":"probabilistic","root":0,
            "states":[{"id":0,"dist":[{"to":0,"prob":"1/3"}]}]}"#;
        assert!(matches!(Coalgebra::from_json(text), Err(ModelError::Malformed(_))));
    }
}
