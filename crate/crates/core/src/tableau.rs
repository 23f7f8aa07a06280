//! Global caching engine: expands the determinized-and-complemented tracking
//! automaton node by node and propagates (un)satisfiability through nested
//! fixpoints of the one-step propagation functions.
//!
//! `E` (satisfiable nodes) is the nested fixpoint `eta_l X_l ... eta_1 X_1.
//! f(X)` with least fixpoints at odd priorities; `A` (unsatisfiable nodes)
//! the dual nest over `g`. Unexpanded successors count as absent from every
//! `X` in `f` and as still-possible in `g`, so both sets only ever grow as
//! expansion proceeds and early verdicts are final.
//!
//! When the root lands in `E`, a recording pass re-runs the nest and stores,
//! for every node at its first admission, the branch choice or the one-step
//! witness plus successor assignment that admitted it. Records made under a
//! not-yet-converged greatest-fixpoint iterate are rolled back when that
//! iterate shrinks, so surviving records were taken with every greatest
//! fixpoint at its stable value and reference only earlier-admitted nodes at
//! least-fixpoint levels. Model extraction consumes exactly this data.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::formula::{Closure, Formula, FormulaId};
use crate::logic::{LogicKind, ModalOp};
use crate::omega::{complement, determinize, parity_to_buchi, Dpa, DpaStateId};
use crate::onestep::{
    solve, OneStepInstance, OneStepOutcome, OneStepWitness, OsLiteral, SolveConfig,
};
use crate::tracking::{Letter, NodeLetters, TrackingNpa};

pub type NodeId = u32;
type LabelId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// Label consists exclusively of modal literals (atoms and the constants
    /// count as nullary modal literals).
    State,
    /// Some non-modal formula remains to be decomposed.
    Prestate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpansionOrder {
    Fifo,
    Dfs,
    PrestateFirst,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kind: LogicKind,
    /// Propagate every this many expansions; 0 disables intermediate
    /// propagation entirely.
    pub propagation_interval: usize,
    pub order: ExpansionOrder,
    pub node_cap: usize,
    pub time_cap: Option<Duration>,
    pub solve: SolveConfig,
    /// Keep per-pass decided-set snapshots (for tests and diagnostics).
    pub record_passes: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kind: LogicKind::Kripke,
            propagation_interval: 16,
            order: ExpansionOrder::Fifo,
            node_cap: 100_000,
            time_cap: None,
            solve: SolveConfig::default(),
            record_passes: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("node cap of {0} exceeded")]
    NodeCap(usize),
    #[error("time cap exceeded")]
    TimeCap,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

#[derive(Debug, Clone)]
struct TableauNode {
    dpa: DpaStateId,
    label: BTreeSet<FormulaId>,
    label_id: LabelId,
    kind: NodeKind,
    /// The fixed non-modal formula of a pre-state.
    psi: Option<FormulaId>,
    expanded: bool,
    /// Letter, successor, transition priority in the complemented automaton.
    succs: Vec<(Letter, NodeId, u32)>,
}

/// Per-propagation snapshot of the decided sets.
#[derive(Debug, Clone)]
pub struct PassLog {
    pub expansions: usize,
    pub sat: Vec<NodeId>,
    pub unsat: Vec<NodeId>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunStats {
    pub logic: String,
    pub formula: String,
    pub formula_size: usize,
    pub closure_size: usize,
    pub alternation_depth: u32,
    pub nodes_expanded: usize,
    pub states_expanded: usize,
    pub prestates_expanded: usize,
    pub dpa_states: usize,
    pub propagation_passes: usize,
    pub onestep_calls: usize,
    pub onestep_cache_hits: usize,
    pub max_onestep_literals: usize,
    pub max_onestep_successors: usize,
    pub poly_depth_warnings: usize,
    pub priorities_in_use: usize,
    pub wall_ms: u128,
    pub verdict: Option<String>,
}

/// How a node earned its place in `E`: the admitted branch of a pre-state, or
/// a state's one-step witness with one successor per instance entry.
#[derive(Debug, Clone)]
pub enum NodeStrategy {
    Branch { letter: Letter, succ: NodeId },
    State { parts: Vec<StrategyPart>, witness: OneStepWitness },
}

/// One entry of a state's one-step instance: the selection letter and the
/// successor node contributing this label, aligned with the witness index.
#[derive(Debug, Clone)]
pub struct StrategyPart {
    pub letter: Letter,
    pub succ: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Exists,
    Forall,
}

/// Stack of strategy records with rollback on greatest-fixpoint retraction.
struct Recorder {
    stack: Vec<NodeId>,
    strategy: HashMap<NodeId, NodeStrategy>,
}

impl Recorder {
    fn new() -> Recorder {
        Recorder { stack: Vec::new(), strategy: HashMap::new() }
    }
    fn mark(&self) -> usize {
        self.stack.len()
    }
    fn truncate(&mut self, mark: usize) {
        while self.stack.len() > mark {
            let id = self.stack.pop().unwrap();
            self.strategy.remove(&id);
        }
    }
    fn push(&mut self, id: NodeId, s: NodeStrategy) {
        if !self.strategy.contains_key(&id) {
            self.stack.push(id);
            self.strategy.insert(id, s);
        }
    }
}

pub struct Tableau {
    npa: TrackingNpa,
    dpa: Dpa,
    kind: LogicKind,
    cfg: RunConfig,
    nodes: Vec<TableauNode>,
    by_dpa: HashMap<DpaStateId, NodeId>,
    labels: Vec<BTreeSet<FormulaId>>,
    label_index: HashMap<BTreeSet<FormulaId>, LabelId>,
    root: NodeId,
    queue: VecDeque<NodeId>,
    onestep_cache: HashMap<(NodeId, Vec<LabelId>), OneStepOutcome>,
    pub stats: RunStats,
    passes: Vec<PassLog>,
    started: Instant,
}

impl Tableau {
    /// Builds the engine for a prepared (closed, clean, guarded) formula.
    pub fn new(formula: &Formula, cfg: RunConfig) -> Tableau {
        let closure = Closure::build(formula);
        let npa = TrackingNpa::build(closure);
        let dpa = complement(determinize(parity_to_buchi(npa.clone())));
        let stats = RunStats {
            logic: cfg.kind.name().to_string(),
            formula: formula.to_string(),
            formula_size: npa.closure.n,
            closure_size: npa.closure.len(),
            alternation_depth: npa.closure.k,
            ..RunStats::default()
        };
        let mut t = Tableau {
            kind: cfg.kind,
            cfg,
            npa,
            dpa,
            nodes: Vec::new(),
            by_dpa: HashMap::new(),
            labels: Vec::new(),
            label_index: HashMap::new(),
            root: 0,
            queue: VecDeque::new(),
            onestep_cache: HashMap::new(),
            stats,
            passes: Vec::new(),
            started: Instant::now(),
        };
        let init = t.dpa.initial();
        t.root = t.get_or_create(init);
        t
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_kind(&self, id: NodeId) -> NodeKind {
        self.nodes[id as usize].kind
    }

    pub fn node_label(&self, id: NodeId) -> &BTreeSet<FormulaId> {
        &self.nodes[id as usize].label
    }

    pub fn node_succs(&self, id: NodeId) -> &[(Letter, NodeId, u32)] {
        &self.nodes[id as usize].succs
    }

    pub fn node_expanded(&self, id: NodeId) -> bool {
        self.nodes[id as usize].expanded
    }

    pub fn node_psi(&self, id: NodeId) -> Option<FormulaId> {
        self.nodes[id as usize].psi
    }

    pub fn closure(&self) -> &Closure {
        &self.npa.closure
    }

    pub fn npa(&self) -> &TrackingNpa {
        &self.npa
    }

    pub fn dpa_states(&self) -> usize {
        self.dpa.num_states()
    }

    pub fn dpa(&self) -> &Dpa {
        &self.dpa
    }

    pub fn logic_kind(&self) -> LogicKind {
        self.kind
    }

    pub fn passes(&self) -> &[PassLog] {
        &self.passes
    }

    /// Runs the global caching loop: expand, optionally propagate every
    /// `propagation_interval` expansions with early termination on a decided
    /// root, then decide by final propagation.
    pub fn run(&mut self) -> Result<Verdict, RunError> {
        self.started = Instant::now();
        let interval = self.cfg.propagation_interval;
        let mut since_propagation = 0usize;
        while let Some(u) = self.pop_unexpanded() {
            self.check_caps()?;
            self.expand(u)?;
            since_propagation += 1;
            if interval > 0 && since_propagation >= interval && !self.queue.is_empty() {
                since_propagation = 0;
                let (sat, unsat) = self.propagate();
                if sat[self.root as usize] {
                    return Ok(self.finish(Verdict::Sat));
                }
                if unsat[self.root as usize] {
                    return Ok(self.finish(Verdict::Unsat));
                }
            }
        }
        let (sat, unsat) = self.propagate();
        let verdict = if sat[self.root as usize] {
            Verdict::Sat
        } else {
            debug_assert!(
                unsat[self.root as usize],
                "fully expanded graph leaves the root undecided"
            );
            Verdict::Unsat
        };
        Ok(self.finish(verdict))
    }

    fn finish(&mut self, v: Verdict) -> Verdict {
        self.stats.wall_ms = self.started.elapsed().as_millis();
        self.stats.dpa_states = self.dpa.num_states();
        self.stats.verdict = Some(match v {
            Verdict::Sat => "sat".to_string(),
            Verdict::Unsat => "unsat".to_string(),
        });
        v
    }

    /// One propagation pass: computes `E` and `A` over the expanded graph.
    pub fn propagate(&mut self) -> (Vec<bool>, Vec<bool>) {
        self.stats.propagation_passes += 1;
        let levels = self.occurring_priorities();
        self.stats.priorities_in_use = levels.len();
        let sat = self.propagate_set(Mode::Exists, &levels, &mut None);
        let unsat = self.propagate_set(Mode::Forall, &levels, &mut None);
        if self.cfg.record_passes {
            let log = PassLog {
                expansions: self.stats.nodes_expanded,
                sat: ids_of(&sat),
                unsat: ids_of(&unsat),
            };
            self.passes.push(log);
        }
        (sat, unsat)
    }

    /// Re-runs the satisfiability nest with strategy recording; call after a
    /// SAT verdict. Returns the per-node admission data.
    pub fn record_strategy(&mut self) -> Result<HashMap<NodeId, NodeStrategy>, RunError> {
        let levels = self.occurring_priorities();
        let mut rec = Some(Recorder::new());
        let sat = self.propagate_set(Mode::Exists, &levels, &mut rec);
        let recorder = rec.unwrap();
        if !sat[self.root as usize] || !recorder.strategy.contains_key(&self.root) {
            return Err(RunError::Internal("strategy missing for the root".to_string()));
        }
        Ok(recorder.strategy)
    }

    /// Direct evaluation of the one-step propagation function `f` on a tuple
    /// of per-priority sets (for property checks).
    pub fn eval_f(&mut self, levels: &[u32], x: &[Vec<bool>]) -> Vec<bool> {
        self.apply(Mode::Exists, levels, x, &mut None)
    }

    /// Dual evaluation `g`.
    pub fn eval_g(&mut self, levels: &[u32], x: &[Vec<bool>]) -> Vec<bool> {
        self.apply(Mode::Forall, levels, x, &mut None)
    }

    /// The distinct transition priorities among edges joining expanded nodes;
    /// the propagation nest quantifies only over these.
    pub fn occurring_priorities(&self) -> Vec<u32> {
        let mut set = BTreeSet::new();
        for node in &self.nodes {
            if !node.expanded {
                continue;
            }
            for &(_, succ, prio) in &node.succs {
                if self.nodes[succ as usize].expanded {
                    set.insert(prio);
                }
            }
        }
        set.into_iter().collect()
    }

    fn label_intern(&mut self, label: &BTreeSet<FormulaId>) -> LabelId {
        if let Some(&id) = self.label_index.get(label) {
            return id;
        }
        let id = self.labels.len() as LabelId;
        self.labels.push(label.clone());
        self.label_index.insert(label.clone(), id);
        id
    }

    fn get_or_create(&mut self, dpa_state: DpaStateId) -> NodeId {
        if let Some(&id) = self.by_dpa.get(&dpa_state) {
            return id;
        }
        let label = self.dpa.label(dpa_state);
        let label_id = self.label_intern(&label);
        let psi = self.npa.psi_v(&label);
        let kind = if psi.is_none() { NodeKind::State } else { NodeKind::Prestate };
        let id = self.nodes.len() as NodeId;
        self.nodes.push(TableauNode {
            dpa: dpa_state,
            label,
            label_id,
            kind,
            psi,
            expanded: false,
            succs: Vec::new(),
        });
        self.by_dpa.insert(dpa_state, id);
        self.queue.push_back(id);
        id
    }

    fn pop_unexpanded(&mut self) -> Option<NodeId> {
        match self.cfg.order {
            ExpansionOrder::Fifo => self.queue.pop_front(),
            ExpansionOrder::Dfs => self.queue.pop_back(),
            ExpansionOrder::PrestateFirst => {
                match self
                    .queue
                    .iter()
                    .position(|&id| self.nodes[id as usize].kind == NodeKind::Prestate)
                {
                    Some(pos) => self.queue.remove(pos),
                    None => self.queue.pop_front(),
                }
            }
        }
    }

    fn check_caps(&self) -> Result<(), RunError> {
        if self.nodes.len() > self.cfg.node_cap {
            return Err(RunError::NodeCap(self.cfg.node_cap));
        }
        if let Some(cap) = self.cfg.time_cap {
            if self.started.elapsed() > cap {
                return Err(RunError::TimeCap);
            }
        }
        Ok(())
    }

    fn expand(&mut self, id: NodeId) -> Result<(), RunError> {
        let label = self.nodes[id as usize].label.clone();
        let dpa_state = self.nodes[id as usize].dpa;
        let mut added = Vec::new();
        match self.npa.letters_for(&label) {
            NodeLetters::Decompose(letters) => {
                for letter in letters {
                    let (succ_dpa, prio) = self.dpa.step(dpa_state, &letter);
                    let succ = self.get_or_create(succ_dpa);
                    added.push((letter, succ, prio));
                }
            }
            NodeLetters::Selections(base) => {
                if base.len() >= 24 {
                    return Err(RunError::NodeCap(self.cfg.node_cap));
                }
                for mask in 0u64..(1 << base.len()) {
                    self.check_caps()?;
                    let letter = Letter::select(
                        base.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &p)| p),
                    );
                    let (succ_dpa, prio) = self.dpa.step(dpa_state, &letter);
                    let succ = self.get_or_create(succ_dpa);
                    added.push((letter, succ, prio));
                }
            }
        }
        let node = &mut self.nodes[id as usize];
        node.succs = added;
        node.expanded = true;
        self.stats.nodes_expanded += 1;
        match node.kind {
            NodeKind::State => self.stats.states_expanded += 1,
            NodeKind::Prestate => self.stats.prestates_expanded += 1,
        }
        Ok(())
    }

    fn literal_of(&self, fid: FormulaId) -> OsLiteral {
        let closure = &self.npa.closure;
        match closure.get(fid) {
            Formula::Top => OsLiteral::True,
            Formula::Bot => OsLiteral::False,
            Formula::Atom(a, pol) => OsLiteral::Atom(a.clone(), *pol),
            Formula::Modal(op, _) => {
                let args: Vec<usize> =
                    closure.children(fid).into_iter().map(|c| c as usize).collect();
                match op {
                    ModalOp::Dia => OsLiteral::Dia(args[0]),
                    ModalOp::Box => OsLiteral::Box(args[0]),
                    ModalOp::GDia(k) => OsLiteral::GDia(*k, args[0]),
                    ModalOp::GBox(k) => OsLiteral::GBox(*k, args[0]),
                    ModalOp::PDia(p) => OsLiteral::PDia(p.clone(), args[0]),
                    ModalOp::PBox(p) => OsLiteral::PBox(p.clone(), args[0]),
                    ModalOp::LSum(coeffs, b) => {
                        OsLiteral::LSum(coeffs.iter().copied().zip(args).collect(), *b)
                    }
                    ModalOp::MSum(coeffs, b) => {
                        OsLiteral::MSum(coeffs.iter().copied().zip(args).collect(), *b)
                    }
                    ModalOp::PolyL(p, b) => OsLiteral::PolyL(p.clone(), b.clone(), args),
                    ModalOp::PolyM(p, b) => OsLiteral::PolyM(p.clone(), b.clone(), args),
                }
            }
            other => unreachable!("state label holds non-literal {other}"),
        }
    }

    /// Cached one-step satisfiability of a state label against a sorted,
    /// deduplicated set of successor labels.
    fn onestep(&mut self, state: NodeId, u_ids: Vec<LabelId>) -> OneStepOutcome {
        debug_assert!(u_ids.windows(2).all(|w| w[0] < w[1]));
        if let Some(out) = self.onestep_cache.get(&(state, u_ids.clone())) {
            self.stats.onestep_cache_hits += 1;
            return out.clone();
        }
        let label = &self.nodes[state as usize].label;
        let literals: Vec<OsLiteral> = label.iter().map(|&fid| self.literal_of(fid)).collect();
        let successors: Vec<BTreeSet<usize>> = u_ids
            .iter()
            .map(|&lid| self.labels[lid as usize].iter().map(|&f| f as usize).collect())
            .collect();
        let inst = OneStepInstance { literals, successors };
        self.stats.onestep_calls += 1;
        self.stats.max_onestep_literals = self.stats.max_onestep_literals.max(inst.literals.len());
        self.stats.max_onestep_successors =
            self.stats.max_onestep_successors.max(inst.successors.len());
        let out = solve(self.kind, &inst, &self.cfg.solve)
            .unwrap_or_else(|e| panic!("one-step instance construction broken: {e}"));
        if matches!(out, OneStepOutcome::Unsat { depth_limited: true }) {
            self.stats.poly_depth_warnings += 1;
        }
        self.onestep_cache.insert((state, u_ids), out.clone());
        out
    }

    /// The one-step instance entries a state sees under the given sets: one
    /// entry per distinct successor label, keyed by label id, with the first
    /// qualifying edge as representative.
    fn state_entries(
        &self,
        id: usize,
        mode: Mode,
        levels: &[u32],
        x: &[Vec<bool>],
    ) -> BTreeMap<LabelId, (Letter, NodeId)> {
        let level_of = |prio: u32| levels.iter().position(|&p| p == prio);
        let mut entries: BTreeMap<LabelId, (Letter, NodeId)> = BTreeMap::new();
        for (letter, succ, prio) in &self.nodes[id].succs {
            let s = *succ as usize;
            let include = match mode {
                // f: only successors currently admitted at their priority.
                Mode::Exists => {
                    self.nodes[s].expanded && level_of(*prio).is_some_and(|li| x[li][s])
                }
                // g: unexpanded or not-yet-refuted successors still count.
                Mode::Forall => {
                    !self.nodes[s].expanded || !level_of(*prio).is_some_and(|li| x[li][s])
                }
            };
            if include {
                entries.entry(self.nodes[s].label_id).or_insert_with(|| (letter.clone(), *succ));
            }
        }
        entries
    }

    /// One evaluation of `f` (`Exists`) or `g` (`Forall`) on per-priority
    /// sets, recording admission witnesses when a recorder is present.
    fn apply(
        &mut self,
        mode: Mode,
        levels: &[u32],
        x: &[Vec<bool>],
        rec: &mut Option<Recorder>,
    ) -> Vec<bool> {
        let n = self.nodes.len();
        let level_of = |prio: u32| levels.iter().position(|&p| p == prio);
        let mut out = vec![false; n];
        for id in 0..n {
            if !self.nodes[id].expanded {
                continue;
            }
            let admitted = match self.nodes[id].kind {
                NodeKind::Prestate => match mode {
                    Mode::Exists => self.nodes[id].succs.iter().any(|&(_, succ, prio)| {
                        level_of(prio).is_some_and(|li| x[li][succ as usize])
                    }),
                    Mode::Forall => self.nodes[id].succs.iter().all(|&(_, succ, prio)| {
                        self.nodes[succ as usize].expanded
                            && level_of(prio).is_some_and(|li| x[li][succ as usize])
                    }),
                },
                NodeKind::State => {
                    let entries = self.state_entries(id, mode, levels, x);
                    let u_ids: Vec<LabelId> = entries.keys().copied().collect();
                    let sat = self.onestep(id as NodeId, u_ids).is_sat();
                    match mode {
                        Mode::Exists => sat,
                        Mode::Forall => !sat,
                    }
                }
            };
            out[id] = admitted;
            if admitted {
                if let Some(r) = rec.as_mut() {
                    if !r.strategy.contains_key(&(id as NodeId)) {
                        let strategy = self.admission_witness(id, levels, x);
                        r.push(id as NodeId, strategy);
                    }
                }
            }
        }
        out
    }

    /// The datum that admitted a node into `f`: for pre-states the first
    /// qualifying branch (`b = 0` preferred on ties), for states the one-step
    /// witness over the current instance with its successor assignment.
    fn admission_witness(&mut self, id: usize, levels: &[u32], x: &[Vec<bool>]) -> NodeStrategy {
        let level_of = |prio: u32| levels.iter().position(|&p| p == prio);
        match self.nodes[id].kind {
            NodeKind::Prestate => {
                let (letter, succ, _) = self.nodes[id]
                    .succs
                    .iter()
                    .find(|&&(_, succ, prio)| level_of(prio).is_some_and(|li| x[li][succ as usize]))
                    .cloned()
                    .expect("admitted pre-state has a qualifying branch");
                NodeStrategy::Branch { letter, succ }
            }
            NodeKind::State => {
                let entries = self.state_entries(id, Mode::Exists, levels, x);
                let u_ids: Vec<LabelId> = entries.keys().copied().collect();
                let parts: Vec<StrategyPart> = entries
                    .into_values()
                    .map(|(letter, succ)| StrategyPart { letter, succ })
                    .collect();
                match self.onestep(id as NodeId, u_ids) {
                    OneStepOutcome::Sat(witness) => NodeStrategy::State { parts, witness },
                    OneStepOutcome::Unsat { .. } => {
                        unreachable!("admitted state has a satisfiable instance")
                    }
                }
            }
        }
    }

    /// Nested fixpoint over the occurring priorities, with warm restarts:
    /// an inner variable is reinitialized only when an enclosing variable of
    /// the opposite kind moved.
    fn propagate_set(
        &mut self,
        mode: Mode,
        levels: &[u32],
        rec: &mut Option<Recorder>,
    ) -> Vec<bool> {
        let n = self.nodes.len();
        if levels.is_empty() {
            // No cycles are possible; a single evaluation is already stable.
            return self.apply(mode, levels, &[], rec);
        }
        let is_mu: Vec<bool> =
            levels.iter().map(|&p| (p % 2 == 1) == (mode == Mode::Exists)).collect();
        let mut values: Vec<Vec<bool>> =
            is_mu.iter().map(|&mu| self.init_level(mu, n)).collect();
        let mut needs_reset = vec![false; levels.len()];
        self.nest(mode, levels, &is_mu, &mut values, &mut needs_reset, levels.len() - 1, rec)
    }

    fn init_level(&self, mu: bool, n: usize) -> Vec<bool> {
        if mu {
            vec![false; n]
        } else {
            (0..n).map(|i| self.nodes[i].expanded).collect()
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn nest(
        &mut self,
        mode: Mode,
        levels: &[u32],
        is_mu: &[bool],
        values: &mut Vec<Vec<bool>>,
        needs_reset: &mut Vec<bool>,
        li: usize,
        rec: &mut Option<Recorder>,
    ) -> Vec<bool> {
        let n = self.nodes.len();
        if needs_reset[li] {
            values[li] = self.init_level(is_mu[li], n);
            needs_reset[li] = false;
        }
        loop {
            let mark = rec.as_ref().map(|r| r.mark());
            let inner = if li == 0 {
                self.apply(mode, levels, values, rec)
            } else {
                self.nest(mode, levels, is_mu, values, needs_reset, li - 1, rec)
            };
            if inner == values[li] {
                return inner;
            }
            if !is_mu[li] {
                // This greatest-fixpoint iterate was still too generous;
                // records taken under it do not stand.
                if let (Some(r), Some(m)) = (rec.as_mut(), mark) {
                    r.truncate(m);
                }
            }
            values[li] = inner;
            for j in 0..li {
                if is_mu[j] != is_mu[li] {
                    needs_reset[j] = true;
                }
            }
        }
    }
}

fn ids_of(bits: &[bool]) -> Vec<NodeId> {
    bits.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as NodeId)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn run_formula(src: &str, kind: LogicKind) -> (Verdict, Tableau) {
        let f = parse(src, kind).unwrap();
        let mut cfg = RunConfig { kind, ..RunConfig::default() };
        cfg.record_passes = true;
        let mut t = Tableau::new(&f, cfg);
        let v = t.run().unwrap();
        (v, t)
    }

    #[test]
    fn nu_diamond_is_sat() {
        let (v, _) = run_formula("nu X. <> X", LogicKind::Kripke);
        assert_eq!(v, Verdict::Sat);
    }

    #[test]
    fn mu_diamond_is_unsat() {
        let (v, _) = run_formula("mu X. <> X", LogicKind::Kripke);
        assert_eq!(v, Verdict::Unsat);
    }

    #[test]
    fn mu_box_is_sat_by_deadlock() {
        let (v, _) = run_formula("mu X. [] X", LogicKind::Kripke);
        assert_eq!(v, Verdict::Sat);
    }

    #[test]
    fn fairness_formula_is_sat() {
        let (v, _) = run_formula("nu X. mu Y. ((p & <> X) | <> Y)", LogicKind::Kripke);
        assert_eq!(v, Verdict::Sat);
    }

    #[test]
    fn graded_contradiction_is_unsat() {
        let (v, _) = run_formula("<5> true & [3] false", LogicKind::Graded);
        assert_eq!(v, Verdict::Unsat);
    }

    #[test]
    fn graded_infinite_tree_is_sat() {
        let (v, _) = run_formula("nu X. (p & <1> X)", LogicKind::Graded);
        assert_eq!(v, Verdict::Sat);
    }

    #[test]
    fn probabilistic_split_is_unsat() {
        let (v, _) = run_formula("<1/2> p & <1/2> ~p", LogicKind::Probabilistic);
        assert_eq!(v, Verdict::Unsat);
    }

    #[test]
    fn decided_sets_are_disjoint_and_monotone() {
        let f = parse("nu X. mu Y. ((p & <> X) | <> Y)", LogicKind::Kripke).unwrap();
        let cfg = RunConfig {
            kind: LogicKind::Kripke,
            propagation_interval: 1,
            record_passes: true,
            ..RunConfig::default()
        };
        let mut t = Tableau::new(&f, cfg);
        let _ = t.run().unwrap();
        let passes = t.passes();
        assert!(!passes.is_empty());
        for w in passes.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            assert!(a.sat.iter().all(|id| b.sat.contains(id)), "E shrank between passes");
            assert!(a.unsat.iter().all(|id| b.unsat.contains(id)), "A shrank between passes");
        }
        for p in passes {
            assert!(p.sat.iter().all(|id| !p.unsat.contains(id)), "E and A intersect");
        }
    }

    #[test]
    fn strategy_recording_covers_the_root() {
        let (v, mut t) = run_formula("nu X. <> X", LogicKind::Kripke);
        assert_eq!(v, Verdict::Sat);
        let strat = t.record_strategy().unwrap();
        assert!(strat.contains_key(&t.root()));
    }

    #[test]
    fn bottom_literal_states_land_in_a() {
        let (v, _) = run_formula("p & ~p", LogicKind::Kripke);
        assert_eq!(v, Verdict::Unsat);
        let (v, _) = run_formula("false", LogicKind::Kripke);
        assert_eq!(v, Verdict::Unsat);
        let (v, _) = run_formula("true", LogicKind::Kripke);
        assert_eq!(v, Verdict::Sat);
    }
}
