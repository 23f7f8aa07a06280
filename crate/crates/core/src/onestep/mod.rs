//! The one-step satisfiability problem and its per-logic solvers.
//!
//! An instance is a set `v` of modal literals over abstract argument
//! variables plus a set `U` of subsets of those variables; the question is
//! whether some structured collection over `U` (a subset, a multiset, or a
//! distribution) satisfies every literal's predicate lifting. Solvers return
//! a concrete witness, which model extraction later re-indexes into coalgebra
//! transitions.
//!
//! Arguments are referenced by index, so the aliasing proviso (distinct
//! literals carry distinct argument variables) holds by construction.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::logic::{LogicKind, Poly, Rat};

mod linear;
mod oracle;
mod poly;

pub use oracle::{grid_search, oracle, OracleError};

/// A modal literal over argument variables (indices into the instance's
/// variable space). `True`/`False`/`Atom` are the nullary literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OsLiteral {
    True,
    False,
    Atom(String, bool),
    Dia(usize),
    Box(usize),
    GDia(u64, usize),
    GBox(u64, usize),
    PDia(Rat, usize),
    PBox(Rat, usize),
    LSum(Vec<(u64, usize)>, u64),
    MSum(Vec<(u64, usize)>, u64),
    PolyL(Poly, Rat, Vec<usize>),
    PolyM(Poly, Rat, Vec<usize>),
}

impl OsLiteral {
    pub fn kind(&self) -> Option<LogicKind> {
        match self {
            OsLiteral::True | OsLiteral::False | OsLiteral::Atom(..) => None,
            OsLiteral::Dia(_) | OsLiteral::Box(_) => Some(LogicKind::Kripke),
            OsLiteral::GDia(..) | OsLiteral::GBox(..) => Some(LogicKind::Graded),
            OsLiteral::PDia(..) | OsLiteral::PBox(..) => Some(LogicKind::Probabilistic),
            OsLiteral::LSum(..) | OsLiteral::MSum(..) => Some(LogicKind::Presburger),
            OsLiteral::PolyL(..) | OsLiteral::PolyM(..) => Some(LogicKind::PolyProb),
        }
    }
}

/// One-step instance: literals `v` and successor candidate sets `U`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OneStepInstance {
    pub literals: Vec<OsLiteral>,
    /// Each element of `U` is the set of argument variables it satisfies.
    pub successors: Vec<BTreeSet<usize>>,
}

/// A structured witness over the instance's successor list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OneStepWitness {
    /// Kripke: the chosen successor indices.
    Subset(Vec<usize>),
    /// Graded/Presburger: a weight per successor.
    Multiset(Vec<u64>),
    /// Probabilistic/polynomial: a probability per successor, summing to 1.
    Distribution(Vec<Rat>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OneStepOutcome {
    Sat(OneStepWitness),
    Unsat {
        /// Set when a polynomial search ran out of depth; the instance is
        /// then treated as unsatisfiable but flagged.
        depth_limited: bool,
    },
}

impl OneStepOutcome {
    pub const UNSAT: OneStepOutcome = OneStepOutcome::Unsat { depth_limited: false };

    pub fn is_sat(&self) -> bool {
        matches!(self, OneStepOutcome::Sat(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OneStepError {
    #[error("literal {0:?} does not belong to logic {1}")]
    WrongLogic(String, LogicKind),
    #[error("argument variable {0} out of range")]
    BadVariable(usize),
}

/// Solver knobs; only the polynomial branch-and-bound is configurable.
#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    /// Maximum bisection depth for polynomial instances.
    pub poly_depth: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { poly_depth: 26 }
    }
}

/// Outcome of scanning the nullary literals: either an immediate clash or
/// the list of proper modal literals left to solve.
fn nullary_preflight(inst: &OneStepInstance) -> Result<Option<Vec<&OsLiteral>>, OneStepError> {
    let mut pos: BTreeSet<&str> = BTreeSet::new();
    let mut neg: BTreeSet<&str> = BTreeSet::new();
    let mut modal = Vec::new();
    for lit in &inst.literals {
        match lit {
            OsLiteral::False => return Ok(None),
            OsLiteral::True => {}
            OsLiteral::Atom(a, true) => {
                if neg.contains(a.as_str()) {
                    return Ok(None);
                }
                pos.insert(a);
            }
            OsLiteral::Atom(a, false) => {
                if pos.contains(a.as_str()) {
                    return Ok(None);
                }
                neg.insert(a);
            }
            other => modal.push(other),
        }
    }
    Ok(Some(modal))
}

/// Solves a one-step instance for the given logic, returning a verified
/// witness or UNSAT. `False` in `v` or an atom clash is UNSAT regardless of
/// the rest; `True` literals are ignored.
pub fn solve(
    kind: LogicKind,
    inst: &OneStepInstance,
    cfg: &SolveConfig,
) -> Result<OneStepOutcome, OneStepError> {
    for lit in &inst.literals {
        if let Some(k) = lit.kind() {
            let compatible = k == kind
                || (kind == LogicKind::Presburger && k == LogicKind::Graded)
                || (kind == LogicKind::PolyProb && k == LogicKind::Probabilistic);
            if !compatible {
                return Err(OneStepError::WrongLogic(format!("{:?}", lit), kind));
            }
        }
    }
    let modal = match nullary_preflight(inst)? {
        None => return Ok(OneStepOutcome::UNSAT),
        Some(m) => m,
    };
    let outcome = match kind {
        LogicKind::Kripke => solve_kripke_counted(&modal, &inst.successors).0,
        LogicKind::Graded | LogicKind::Presburger => solve_weighted(&modal, &inst.successors),
        LogicKind::Probabilistic => linear::solve_probabilistic(&modal, &inst.successors),
        LogicKind::PolyProb => poly::solve_polynomial(&modal, &inst.successors, cfg.poly_depth),
    };
    if let OneStepOutcome::Sat(ref w) = outcome {
        debug_assert!(verify(inst, w), "solver produced an unverified witness");
    }
    Ok(outcome)
}

/// Direct evaluation of every literal's lifting on a witness.
pub fn verify(inst: &OneStepInstance, witness: &OneStepWitness) -> bool {
    let modal = match nullary_preflight(inst) {
        Ok(Some(m)) => m,
        _ => return false,
    };
    let us = &inst.successors;
    match witness {
        OneStepWitness::Subset(chosen) => {
            if chosen.iter().any(|&i| i >= us.len()) {
                return false;
            }
            modal.iter().all(|lit| match lit {
                OsLiteral::Dia(a) => chosen.iter().any(|&i| us[i].contains(a)),
                OsLiteral::Box(b) => chosen.iter().all(|&i| us[i].contains(b)),
                _ => false,
            })
        }
        OneStepWitness::Multiset(weights) => {
            if weights.len() != us.len() {
                return false;
            }
            let total = |pred: &dyn Fn(&BTreeSet<usize>) -> bool| -> u128 {
                us.iter()
                    .zip(weights)
                    .filter(|(u, _)| pred(u))
                    .map(|(_, &w)| w as u128)
                    .sum()
            };
            modal.iter().all(|lit| match lit {
                OsLiteral::GDia(k, a) => total(&|u| u.contains(a)) > *k as u128,
                OsLiteral::GBox(k, a) => total(&|u| !u.contains(a)) <= *k as u128,
                OsLiteral::LSum(terms, b) => {
                    let sum: u128 = terms
                        .iter()
                        .map(|(c, a)| *c as u128 * total(&|u| u.contains(a)))
                        .sum();
                    sum > *b as u128
                }
                OsLiteral::MSum(terms, b) => {
                    let sum: u128 = terms
                        .iter()
                        .map(|(c, a)| *c as u128 * total(&|u| !u.contains(a)))
                        .sum();
                    sum <= *b as u128
                }
                _ => false,
            })
        }
        OneStepWitness::Distribution(probs) => {
            if probs.len() != us.len() || us.is_empty() {
                return false;
            }
            if probs.iter().any(|p| p < &Rat::zero()) {
                return false;
            }
            let sum: Rat = probs.iter().cloned().sum();
            if sum != Rat::from_integer(1.into()) {
                return false;
            }
            let mass = |pred: &dyn Fn(&BTreeSet<usize>) -> bool| -> Rat {
                us.iter()
                    .zip(probs)
                    .filter(|(u, _)| pred(u))
                    .map(|(_, p)| p.clone())
                    .sum()
            };
            modal.iter().all(|lit| match lit {
                OsLiteral::PDia(p, a) => mass(&|u| u.contains(a)) > *p,
                OsLiteral::PBox(p, a) => mass(&|u| !u.contains(a)) <= *p,
                OsLiteral::PolyL(poly, b, args) => {
                    let point: Vec<Rat> = args.iter().map(|a| mass(&|u| u.contains(a))).collect();
                    poly.eval(&point) > *b
                }
                OsLiteral::PolyM(poly, b, args) => {
                    let point: Vec<Rat> = args.iter().map(|a| mass(&|u| !u.contains(a))).collect();
                    poly.eval(&point) <= *b
                }
                _ => false,
            })
        }
    }
}

/// Kripke one-step solver with an instrumented step counter; the count stays
/// within `|v| * |U|`.
pub fn solve_kripke_counted(
    modal: &[&OsLiteral],
    us: &[BTreeSet<usize>],
) -> (OneStepOutcome, usize) {
    let mut steps = 0usize;
    let boxes: Vec<usize> = modal
        .iter()
        .filter_map(|l| if let OsLiteral::Box(b) = l { Some(*b) } else { None })
        .collect();
    // A := { u in U | every boxed argument is in u }
    let mut admissible = Vec::new();
    for (i, u) in us.iter().enumerate() {
        let mut ok = true;
        for b in &boxes {
            steps += 1;
            if !u.contains(b) {
                ok = false;
                break;
            }
        }
        if ok {
            admissible.push(i);
        }
    }
    let mut chosen = BTreeSet::new();
    for lit in modal {
        if let OsLiteral::Dia(a) = lit {
            let mut found = None;
            for &i in &admissible {
                steps += 1;
                if us[i].contains(a) {
                    found = Some(i);
                    break;
                }
            }
            match found {
                Some(i) => {
                    chosen.insert(i);
                }
                None => return (OneStepOutcome::UNSAT, steps),
            }
        }
    }
    (OneStepOutcome::Sat(OneStepWitness::Subset(chosen.into_iter().collect())), steps)
}

/// Graded/Presburger solver: integer feasibility by depth-first search with
/// the per-variable cap `B = max lower threshold + 1`. Truncating a variable
/// to `B` keeps every lower-bound constraint satisfiable (a single capped
/// term with coefficient at least 1 already exceeds the bound) and only helps
/// the upper bounds, so the cap preserves feasibility exactly.
fn solve_weighted(modal: &[&OsLiteral], us: &[BTreeSet<usize>]) -> OneStepOutcome {
    // Normalize to linear constraints over per-successor weights.
    // lower: sum > bound, upper: sum <= bound; coefficients are nonnegative.
    struct Lin {
        coeffs: Vec<u128>,
        bound: u128,
        lower: bool,
    }
    let m = us.len();
    let mut cons: Vec<Lin> = Vec::new();
    for lit in modal {
        let (terms, bound, lower): (Vec<(u64, usize)>, u64, bool) = match lit {
            OsLiteral::GDia(k, a) => (vec![(1, *a)], *k, true),
            OsLiteral::GBox(k, a) => (vec![(1, *a)], *k, false),
            OsLiteral::LSum(t, b) => (t.clone(), *b, true),
            OsLiteral::MSum(t, b) => (t.clone(), *b, false),
            _ => continue,
        };
        let mut coeffs = vec![0u128; m];
        for (i, u) in us.iter().enumerate() {
            for (c, a) in &terms {
                // Lower bounds count successors containing the argument,
                // upper bounds those missing it.
                let hit = if lower { u.contains(a) } else { !u.contains(a) };
                if hit {
                    coeffs[i] += *c as u128;
                }
            }
        }
        cons.push(Lin { coeffs, bound: bound as u128, lower });
    }
    let cap: u128 = cons
        .iter()
        .filter(|c| c.lower)
        .map(|c| c.bound)
        .max()
        .map(|b| (b + 1).min(u64::MAX as u128))
        .unwrap_or(1);
    // Static per-variable ceiling: the cap, tightened by every upper bound
    // the variable occurs in (room computed against an empty assignment, so
    // it only ever overestimates the true head-room).
    let percap: Vec<u128> = (0..m)
        .map(|j| {
            let mut c = cap;
            for con in &cons {
                if !con.lower && con.coeffs[j] > 0 {
                    c = c.min(con.bound / con.coeffs[j]);
                }
            }
            c
        })
        .collect();

    struct Search {
        cons: Vec<Lin>,
        percap: Vec<u128>,
        m: usize,
    }
    impl Search {
        // Optimistic completion: remaining variables at their ceilings must
        // still clear every lower bound.
        fn lowers_reachable(&self, partial: &[u128], next: usize) -> bool {
            for (ci, c) in self.cons.iter().enumerate() {
                if !c.lower {
                    continue;
                }
                let mut best = partial[ci];
                for (coeff, pc) in c.coeffs[next..].iter().zip(&self.percap[next..]) {
                    best = best.saturating_add(coeff.saturating_mul(*pc));
                }
                if best <= c.bound {
                    return false;
                }
            }
            true
        }
        // Smallest value first, so the first solution found has minimal
        // support; model extraction then keeps models small. Values below
        // the forced minimum (those under which some lower bound cannot be
        // met even with all later variables at their ceilings) are skipped,
        // which matters for binary-coded thresholds.
        fn dfs(&self, idx: usize, partial: &mut [u128], weights: &mut [u64]) -> bool {
            if !self.lowers_reachable(partial, idx) {
                return false;
            }
            if idx == self.m {
                return true;
            }
            let mut vmax = self.percap[idx];
            for (ci, c) in self.cons.iter().enumerate() {
                if c.lower || c.coeffs[idx] == 0 {
                    continue;
                }
                vmax = vmax.min(c.bound.saturating_sub(partial[ci]) / c.coeffs[idx]);
            }
            let mut vlo: u128 = 0;
            for (ci, c) in self.cons.iter().enumerate() {
                if !c.lower || c.coeffs[idx] == 0 {
                    continue;
                }
                let mut rest = 0u128;
                for (coeff, pc) in c.coeffs[idx + 1..].iter().zip(&self.percap[idx + 1..]) {
                    rest = rest.saturating_add(coeff.saturating_mul(*pc));
                }
                let need = (c.bound + 1).saturating_sub(partial[ci]).saturating_sub(rest);
                vlo = vlo.max(need.div_ceil(c.coeffs[idx]));
            }
            if vlo > vmax {
                return false;
            }
            for v in vlo..=vmax {
                for (ci, c) in self.cons.iter().enumerate() {
                    partial[ci] += c.coeffs[idx] * v;
                }
                weights[idx] = v as u64;
                if self.dfs(idx + 1, partial, weights) {
                    return true;
                }
                for (ci, c) in self.cons.iter().enumerate() {
                    partial[ci] -= c.coeffs[idx] * v;
                }
            }
            false
        }
    }
    let mut weights = vec![0u64; m];
    let mut partial = vec![0u128; cons.len()];
    let search = Search { cons, percap, m };
    if search.dfs(0, &mut partial, &mut weights) {
        OneStepOutcome::Sat(OneStepWitness::Multiset(weights))
    } else {
        OneStepOutcome::UNSAT
    }
}
