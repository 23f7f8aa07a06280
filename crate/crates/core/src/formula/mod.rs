//! Formula AST, normal forms, alternation depth, and the Fischer-Ladner
//! closure.
//!
//! Formulas are kept in the negation-free grammar after parsing: negation is
//! legal in source syntax and compiled away by [`nnf`]. Atoms appear as
//! polarity-carrying literals and are treated as nullary modal operators
//! throughout the solver.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::logic::{LogicKind, ModalOp};

mod parse;
pub use parse::{parse, parse_raw, ParseError};

/// Index of a formula inside a [`Closure`].
pub type FormulaId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Bot,
    Top,
    /// Propositional literal; the flag is the polarity (`false` = negated).
    Atom(String, bool),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Modal(ModalOp, Vec<Formula>),
    Var(String),
    /// Source-level negation; eliminated by [`nnf`].
    Neg(Box<Formula>),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
}

impl Formula {
    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }
    pub fn neg(f: Formula) -> Formula {
        Formula::Neg(Box::new(f))
    }
    pub fn mu(x: &str, f: Formula) -> Formula {
        Formula::Mu(x.to_string(), Box::new(f))
    }
    pub fn nu(x: &str, f: Formula) -> Formula {
        Formula::Nu(x.to_string(), Box::new(f))
    }
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string(), true)
    }
    pub fn dia(f: Formula) -> Formula {
        Formula::Modal(ModalOp::Dia, vec![f])
    }
    pub fn boxx(f: Formula) -> Formula {
        Formula::Modal(ModalOp::Box, vec![f])
    }

    /// Fixpoint formulas are the only unfoldable ones.
    pub fn is_fixpoint(&self) -> bool {
        matches!(self, Formula::Mu(..) | Formula::Nu(..))
    }

    /// Modal literals include the nullary ones: atoms and the constants.
    pub fn is_modal_literal(&self) -> bool {
        matches!(self, Formula::Modal(..) | Formula::Atom(..) | Formula::Top | Formula::Bot)
    }

    /// Representation size: one unit per node, with modal operators counted
    /// by the binary size of their parameters.
    pub fn size(&self) -> usize {
        match self {
            Formula::Bot | Formula::Top | Formula::Atom(..) | Formula::Var(_) => 1,
            Formula::Neg(f) => 1 + f.size(),
            Formula::And(l, r) | Formula::Or(l, r) => 1 + l.size() + r.size(),
            Formula::Modal(op, args) => op.rep_size() + args.iter().map(|a| a.size()).sum::<usize>(),
            Formula::Mu(_, f) | Formula::Nu(_, f) => 1 + f.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Var(x) => {
                    if !bound.iter().any(|b| b == x) {
                        out.insert(x.clone());
                    }
                }
                Formula::And(l, r) | Formula::Or(l, r) => {
                    go(l, bound, out);
                    go(r, bound, out);
                }
                Formula::Modal(_, args) => args.iter().for_each(|a| go(a, bound, out)),
                Formula::Neg(g) => go(g, bound, out),
                Formula::Mu(x, b) | Formula::Nu(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                _ => {}
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// The logic a formula's modal operators belong to, if any.
    pub fn modal_kind(&self) -> Option<LogicKind> {
        match self {
            Formula::Modal(op, _) => Some(op.kind()),
            Formula::And(l, r) | Formula::Or(l, r) => l.modal_kind().or_else(|| r.modal_kind()),
            Formula::Neg(f) | Formula::Mu(_, f) | Formula::Nu(_, f) => f.modal_kind(),
            _ => None,
        }
    }

    /// Collects atom names.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(f: &Formula, out: &mut BTreeSet<String>) {
            match f {
                Formula::Atom(a, _) => {
                    out.insert(a.clone());
                }
                Formula::And(l, r) | Formula::Or(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                Formula::Modal(_, args) => args.iter().for_each(|a| go(a, out)),
                Formula::Neg(f) | Formula::Mu(_, f) | Formula::Nu(_, f) => go(f, out),
                _ => {}
            }
        }
        go(self, &mut out);
        out
    }
}

/// Errors raised by well-formedness checks after parsing.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("fixpoint variable {0} is unguarded (not under a modal operator)")]
    Unguarded(String),
    #[error("fixpoint variable {0} is never used in its binder's body")]
    Irredundant(String),
    #[error("free fixpoint variable {0}")]
    FreeVariable(String),
    #[error("operator {0} does not belong to logic {1}")]
    WrongLogic(String, LogicKind),
}

/// Negation normal form: pushes source-level negation to atoms via De Morgan,
/// operator duals and the mu/nu exchange. The result is negation-free and at
/// most linear in the input size.
pub fn nnf(f: &Formula) -> Formula {
    fn pos(f: &Formula) -> Formula {
        match f {
            Formula::Neg(g) => neg(g),
            Formula::And(l, r) => Formula::and(pos(l), pos(r)),
            Formula::Or(l, r) => Formula::or(pos(l), pos(r)),
            Formula::Modal(op, args) => Formula::Modal(op.clone(), args.iter().map(pos).collect()),
            Formula::Mu(x, b) => Formula::Mu(x.clone(), Box::new(pos(b))),
            Formula::Nu(x, b) => Formula::Nu(x.clone(), Box::new(pos(b))),
            other => other.clone(),
        }
    }
    fn neg(f: &Formula) -> Formula {
        match f {
            Formula::Bot => Formula::Top,
            Formula::Top => Formula::Bot,
            Formula::Atom(a, p) => Formula::Atom(a.clone(), !p),
            Formula::Neg(g) => pos(g),
            Formula::And(l, r) => Formula::or(neg(l), neg(r)),
            Formula::Or(l, r) => Formula::and(neg(l), neg(r)),
            Formula::Modal(op, args) => Formula::Modal(op.dual(), args.iter().map(neg).collect()),
            // Double negation on the variable cancels against the binder flip.
            Formula::Var(x) => Formula::Var(x.clone()),
            Formula::Mu(x, b) => Formula::Nu(x.clone(), Box::new(neg(b))),
            Formula::Nu(x, b) => Formula::Mu(x.clone(), Box::new(neg(b))),
        }
    }
    pos(f)
}

/// Renames bound variables apart so that each variable is bound by exactly
/// one fixpoint operator.
pub fn clean(f: &Formula) -> Formula {
    fn fresh(base: &str, used: &mut BTreeSet<String>) -> String {
        if used.insert(base.to_string()) {
            return base.to_string();
        }
        let mut i = 1;
        loop {
            let cand = format!("{}{}", base, i);
            if used.insert(cand.clone()) {
                return cand;
            }
            i += 1;
        }
    }
    fn go(f: &Formula, env: &mut Vec<(String, String)>, used: &mut BTreeSet<String>) -> Formula {
        match f {
            Formula::Var(x) => {
                let name = env.iter().rev().find(|(o, _)| o == x).map(|(_, n)| n.clone()).unwrap_or_else(|| x.clone());
                Formula::Var(name)
            }
            Formula::And(l, r) => Formula::and(go(l, env, used), go(r, env, used)),
            Formula::Or(l, r) => Formula::or(go(l, env, used), go(r, env, used)),
            Formula::Modal(op, args) => {
                Formula::Modal(op.clone(), args.iter().map(|a| go(a, env, used)).collect())
            }
            Formula::Neg(g) => Formula::neg(go(g, env, used)),
            Formula::Mu(x, b) | Formula::Nu(x, b) => {
                let nx = fresh(x, used);
                env.push((x.clone(), nx.clone()));
                let nb = go(b, env, used);
                env.pop();
                if matches!(f, Formula::Mu(..)) {
                    Formula::Mu(nx, Box::new(nb))
                } else {
                    Formula::Nu(nx, Box::new(nb))
                }
            }
            other => other.clone(),
        }
    }
    go(f, &mut Vec::new(), &mut BTreeSet::new())
}

/// Checks closedness, guardedness and irredundancy of a clean formula.
pub fn validate(f: &Formula) -> Result<(), FormulaError> {
    if let Some(x) = f.free_vars().into_iter().next() {
        return Err(FormulaError::FreeVariable(x));
    }
    // Guardedness: every variable occurrence sits under a modal operator
    // within the body of its binder.
    fn guarded(f: &Formula, exposed: &mut BTreeSet<String>) -> Result<(), FormulaError> {
        match f {
            Formula::Var(x) => {
                if exposed.contains(x) {
                    return Err(FormulaError::Unguarded(x.clone()));
                }
                Ok(())
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                guarded(l, exposed)?;
                guarded(r, exposed)
            }
            Formula::Modal(_, args) => {
                let mut cleared = BTreeSet::new();
                for a in args {
                    guarded(a, &mut cleared)?;
                }
                Ok(())
            }
            Formula::Neg(g) => guarded(g, exposed),
            Formula::Mu(x, b) | Formula::Nu(x, b) => {
                exposed.insert(x.clone());
                let r = guarded(b, exposed);
                exposed.remove(x);
                r
            }
            _ => Ok(()),
        }
    }
    guarded(f, &mut BTreeSet::new())?;
    // Irredundancy: each bound variable is used at least once.
    fn used(f: &Formula) -> Result<(), FormulaError> {
        match f {
            Formula::And(l, r) | Formula::Or(l, r) => {
                used(l)?;
                used(r)
            }
            Formula::Modal(_, args) => args.iter().try_for_each(used),
            Formula::Neg(g) => used(g),
            Formula::Mu(x, b) | Formula::Nu(x, b) => {
                if !b.free_vars().contains(x) {
                    return Err(FormulaError::Irredundant(x.clone()));
                }
                used(b)
            }
            _ => Ok(()),
        }
    }
    used(f)
}

/// Checks that every modal operator belongs to `kind`. The Presburger logic
/// extends the graded one, so plain counting operators are admitted there.
pub fn check_logic(f: &Formula, kind: LogicKind) -> Result<(), FormulaError> {
    match f {
        Formula::Modal(op, args) => {
            let ok = op.kind() == kind
                || (kind == LogicKind::Presburger && op.kind() == LogicKind::Graded);
            if !ok {
                return Err(FormulaError::WrongLogic(op.to_string(), kind));
            }
            args.iter().try_for_each(|a| check_logic(a, kind))
        }
        Formula::And(l, r) | Formula::Or(l, r) => {
            check_logic(l, kind)?;
            check_logic(r, kind)
        }
        Formula::Neg(g) | Formula::Mu(_, g) | Formula::Nu(_, g) => check_logic(g, kind),
        _ => Ok(()),
    }
}

/// Substitutes `repl` for free occurrences of `x`; `repl` must be closed, so
/// capture is impossible, but shadowing binders stop the substitution.
pub fn substitute(f: &Formula, x: &str, repl: &Formula) -> Formula {
    match f {
        Formula::Var(y) if y == x => repl.clone(),
        Formula::And(l, r) => Formula::and(substitute(l, x, repl), substitute(r, x, repl)),
        Formula::Or(l, r) => Formula::or(substitute(l, x, repl), substitute(r, x, repl)),
        Formula::Modal(op, args) => {
            Formula::Modal(op.clone(), args.iter().map(|a| substitute(a, x, repl)).collect())
        }
        Formula::Neg(g) => Formula::neg(substitute(g, x, repl)),
        Formula::Mu(y, b) | Formula::Nu(y, b) if y != x => {
            let nb = Box::new(substitute(b, x, repl));
            if matches!(f, Formula::Mu(..)) {
                Formula::Mu(y.clone(), nb)
            } else {
                Formula::Nu(y.clone(), nb)
            }
        }
        other => other.clone(),
    }
}

/// Single fixpoint unfolding: `eta X. psi  ->  psi[X := eta X. psi]`.
pub fn unfold(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Mu(x, b) | Formula::Nu(x, b) => Some(substitute(b, x, f)),
        _ => None,
    }
}

/// Alternation levels of all fixpoint binders, keyed by variable name.
///
/// Least fixpoints receive even numbers (at least 2), greatest fixpoints odd
/// numbers (at least 1), and a binder's number strictly dominates every
/// dependent inner binder of the opposite kind. Dependency is taken in the
/// Niwinski-Walukiewicz sense: an inner binder depends on an outer one when
/// the outer variable occurs free in the inner fixpoint subformula.
pub fn binder_levels(f: &Formula) -> HashMap<String, u32> {
    struct Binder {
        is_mu: bool,
        level: u32,
        free: BTreeSet<String>,
    }
    fn walk(f: &Formula, levels: &mut HashMap<String, u32>) -> (BTreeSet<String>, Vec<Binder>) {
        match f {
            Formula::Var(x) => {
                let mut s = BTreeSet::new();
                s.insert(x.clone());
                (s, Vec::new())
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                let (mut fv, mut bs) = walk(l, levels);
                let (fv2, bs2) = walk(r, levels);
                fv.extend(fv2);
                bs.extend(bs2);
                (fv, bs)
            }
            Formula::Modal(_, args) => {
                let mut fv = BTreeSet::new();
                let mut bs = Vec::new();
                for a in args {
                    let (f2, b2) = walk(a, levels);
                    fv.extend(f2);
                    bs.extend(b2);
                }
                (fv, bs)
            }
            Formula::Neg(g) => walk(g, levels),
            Formula::Mu(x, b) | Formula::Nu(x, b) => {
                let is_mu = matches!(f, Formula::Mu(..));
                let (mut fv, mut inner) = walk(b, levels);
                let mut level = if is_mu { 2 } else { 1 };
                for bi in &inner {
                    if bi.free.contains(x) {
                        let need = if bi.is_mu == is_mu { bi.level } else { bi.level + 1 };
                        level = level.max(need);
                    }
                }
                fv.remove(x);
                levels.insert(x.clone(), level);
                inner.push(Binder { is_mu, level, free: fv.clone() });
                (fv, inner)
            }
            _ => (BTreeSet::new(), Vec::new()),
        }
    }
    let mut levels = HashMap::new();
    walk(f, &mut levels);
    levels
}

/// Alternation depth: the maximum binder level, 0 for fixpoint-free formulas.
pub fn alternation_depth(f: &Formula) -> u32 {
    binder_levels(f).values().copied().max().unwrap_or(0)
}

/// The Fischer-Ladner closure of a formula: the smallest set containing it
/// that is closed under immediate subformulas of conjunction, disjunction and
/// modal operators, and under single unfolding of fixpoints.
#[derive(Debug, Clone)]
pub struct Closure {
    pub formulas: Vec<Formula>,
    index: HashMap<Formula, FormulaId>,
    pub origin: FormulaId,
    /// Representation size of the target formula.
    pub n: usize,
    /// Alternation depth of the target formula.
    pub k: u32,
    levels: HashMap<String, u32>,
}

impl Closure {
    /// Computes the closure of a closed, clean, guarded formula.
    pub fn build(target: &Formula) -> Closure {
        let n = target.size();
        let k = alternation_depth(target);
        let levels = binder_levels(target);
        let mut formulas = Vec::new();
        let mut index = HashMap::new();
        let mut queue = std::collections::VecDeque::new();
        let intern = |f: Formula, formulas: &mut Vec<Formula>, index: &mut HashMap<Formula, FormulaId>, queue: &mut std::collections::VecDeque<FormulaId>| -> FormulaId {
            if let Some(&id) = index.get(&f) {
                return id;
            }
            let id = formulas.len() as FormulaId;
            index.insert(f.clone(), id);
            formulas.push(f);
            queue.push_back(id);
            id
        };
        let origin = intern(target.clone(), &mut formulas, &mut index, &mut queue);
        while let Some(id) = queue.pop_front() {
            let f = formulas[id as usize].clone();
            for child in decompose(&f) {
                intern(child, &mut formulas, &mut index, &mut queue);
            }
        }
        debug_assert!(formulas.len() <= n, "closure exceeds formula size");
        Closure { formulas, index, origin, n, k, levels }
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn get(&self, id: FormulaId) -> &Formula {
        &self.formulas[id as usize]
    }

    pub fn id_of(&self, f: &Formula) -> Option<FormulaId> {
        self.index.get(f).copied()
    }

    /// Alternation level of a closure fixpoint literal, via its binder name.
    pub fn fixpoint_level(&self, id: FormulaId) -> Option<u32> {
        match self.get(id) {
            Formula::Mu(x, _) | Formula::Nu(x, _) => self.levels.get(x).copied(),
            _ => None,
        }
    }

    /// Ids of the one-step decomposition successors of a member.
    pub fn children(&self, id: FormulaId) -> Vec<FormulaId> {
        decompose(self.get(id))
            .into_iter()
            .map(|f| self.id_of(&f).expect("closure is decomposition-closed"))
            .collect()
    }
}

/// One decomposition step, as used by the tracking automaton.
pub fn decompose(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::And(l, r) | Formula::Or(l, r) => vec![(**l).clone(), (**r).clone()],
        Formula::Modal(_, args) => args.clone(),
        Formula::Mu(..) | Formula::Nu(..) => vec![unfold(f).expect("fixpoint")],
        _ => Vec::new(),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Precedence: fixpoints extend maximally right; & binds tighter than |.
        fn go(fm: &Formula, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
            let this = match fm {
                Formula::Mu(..) | Formula::Nu(..) => 0,
                Formula::Or(..) => 1,
                Formula::And(..) => 2,
                _ => 3,
            };
            let paren = this < prec;
            if paren {
                write!(f, "(")?;
            }
            match fm {
                Formula::Bot => write!(f, "false")?,
                Formula::Top => write!(f, "true")?,
                Formula::Atom(a, true) => write!(f, "{}", a)?,
                Formula::Atom(a, false) => write!(f, "~{}", a)?,
                Formula::Var(x) => write!(f, "{}", x)?,
                Formula::Neg(g) => {
                    write!(f, "~")?;
                    go(g, f, 3)?;
                }
                Formula::And(l, r) => {
                    go(l, f, 2)?;
                    write!(f, " & ")?;
                    go(r, f, 3)?;
                }
                Formula::Or(l, r) => {
                    go(l, f, 1)?;
                    write!(f, " | ")?;
                    go(r, f, 2)?;
                }
                Formula::Modal(op, args) => {
                    if op.arity() == 1 && !matches!(op, ModalOp::LSum(..) | ModalOp::MSum(..) | ModalOp::PolyL(..) | ModalOp::PolyM(..)) {
                        write!(f, "{} ", op)?;
                        go(&args[0], f, 3)?;
                    } else {
                        write!(f, "{}(", op)?;
                        for (i, a) in args.iter().enumerate() {
                            if i > 0 {
                                write!(f, ", ")?;
                            }
                            go(a, f, 0)?;
                        }
                        write!(f, ")")?;
                    }
                }
                Formula::Mu(x, b) => {
                    write!(f, "mu {}. ", x)?;
                    go(b, f, 0)?;
                }
                Formula::Nu(x, b) => {
                    write!(f, "nu {}. ", x)?;
                    go(b, f, 0)?;
                }
            }
            if paren {
                write!(f, ")")?;
            }
            Ok(())
        }
        go(self, f, 0)
    }
}
