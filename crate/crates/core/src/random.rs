//! Seeded random generation of well-formed formulas and lasso words; used by
//! the property tests and the acceptance suite, and handy for fuzzing the
//! solver from the command line.

use rand::Rng;

use crate::formula::{alternation_depth, validate, Formula};
use crate::logic::{rat, LogicKind, ModalOp, Monomial, Poly, Rat};
use crate::tracking::{Letter, TrackingNpa};

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub kind: LogicKind,
    /// Approximate node budget; the representation size ends up larger for
    /// parameter-heavy operators.
    pub size_budget: usize,
    /// Reject formulas whose alternation depth exceeds this, when set.
    pub max_depth: Option<u32>,
    pub atoms: Vec<String>,
}

impl GenConfig {
    pub fn new(kind: LogicKind, size_budget: usize) -> GenConfig {
        GenConfig {
            kind,
            size_budget,
            max_depth: None,
            atoms: vec!["p".into(), "q".into()],
        }
    }
}

/// Generates a closed, clean, guarded, irredundant formula. Guardedness holds
/// by construction (variables are only placed once a modal operator has been
/// crossed); unused binders are dropped afterwards.
pub fn random_formula<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Formula {
    loop {
        let mut counter = 0usize;
        let mut env: Vec<(String, bool)> = Vec::new();
        let f = gen(rng, cfg, cfg.size_budget, &mut env, &mut counter);
        let f = drop_unused_binders(&f);
        if validate(&f).is_err() {
            continue;
        }
        if let Some(cap) = cfg.max_depth {
            if alternation_depth(&f) > cap {
                continue;
            }
        }
        return f;
    }
}

fn gen<R: Rng>(
    rng: &mut R,
    cfg: &GenConfig,
    budget: usize,
    env: &mut Vec<(String, bool)>,
    counter: &mut usize,
) -> Formula {
    let usable: Vec<String> =
        env.iter().filter(|(_, guarded)| *guarded).map(|(x, _)| x.clone()).collect();
    if budget <= 1 {
        return leaf(rng, cfg, &usable);
    }
    match rng.gen_range(0..10) {
        0 | 1 => {
            let left = budget / 2;
            Formula::and(
                gen(rng, cfg, left.max(1), env, counter),
                gen(rng, cfg, (budget - left).max(1), env, counter),
            )
        }
        2 | 3 => {
            let left = budget / 2;
            Formula::or(
                gen(rng, cfg, left.max(1), env, counter),
                gen(rng, cfg, (budget - left).max(1), env, counter),
            )
        }
        4..=6 => {
            let op = random_op(rng, cfg.kind);
            let arity = op.arity();
            let share = ((budget - 1) / arity).max(1);
            let saved: Vec<bool> = env.iter().map(|(_, g)| *g).collect();
            for e in env.iter_mut() {
                e.1 = true;
            }
            let args = (0..arity).map(|_| gen(rng, cfg, share, env, counter)).collect();
            for (e, g) in env.iter_mut().zip(saved) {
                e.1 = g;
            }
            Formula::Modal(op, args)
        }
        7 | 8 => {
            let name = format!("X{}", *counter);
            *counter += 1;
            env.push((name.clone(), false));
            let body = gen(rng, cfg, budget - 1, env, counter);
            env.pop();
            if rng.gen_bool(0.5) {
                Formula::Mu(name, Box::new(body))
            } else {
                Formula::Nu(name, Box::new(body))
            }
        }
        _ => leaf(rng, cfg, &usable),
    }
}

fn leaf<R: Rng>(rng: &mut R, cfg: &GenConfig, usable: &[String]) -> Formula {
    if !usable.is_empty() && rng.gen_bool(0.5) {
        return Formula::Var(usable[rng.gen_range(0..usable.len())].clone());
    }
    match rng.gen_range(0..8) {
        0 => Formula::Top,
        1 => Formula::Bot,
        _ => {
            let a = cfg.atoms[rng.gen_range(0..cfg.atoms.len())].clone();
            Formula::Atom(a, rng.gen_bool(0.7))
        }
    }
}

fn random_op<R: Rng>(rng: &mut R, kind: LogicKind) -> ModalOp {
    let small_rat = |rng: &mut R| -> Rat {
        let choices = [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)];
        let (n, d) = choices[rng.gen_range(0..choices.len())];
        rat(n, d)
    };
    match kind {
        LogicKind::Kripke => {
            if rng.gen_bool(0.5) {
                ModalOp::Dia
            } else {
                ModalOp::Box
            }
        }
        LogicKind::Graded => {
            let k = rng.gen_range(0..=3);
            if rng.gen_bool(0.5) {
                ModalOp::GDia(k)
            } else {
                ModalOp::GBox(k)
            }
        }
        LogicKind::Probabilistic => {
            let p = small_rat(rng);
            if rng.gen_bool(0.5) {
                ModalOp::PDia(p)
            } else {
                ModalOp::PBox(p)
            }
        }
        LogicKind::Presburger => match rng.gen_range(0..4) {
            0 => ModalOp::GDia(rng.gen_range(0..=3)),
            1 => ModalOp::GBox(rng.gen_range(0..=3)),
            tag => {
                let arity = rng.gen_range(1..=2);
                let coeffs = (0..arity).map(|_| rng.gen_range(1..=2)).collect();
                let bound = rng.gen_range(0..=3);
                if tag == 2 {
                    ModalOp::LSum(coeffs, bound)
                } else {
                    ModalOp::MSum(coeffs, bound)
                }
            }
        },
        LogicKind::PolyProb => {
            let arity = rng.gen_range(1..=2);
            let nmono = rng.gen_range(1..=2);
            let monomials = (0..nmono)
                .map(|_| {
                    let mut exps = vec![0u32; arity];
                    exps[rng.gen_range(0..arity)] += rng.gen_range(1..=2);
                    Monomial { coeff: rat(rng.gen_range(1..=2), 1), exps }
                })
                .collect();
            let poly = Poly { arity, monomials };
            let bound = small_rat(rng);
            if rng.gen_bool(0.5) {
                ModalOp::PolyL(poly, bound)
            } else {
                ModalOp::PolyM(poly, bound)
            }
        }
    }
}

/// Removes fixpoint binders whose variable never occurs.
fn drop_unused_binders(f: &Formula) -> Formula {
    match f {
        Formula::And(l, r) => Formula::and(drop_unused_binders(l), drop_unused_binders(r)),
        Formula::Or(l, r) => Formula::or(drop_unused_binders(l), drop_unused_binders(r)),
        Formula::Modal(op, args) => {
            Formula::Modal(op.clone(), args.iter().map(drop_unused_binders).collect())
        }
        Formula::Neg(g) => Formula::neg(drop_unused_binders(g)),
        Formula::Mu(x, b) | Formula::Nu(x, b) => {
            let body = drop_unused_binders(b);
            if body.free_vars().contains(x) {
                if matches!(f, Formula::Mu(..)) {
                    Formula::Mu(x.clone(), Box::new(body))
                } else {
                    Formula::Nu(x.clone(), Box::new(body))
                }
            } else {
                body
            }
        }
        other => other.clone(),
    }
}

/// Samples a lasso word over letters that matter for the given automaton:
/// decompositions of non-modal closure members and random selections over the
/// closure's modal argument occurrences.
pub fn random_lasso<R: Rng>(
    rng: &mut R,
    npa: &TrackingNpa,
    max_prefix: usize,
    max_cycle: usize,
) -> (Vec<Letter>, Vec<Letter>) {
    let mut decompositions = Vec::new();
    let mut pairs = Vec::new();
    for id in 0..npa.num_states() as crate::formula::FormulaId {
        match npa.display(id) {
            Formula::Or(..) => {
                decompositions.push(Letter::Disj(id, false));
                decompositions.push(Letter::Disj(id, true));
            }
            Formula::And(..) => decompositions.push(Letter::Conj(id)),
            Formula::Mu(..) | Formula::Nu(..) => decompositions.push(Letter::Unfold(id)),
            Formula::Modal(op, _) => {
                for i in 0..op.arity() as u8 {
                    pairs.push((id, i));
                }
            }
            _ => {}
        }
    }
    let sample = |rng: &mut R| -> Letter {
        if !decompositions.is_empty() && (pairs.is_empty() || rng.gen_bool(0.55)) {
            decompositions[rng.gen_range(0..decompositions.len())].clone()
        } else {
            Letter::select(pairs.iter().filter(|_| rng.gen_bool(0.5)).copied())
        }
    };
    let prefix = (0..rng.gen_range(0..=max_prefix)).map(|_| sample(rng)).collect();
    let cycle = (0..rng.gen_range(1..=max_cycle.max(1))).map(|_| sample(rng)).collect();
    (prefix, cycle)
}
