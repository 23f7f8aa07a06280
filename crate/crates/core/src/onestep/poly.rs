//! Feasibility of monotone polynomial constraints over the rational simplex.
//!
//! Purely linear instances (every monomial of total degree at most one) go
//! through the exact Fourier-Motzkin machinery. Otherwise zero-bound box
//! constraints are presolved first: `poly(...) <= 0` with positive
//! coefficients forces every single-variable monomial's argument mass to
//! vanish, pinning the affected successors to probability zero and dropping
//! them from the search space. The remainder is decided by bisection with
//! exact rational interval bounds: a box is accepted when its
//! simplex-projected center satisfies every constraint exactly (that point
//! is the witness), rejected when the interval bounds refute some constraint
//! over the whole box, and split otherwise. Running out of depth (or node
//! budget) yields UNSAT with a warning flag: the overall procedure stays
//! sound for SAT answers, while completeness on nonlinear instances is
//! depth-limited.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::linear::{feasible_distribution, Constraint};
use super::{OneStepOutcome, OneStepWitness, OsLiteral};
use crate::logic::{Poly, Rat};

/// Upper bound on explored boxes; past it the search reports depth-limited.
const NODE_BUDGET: usize = 100_000;

/// A constraint `poly(masses) > bound` (lower) or `poly(masses) <= bound`.
/// `arg_members[i]` lists the successor indices whose mass feeds argument i
/// (already complemented for the box-style operators).
struct PolyCons {
    poly: Poly,
    bound: Rat,
    lower: bool,
    arg_members: Vec<Vec<usize>>,
}

impl PolyCons {
    fn is_linear(&self) -> bool {
        self.poly.monomials.iter().all(|mo| mo.exps.iter().sum::<u32>() <= 1)
    }
}

pub(super) fn solve_polynomial(
    modal: &[&OsLiteral],
    us: &[BTreeSet<usize>],
    max_depth: usize,
) -> OneStepOutcome {
    let m = us.len();
    if m == 0 {
        return OneStepOutcome::UNSAT;
    }
    let members = |a: &usize, complement: bool| -> Vec<usize> {
        us.iter()
            .enumerate()
            .filter(|(_, u)| u.contains(a) != complement)
            .map(|(i, _)| i)
            .collect()
    };
    let linear_poly = Poly {
        arity: 1,
        monomials: vec![crate::logic::Monomial { coeff: Rat::one(), exps: vec![1] }],
    };
    let mut cons: Vec<PolyCons> = Vec::new();
    for lit in modal {
        match lit {
            OsLiteral::PolyL(p, b, args) => cons.push(PolyCons {
                poly: p.clone(),
                bound: b.clone(),
                lower: true,
                arg_members: args.iter().map(|a| members(a, false)).collect(),
            }),
            OsLiteral::PolyM(p, b, args) => cons.push(PolyCons {
                poly: p.clone(),
                bound: b.clone(),
                lower: false,
                arg_members: args.iter().map(|a| members(a, true)).collect(),
            }),
            OsLiteral::PDia(p, a) => cons.push(PolyCons {
                poly: linear_poly.clone(),
                bound: p.clone(),
                lower: true,
                arg_members: vec![members(a, false)],
            }),
            OsLiteral::PBox(p, a) => cons.push(PolyCons {
                poly: linear_poly.clone(),
                bound: p.clone(),
                lower: false,
                arg_members: vec![members(a, true)],
            }),
            _ => {}
        }
    }

    if cons.iter().all(|c| c.is_linear()) {
        return solve_linear_exactly(&cons, m);
    }

    // Zero-bound upper constraints: with positive coefficients and
    // nonnegative masses, every monomial must vanish. A monomial in a single
    // argument vanishes exactly when that argument's mass is zero, so all
    // successors feeding it are pinned to zero and removed.
    let mut zeroed = vec![false; m];
    for c in &cons {
        if c.lower || !c.bound.is_zero() {
            continue;
        }
        for mo in &c.poly.monomials {
            let vars: Vec<usize> =
                mo.exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i).collect();
            if let [single] = vars[..] {
                for &u in &c.arg_members[single] {
                    zeroed[u] = true;
                }
            }
        }
    }
    if zeroed.iter().any(|&z| z) {
        let keep: Vec<usize> = (0..m).filter(|&u| !zeroed[u]).collect();
        if keep.is_empty() {
            return OneStepOutcome::UNSAT;
        }
        let sub_us: Vec<BTreeSet<usize>> = keep.iter().map(|&u| us[u].clone()).collect();
        let sub_modal: Vec<&OsLiteral> = modal.to_vec();
        let out = solve_polynomial(&sub_modal, &sub_us, max_depth);
        return match out {
            OneStepOutcome::Sat(OneStepWitness::Distribution(sub)) => {
                let mut full = vec![Rat::zero(); m];
                for (slot, p) in keep.iter().zip(sub) {
                    full[*slot] = p;
                }
                OneStepOutcome::Sat(OneStepWitness::Distribution(full))
            }
            other => other,
        };
    }

    let satisfies = |d: &[Rat]| -> bool {
        cons.iter().all(|c| {
            let point: Vec<Rat> = c
                .arg_members
                .iter()
                .map(|ms| ms.iter().map(|&i| d[i].clone()).sum())
                .collect();
            let v = c.poly.eval(&point);
            if c.lower {
                v > c.bound
            } else {
                v <= c.bound
            }
        })
    };

    // Point masses first: they decide many instances immediately.
    for i in 0..m {
        let mut d = vec![Rat::zero(); m];
        d[i] = Rat::one();
        if satisfies(&d) {
            return OneStepOutcome::Sat(OneStepWitness::Distribution(d));
        }
    }

    type IBox = Vec<(Rat, Rat)>;
    let half = Rat::new(1.into(), 2.into());
    let one = Rat::one();

    // Propagate the simplex constraint through a box; None when empty.
    let tighten = |mut bx: IBox| -> Option<IBox> {
        let s_lo: Rat = bx.iter().map(|(l, _)| l.clone()).sum();
        let s_hi: Rat = bx.iter().map(|(_, h)| h.clone()).sum();
        if s_lo > one || s_hi < one {
            return None;
        }
        for i in 0..bx.len() {
            let (lo, hi) = bx[i].clone();
            let nhi = (&one - (&s_lo - &lo)).min(hi.clone());
            let nlo = (&one - (&s_hi - &hi)).max(lo.clone());
            if nlo > nhi {
                return None;
            }
            bx[i] = (nlo, nhi);
        }
        Some(bx)
    };

    // Interval refutation of a constraint over a whole box.
    let refuted = |bx: &IBox| -> bool {
        let lo_sum: Rat = bx.iter().map(|(l, _)| l.clone()).sum();
        let hi_sum: Rat = bx.iter().map(|(_, h)| h.clone()).sum();
        cons.iter().any(|c| {
            if c.lower {
                // Best possible value of each argument mass inside the box.
                let point: Vec<Rat> = c
                    .arg_members
                    .iter()
                    .map(|ms| {
                        let hi: Rat = ms.iter().map(|&i| bx[i].1.clone()).sum();
                        let out_lo: Rat =
                            &lo_sum - &ms.iter().map(|&i| bx[i].0.clone()).sum::<Rat>();
                        hi.min(&one - &out_lo).min(one.clone()).max(Rat::zero())
                    })
                    .collect();
                c.poly.eval(&point) <= c.bound
            } else {
                // Least possible value of each argument mass.
                let point: Vec<Rat> = c
                    .arg_members
                    .iter()
                    .map(|ms| {
                        let lo: Rat = ms.iter().map(|&i| bx[i].0.clone()).sum();
                        let out_hi: Rat =
                            &hi_sum - &ms.iter().map(|&i| bx[i].1.clone()).sum::<Rat>();
                        lo.max(&one - &out_hi).max(Rat::zero())
                    })
                    .collect();
                c.poly.eval(&point) > c.bound
            }
        })
    };

    let root: IBox = vec![(Rat::zero(), Rat::one()); m];
    let mut stack: Vec<(IBox, usize)> = vec![(root, 0)];
    let mut depth_limited = false;
    let mut nodes = 0usize;
    while let Some((bx, depth)) = stack.pop() {
        nodes += 1;
        if nodes > NODE_BUDGET {
            depth_limited = true;
            break;
        }
        let bx = match tighten(bx) {
            Some(b) => b,
            None => continue,
        };
        if refuted(&bx) {
            continue;
        }
        // Candidate: the simplex-normalized box center.
        let center: Vec<Rat> = bx.iter().map(|(l, h)| (l + h) * &half).collect();
        let total: Rat = center.iter().cloned().sum();
        if total > Rat::zero() {
            let d: Vec<Rat> = center.iter().map(|c| c / &total).collect();
            if satisfies(&d) {
                return OneStepOutcome::Sat(OneStepWitness::Distribution(d));
            }
        }
        if depth >= max_depth {
            depth_limited = true;
            continue;
        }
        // Split the widest dimension.
        let (dim, _) = bx
            .iter()
            .enumerate()
            .map(|(i, (l, h))| (i, h - l))
            .max_by(|a, b| a.1.cmp(&b.1))
            .expect("nonempty box");
        let mid = (&bx[dim].0 + &bx[dim].1) * &half;
        let mut left = bx.clone();
        left[dim].1 = mid.clone();
        let mut right = bx;
        right[dim].0 = mid;
        stack.push((left, depth + 1));
        stack.push((right, depth + 1));
    }
    OneStepOutcome::Unsat { depth_limited }
}

/// Exact decision for all-linear instances via Fourier-Motzkin; strictness
/// follows the operator (lower bounds strict, upper bounds non-strict).
fn solve_linear_exactly(cons: &[PolyCons], m: usize) -> OneStepOutcome {
    let mut rows = Vec::new();
    for c in cons {
        let mut coeffs = vec![Rat::zero(); m];
        let mut constant = Rat::zero();
        for mo in &c.poly.monomials {
            match mo.exps.iter().position(|&e| e == 1) {
                None => constant += &mo.coeff,
                Some(i) => {
                    for &u in &c.arg_members[i] {
                        coeffs[u] += &mo.coeff;
                    }
                }
            }
        }
        if c.lower {
            // poly > bound  <=>  -terms < constant - bound
            let row = coeffs.iter().map(|x| -x).collect();
            rows.push(Constraint { coeffs: row, rhs: &constant - &c.bound, strict: true });
        } else {
            rows.push(Constraint { coeffs, rhs: &c.bound - &constant, strict: false });
        }
    }
    match feasible_distribution(rows, m) {
        Some(d) => OneStepOutcome::Sat(OneStepWitness::Distribution(d)),
        None => OneStepOutcome::UNSAT,
    }
}
