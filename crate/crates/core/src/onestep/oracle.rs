//! Independent brute-force oracles for cross-checking the one-step solvers.
//!
//! Kripke instances are decided by full subset enumeration, weighted ones by
//! enumerating all capped multisets, and linear probabilistic ones exactly via
//! basic-solution enumeration of a slack-maximizing linear program. Polynomial
//! instances are only confirmed on a rational grid: a hit is a sound SAT
//! answer, a miss is inconclusive unless the instance is linear.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::{nullary_preflight, verify, OneStepInstance, OneStepWitness, OsLiteral};
use crate::logic::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for the brute-force oracle")]
    TooLarge,
    #[error("grid search inconclusive on a nonlinear instance")]
    Inconclusive,
}

/// Decides a small instance by brute force; see the module docs for the
/// per-logic methods and their completeness caveats.
pub fn oracle(kind: crate::logic::LogicKind, inst: &OneStepInstance) -> Result<bool, OracleError> {
    use crate::logic::LogicKind::*;
    let modal = match nullary_preflight(inst).map_err(|_| OracleError::TooLarge)? {
        None => return Ok(false),
        Some(m) => m,
    };
    match kind {
        Kripke => {
            let m = inst.successors.len();
            if m > 16 {
                return Err(OracleError::TooLarge);
            }
            for mask in 0u32..(1 << m) {
                let chosen: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
                if verify(inst, &OneStepWitness::Subset(chosen)) {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Graded | Presburger => {
            let m = inst.successors.len();
            let cap = modal
                .iter()
                .filter_map(|l| match l {
                    OsLiteral::GDia(k, _) => Some(*k),
                    OsLiteral::LSum(_, b) => Some(*b),
                    _ => None,
                })
                .max()
                .map(|b| b + 1)
                .unwrap_or(1);
            let combos = ((cap + 1) as u128).checked_pow(m as u32).ok_or(OracleError::TooLarge)?;
            if combos > 4_000_000 {
                return Err(OracleError::TooLarge);
            }
            let mut weights = vec![0u64; m];
            loop {
                if verify(inst, &OneStepWitness::Multiset(weights.clone())) {
                    return Ok(true);
                }
                // odometer increment
                let mut i = 0;
                loop {
                    if i == m {
                        return Ok(false);
                    }
                    if weights[i] < cap {
                        weights[i] += 1;
                        break;
                    }
                    weights[i] = 0;
                    i += 1;
                }
                if m == 0 {
                    return Ok(false);
                }
            }
        }
        Probabilistic => lp_decide(&modal, &inst.successors).ok_or(OracleError::TooLarge),
        PolyProb => {
            for denom in 1..=8u64 {
                if grid_search(inst, denom).is_some() {
                    return Ok(true);
                }
            }
            let linear = modal.iter().all(|l| match l {
                OsLiteral::PDia(..) | OsLiteral::PBox(..) => true,
                OsLiteral::PolyL(p, _, _) | OsLiteral::PolyM(p, _, _) => {
                    p.monomials.iter().all(|mo| mo.exps.iter().sum::<u32>() <= 1)
                }
                _ => false,
            });
            if linear {
                lp_decide(&modal, &inst.successors).ok_or(OracleError::TooLarge)
            } else {
                Err(OracleError::Inconclusive)
            }
        }
    }
}

/// Enumerates all distributions with the given denominator; any verified hit
/// is returned. Sound for SAT only.
pub fn grid_search(inst: &OneStepInstance, denom: u64) -> Option<OneStepWitness> {
    let m = inst.successors.len();
    if m == 0 {
        return None;
    }
    let mut parts = vec![0u64; m];
    fn go(
        inst: &OneStepInstance,
        parts: &mut Vec<u64>,
        idx: usize,
        left: u64,
        denom: u64,
    ) -> Option<OneStepWitness> {
        if idx + 1 == parts.len() {
            parts[idx] = left;
            let dist: Vec<Rat> =
                parts.iter().map(|&k| Rat::new(k.into(), denom.into())).collect();
            let w = OneStepWitness::Distribution(dist);
            if verify(inst, &w) {
                return Some(w);
            }
            return None;
        }
        for k in 0..=left {
            parts[idx] = k;
            if let Some(w) = go(inst, parts, idx + 1, left - k, denom) {
                return Some(w);
            }
        }
        None
    }
    go(inst, &mut parts, 0, denom, denom)
}

/// Exact decision of a linear strict/non-strict system over the simplex by
/// enumerating basic solutions of the slack-maximizing LP: the system is
/// feasible iff some vertex of the closed relaxation has positive slack on
/// every strict constraint.
fn lp_decide(modal: &[&OsLiteral], us: &[BTreeSet<usize>]) -> Option<bool> {
    let m = us.len();
    if m == 0 {
        return Some(false);
    }
    if m > 6 {
        return None;
    }
    // Variables x_0..x_{m-1} = d, x_m = t. Inequalities: rows . x <= rhs.
    let nv = m + 1;
    let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
    let mass_row = |pred: &dyn Fn(&BTreeSet<usize>) -> bool| -> Vec<Rat> {
        (0..m).map(|i| if pred(&us[i]) { Rat::one() } else { Rat::zero() }).collect()
    };
    for lit in modal {
        match lit {
            OsLiteral::PDia(p, a) => {
                // mass(a) >= p + t  =>  -mass(a) + t <= -p
                let mut r: Vec<Rat> = mass_row(&|u| u.contains(a)).iter().map(|c| -c).collect();
                r.push(Rat::one());
                rows.push((r, -p.clone()));
            }
            OsLiteral::PBox(p, a) => {
                let mut r = mass_row(&|u| !u.contains(a));
                r.push(Rat::zero());
                rows.push((r, p.clone()));
            }
            OsLiteral::PolyL(poly, b, args) => {
                // linear polynomial: sum over monomials of coeff * mass(arg)
                let mut r = vec![Rat::zero(); m];
                for mo in &poly.monomials {
                    if let Some(pos) = mo.exps.iter().position(|&e| e == 1) {
                        let arg = args[pos];
                        for (i, u) in us.iter().enumerate() {
                            if u.contains(&arg) {
                                r[i] -= mo.coeff.clone();
                            }
                        }
                    }
                }
                let constant: Rat = poly
                    .monomials
                    .iter()
                    .filter(|mo| mo.exps.iter().all(|&e| e == 0))
                    .map(|mo| mo.coeff.clone())
                    .sum();
                r.push(Rat::one());
                rows.push((r, constant - b.clone()));
            }
            OsLiteral::PolyM(poly, b, args) => {
                let mut r = vec![Rat::zero(); m];
                for mo in &poly.monomials {
                    if let Some(pos) = mo.exps.iter().position(|&e| e == 1) {
                        let arg = args[pos];
                        for (i, u) in us.iter().enumerate() {
                            if !u.contains(&arg) {
                                r[i] += mo.coeff.clone();
                            }
                        }
                    }
                }
                let constant: Rat = poly
                    .monomials
                    .iter()
                    .filter(|mo| mo.exps.iter().all(|&e| e == 0))
                    .map(|mo| mo.coeff.clone())
                    .sum();
                r.push(Rat::zero());
                rows.push((r, b.clone() - constant));
            }
            _ => return None,
        }
    }
    for i in 0..m {
        let mut r = vec![Rat::zero(); nv];
        r[i] = -Rat::one();
        rows.push((r, Rat::zero()));
    }
    let mut t_hi = vec![Rat::zero(); nv];
    t_hi[m] = Rat::one();
    rows.push((t_hi, Rat::one()));
    let mut t_lo = vec![Rat::zero(); nv];
    t_lo[m] = -Rat::one();
    rows.push((t_lo, Rat::one()));
    // Equality: sum d = 1.
    let mut eq = vec![Rat::one(); m];
    eq.push(Rat::zero());

    let k = rows.len();
    let mut best_t: Option<Rat> = None;
    // Choose m of the inequalities to be tight alongside the equality.
    let mut choose = vec![0usize; m];
    fn combos(
        k: usize,
        m: usize,
        start: usize,
        idx: usize,
        choose: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if idx == m {
            visit(choose);
            return;
        }
        for c in start..k {
            choose[idx] = c;
            combos(k, m, c + 1, idx + 1, choose, visit);
        }
    }
    let mut visit = |tight: &[usize]| {
        let mut mat: Vec<Vec<Rat>> = vec![eq.clone()];
        let mut rhs: Vec<Rat> = vec![Rat::one()];
        for &ti in tight {
            mat.push(rows[ti].0.clone());
            rhs.push(rows[ti].1.clone());
        }
        if let Some(x) = solve_square(mat, rhs) {
            let feasible = rows
                .iter()
                .all(|(r, b)| r.iter().zip(&x).map(|(c, v)| c * v).sum::<Rat>() <= *b);
            if feasible {
                let t = x[m].clone();
                best_t = Some(match best_t.take() {
                    None => t,
                    Some(old) => old.max(t),
                });
            }
        }
    };
    combos(k, m, 0, 0, &mut choose, &mut visit);
    Some(match best_t {
        None => false,
        Some(t) => t > Rat::zero(),
    })
}

/// Gaussian elimination over the rationals; `None` when singular.
fn solve_square(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for c in col..n {
            a[col][c] = &a[col][c] / &p;
        }
        b[col] = &b[col] / &p;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..n {
                    a[r][c] = &a[r][c] - &(&f * &a[col][c]);
                }
                b[r] = &b[r] - &(&f * &b[col]);
            }
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{rat, LogicKind};
    use crate::onestep::{solve, SolveConfig};

    fn inst(lits: Vec<OsLiteral>, us: Vec<Vec<usize>>) -> OneStepInstance {
        OneStepInstance {
            literals: lits,
            successors: us.into_iter().map(|u| u.into_iter().collect()).collect(),
        }
    }

    #[test]
    fn oracle_matches_kripke_solver_on_examples() {
        let cases = vec![
            inst(vec![OsLiteral::Dia(0), OsLiteral::Box(1)], vec![vec![0, 1], vec![1]]),
            inst(vec![OsLiteral::Dia(0), OsLiteral::Box(1)], vec![vec![1]]),
            inst(vec![OsLiteral::Box(0)], vec![]),
        ];
        for i in cases {
            let solver = solve(LogicKind::Kripke, &i, &SolveConfig::default()).unwrap().is_sat();
            let oracle = oracle(LogicKind::Kripke, &i).unwrap();
            assert_eq!(solver, oracle, "mismatch on {:?}", i);
        }
    }

    #[test]
    fn lp_oracle_handles_strictness() {
        let i = inst(
            vec![OsLiteral::PDia(rat(1, 2), 0), OsLiteral::PDia(rat(1, 2), 1)],
            vec![vec![0], vec![1]],
        );
        assert!(!oracle(LogicKind::Probabilistic, &i).unwrap());
        let i = inst(
            vec![OsLiteral::PDia(rat(1, 3), 0), OsLiteral::PDia(rat(1, 3), 1)],
            vec![vec![0], vec![1]],
        );
        assert!(oracle(LogicKind::Probabilistic, &i).unwrap());
        // boundary: d(a) > 1/2 with [1/2]a is satisfiable, > 1 is not
        let i = inst(vec![OsLiteral::PDia(rat(1, 1), 0)], vec![vec![0]]);
        assert!(!oracle(LogicKind::Probabilistic, &i).unwrap());
    }

    #[test]
    fn grid_confirms_polynomial_sat() {
        let p = crate::logic::Poly {
            arity: 2,
            monomials: vec![crate::logic::Monomial { coeff: rat(1, 1), exps: vec![1, 1] }],
        };
        let i = inst(vec![OsLiteral::PolyL(p, rat(1, 5), vec![0, 1])], vec![vec![0], vec![1]]);
        assert!(grid_search(&i, 2).is_some());
    }

    #[test]
    fn graded_oracle_counts() {
        let i = inst(vec![OsLiteral::GDia(1, 0)], vec![vec![0]]);
        assert!(oracle(LogicKind::Graded, &i).unwrap());
        let i = inst(vec![OsLiteral::GDia(3, 0), OsLiteral::GBox(2, 1)], vec![vec![0]]);
        assert!(!oracle(LogicKind::Graded, &i).unwrap());
    }
}
