//! Exact rational linear feasibility for the probabilistic one-step problem.
//!
//! Constraints carry explicit strictness flags through Fourier-Motzkin
//! elimination: a derived constraint is strict iff any parent is strict.
//! After a consistent elimination, a rational witness is recovered by
//! back-substitution.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::{OneStepOutcome, OneStepWitness, OsLiteral};
use crate::logic::Rat;

/// A constraint `sum(coeffs . x) <= rhs` (or `<` when `strict`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(super) struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
    pub strict: bool,
}

pub(super) fn solve_probabilistic(modal: &[&OsLiteral], us: &[BTreeSet<usize>]) -> OneStepOutcome {
    let m = us.len();
    if m == 0 {
        // No distribution over the empty set exists.
        return OneStepOutcome::UNSAT;
    }
    // Raw constraints over d_0..d_{m-1}.
    let mut raw: Vec<Constraint> = Vec::new();
    for lit in modal {
        match lit {
            OsLiteral::PDia(p, a) => {
                // sum_{u containing a} d_u > p  <=>  -sum < -p
                let coeffs = us
                    .iter()
                    .map(|u| if u.contains(a) { -Rat::one() } else { Rat::zero() })
                    .collect();
                raw.push(Constraint { coeffs, rhs: -p.clone(), strict: true });
            }
            OsLiteral::PBox(p, a) => {
                let coeffs = us
                    .iter()
                    .map(|u| if !u.contains(a) { Rat::one() } else { Rat::zero() })
                    .collect();
                raw.push(Constraint { coeffs, rhs: p.clone(), strict: false });
            }
            _ => {}
        }
    }
    match feasible_distribution(raw, m) {
        Some(dist) => OneStepOutcome::Sat(OneStepWitness::Distribution(dist)),
        None => OneStepOutcome::UNSAT,
    }
}

/// Decides whether a distribution over `m` points satisfies the given linear
/// constraints, returning one if so. The simplex conditions (`d_u >= 0`,
/// `sum d = 1`) are added here.
pub(super) fn feasible_distribution(mut raw: Vec<Constraint>, m: usize) -> Option<Vec<Rat>> {
    if m == 0 {
        return None;
    }
    for u in 0..m {
        let mut coeffs = vec![Rat::zero(); m];
        coeffs[u] = -Rat::one();
        raw.push(Constraint { coeffs, rhs: Rat::zero(), strict: false });
    }
    // Eliminate the simplex equality by substituting
    // d_{m-1} = 1 - sum of the others.
    let nvars = m - 1;
    let mut system: Vec<Constraint> = raw
        .into_iter()
        .map(|c| {
            let last = c.coeffs[nvars].clone();
            let coeffs = c.coeffs[..nvars].iter().map(|ci| ci - &last).collect();
            Constraint { coeffs, rhs: c.rhs - last, strict: c.strict }
        })
        .collect();

    // Fourier-Motzkin, eliminating the highest variable first; remember each
    // stage for back-substitution.
    let mut stages: Vec<Vec<Constraint>> = Vec::new();
    for var in (0..nvars).rev() {
        stages.push(system.clone());
        let mut uppers = Vec::new();
        let mut lowers = Vec::new();
        let mut rest = Vec::new();
        for c in system.drain(..) {
            let coeff = c.coeffs[var].clone();
            if coeff.is_zero() {
                rest.push(c);
            } else if coeff > Rat::zero() {
                uppers.push(c);
            } else {
                lowers.push(c);
            }
        }
        let mut next: BTreeSet<Constraint> = rest.into_iter().collect();
        for lo in &lowers {
            for up in &uppers {
                // Combine a*x <= r1 (a>0) with -b*x <= r2 (b>0):
                // scale so the x coefficients cancel.
                let a = up.coeffs[var].clone();
                let b = -lo.coeffs[var].clone();
                let mut coeffs = Vec::with_capacity(var);
                for i in 0..var {
                    coeffs.push(&up.coeffs[i] * &b + &lo.coeffs[i] * &a);
                }
                let rhs = &up.rhs * &b + &lo.rhs * &a;
                next.insert(Constraint { coeffs, rhs, strict: up.strict || lo.strict });
            }
        }
        system = next.into_iter().collect();
    }
    // Only constants remain.
    for c in &system {
        debug_assert!(c.coeffs.iter().all(|x| x.is_zero()));
        let ok = if c.strict { c.rhs > Rat::zero() } else { c.rhs >= Rat::zero() };
        if !ok {
            return None;
        }
    }
    // Back-substitution, lowest variable first.
    let mut point = vec![Rat::zero(); nvars];
    for var in 0..nvars {
        let stage = &stages[nvars - 1 - var];
        // Bounds for x_var given the already-fixed lower variables.
        let mut lo: Option<(Rat, bool)> = None;
        let mut hi: Option<(Rat, bool)> = None;
        for c in stage {
            let coeff = c.coeffs[var].clone();
            if coeff.is_zero() {
                continue;
            }
            let mut rest = c.rhs.clone();
            for i in 0..var {
                rest -= &c.coeffs[i] * &point[i];
            }
            let bound = rest / coeff.clone();
            if coeff > Rat::zero() {
                hi = Some(match hi {
                    None => (bound, c.strict),
                    Some((b, s)) => match bound.cmp(&b) {
                        std::cmp::Ordering::Less => (bound, c.strict),
                        std::cmp::Ordering::Equal => (b, s || c.strict),
                        std::cmp::Ordering::Greater => (b, s),
                    },
                });
            } else {
                lo = Some(match lo {
                    None => (bound, c.strict),
                    Some((b, s)) => match bound.cmp(&b) {
                        std::cmp::Ordering::Greater => (bound, c.strict),
                        std::cmp::Ordering::Equal => (b, s || c.strict),
                        std::cmp::Ordering::Less => (b, s),
                    },
                });
            }
        }
        point[var] = match (lo, hi) {
            (Some((l, ls)), Some((h, hs))) => {
                if l == h {
                    debug_assert!(!ls && !hs, "Fourier-Motzkin admitted an empty interval");
                    l
                } else {
                    (l + h) / Rat::from_integer(2.into())
                }
            }
            (Some((l, ls)), None) => {
                if ls {
                    l + Rat::one()
                } else {
                    l
                }
            }
            (None, Some((h, hs))) => {
                if hs {
                    h - Rat::one()
                } else {
                    h
                }
            }
            (None, None) => Rat::zero(),
        };
    }
    let mut dist = point;
    let used: Rat = dist.iter().cloned().sum();
    dist.push(Rat::one() - used);
    Some(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::rat;
    use crate::onestep::verify;
    use crate::onestep::OneStepInstance;

    fn run(lits: Vec<OsLiteral>, us: Vec<Vec<usize>>) -> OneStepOutcome {
        let inst = OneStepInstance {
            literals: lits,
            successors: us.into_iter().map(|u| u.into_iter().collect()).collect(),
        };
        let modal: Vec<&OsLiteral> = inst.literals.iter().collect();
        let out = solve_probabilistic(&modal, &inst.successors);
        if let OneStepOutcome::Sat(ref w) = out {
            assert!(verify(&inst, w), "witness failed direct evaluation");
        }
        out
    }

    #[test]
    fn half_and_half_is_unsat() {
        let out = run(
            vec![OsLiteral::PDia(rat(1, 2), 0), OsLiteral::PDia(rat(1, 2), 1)],
            vec![vec![0], vec![1]],
        );
        assert_eq!(out, OneStepOutcome::UNSAT);
    }

    #[test]
    fn thirds_leave_room() {
        let out = run(
            vec![OsLiteral::PDia(rat(1, 3), 0), OsLiteral::PDia(rat(1, 3), 1)],
            vec![vec![0], vec![1]],
        );
        assert!(out.is_sat());
    }

    #[test]
    fn boxes_cap_the_complement() {
        // [1/4]a: mass outside a at most 1/4, -> mass in a at least 3/4
        let out = run(
            vec![OsLiteral::PBox(rat(1, 4), 0), OsLiteral::PDia(rat(1, 2), 1)],
            vec![vec![0, 1], vec![1]],
        );
        assert!(out.is_sat());
        // but if the only a-successor misses b entirely:
        let out = run(
            vec![OsLiteral::PBox(rat(1, 4), 0), OsLiteral::PDia(rat(7, 8), 1)],
            vec![vec![0], vec![1]],
        );
        assert_eq!(out, OneStepOutcome::UNSAT);
    }

    #[test]
    fn boundary_strictness_matters() {
        // d(a) > 1 is impossible, d(a) > 0 with [0]a is fine.
        let out = run(vec![OsLiteral::PDia(rat(1, 1), 0)], vec![vec![0]]);
        assert_eq!(out, OneStepOutcome::UNSAT);
        let out = run(
            vec![OsLiteral::PDia(rat(0, 1), 0), OsLiteral::PBox(rat(0, 1), 0)],
            vec![vec![0]],
        );
        assert!(out.is_sat());
    }

    #[test]
    fn shared_successors_accumulate() {
        // one successor satisfying both a and b
        let out = run(
            vec![OsLiteral::PDia(rat(1, 2), 0), OsLiteral::PDia(rat(1, 2), 1)],
            vec![vec![0, 1]],
        );
        assert!(out.is_sat());
    }
}
