//! Cross-checks of the one-step solvers against independent brute force:
//! exhaustive enumeration where feasible, seeded random sampling elsewhere,
//! plus the finite lifting laws (duality, monotonicity) evaluated on concrete
//! functor elements over small base sets.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use musat_core::logic::{rat, LogicKind, Monomial, Poly, Rat};
use musat_core::onestep::{
    grid_search, oracle, solve, solve_kripke_counted, verify, OneStepInstance, OneStepOutcome,
    OneStepWitness, OsLiteral, SolveConfig,
};

fn inst(literals: Vec<OsLiteral>, us: Vec<Vec<usize>>) -> OneStepInstance {
    OneStepInstance {
        literals,
        successors: us.into_iter().map(|u| u.into_iter().collect()).collect(),
    }
}

fn run(kind: LogicKind, i: &OneStepInstance) -> OneStepOutcome {
    solve(kind, i, &SolveConfig::default()).expect("well-formed instance")
}

/// All subsets of {0..n-1} of size at most `max`.
fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>())
        .filter(|s: &Vec<usize>| s.len() <= max)
        .collect()
}

#[test]
fn kripke_matches_oracle_exhaustively() {
    // |V| <= 3 variables, literal per variable in {none, dia, box},
    // U any subset family with |U| <= 4 over the variable powerset.
    let u_pool = subsets(3, 3); // candidate successor sets over V
    let families = subsets(u_pool.len(), 4);
    let mut cases = 0usize;
    for lits_code in 0..27 {
        let mut literals = Vec::new();
        let mut code = lits_code;
        for v in 0..3 {
            match code % 3 {
                1 => literals.push(OsLiteral::Dia(v)),
                2 => literals.push(OsLiteral::Box(v)),
                _ => {}
            }
            code /= 3;
        }
        for family in &families {
            let us: Vec<Vec<usize>> = family.iter().map(|&i| u_pool[i].clone()).collect();
            let i = inst(literals.clone(), us);
            let got = run(LogicKind::Kripke, &i).is_sat();
            let want = oracle(LogicKind::Kripke, &i).unwrap();
            assert_eq!(got, want, "kripke mismatch on {:?}", i);
            let modal: Vec<&OsLiteral> = i.literals.iter().collect();
            let (_, steps) = solve_kripke_counted(&modal, &i.successors);
            assert!(
                steps <= i.literals.len() * i.successors.len().max(1),
                "step bound exceeded on {:?}",
                i
            );
            cases += 1;
        }
    }
    assert!(cases > 4000, "exhaustive sweep too small: {cases}");
}

#[test]
fn graded_matches_oracle_exhaustively() {
    // |V| <= 2, thresholds <= 3, |U| <= 3.
    let u_pool = subsets(2, 2);
    let families = subsets(u_pool.len(), 3);
    let mut options: Vec<Option<OsLiteral>> = vec![None];
    for k in 0..=3u64 {
        options.push(Some(OsLiteral::GDia(k, 0)));
        options.push(Some(OsLiteral::GBox(k, 0)));
    }
    for a in &options {
        for b in &options {
            let mut literals = Vec::new();
            if let Some(l) = a {
                literals.push(l.clone());
            }
            if let Some(l) = b {
                let mut l = l.clone();
                // second literal talks about variable 1
                match &mut l {
                    OsLiteral::GDia(_, v) | OsLiteral::GBox(_, v) => *v = 1,
                    _ => {}
                }
                literals.push(l);
            }
            for family in &families {
                let us: Vec<Vec<usize>> = family.iter().map(|&i| u_pool[i].clone()).collect();
                let i = inst(literals.clone(), us);
                let got = run(LogicKind::Graded, &i).is_sat();
                let want = oracle(LogicKind::Graded, &i).unwrap();
                assert_eq!(got, want, "graded mismatch on {:?}", i);
            }
        }
    }
}

#[test]
fn presburger_matches_oracle_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..400 {
        let m = rng.gen_range(0..=3);
        let us: Vec<Vec<usize>> =
            (0..m).map(|_| (0..2).filter(|_| rng.gen_bool(0.5)).collect()).collect();
        let mut literals = Vec::new();
        for _ in 0..rng.gen_range(1..=2) {
            let arity = rng.gen_range(1..=2);
            let terms: Vec<(u64, usize)> =
                (0..arity).map(|_| (rng.gen_range(1..=2), rng.gen_range(0..2))).collect();
            let bound = rng.gen_range(0..=3);
            if rng.gen_bool(0.5) {
                literals.push(OsLiteral::LSum(terms, bound));
            } else {
                literals.push(OsLiteral::MSum(terms, bound));
            }
        }
        let i = inst(literals, us);
        let got = run(LogicKind::Presburger, &i).is_sat();
        let want = oracle(LogicKind::Presburger, &i).unwrap();
        assert_eq!(got, want, "presburger mismatch on {:?}", i);
    }
}

#[test]
fn probabilistic_matches_lp_oracle_on_1000_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let probs = [rat(0, 1), rat(1, 4), rat(1, 3), rat(1, 2), rat(2, 3), rat(3, 4), rat(1, 1)];
    for round in 0..1000 {
        let m = rng.gen_range(0..=4);
        let us: Vec<Vec<usize>> =
            (0..m).map(|_| (0..3).filter(|_| rng.gen_bool(0.5)).collect()).collect();
        let nlits = rng.gen_range(0..=3);
        let literals: Vec<OsLiteral> = (0..nlits)
            .map(|_| {
                let p = probs[rng.gen_range(0..probs.len())].clone();
                let v = rng.gen_range(0..3);
                if rng.gen_bool(0.5) {
                    OsLiteral::PDia(p, v)
                } else {
                    OsLiteral::PBox(p, v)
                }
            })
            .collect();
        let i = inst(literals, us);
        let got = run(LogicKind::Probabilistic, &i);
        let want = oracle(LogicKind::Probabilistic, &i).unwrap();
        assert_eq!(got.is_sat(), want, "probabilistic mismatch on {:?} (round {round})", i);
        if let OneStepOutcome::Sat(w) = got {
            assert!(verify(&i, &w), "unsound witness on {:?}", i);
        }
    }
}

#[test]
fn polynomial_solver_is_sound_and_grid_complete() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let cfg = SolveConfig::default();
    for _ in 0..200 {
        let m = rng.gen_range(1..=3);
        let us: Vec<Vec<usize>> =
            (0..m).map(|_| (0..2).filter(|_| rng.gen_bool(0.5)).collect()).collect();
        let arity = rng.gen_range(1..=2);
        let monomials: Vec<Monomial> = (0..rng.gen_range(1..=2))
            .map(|_| {
                let mut exps = vec![0u32; arity];
                exps[rng.gen_range(0..arity)] = rng.gen_range(1..=2);
                Monomial { coeff: rat(rng.gen_range(1..=2), 1), exps }
            })
            .collect();
        let poly = Poly { arity, monomials };
        let bound = [rat(0, 1), rat(1, 4), rat(1, 2)][rng.gen_range(0..3)].clone();
        let args: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..2)).collect();
        let lit = if rng.gen_bool(0.5) {
            OsLiteral::PolyL(poly, bound, args)
        } else {
            OsLiteral::PolyM(poly, bound, args)
        };
        let i = inst(vec![lit], us);
        let got = solve(LogicKind::PolyProb, &i, &cfg).unwrap();
        match &got {
            OneStepOutcome::Sat(w) => assert!(verify(&i, w), "unsound poly witness on {:?}", i),
            OneStepOutcome::Unsat { depth_limited } => {
                // The grid is sound for SAT: a hit refutes a hard UNSAT.
                if grid_search(&i, 4).is_some() {
                    assert!(
                        depth_limited,
                        "solver claimed definite UNSAT but the grid found a witness: {:?}",
                        i
                    );
                }
            }
        }
    }
}

#[test]
fn monotone_in_successors_and_antitone_in_literals() {
    let mut rng = ChaCha8Rng::seed_from_u64(7_777);
    let kinds = [LogicKind::Kripke, LogicKind::Graded, LogicKind::Probabilistic];
    for _ in 0..300 {
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let m = rng.gen_range(0..=3);
        let mut us: Vec<Vec<usize>> =
            (0..m).map(|_| (0..2).filter(|_| rng.gen_bool(0.5)).collect()).collect();
        let mk_lit = |rng: &mut ChaCha8Rng| -> OsLiteral {
            let v = rng.gen_range(0..2);
            match kind {
                LogicKind::Kripke => {
                    if rng.gen_bool(0.5) {
                        OsLiteral::Dia(v)
                    } else {
                        OsLiteral::Box(v)
                    }
                }
                LogicKind::Graded => {
                    if rng.gen_bool(0.5) {
                        OsLiteral::GDia(rng.gen_range(0..=2), v)
                    } else {
                        OsLiteral::GBox(rng.gen_range(0..=2), v)
                    }
                }
                _ => {
                    let p = rat(rng.gen_range(0..=2), 2);
                    if rng.gen_bool(0.5) {
                        OsLiteral::PDia(p, v)
                    } else {
                        OsLiteral::PBox(p, v)
                    }
                }
            }
        };
        let literals: Vec<OsLiteral> = (0..rng.gen_range(0..=2)).map(|_| mk_lit(&mut rng)).collect();
        let base = inst(literals.clone(), us.clone());
        let base_sat = run(kind, &base).is_sat();
        // Growing U never destroys satisfiability.
        us.push((0..2).filter(|_| rng.gen_bool(0.5)).collect());
        let grown = inst(literals.clone(), us.clone());
        if base_sat {
            assert!(run(kind, &grown).is_sat(), "monotonicity in U violated: {:?}", grown);
        }
        // Adding a literal never turns UNSAT into SAT.
        let mut more = literals.clone();
        more.push(mk_lit(&mut rng));
        let bigger_v = inst(more, us);
        if !run(kind, &grown).is_sat() {
            assert!(!run(kind, &bigger_v).is_sat(), "antitonicity in v violated: {:?}", bigger_v);
        }
    }
}

#[test]
fn graded_cap_is_sound() {
    // Feasibility over {0..B} equals feasibility over {0..B+3}: compare the
    // solver against a raised-cap brute force on exhaustively small inputs.
    let u_pool = subsets(2, 2);
    for fam in subsets(u_pool.len(), 2) {
        let us: Vec<Vec<usize>> = fam.iter().map(|&i| u_pool[i].clone()).collect();
        for k1 in 0..=3u64 {
            for k2 in 0..=3u64 {
                let i = inst(vec![OsLiteral::GDia(k1, 0), OsLiteral::GBox(k2, 1)], us.clone());
                let got = run(LogicKind::Graded, &i).is_sat();
                // raised-cap enumeration
                let cap = k1 + 1 + 3;
                let m = i.successors.len();
                let mut found = false;
                let mut weights = vec![0u64; m];
                'outer: loop {
                    if verify(&i, &OneStepWitness::Multiset(weights.clone())) {
                        found = true;
                        break;
                    }
                    let mut idx = 0;
                    loop {
                        if idx == m {
                            break 'outer;
                        }
                        if weights[idx] < cap {
                            weights[idx] += 1;
                            break;
                        }
                        weights[idx] = 0;
                        idx += 1;
                    }
                }
                assert_eq!(got, found, "cap soundness broke on {:?}", i);
            }
        }
    }
}

/// Evaluates `t in [[op]](A)` over the base set {0,1,2} by wrapping the
/// lifting as a single-literal instance.
fn in_lifting(op_lit: &OsLiteral, a: &BTreeSet<usize>, t: &OneStepWitness) -> bool {
    let us: Vec<BTreeSet<usize>> = (0..3)
        .map(|i| if a.contains(&i) { [0usize].into_iter().collect() } else { BTreeSet::new() })
        .collect();
    let i = OneStepInstance { literals: vec![op_lit.clone()], successors: us };
    verify(&i, t)
}

fn all_witnesses(kind: LogicKind) -> Vec<OneStepWitness> {
    match kind {
        LogicKind::Kripke => subsets(3, 3).into_iter().map(OneStepWitness::Subset).collect(),
        LogicKind::Graded | LogicKind::Presburger => {
            let mut out = Vec::new();
            for a in 0..=4u64 {
                for b in 0..=4u64 {
                    for c in 0..=4u64 {
                        out.push(OneStepWitness::Multiset(vec![a, b, c]));
                    }
                }
            }
            out
        }
        _ => {
            // distributions over 3 points with denominator 4
            let mut out = Vec::new();
            for a in 0..=4u64 {
                for b in 0..=4 - a {
                    let c = 4 - a - b;
                    out.push(OneStepWitness::Distribution(vec![
                        Rat::new(a.into(), 4.into()),
                        Rat::new(b.into(), 4.into()),
                        Rat::new(c.into(), 4.into()),
                    ]));
                }
            }
            out
        }
    }
}

#[test]
fn liftings_are_dual_and_monotone_on_small_bases() {
    // literal, dual literal, logic
    let pairs: Vec<(OsLiteral, OsLiteral, LogicKind)> = vec![
        (OsLiteral::Dia(0), OsLiteral::Box(0), LogicKind::Kripke),
        (OsLiteral::GDia(1, 0), OsLiteral::GBox(1, 0), LogicKind::Graded),
        (OsLiteral::GDia(3, 0), OsLiteral::GBox(3, 0), LogicKind::Graded),
        (OsLiteral::PDia(rat(1, 2), 0), OsLiteral::PBox(rat(1, 2), 0), LogicKind::Probabilistic),
        (OsLiteral::PDia(rat(1, 4), 0), OsLiteral::PBox(rat(1, 4), 0), LogicKind::Probabilistic),
        (
            OsLiteral::LSum(vec![(2, 0)], 2),
            OsLiteral::MSum(vec![(2, 0)], 2),
            LogicKind::Presburger,
        ),
        (
            OsLiteral::PolyL(
                Poly { arity: 1, monomials: vec![Monomial { coeff: rat(1, 1), exps: vec![2] }] },
                rat(1, 4),
                vec![0],
            ),
            OsLiteral::PolyM(
                Poly { arity: 1, monomials: vec![Monomial { coeff: rat(1, 1), exps: vec![2] }] },
                rat(1, 4),
                vec![0],
            ),
            LogicKind::PolyProb,
        ),
    ];
    let base: BTreeSet<usize> = [0, 1, 2].into_iter().collect();
    for (lit, dual, kind) in &pairs {
        for a_vec in subsets(3, 3) {
            let a: BTreeSet<usize> = a_vec.into_iter().collect();
            let a_bar: BTreeSet<usize> = base.difference(&a).copied().collect();
            for t in all_witnesses(*kind) {
                // duality: t in [[op]](A) iff t not in [[dual op]](complement A)
                assert_eq!(
                    in_lifting(lit, &a, &t),
                    !in_lifting(dual, &a_bar, &t),
                    "duality broke for {:?} at A={:?} t={:?}",
                    lit,
                    a,
                    t
                );
                // monotonicity: A subset of B implies [[op]](A) subset [[op]](B)
                for extra in 0..3usize {
                    let mut b = a.clone();
                    b.insert(extra);
                    if in_lifting(lit, &a, &t) {
                        assert!(
                            in_lifting(lit, &b, &t),
                            "monotonicity broke for {:?} at A={:?} t={:?}",
                            lit,
                            a,
                            t
                        );
                    }
                }
            }
        }
    }
}
