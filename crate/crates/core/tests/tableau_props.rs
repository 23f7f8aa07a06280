//! Propagation properties over random runs: monotone growth of the decided
//! sets, disjointness, early-verdict stability, and the `f`/`g` duality on
//! fully expanded graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use musat_core::random::{random_formula, GenConfig};
use musat_core::tableau::{RunConfig, Tableau};
use musat_core::LogicKind;

const LOGICS: [LogicKind; 5] = [
    LogicKind::Kripke,
    LogicKind::Graded,
    LogicKind::Probabilistic,
    LogicKind::Presburger,
    LogicKind::PolyProb,
];

fn gen_formula(rng: &mut ChaCha8Rng, kind: LogicKind, max_n: usize) -> musat_core::Formula {
    let mut cfg = GenConfig::new(kind, 7);
    cfg.max_depth = Some(2);
    loop {
        let f = random_formula(rng, &cfg);
        if f.size() <= max_n {
            return f;
        }
    }
}

#[test]
fn per_expansion_propagation_is_monotone_disjoint_and_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    for round in 0..50 {
        let kind = LOGICS[round % LOGICS.len()];
        let f = gen_formula(&mut rng, kind, 10);
        let eager = RunConfig {
            kind,
            propagation_interval: 1,
            record_passes: true,
            ..RunConfig::default()
        };
        let mut t = Tableau::new(&f, eager);
        let early = t.run().expect("within caps");
        let passes = t.passes();
        for w in passes.windows(2) {
            assert!(
                w[0].sat.iter().all(|id| w[1].sat.contains(id)),
                "E shrank on {f} ({kind})"
            );
            assert!(
                w[0].unsat.iter().all(|id| w[1].unsat.contains(id)),
                "A shrank on {f} ({kind})"
            );
        }
        for p in passes {
            assert!(
                p.sat.iter().all(|id| !p.unsat.contains(id)),
                "E and A intersect on {f} ({kind})"
            );
        }
        // The early verdict matches a pure final-propagation run.
        let lazy = RunConfig { kind, propagation_interval: 0, ..RunConfig::default() };
        let mut t2 = Tableau::new(&f, lazy);
        let fin = t2.run().expect("within caps");
        assert_eq!(early, fin, "early verdict differs from final on {f} ({kind})");
    }
}

#[test]
fn g_is_the_dual_of_f_on_fully_expanded_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd0a1);
    for round in 0..20 {
        let kind = LOGICS[round % LOGICS.len()];
        let f = gen_formula(&mut rng, kind, 9);
        let cfg = RunConfig { kind, propagation_interval: 0, ..RunConfig::default() };
        let mut t = Tableau::new(&f, cfg);
        let _ = t.run().expect("within caps");
        let levels = t.occurring_priorities();
        let n = t.node_count();
        let expanded: Vec<bool> = (0..n as u32).map(|id| t.node_expanded(id)).collect();
        for _ in 0..5 {
            let x: Vec<Vec<bool>> = levels
                .iter()
                .map(|_| (0..n).map(|i| expanded[i] && rng.gen_bool(0.5)).collect())
                .collect();
            let complements: Vec<Vec<bool>> = x
                .iter()
                .map(|xs| (0..n).map(|i| expanded[i] && !xs[i]).collect())
                .collect();
            let g = t.eval_g(&levels, &x);
            let f_compl = t.eval_f(&levels, &complements);
            for i in 0..n {
                if !expanded[i] {
                    continue;
                }
                assert_eq!(
                    g[i],
                    !f_compl[i],
                    "duality broke at node {i} on {f} ({kind})"
                );
            }
        }
    }
}

#[test]
fn expansion_orders_agree_on_the_verdict() {
    use musat_core::ExpansionOrder;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bde);
    for round in 0..15 {
        let kind = LOGICS[round % LOGICS.len()];
        let f = gen_formula(&mut rng, kind, 9);
        let mut verdicts = Vec::new();
        for order in [ExpansionOrder::Fifo, ExpansionOrder::Dfs, ExpansionOrder::PrestateFirst] {
            let cfg = RunConfig { kind, order, ..RunConfig::default() };
            let mut t = Tableau::new(&f, cfg);
            verdicts.push(t.run().expect("within caps"));
        }
        assert!(
            verdicts.windows(2).all(|w| w[0] == w[1]),
            "orders disagree on {f} ({kind}): {verdicts:?}"
        );
    }
}
