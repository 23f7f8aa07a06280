//! End-to-end satisfiability pipeline: parse, run the tableau, and on SAT
//! extract a model and re-check the input formula on it before reporting.
//! A verification failure is never downgraded to a verdict; it surfaces as a
//! distinct internal error.

use crate::formula::{parse, Formula, ParseError};
use crate::logic::LogicKind;
use crate::model::{build_model, extract_pst, holds_at_root, Coalgebra};
use crate::tableau::{RunConfig, RunError, RunStats, Tableau, Verdict};

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub verdict: Verdict,
    /// Extracted and verified model; present exactly on SAT.
    pub model: Option<Coalgebra>,
    pub stats: RunStats,
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Resource(#[from] RunError),
    #[error("internal error: extracted model failed verification: {0}")]
    Verification(String),
}

/// Decides satisfiability of an already-prepared formula and verifies any SAT
/// verdict by model checking the formula on the extracted model.
pub fn decide(formula: &Formula, cfg: RunConfig) -> Result<SolveOutcome, SolveError> {
    decide_with_tableau(formula, cfg).map(|(outcome, _)| outcome)
}

/// Same as [`decide`] but hands back the engine for inspection (automata
/// dumps, graph statistics).
pub fn decide_with_tableau(
    formula: &Formula,
    cfg: RunConfig,
) -> Result<(SolveOutcome, Tableau), SolveError> {
    let kind = cfg.kind;
    let mut tableau = Tableau::new(formula, cfg);
    let verdict = tableau.run()?;
    let model = match verdict {
        Verdict::Unsat => None,
        Verdict::Sat => {
            let strategy = tableau.record_strategy()?;
            let pst = extract_pst(&tableau, &strategy)
                .map_err(|e| SolveError::Verification(e.to_string()))?;
            let model = build_model(&tableau, &pst, &strategy, kind)
                .map_err(|e| SolveError::Verification(e.to_string()))?;
            match holds_at_root(&model, formula) {
                Ok(true) => {}
                Ok(false) => {
                    return Err(SolveError::Verification(
                        "formula fails at the extracted model's root".to_string(),
                    ))
                }
                Err(e) => return Err(SolveError::Verification(e.to_string())),
            }
            Some(model)
        }
    };
    let mut stats = tableau.stats.clone();
    stats.dpa_states = tableau.dpa_states();
    Ok((SolveOutcome { verdict, model, stats }, tableau))
}

/// Parses and decides in one go.
pub fn check_satisfiability(
    text: &str,
    kind: LogicKind,
    cfg: RunConfig,
) -> Result<SolveOutcome, SolveError> {
    let formula = parse(text, kind)?;
    decide(&formula, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: LogicKind) -> RunConfig {
        RunConfig { kind, ..RunConfig::default() }
    }

    #[test]
    fn sat_verdicts_come_with_verified_models() {
        let out =
            check_satisfiability("nu X. <> X", LogicKind::Kripke, cfg(LogicKind::Kripke)).unwrap();
        assert_eq!(out.verdict, Verdict::Sat);
        let model = out.model.unwrap();
        assert!(model.len() >= 1);

        let out =
            check_satisfiability("mu X. <> X", LogicKind::Kripke, cfg(LogicKind::Kripke)).unwrap();
        assert_eq!(out.verdict, Verdict::Unsat);
        assert!(out.model.is_none());
    }

    #[test]
    fn mu_box_model_is_a_deadlock() {
        let out =
            check_satisfiability("mu X. [] X", LogicKind::Kripke, cfg(LogicKind::Kripke)).unwrap();
        assert_eq!(out.verdict, Verdict::Sat);
        let model = out.model.unwrap();
        match &model {
            Coalgebra::Kripke { succs, root, .. } => assert!(succs[*root].is_empty()),
            other => panic!("unexpected model domain {:?}", other),
        }
    }

    #[test]
    fn graded_selfloop_model_has_one_state() {
        let out = check_satisfiability(
            "nu X. (p & <1> X)",
            LogicKind::Graded,
            cfg(LogicKind::Graded),
        )
        .unwrap();
        assert_eq!(out.verdict, Verdict::Sat);
        let model = out.model.unwrap();
        assert_eq!(model.len(), 1, "multigraph semantics admits a single-state witness");
        match &model {
            Coalgebra::Multigraph { weights, .. } => {
                let total: u64 = weights[0].iter().map(|&(_, w)| w).sum();
                assert!(total > 1);
            }
            other => panic!("unexpected model domain {:?}", other),
        }
    }

    #[test]
    fn model_size_is_bounded_by_dpa_states() {
        for (src, kind) in [
            ("nu X. <> X", LogicKind::Kripke),
            ("nu X. mu Y. ((p & <> X) | <> Y)", LogicKind::Kripke),
            ("nu X. (p & <1> X)", LogicKind::Graded),
        ] {
            let out = check_satisfiability(src, kind, cfg(kind)).unwrap();
            let model = out.model.unwrap();
            assert!(model.len() <= out.stats.dpa_states, "model larger than the DPA on {src}");
        }
    }
}
