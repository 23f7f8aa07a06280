//! Satisfiability checking and model building for coalgebraic mu-calculi.
//!
//! The pipeline: parse a formula, build the nondeterministic tracking parity
//! automaton over its Fischer-Ladner closure, determinize and complement it
//! on the fly, expand the resulting graph with global caching, propagate
//! (un)satisfiability through nested fixpoints whose modal steps are decided
//! by per-logic one-step satisfiability solvers, and finally extract a
//! concrete model from the recorded strategy and re-check the input formula
//! on it. Supported logics: the standard relational mu-calculus, the graded
//! mu-calculus over multigraphs, the two-valued probabilistic mu-calculus,
//! the Presburger mu-calculus, and the probabilistic mu-calculus with
//! polynomial inequalities.

pub mod formula;
pub mod logic;
pub mod model;
pub mod omega;
pub mod onestep;
pub mod random;
pub mod solver;
pub mod tableau;
pub mod tracking;

pub use formula::{alternation_depth, nnf, parse, unfold, Closure, Formula, FormulaId};
pub use logic::{Logic, LogicKind, ModalOp, Rat};
pub use model::{build_model, extract_pst, holds_at_root, model_check, Coalgebra};
pub use solver::{check_satisfiability, decide, SolveError, SolveOutcome};
pub use tableau::{ExpansionOrder, RunConfig, RunStats, Tableau, Verdict};
