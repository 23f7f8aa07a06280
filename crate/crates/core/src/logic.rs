//! Logics, modal operators and their predicate liftings.
//!
//! Each supported logic fixes a branching type (plain successor sets,
//! integer-weighted multigraphs, or rational Markov chains) together with a
//! modal similarity type that is closed under duals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational number used for probabilistic thresholds and weights.
pub type Rat = BigRational;

/// Builds a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational as `p/q` (or `p` when the denominator is 1).
pub fn rat_str(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q` or a bare integer into a rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().ok()?;
            let den: BigInt = den.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(BigRational::new(num, den))
        }
        None => {
            let num: BigInt = s.parse().ok()?;
            Some(BigRational::from_integer(num))
        }
    }
}

/// The five concrete logics supported by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogicKind {
    /// Standard mu-calculus over Kripke frames.
    Kripke,
    /// Graded mu-calculus over multigraphs.
    Graded,
    /// Two-valued probabilistic mu-calculus over Markov chains.
    Probabilistic,
    /// Graded mu-calculus extended with linear (Presburger) constraints.
    Presburger,
    /// Probabilistic mu-calculus extended with polynomial inequalities.
    PolyProb,
}

impl LogicKind {
    pub fn name(self) -> &'static str {
        match self {
            LogicKind::Kripke => "kripke",
            LogicKind::Graded => "graded",
            LogicKind::Probabilistic => "probabilistic",
            LogicKind::Presburger => "presburger",
            LogicKind::PolyProb => "poly-probabilistic",
        }
    }

    pub fn parse(s: &str) -> Option<LogicKind> {
        match s {
            "kripke" => Some(LogicKind::Kripke),
            "graded" => Some(LogicKind::Graded),
            "probabilistic" => Some(LogicKind::Probabilistic),
            "presburger" => Some(LogicKind::Presburger),
            "poly-probabilistic" | "poly-prob" | "polynomial" => Some(LogicKind::PolyProb),
            _ => None,
        }
    }

    /// Multigraph-valued logics share their semantic domain, as do the
    /// distribution-valued ones.
    pub fn is_weighted(self) -> bool {
        matches!(self, LogicKind::Graded | LogicKind::Presburger)
    }

    pub fn is_probabilistic(self) -> bool {
        matches!(self, LogicKind::Probabilistic | LogicKind::PolyProb)
    }
}

impl fmt::Display for LogicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A logic instance: a kind plus the finite set of propositional atoms in use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Logic {
    pub kind: LogicKind,
    pub atoms: Vec<String>,
}

impl Logic {
    pub fn new(kind: LogicKind) -> Logic {
        Logic { kind, atoms: Vec::new() }
    }
}

/// A monomial `c * x1^e1 * ... * xn^en` with a positive rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: Rat,
    /// Exponent per argument position; length equals the operator arity.
    pub exps: Vec<u32>,
}

/// A polynomial with positive rational coefficients in `arity` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    pub arity: usize,
    pub monomials: Vec<Monomial>,
}

impl Poly {
    /// Evaluates the polynomial at a point with exact rational arithmetic.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        debug_assert_eq!(point.len(), self.arity);
        let mut acc = Rat::zero();
        for m in &self.monomials {
            let mut term = m.coeff.clone();
            for (x, &e) in point.iter().zip(m.exps.iter()) {
                for _ in 0..e {
                    term *= x;
                }
            }
            acc += term;
        }
        acc
    }

    /// All coefficients strictly positive; needed for monotonicity.
    pub fn positive(&self) -> bool {
        self.monomials.iter().all(|m| m.coeff.is_positive())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.monomials.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{}", rat_str(&m.coeff))?;
            for (j, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    write!(f, "*x{}^{}", j + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

/// A modal operator together with its logic-specific parameters.
///
/// `Dia`/`Box` are the Kripke modalities; `GDia(k)`/`GBox(k)` the graded
/// threshold operators; `PDia(p)`/`PBox(p)` their probabilistic analogues;
/// `LSum`/`MSum` the n-ary Presburger operators, and `PolyL`/`PolyM` the
/// polynomial inequality operators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModalOp {
    Dia,
    Box,
    GDia(u64),
    GBox(u64),
    PDia(Rat),
    PBox(Rat),
    LSum(Vec<u64>, u64),
    MSum(Vec<u64>, u64),
    PolyL(Poly, Rat),
    PolyM(Poly, Rat),
}

impl ModalOp {
    pub fn kind(&self) -> LogicKind {
        match self {
            ModalOp::Dia | ModalOp::Box => LogicKind::Kripke,
            ModalOp::GDia(_) | ModalOp::GBox(_) => LogicKind::Graded,
            ModalOp::PDia(_) | ModalOp::PBox(_) => LogicKind::Probabilistic,
            ModalOp::LSum(..) | ModalOp::MSum(..) => LogicKind::Presburger,
            ModalOp::PolyL(..) | ModalOp::PolyM(..) => LogicKind::PolyProb,
        }
    }

    /// Number of argument formulas.
    pub fn arity(&self) -> usize {
        match self {
            ModalOp::LSum(coeffs, _) | ModalOp::MSum(coeffs, _) => coeffs.len(),
            ModalOp::PolyL(p, _) | ModalOp::PolyM(p, _) => p.arity,
            _ => 1,
        }
    }

    /// The dual operator; `dual(dual(op)) == op`.
    pub fn dual(&self) -> ModalOp {
        match self {
            ModalOp::Dia => ModalOp::Box,
            ModalOp::Box => ModalOp::Dia,
            ModalOp::GDia(k) => ModalOp::GBox(*k),
            ModalOp::GBox(k) => ModalOp::GDia(*k),
            ModalOp::PDia(p) => ModalOp::PBox(p.clone()),
            ModalOp::PBox(p) => ModalOp::PDia(p.clone()),
            ModalOp::LSum(a, b) => ModalOp::MSum(a.clone(), *b),
            ModalOp::MSum(a, b) => ModalOp::LSum(a.clone(), *b),
            ModalOp::PolyL(p, b) => ModalOp::PolyM(p.clone(), b.clone()),
            ModalOp::PolyM(p, b) => ModalOp::PolyL(p.clone(), b.clone()),
        }
    }

    /// Representation size of the operator: numeric parameters count in
    /// binary, polynomials by their coefficient list.
    pub fn rep_size(&self) -> usize {
        fn bits(k: u64) -> usize {
            (64 - k.leading_zeros()).max(1) as usize
        }
        fn rat_bits(r: &Rat) -> usize {
            (r.numer().bits().max(1) + r.denom().bits().max(1)) as usize
        }
        match self {
            ModalOp::Dia | ModalOp::Box => 1,
            ModalOp::GDia(k) | ModalOp::GBox(k) => 1 + bits(*k),
            ModalOp::PDia(p) | ModalOp::PBox(p) => 1 + rat_bits(p),
            ModalOp::LSum(coeffs, b) | ModalOp::MSum(coeffs, b) => {
                1 + bits(*b) + coeffs.iter().map(|&a| bits(a)).sum::<usize>()
            }
            ModalOp::PolyL(p, b) | ModalOp::PolyM(p, b) => {
                1 + rat_bits(b)
                    + p.monomials
                        .iter()
                        .map(|m| 1 + rat_bits(&m.coeff) + m.exps.iter().map(|&e| e as usize).sum::<usize>())
                        .sum::<usize>()
            }
        }
    }
}

impl fmt::Display for ModalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModalOp::Dia => write!(f, "<>"),
            ModalOp::Box => write!(f, "[]"),
            ModalOp::GDia(k) => write!(f, "<{}>", k),
            ModalOp::GBox(k) => write!(f, "[{}]", k),
            ModalOp::PDia(p) => write!(f, "<{}>", rat_str(p)),
            ModalOp::PBox(p) => write!(f, "[{}]", rat_str(p)),
            ModalOp::LSum(a, b) | ModalOp::MSum(a, b) => {
                let tag = if matches!(self, ModalOp::LSum(..)) { "L" } else { "M" };
                let list = a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                write!(f, "{}{{{};{}}}", tag, list, b)
            }
            ModalOp::PolyL(p, b) | ModalOp::PolyM(p, b) => {
                let tag = if matches!(self, ModalOp::PolyL(..)) { "PL" } else { "PM" };
                write!(f, "{}{{{};{}}}", tag, p, rat_str(b))
            }
        }
    }
}
