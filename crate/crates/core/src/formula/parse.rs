//! Concrete ASCII syntax.
//!
//! Grammar sketch (whitespace-insensitive, `&` binds tighter than `|`,
//! fixpoint bodies extend maximally to the right):
//!
//! ```text
//! formula  := 'mu' VAR '.' formula | 'nu' VAR '.' formula | disj
//! disj     := conj ('|' conj)*
//! conj     := prefix ('&' prefix)*
//! prefix   := '~' prefix | MODALITY prefix | nary | primary
//! primary  := 'true' | 'false' | ATOM | VAR | '(' formula ')'
//!            | 'mu' VAR '.' formula | 'nu' VAR '.' formula
//! ```
//!
//! Modalities: `<>`/`[]` (kripke), `<k>`/`[k]` with decimal `k` (graded),
//! `<p/q>`/`[p/q]` (probabilistic), `L{a1,..,an;b}(f1,..,fn)` and
//! `M{..}(..)` (presburger), `PL{poly;b}(..)`/`PM{poly;b}(..)` with `poly` a
//! sum of monomials `c*x1^e1*...` (poly-probabilistic). Atoms match
//! `[a-z][a-z0-9_]*`; fixpoint variables start with an uppercase letter.

use num_traits::{One, Signed};

use super::{check_logic, clean, nnf, validate, Formula, FormulaError};
use crate::logic::{parse_rat, LogicKind, ModalOp, Monomial, Poly, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("operator at offset {pos} not available in logic {logic}: {msg}")]
    WrongLogic { pos: usize, logic: LogicKind, msg: String },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Parses, normalizes (negation elimination, cleaning) and validates a
/// formula for the given logic.
pub fn parse(text: &str, kind: LogicKind) -> Result<Formula, ParseError> {
    let raw = parse_raw(text, kind)?;
    let prepared = clean(&nnf(&raw));
    validate(&prepared)?;
    check_logic(&prepared, kind)?;
    Ok(prepared)
}

/// Parses the concrete syntax without normalization; the result may contain
/// negation nodes.
pub fn parse_raw(text: &str, kind: LogicKind) -> Result<Formula, ParseError> {
    let mut p = Parser { input: text.as_bytes(), pos: 0, kind };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    kind: LogicKind,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn wrong_logic(&self, pos: usize, msg: &str) -> ParseError {
        ParseError::WrongLogic { pos, logic: self.kind, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        let first = *self.input.get(self.pos)?;
        if !first.is_ascii_alphabetic() {
            return None;
        }
        let mut end = self.pos + 1;
        while end < self.input.len()
            && (self.input[end].is_ascii_alphanumeric() || self.input[end] == b'_')
        {
            end += 1;
        }
        self.pos = end;
        Some(String::from_utf8_lossy(&self.input[start..end]).into_owned())
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number out of range"))
    }

    /// `p/q` or a bare integer.
    fn rational(&mut self) -> Result<Rat, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.input.len()
            && (self.input[self.pos].is_ascii_digit() || self.input[self.pos] == b'/')
        {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        parse_rat(s).ok_or_else(|| self.err("expected a rational number"))
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if let Some(f) = self.fixpoint()? {
            return Ok(f);
        }
        self.disj()
    }

    fn fixpoint(&mut self) -> Result<Option<Formula>, ParseError> {
        self.skip_ws();
        let save = self.pos;
        if let Some(word) = self.ident() {
            if word == "mu" || word == "nu" {
                let var = self.ident().ok_or_else(|| self.err("expected a fixpoint variable"))?;
                if !var.chars().next().map(|c| c.is_ascii_uppercase()).unwrap_or(false) {
                    return Err(self.err("fixpoint variables start with an uppercase letter"));
                }
                self.expect(b'.')?;
                let body = self.formula()?;
                let f = if word == "mu" {
                    Formula::Mu(var, Box::new(body))
                } else {
                    Formula::Nu(var, Box::new(body))
                };
                return Ok(Some(f));
            }
        }
        self.pos = save;
        Ok(None)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while self.eat(b'|') {
            let r = self.conj()?;
            f = Formula::or(f, r);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.prefix()?;
        while self.eat(b'&') {
            let r = self.prefix()?;
            f = Formula::and(f, r);
        }
        Ok(f)
    }

    fn prefix(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(b'~') => {
                self.pos += 1;
                Ok(Formula::neg(self.prefix()?))
            }
            Some(b'<') => {
                let pos = self.pos;
                self.pos += 1;
                let op = self.angle_op(pos, true)?;
                Ok(Formula::Modal(op, vec![self.prefix()?]))
            }
            Some(b'[') => {
                let pos = self.pos;
                self.pos += 1;
                let op = self.angle_op(pos, false)?;
                Ok(Formula::Modal(op, vec![self.prefix()?]))
            }
            _ => self.primary(),
        }
    }

    /// The operator between `<`/`[` and `>`/`]`; `dia` selects the bracket.
    fn angle_op(&mut self, pos: usize, dia: bool) -> Result<ModalOp, ParseError> {
        let close = if dia { b'>' } else { b']' };
        if self.eat(close) {
            return if self.kind == LogicKind::Kripke {
                Ok(if dia { ModalOp::Dia } else { ModalOp::Box })
            } else {
                Err(self.wrong_logic(pos, "bare <>/[] is the Kripke modality"))
            };
        }
        match self.kind {
            LogicKind::Graded | LogicKind::Presburger => {
                let k = self.number()?;
                self.expect(close)?;
                Ok(if dia { ModalOp::GDia(k) } else { ModalOp::GBox(k) })
            }
            LogicKind::Probabilistic | LogicKind::PolyProb => {
                let p = self.rational()?;
                self.expect(close)?;
                if p.is_negative() || p > Rat::from_integer(1.into()) {
                    return Err(self.err("probability threshold must lie in [0,1]"));
                }
                if self.kind == LogicKind::PolyProb {
                    // Desugar to the linear polynomial operator so the
                    // similarity type stays within PL/PM.
                    let linear = Poly {
                        arity: 1,
                        monomials: vec![Monomial { coeff: Rat::one(), exps: vec![1] }],
                    };
                    return Ok(if dia {
                        ModalOp::PolyL(linear, p)
                    } else {
                        ModalOp::PolyM(linear, p)
                    });
                }
                Ok(if dia { ModalOp::PDia(p) } else { ModalOp::PBox(p) })
            }
            LogicKind::Kripke => Err(self.wrong_logic(pos, "kripke modalities carry no parameters")),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        if let Some(f) = self.fixpoint()? {
            return Ok(f);
        }
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(b')')?;
                Ok(f)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let pos = self.pos;
                let word = self.ident().unwrap();
                match word.as_str() {
                    "true" => Ok(Formula::Top),
                    "false" => Ok(Formula::Bot),
                    "L" | "M" | "PL" | "PM" if self.peek() == Some(b'{') => {
                        self.nary_op(pos, &word)
                    }
                    _ => {
                        let first = word.chars().next().unwrap();
                        if first.is_ascii_lowercase() {
                            Ok(Formula::Atom(word, true))
                        } else {
                            Ok(Formula::Var(word))
                        }
                    }
                }
            }
            Some(c) => Err(self.err(&format!("unexpected character '{}'", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn nary_op(&mut self, pos: usize, word: &str) -> Result<Formula, ParseError> {
        self.expect(b'{')?;
        let op = match word {
            "L" | "M" => {
                if self.kind != LogicKind::Presburger {
                    return Err(self.wrong_logic(pos, "L/M operators belong to presburger"));
                }
                let mut coeffs = vec![self.number()?];
                while self.eat(b',') {
                    coeffs.push(self.number()?);
                }
                self.expect(b';')?;
                let bound = self.number()?;
                if coeffs.iter().any(|&a| a == 0) {
                    return Err(self.err("presburger coefficients must be strictly positive"));
                }
                if word == "L" {
                    ModalOp::LSum(coeffs, bound)
                } else {
                    ModalOp::MSum(coeffs, bound)
                }
            }
            _ => {
                if self.kind != LogicKind::PolyProb {
                    return Err(self.wrong_logic(pos, "PL/PM operators belong to poly-probabilistic"));
                }
                let poly = self.poly()?;
                self.expect(b';')?;
                let bound = self.rational()?;
                if bound.is_negative() {
                    return Err(self.err("polynomial bound must be non-negative"));
                }
                if !poly.positive() {
                    return Err(self.err("polynomial coefficients must be strictly positive"));
                }
                if word == "PL" {
                    ModalOp::PolyL(poly, bound)
                } else {
                    ModalOp::PolyM(poly, bound)
                }
            }
        };
        self.expect(b'}')?;
        self.expect(b'(')?;
        let mut args = vec![self.formula()?];
        while self.eat(b',') {
            args.push(self.formula()?);
        }
        self.expect(b')')?;
        if args.len() != op.arity() {
            return Err(self.err(&format!(
                "operator expects {} arguments, got {}",
                op.arity(),
                args.len()
            )));
        }
        Ok(Formula::Modal(op, args))
    }

    /// Sum of monomials `c*x1^e1*...`; the arity is the largest variable index.
    fn poly(&mut self) -> Result<Poly, ParseError> {
        let mut monomials = vec![self.monomial()?];
        while self.eat(b'+') {
            monomials.push(self.monomial()?);
        }
        let arity = monomials.iter().flat_map(|m| m.exps.iter().enumerate())
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i + 1)
            .max()
            .unwrap_or(0);
        if arity == 0 {
            return Err(self.err("polynomial must mention at least one variable"));
        }
        for m in &mut monomials {
            m.exps.resize(arity, 0);
        }
        Ok(Poly { arity, monomials })
    }

    fn monomial(&mut self) -> Result<Monomial, ParseError> {
        let coeff = self.rational()?;
        let mut exps: Vec<u32> = Vec::new();
        while self.eat(b'*') {
            self.skip_ws();
            if self.bump() != Some(b'x') {
                return Err(self.err("expected a variable like x1"));
            }
            let idx = self.number()? as usize;
            if idx == 0 {
                return Err(self.err("variable indices start at 1"));
            }
            let exp = if self.eat(b'^') { self.number()? as u32 } else { 1 };
            if exps.len() < idx {
                exps.resize(idx, 0);
            }
            exps[idx - 1] += exp;
        }
        Ok(Monomial { coeff, exps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::rat;

    #[test]
    fn parses_the_basic_example() {
        let f = parse("mu X. (p | <> X)", LogicKind::Kripke).unwrap();
        assert_eq!(
            f,
            Formula::mu("X", Formula::or(Formula::atom("p"), Formula::dia(Formula::Var("X".into()))))
        );
    }

    #[test]
    fn parses_the_fairness_formula() {
        let f = parse("nu X. mu Y. ((p & <> X) | <> Y)", LogicKind::Kripke).unwrap();
        let expected = Formula::nu(
            "X",
            Formula::mu(
                "Y",
                Formula::or(
                    Formula::and(Formula::atom("p"), Formula::dia(Formula::Var("X".into()))),
                    Formula::dia(Formula::Var("Y".into())),
                ),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn unguarded_is_an_error() {
        let e = parse("mu X. X", LogicKind::Kripke).unwrap_err();
        assert!(matches!(e, ParseError::Formula(FormulaError::Unguarded(ref x)) if x == "X"));
    }

    #[test]
    fn precedence_and_binds_tighter() {
        let f = parse("p & q | r", LogicKind::Kripke).unwrap();
        assert_eq!(f, Formula::or(Formula::and(Formula::atom("p"), Formula::atom("q")), Formula::atom("r")));
    }

    #[test]
    fn graded_and_probabilistic_operators() {
        let f = parse("<5> true & [3] false", LogicKind::Graded).unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::Modal(ModalOp::GDia(5), vec![Formula::Top]),
                Formula::Modal(ModalOp::GBox(3), vec![Formula::Bot]),
            )
        );
        let g = parse("<1/2> p & <1/2> ~p", LogicKind::Probabilistic).unwrap();
        assert_eq!(
            g,
            Formula::and(
                Formula::Modal(ModalOp::PDia(rat(1, 2)), vec![Formula::atom("p")]),
                Formula::Modal(ModalOp::PDia(rat(1, 2)), vec![Formula::Atom("p".into(), false)]),
            )
        );
    }

    #[test]
    fn presburger_and_polynomial_operators() {
        let f = parse("L{1,2;3}(p, q)", LogicKind::Presburger).unwrap();
        assert_eq!(
            f,
            Formula::Modal(ModalOp::LSum(vec![1, 2], 3), vec![Formula::atom("p"), Formula::atom("q")])
        );
        let g = parse("PL{1*x1^1*x2^1; 1/4}(p, q)", LogicKind::PolyProb).unwrap();
        match g {
            Formula::Modal(ModalOp::PolyL(poly, b), args) => {
                assert_eq!(poly.arity, 2);
                assert_eq!(poly.monomials.len(), 1);
                assert_eq!(poly.monomials[0].exps, vec![1, 1]);
                assert_eq!(b, rat(1, 4));
                assert_eq!(args.len(), 2);
            }
            other => panic!("unexpected parse {:?}", other),
        }
    }

    #[test]
    fn wrong_logic_operators_are_rejected() {
        assert!(matches!(
            parse("<> p", LogicKind::Graded),
            Err(ParseError::WrongLogic { .. })
        ));
        assert!(matches!(
            parse("<1> p", LogicKind::Kripke),
            Err(ParseError::WrongLogic { .. })
        ));
        assert!(matches!(
            parse("L{1;2}(p)", LogicKind::Kripke),
            Err(ParseError::WrongLogic { .. })
        ));
    }

    #[test]
    fn zero_coefficients_are_rejected() {
        assert!(parse("L{0;1}(p)", LogicKind::Presburger).is_err());
        assert!(parse("PL{0*x1^1; 1/2}(p)", LogicKind::PolyProb).is_err());
    }

    #[test]
    fn probability_out_of_range_is_rejected() {
        assert!(parse("<3/2> p", LogicKind::Probabilistic).is_err());
    }

    #[test]
    fn negation_is_compiled_away() {
        let f = parse("~(p & <> q)", LogicKind::Kripke).unwrap();
        assert_eq!(
            f,
            Formula::or(
                Formula::Atom("p".into(), false),
                Formula::boxx(Formula::Atom("q".into(), false))
            )
        );
    }

    #[test]
    fn syntax_error_carries_position() {
        match parse("mu X. (p |", LogicKind::Kripke) {
            Err(ParseError::Syntax { pos, .. }) => assert!(pos >= 9),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }
}
