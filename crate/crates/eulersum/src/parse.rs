//! Parsers for the expression grammar shared by the CLI and table
//! extension files.
//!
//! Series grammar (the whole input denotes `Σ_{k≥1}`):
//!
//! ```text
//! expr    := ['-'] term (('+'|'-') term)*
//! term    := atom (('*'|'/') atom)*
//! atom    := rational
//!          | 'H' '[' 'k' ['+' int] ']' ['^' ['-'] int]
//!          | kfactor ['^' ['-'] int]
//!          | '(' kgroup ('*' kgroup)* ')' ['^' ['-'] int]
//! kfactor := 'k'
//! kgroup  := kfactor ['^' int] | '(' 'k' ['+' int] ')' ['^' int] | '(' kgroup … ')'
//! rational:= int ['/' int]
//! ```
//!
//! `k` alone means shift 0 and `H[k+0]` is accepted; a `/` sends the
//! following atom into the denominator, so division chains accumulate
//! there. Harmonic factors must end up in the numerator and `k`-powers
//! in the denominator.
//!
//! Closed-form grammar:
//!
//! ```text
//! cf     := ['-'] cfterm (('+'|'-') cfterm)*
//! cfterm := cfatom ('*' cfatom)*
//! cfatom := rational | 'zeta' '(' int ')' ['^' int]
//!         | 'EulerSum' '(' int ',' int ')' | 'S' '(' int ',' int ')'
//! ```

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::closed_form::{ClosedForm, SymbolicSum, ZetaMonomial};
use crate::scalar::{from_int, Scalar};
use crate::term::{DenominatorFactor, GeneralTerm, HarmonicFactor, SeriesExpression, TermError};

/// What went wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Grammar violation.
    Syntax(String),
    /// A shift was negative (`H[k-1]`, `(k-2)`); shifts must be
    /// non-negative integers.
    NegativeShift,
}

/// A parse failure with the byte offset it occurred at.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(msg) => {
                write!(f, "parse error at position {}: {}", self.position, msg)
            }
            ParseErrorKind::NegativeShift => {
                write!(f, "shift error at position {}: shifts must be non-negative integers", self.position)
            }
        }
    }
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    /// Peek without skipping whitespace first (for tight lookahead like
    /// the `/` in a rational literal).
    fn peek_raw(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8, what: &str) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected {what}")))
        }
    }

    fn syntax(&self, msg: String) -> ParseError {
        ParseError {
            position: self.pos,
            kind: ParseErrorKind::Syntax(msg),
        }
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(c) = self.peek_raw() {
            if c.is_ascii_digit() {
                value = value
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(u64::from(c - b'0')))
                    .ok_or_else(|| self.syntax("integer literal too large".into()))?;
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.syntax("expected an integer".into()));
        }
        Ok(value)
    }

    fn small_integer(&mut self, what: &str) -> Result<u32, ParseError> {
        let v = self.integer()?;
        u32::try_from(v).map_err(|_| self.syntax(format!("{what} too large")))
    }

    /// Parses the optional `+ int` shift inside `H[k…]` or `(k…)`;
    /// a `-` is a shift error.
    fn shift(&mut self) -> Result<u32, ParseError> {
        match self.peek() {
            Some(b'+') => {
                self.bump();
                self.small_integer("shift")
            }
            Some(b'-') => Err(ParseError {
                position: self.pos,
                kind: ParseErrorKind::NegativeShift,
            }),
            _ => Ok(0),
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

/// One multiplicative atom: a rational, a harmonic factor, or a product
/// of `k`-factors.
enum Atom<T> {
    Coefficient(T),
    Harmonic { shift: u32, exponent: i64 },
    KPowers(Vec<(u32, i64)>),
}

/// Accumulates a term: net coefficient, net harmonic exponents (must end
/// positive) and net `k`-powers (counted as numerator exponents; must
/// end negative).
struct TermBuilder<T> {
    coeff: T,
    harmonics: BTreeMap<u32, i64>,
    kpowers: BTreeMap<u32, i64>,
    start: usize,
}

impl<T: Scalar> TermBuilder<T> {
    fn new(sign: T, start: usize) -> Self {
        TermBuilder {
            coeff: sign,
            harmonics: BTreeMap::new(),
            kpowers: BTreeMap::new(),
            start,
        }
    }

    fn apply(&mut self, atom: Atom<T>, inverted: bool) {
        let sign = if inverted { -1i64 } else { 1i64 };
        match atom {
            Atom::Coefficient(c) => {
                if inverted {
                    self.coeff = self.coeff.clone() / c;
                } else {
                    self.coeff = self.coeff.clone() * c;
                }
            }
            Atom::Harmonic { shift, exponent } => {
                *self.harmonics.entry(shift).or_insert(0) += sign * exponent;
            }
            Atom::KPowers(ps) => {
                for (shift, power) in ps {
                    *self.kpowers.entry(shift).or_insert(0) += sign * power;
                }
            }
        }
    }

    fn finish(self) -> Result<Option<GeneralTerm<T>>, ParseError> {
        let err = |msg: String| ParseError {
            position: self.start,
            kind: ParseErrorKind::Syntax(msg),
        };
        let mut harmonics = Vec::new();
        for (shift, exp) in self.harmonics {
            if exp < 0 {
                return Err(err("harmonic factors cannot appear in the denominator".into()));
            }
            if exp > 0 {
                let exp = u32::try_from(exp).map_err(|_| err("harmonic exponent too large".into()))?;
                harmonics.push(HarmonicFactor { shift, exponent: exp });
            }
        }
        let mut denoms = Vec::new();
        for (shift, pow) in self.kpowers {
            if pow > 0 {
                return Err(err(
                    "k-factors must appear in the denominator (or with negative exponents)".into(),
                ));
            }
            if pow < 0 {
                let p = u32::try_from(-pow).map_err(|_| err("power too large".into()))?;
                denoms.push(DenominatorFactor { shift, power: p });
            }
        }
        if self.coeff.is_zero() {
            return Ok(None);
        }
        match GeneralTerm::new(self.coeff, harmonics, denoms) {
            Ok(t) => Ok(Some(t)),
            Err(TermError::EmptyDenominator) => {
                Err(err("summand has no denominator: the series cannot converge".into()))
            }
            Err(e) => Err(err(e.to_string())),
        }
    }
}

fn parse_signed_exponent(cur: &mut Cursor) -> Result<i64, ParseError> {
    if !cur.eat(b'^') {
        return Ok(1);
    }
    let neg = cur.eat(b'-');
    let v = cur.small_integer("exponent")?;
    if v == 0 {
        return Err(cur.syntax("exponent must be nonzero".into()));
    }
    Ok(if neg { -i64::from(v) } else { i64::from(v) })
}

/// `H [ k (+int)? ] (^ int)?`
fn parse_harmonic<T: Scalar>(cur: &mut Cursor) -> Result<Atom<T>, ParseError> {
    cur.expect(b'H', "`H`")?;
    cur.expect(b'[', "`[` after H")?;
    cur.expect(b'k', "`k` inside H[..]")?;
    let shift = cur.shift()?;
    cur.expect(b']', "`]` closing H[..]")?;
    let exponent = parse_signed_exponent(cur)?;
    Ok(Atom::Harmonic { shift, exponent })
}

/// A parenthesized product of `k`-factors (possibly nested), or a single
/// `(k+a)` factor. Returns (shift, power) pairs with positive powers.
fn parse_paren_kproduct(cur: &mut Cursor) -> Result<Vec<(u32, i64)>, ParseError> {
    cur.expect(b'(', "`(`")?;
    let mut out = Vec::new();
    loop {
        match cur.peek() {
            Some(b'k') => {
                cur.bump();
                let shift = cur.shift()?;
                let exp = parse_signed_exponent(cur)?;
                out.push((shift, exp));
            }
            Some(b'(') => {
                let inner = parse_paren_kproduct(cur)?;
                out.extend(inner);
            }
            _ => return Err(cur.syntax("expected `k` or `(` in denominator product".into())),
        }
        if cur.eat(b'*') {
            continue;
        }
        cur.expect(b')', "`)` or `*` in denominator product")?;
        break;
    }
    let outer = parse_signed_exponent(cur)?;
    if outer != 1 {
        for p in &mut out {
            p.1 *= outer;
        }
    }
    Ok(out)
}

fn parse_atom<T: Scalar>(cur: &mut Cursor) -> Result<Atom<T>, ParseError> {
    match cur.peek() {
        Some(b'H') => parse_harmonic::<T>(cur),
        Some(b'k') => {
            cur.bump();
            // a bare `k+2` outside parens would be ambiguous with term
            // addition; shifts require the parenthesized form.
            let exp = parse_signed_exponent(cur)?;
            Ok(Atom::KPowers(vec![(0, exp)]))
        }
        Some(b'(') => Ok(Atom::KPowers(parse_paren_kproduct(cur)?)),
        Some(c) if c.is_ascii_digit() => {
            let n = cur.integer()?;
            let mut value: T = from_int(i64::try_from(n).map_err(|_| cur.syntax("integer too large".into()))?);
            // `p/q` is a rational literal only when a digit follows the
            // slash; otherwise the `/` belongs to the factor chain.
            if cur.peek() == Some(b'/') {
                let save = cur.pos;
                cur.bump();
                match cur.peek() {
                    Some(d) if d.is_ascii_digit() => {
                        let q = cur.integer()?;
                        if q == 0 {
                            return Err(cur.syntax("zero denominator in rational".into()));
                        }
                        value = value
                            / from_int::<T>(i64::try_from(q).map_err(|_| cur.syntax("integer too large".into()))?);
                    }
                    _ => cur.pos = save,
                }
            }
            Ok(Atom::Coefficient(value))
        }
        Some(c) => Err(cur.syntax(format!("unexpected character `{}`", c as char))),
        None => Err(cur.syntax("unexpected end of input".into())),
    }
}

fn parse_term<T: Scalar>(cur: &mut Cursor, sign: T) -> Result<Option<GeneralTerm<T>>, ParseError> {
    cur.skip_ws();
    let mut builder = TermBuilder::new(sign, cur.pos);
    let first = parse_atom::<T>(cur)?;
    builder.apply(first, false);
    loop {
        match cur.peek() {
            Some(b'*') => {
                cur.bump();
                let atom = parse_atom::<T>(cur)?;
                builder.apply(atom, false);
            }
            Some(b'/') => {
                cur.bump();
                let atom = parse_atom::<T>(cur)?;
                builder.apply(atom, true);
            }
            _ => break,
        }
    }
    builder.finish()
}

/// Parse a series expression; the result is canonical (terms merged,
/// deterministic order).
pub fn parse_series<T: Scalar>(src: &str) -> Result<SeriesExpression<T>, ParseError> {
    let mut cur = Cursor::new(src);
    let mut terms = Vec::new();
    let mut sign = if cur.eat(b'-') { -T::one() } else { T::one() };
    loop {
        if let Some(t) = parse_term::<T>(&mut cur, sign.clone())? {
            terms.push(t);
        }
        if cur.at_end() {
            break;
        }
        sign = match cur.bump() {
            Some(b'+') => T::one(),
            Some(b'-') => -T::one(),
            _ => {
                return Err(ParseError {
                    position: cur.pos - 1,
                    kind: ParseErrorKind::Syntax("expected `+` or `-` between terms".into()),
                })
            }
        };
    }
    Ok(SeriesExpression::new(terms))
}

fn parse_keyword(cur: &mut Cursor) -> Option<String> {
    cur.skip_ws();
    let start = cur.pos;
    while let Some(c) = cur.peek_raw() {
        if c.is_ascii_alphabetic() {
            cur.pos += 1;
        } else {
            break;
        }
    }
    if cur.pos == start {
        None
    } else {
        Some(String::from_utf8_lossy(&cur.src[start..cur.pos]).into_owned())
    }
}

fn parse_cf_term<T: Scalar>(cur: &mut Cursor, sign: T) -> Result<ClosedForm<T>, ParseError> {
    let mut coeff = sign;
    let mut args: Vec<u32> = Vec::new();
    let mut symbolic: Option<SymbolicSum> = None;
    loop {
        cur.skip_ws();
        match cur.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = cur.integer()?;
                let mut value: T =
                    from_int(i64::try_from(n).map_err(|_| cur.syntax("integer too large".into()))?);
                if cur.peek() == Some(b'/') {
                    cur.bump();
                    let q = cur.integer()?;
                    if q == 0 {
                        return Err(cur.syntax("zero denominator in rational".into()));
                    }
                    value = value
                        / from_int::<T>(i64::try_from(q).map_err(|_| cur.syntax("integer too large".into()))?);
                }
                coeff = coeff * value;
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let pos = cur.pos;
                let word = parse_keyword(cur).expect("alphabetic start");
                match word.as_str() {
                    "zeta" => {
                        cur.expect(b'(', "`(` after zeta")?;
                        let n = cur.small_integer("zeta argument")?;
                        if n < 2 {
                            return Err(cur.syntax("zeta argument must be at least 2".into()));
                        }
                        cur.expect(b')', "`)` closing zeta(..)")?;
                        let mut count = 1u32;
                        if cur.eat(b'^') {
                            count = cur.small_integer("exponent")?;
                            if count == 0 {
                                return Err(cur.syntax("exponent must be nonzero".into()));
                            }
                        }
                        for _ in 0..count {
                            args.push(n);
                        }
                    }
                    "EulerSum" | "S" => {
                        cur.expect(b'(', "`(`")?;
                        let a = cur.small_integer("index")?;
                        cur.expect(b',', "`,`")?;
                        let b = cur.small_integer("index")?;
                        cur.expect(b')', "`)`")?;
                        let sym = if word == "EulerSum" {
                            SymbolicSum::Power { hexp: a, npow: b }
                        } else {
                            SymbolicSum::Linear { order: a, npow: b }
                        };
                        if symbolic.replace(sym).is_some() {
                            return Err(ParseError {
                                position: pos,
                                kind: ParseErrorKind::Syntax(
                                    "products of symbolic Euler sums are not supported".into(),
                                ),
                            });
                        }
                    }
                    other => {
                        return Err(ParseError {
                            position: pos,
                            kind: ParseErrorKind::Syntax(format!("unknown name `{other}`")),
                        })
                    }
                }
            }
            _ => return Err(cur.syntax("expected a rational, zeta(..), EulerSum(..), or S(..)".into())),
        }
        if !cur.eat(b'*') {
            break;
        }
    }
    match symbolic {
        Some(sym) => {
            if !args.is_empty() {
                Err(cur.syntax("symbolic Euler sums cannot be multiplied by zeta factors".into()))
            } else {
                Ok(ClosedForm::from_symbolic(sym, coeff))
            }
        }
        None => Ok(ClosedForm::from_term(ZetaMonomial::new(args), coeff)),
    }
}

/// Parse a closed-form expression (the output language of `eval`).
pub fn parse_closed_form<T: Scalar>(src: &str) -> Result<ClosedForm<T>, ParseError> {
    let mut cur = Cursor::new(src);
    let mut out = ClosedForm::zero();
    let mut sign = if cur.eat(b'-') { -T::one() } else { T::one() };
    loop {
        let term = parse_cf_term::<T>(&mut cur, sign.clone())?;
        out = out.add(&term);
        if cur.at_end() {
            break;
        }
        sign = match cur.bump() {
            Some(b'+') => T::one(),
            Some(b'-') => -T::one(),
            _ => {
                return Err(ParseError {
                    position: cur.pos - 1,
                    kind: ParseErrorKind::Syntax("expected `+` or `-` between terms".into()),
                })
            }
        };
    }
    Ok(out)
}
