//! Summand representations.
//!
//! A [`GeneralTerm`] is `coeff · Π H_{k+m}^e · Π (k+a)^{-p}` — the raw
//! shape accepted from the parser. A [`CanonicalTerm`] is the normal form
//! `coeff · H_{k+m}^ℓ / (k+m)^n` where the harmonic shift equals the
//! denominator shift. [`SeriesExpression`] is a formal `Σ_{k≥1}` over a
//! merged list of general terms.
//!
//! Everything here is immutable after construction and exact; shifts are
//! non-negative by type.

use std::fmt;

use thiserror::Error;

use crate::scalar::{pow_u32, Scalar};
use crate::table::harmonic_number;

/// Errors raised by term constructors.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    /// A stored term must have a nonzero coefficient.
    #[error("term coefficient is zero")]
    ZeroCoefficient,
    /// A summand must decay: the denominator list cannot be empty.
    #[error("term has no denominator factors")]
    EmptyDenominator,
    /// Harmonic exponents and denominator powers start at one.
    #[error("factor exponent must be at least 1")]
    ZeroExponent,
}

/// `H_{k+shift}^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HarmonicFactor {
    pub shift: u32,
    pub exponent: u32,
}

impl HarmonicFactor {
    pub fn new(shift: u32, exponent: u32) -> Result<Self, TermError> {
        if exponent == 0 {
            return Err(TermError::ZeroExponent);
        }
        Ok(Self { shift, exponent })
    }
}

/// `(k+shift)^power` in the denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DenominatorFactor {
    pub shift: u32,
    pub power: u32,
}

impl DenominatorFactor {
    pub fn new(shift: u32, power: u32) -> Result<Self, TermError> {
        if power == 0 {
            return Err(TermError::ZeroExponent);
        }
        Ok(Self { shift, power })
    }
}

/// A single summand `coeff · Π H_{k+mᵢ}^{eᵢ} / Π (k+aⱼ)^{pⱼ}`.
///
/// Factor lists are sorted by shift and hold at most one factor per
/// shift; repeated shifts passed to [`GeneralTerm::new`] are merged by
/// adding exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralTerm<T> {
    coeff: T,
    harmonics: Vec<HarmonicFactor>,
    denoms: Vec<DenominatorFactor>,
}

/// Sort by shift, merging duplicates by adding exponents.
fn merge_sorted<F, G>(mut factors: Vec<(u32, u32)>, make: F) -> Vec<G>
where
    F: Fn(u32, u32) -> G,
{
    factors.sort_unstable();
    let mut out: Vec<(u32, u32)> = Vec::with_capacity(factors.len());
    for (shift, exp) in factors {
        match out.last_mut() {
            Some(last) if last.0 == shift => last.1 += exp,
            _ => out.push((shift, exp)),
        }
    }
    out.into_iter().map(|(s, e)| make(s, e)).collect()
}

impl<T: Scalar> GeneralTerm<T> {
    pub fn new(
        coeff: T,
        harmonics: Vec<HarmonicFactor>,
        denoms: Vec<DenominatorFactor>,
    ) -> Result<Self, TermError> {
        if coeff.is_zero() {
            return Err(TermError::ZeroCoefficient);
        }
        if denoms.is_empty() {
            return Err(TermError::EmptyDenominator);
        }
        if harmonics.iter().any(|h| h.exponent == 0) || denoms.iter().any(|d| d.power == 0) {
            return Err(TermError::ZeroExponent);
        }
        let harmonics = merge_sorted(
            harmonics.into_iter().map(|h| (h.shift, h.exponent)).collect(),
            |shift, exponent| HarmonicFactor { shift, exponent },
        );
        let denoms = merge_sorted(
            denoms.into_iter().map(|d| (d.shift, d.power)).collect(),
            |shift, power| DenominatorFactor { shift, power },
        );
        Ok(Self {
            coeff,
            harmonics,
            denoms,
        })
    }

    pub fn coeff(&self) -> &T {
        &self.coeff
    }

    pub fn harmonics(&self) -> &[HarmonicFactor] {
        &self.harmonics
    }

    pub fn denoms(&self) -> &[DenominatorFactor] {
        &self.denoms
    }

    /// Total harmonic degree `Σ eᵢ`; drives the normalizer's pass bound.
    pub fn harmonic_degree(&self) -> u32 {
        self.harmonics.iter().map(|h| h.exponent).sum()
    }

    /// The factor structure without the coefficient, used to merge terms.
    pub fn signature(&self) -> (Vec<(u32, u32)>, Vec<(u32, u32)>) {
        (
            self.harmonics.iter().map(|h| (h.shift, h.exponent)).collect(),
            self.denoms.iter().map(|d| (d.shift, d.power)).collect(),
        )
    }

    /// Same factors, different coefficient.
    pub fn with_coeff(&self, coeff: T) -> Result<Self, TermError> {
        Self::new(coeff, self.harmonics.clone(), self.denoms.clone())
    }

    /// Exact value of the summand at index `k ≥ 1`.
    pub fn eval_at(&self, k: u64) -> T {
        let mut value = self.coeff.clone();
        for h in &self.harmonics {
            let hv: T = harmonic_number(k + u64::from(h.shift));
            value = value * pow_u32(&hv, h.exponent);
        }
        for d in &self.denoms {
            let base: T = crate::scalar::from_int(
                i64::try_from(k + u64::from(d.shift)).expect("index fits i64"),
            );
            value = value / pow_u32(&base, d.power);
        }
        value
    }
}

/// The normal form `coeff · H_{k+m}^ℓ / (k+m)^n`.
///
/// When `hexp ≥ 1` the harmonic shift equals the denominator shift by
/// construction; `hexp = 0` is a pure rational term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalTerm<T> {
    pub coeff: T,
    /// Harmonic exponent ℓ ≥ 0.
    pub hexp: u32,
    /// Common shift m ≥ 0.
    pub shift: u32,
    /// Denominator power n ≥ 1.
    pub npow: u32,
}

impl<T: Scalar> CanonicalTerm<T> {
    pub fn new(coeff: T, hexp: u32, shift: u32, npow: u32) -> Result<Self, TermError> {
        if coeff.is_zero() {
            return Err(TermError::ZeroCoefficient);
        }
        if npow == 0 {
            return Err(TermError::ZeroExponent);
        }
        Ok(Self {
            coeff,
            hexp,
            shift,
            npow,
        })
    }

    /// Exact value of the summand at index `k ≥ 1`.
    pub fn eval_at(&self, k: u64) -> T {
        let j = k + u64::from(self.shift);
        let mut value = self.coeff.clone();
        if self.hexp > 0 {
            let hv: T = harmonic_number(j);
            value = value * pow_u32(&hv, self.hexp);
        }
        let base: T = crate::scalar::from_int(i64::try_from(j).expect("index fits i64"));
        value / pow_u32(&base, self.npow)
    }

    /// View as a general term (for re-normalization or series embedding).
    pub fn to_general(&self) -> GeneralTerm<T> {
        let harmonics = if self.hexp > 0 {
            vec![HarmonicFactor {
                shift: self.shift,
                exponent: self.hexp,
            }]
        } else {
            Vec::new()
        };
        GeneralTerm::new(
            self.coeff.clone(),
            harmonics,
            vec![DenominatorFactor {
                shift: self.shift,
                power: self.npow,
            }],
        )
        .expect("canonical term is a valid general term")
    }
}

/// A formal series `Σ_{k≥1}` of general terms.
///
/// Terms with the same factor signature are merged on construction and
/// zero-coefficient terms dropped; term order is deterministic
/// (lexicographic in the signature).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesExpression<T> {
    terms: Vec<GeneralTerm<T>>,
}

impl<T: Scalar> SeriesExpression<T> {
    pub fn new(terms: Vec<GeneralTerm<T>>) -> Self {
        let mut tagged: Vec<(_, GeneralTerm<T>)> =
            terms.into_iter().map(|t| (t.signature(), t)).collect();
        tagged.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<GeneralTerm<T>> = Vec::with_capacity(tagged.len());
        for (sig, term) in tagged {
            match merged.last_mut() {
                Some(last) if last.signature() == sig => {
                    last.coeff = last.coeff.clone() + term.coeff;
                }
                _ => merged.push(term),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        Self { terms: merged }
    }

    pub fn terms(&self) -> &[GeneralTerm<T>] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact value of the full summand at index `k ≥ 1`.
    pub fn eval_at(&self, k: u64) -> T {
        self.terms
            .iter()
            .fold(T::zero(), |acc, t| acc + t.eval_at(k))
    }

    /// `scale · self` (empty when `scale = 0`).
    pub fn scale(&self, scale: &T) -> Self {
        if scale.is_zero() {
            return Self { terms: Vec::new() };
        }
        Self::new(
            self.terms
                .iter()
                .map(|t| t.with_coeff(t.coeff.clone() * scale.clone()).expect("nonzero"))
                .collect(),
        )
    }

    /// `self + other`, merged.
    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(terms)
    }
}

fn write_harmonic(f: &mut fmt::Formatter<'_>, h: &HarmonicFactor) -> fmt::Result {
    if h.shift == 0 {
        write!(f, "H[k]")?;
    } else {
        write!(f, "H[k+{}]", h.shift)?;
    }
    if h.exponent > 1 {
        write!(f, "^{}", h.exponent)?;
    }
    Ok(())
}

fn write_denom_factor(f: &mut fmt::Formatter<'_>, d: &DenominatorFactor) -> fmt::Result {
    if d.shift == 0 {
        write!(f, "k")?;
    } else {
        write!(f, "(k+{})", d.shift)?;
    }
    if d.power > 1 {
        write!(f, "^{}", d.power)?;
    }
    Ok(())
}

/// Prints the term with `|coeff|`; the sign is handled by the series
/// printer. A bare term prints its own minus sign.
fn write_term_magnitude<T: Scalar>(f: &mut fmt::Formatter<'_>, t: &GeneralTerm<T>) -> fmt::Result {
    let c = t.coeff().abs();
    if !c.is_one() {
        write!(f, "{}*", c)?;
    }
    if t.harmonics().is_empty() {
        write!(f, "1")?;
    } else {
        for (i, h) in t.harmonics().iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write_harmonic(f, h)?;
        }
    }
    write!(f, "/")?;
    if t.denoms().len() == 1 {
        write_denom_factor(f, &t.denoms()[0])
    } else {
        write!(f, "(")?;
        for (i, d) in t.denoms().iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write_denom_factor(f, d)?;
        }
        write!(f, ")")
    }
}

impl<T: Scalar> fmt::Display for GeneralTerm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_negative() {
            write!(f, "-")?;
        }
        write_term_magnitude(f, self)
    }
}

impl<T: Scalar> fmt::Display for CanonicalTerm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_general().fmt(f)
    }
}

impl<T: Scalar> fmt::Display for SeriesExpression<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i == 0 {
                write!(f, "{}", t)?;
            } else if t.coeff().is_negative() {
                write!(f, " - ")?;
                write_term_magnitude(f, t)?;
            } else {
                write!(f, " + ")?;
                write_term_magnitude(f, t)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{from_int, from_ratio};
    use crate::Rational;

    fn h(shift: u32, exponent: u32) -> HarmonicFactor {
        HarmonicFactor::new(shift, exponent).unwrap()
    }

    fn d(shift: u32, power: u32) -> DenominatorFactor {
        DenominatorFactor::new(shift, power).unwrap()
    }

    #[test]
    fn constructor_validates() {
        assert_eq!(
            GeneralTerm::<Rational>::new(from_int(0), vec![], vec![d(0, 1)]).unwrap_err(),
            TermError::ZeroCoefficient
        );
        assert_eq!(
            GeneralTerm::<Rational>::new(from_int(1), vec![], vec![]).unwrap_err(),
            TermError::EmptyDenominator
        );
        assert_eq!(HarmonicFactor::new(2, 0).unwrap_err(), TermError::ZeroExponent);
    }

    #[test]
    fn duplicate_shifts_merge() {
        let t = GeneralTerm::<Rational>::new(
            from_int(1),
            vec![h(1, 1), h(0, 2), h(1, 3)],
            vec![d(0, 1), d(0, 2)],
        )
        .unwrap();
        assert_eq!(t.harmonics(), &[h(0, 2), h(1, 4)]);
        assert_eq!(t.denoms(), &[d(0, 3)]);
        assert_eq!(t.harmonic_degree(), 6);
    }

    #[test]
    fn eval_hk_over_k_at_two() {
        // H_2/2 = (3/2)/2
        let t = GeneralTerm::<Rational>::new(from_int(1), vec![h(0, 1)], vec![d(0, 1)]).unwrap();
        assert_eq!(t.eval_at(2), from_ratio(3, 4));
    }

    #[test]
    fn eval_unit_telescoper_at_one() {
        // 1/(k(k+1)) at k=1 is 1/2
        let t = GeneralTerm::<Rational>::new(from_int(1), vec![], vec![d(0, 1), d(1, 1)]).unwrap();
        assert_eq!(t.eval_at(1), from_ratio(1, 2));
    }

    #[test]
    fn eval_quartic_consecutive_at_one() {
        // H_1 H_2 H_3 H_4 / 4! = (1 · 3/2 · 11/6 · 25/12)/24 = 275/1152
        let t = GeneralTerm::<Rational>::new(
            from_int(1),
            vec![h(0, 1), h(1, 1), h(2, 1), h(3, 1)],
            vec![d(0, 1), d(1, 1), d(2, 1), d(3, 1)],
        )
        .unwrap();
        assert_eq!(t.eval_at(1), from_ratio(275, 1152));
    }

    #[test]
    fn series_merges_and_drops_zero() {
        let a = GeneralTerm::<Rational>::new(from_int(2), vec![h(0, 1)], vec![d(0, 1)]).unwrap();
        let b = GeneralTerm::<Rational>::new(from_int(-2), vec![h(0, 1)], vec![d(0, 1)]).unwrap();
        let c = GeneralTerm::<Rational>::new(from_int(1), vec![], vec![d(1, 2)]).unwrap();
        let s = SeriesExpression::new(vec![a, b, c.clone()]);
        assert_eq!(s.terms(), &[c]);
    }

    #[test]
    fn display_round_shapes() {
        let t = GeneralTerm::<Rational>::new(
            from_ratio(-11, 24),
            vec![h(0, 1)],
            vec![d(0, 1)],
        )
        .unwrap();
        assert_eq!(t.to_string(), "-11/24*H[k]/k");
        let u = GeneralTerm::<Rational>::new(
            from_int(1),
            vec![h(1, 2), h(3, 1)],
            vec![d(1, 2), d(2, 1)],
        )
        .unwrap();
        assert_eq!(u.to_string(), "H[k+1]^2*H[k+3]/((k+1)^2*(k+2))");
        let v = GeneralTerm::<Rational>::new(from_int(1), vec![], vec![d(0, 1), d(1, 1)]).unwrap();
        assert_eq!(v.to_string(), "1/(k*(k+1))");
    }
}
