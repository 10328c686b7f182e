//! Closed-form values: rational constant + rational combinations of zeta
//! monomials + named Euler-sum constants.
//!
//! Products of zeta values are kept as monomials — `ζ(2)²` is *not*
//! rewritten to `(5/2)ζ(4)` — and equality is structural. Whether the
//! engine's output is expressible over single zeta values is exactly the
//! open question this machinery must not decide silently; the π-form
//! reduction of even arguments is opt-in.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::json;
use thiserror::Error;

use crate::bernoulli::{even_zeta_product_ratio, zeta_even_pi_coeff};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClosedFormError {
    /// Products involving symbolic Euler-sum constants are not defined.
    #[error("cannot multiply closed forms carrying symbolic Euler sums")]
    UnsupportedProduct,
    /// π-reduction requires a form free of symbolic constants.
    #[error("cannot reduce a closed form carrying symbolic Euler sums to pi powers")]
    SymbolicPiReduction,
}

/// A product `ζ(a₁)⋯ζ(a_r)` as a sorted multiset; the empty product is
/// the rational unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZetaMonomial(Vec<u32>);

impl ZetaMonomial {
    /// The rational unit (empty product).
    pub fn unit() -> Self {
        ZetaMonomial(Vec::new())
    }

    /// A single `ζ(n)`, `n ≥ 2`.
    pub fn zeta(n: u32) -> Self {
        assert!(n >= 2, "zeta argument must be at least 2");
        ZetaMonomial(vec![n])
    }

    /// A product of zeta values; all arguments must be at least 2.
    pub fn new(mut args: Vec<u32>) -> Self {
        assert!(args.iter().all(|&a| a >= 2), "zeta argument must be at least 2");
        args.sort_unstable();
        ZetaMonomial(args)
    }

    pub fn args(&self) -> &[u32] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    /// Multiset union.
    pub fn product(&self, other: &Self) -> Self {
        let mut args = self.0.clone();
        args.extend_from_slice(&other.0);
        args.sort_unstable();
        ZetaMonomial(args)
    }
}

/// A named Euler-sum constant kept symbolic because no zeta-value
/// reduction is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolicSum {
    /// `Σ_k H_k^ℓ / k^n` (power of the ordinary harmonic number).
    Power { hexp: u32, npow: u32 },
    /// `Σ_k H_k^{(order)} / k^n` (generalized harmonic number
    /// `H_k^{(r)} = Σ_{j≤k} j^{-r}`), the classical linear sum `S_{m,n}`.
    Linear { order: u32, npow: u32 },
}

impl fmt::Display for SymbolicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolicSum::Power { hexp, npow } => write!(f, "EulerSum({hexp},{npow})"),
            SymbolicSum::Linear { order, npow } => write!(f, "S({order},{npow})"),
        }
    }
}

/// Output style for [`ClosedForm::format`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatStyle {
    Text,
    Latex,
    Json,
}

/// Rational constant + zeta monomials + symbolic Euler sums, merged with
/// no zero coefficients stored. Equality is structural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedForm<T> {
    terms: BTreeMap<ZetaMonomial, T>,
    symbolic: BTreeMap<SymbolicSum, T>,
}

impl<T: Scalar> Default for ClosedForm<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> ClosedForm<T> {
    pub fn zero() -> Self {
        ClosedForm {
            terms: BTreeMap::new(),
            symbolic: BTreeMap::new(),
        }
    }

    pub fn from_rational(value: T) -> Self {
        let mut cf = Self::zero();
        cf.add_term(ZetaMonomial::unit(), value);
        cf
    }

    /// `coeff · ζ(n)`.
    pub fn zeta(n: u32) -> Self {
        let mut cf = Self::zero();
        cf.add_term(ZetaMonomial::zeta(n), T::one());
        cf
    }

    pub fn from_term(monomial: ZetaMonomial, coeff: T) -> Self {
        let mut cf = Self::zero();
        cf.add_term(monomial, coeff);
        cf
    }

    pub fn from_symbolic(key: SymbolicSum, coeff: T) -> Self {
        let mut cf = Self::zero();
        cf.add_symbolic(key, coeff);
        cf
    }

    fn add_term(&mut self, monomial: ZetaMonomial, coeff: T) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(monomial).or_insert_with(T::zero);
        *slot = slot.clone() + coeff;
        self.terms.retain(|_, c| !c.is_zero());
    }

    fn add_symbolic(&mut self, key: SymbolicSum, coeff: T) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.symbolic.entry(key).or_insert_with(T::zero);
        *slot = slot.clone() + coeff;
        self.symbolic.retain(|_, c| !c.is_zero());
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.symbolic.is_empty()
    }

    /// The coefficient of the empty monomial.
    pub fn rational_part(&self) -> T {
        self.terms
            .get(&ZetaMonomial::unit())
            .cloned()
            .unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ZetaMonomial, &T)> {
        self.terms.iter()
    }

    pub fn symbolic_terms(&self) -> impl Iterator<Item = (&SymbolicSum, &T)> {
        self.symbolic.iter()
    }

    pub fn has_symbolic(&self) -> bool {
        !self.symbolic.is_empty()
    }

    /// The form with all symbolic terms removed.
    pub fn zeta_part(&self) -> Self {
        ClosedForm {
            terms: self.terms.clone(),
            symbolic: BTreeMap::new(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        for (k, c) in &other.symbolic {
            out.add_symbolic(*k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        ClosedForm {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
            symbolic: self
                .symbolic
                .iter()
                .map(|(k, c)| (*k, -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: &T) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        ClosedForm {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * factor.clone()))
                .collect(),
            symbolic: self
                .symbolic
                .iter()
                .map(|(k, c)| (*k, c.clone() * factor.clone()))
                .collect(),
        }
    }

    /// Exact product; monomials multiply by multiset union. Fails if
    /// either operand carries symbolic constants.
    pub fn mul(&self, other: &Self) -> Result<Self, ClosedFormError> {
        if self.has_symbolic() || other.has_symbolic() {
            return Err(ClosedFormError::UnsupportedProduct);
        }
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.product(mb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    /// Collapse every monomial consisting solely of even zeta arguments
    /// (with at least two factors) into the single zeta value of the
    /// total weight, e.g. `ζ(2)² → (5/2)ζ(4)`. This is the conventional
    /// representative used by the Euler-sum table; it is *not* applied
    /// implicitly anywhere else.
    pub fn fold_even_zeta_products(&self) -> Self {
        let mut out = ClosedForm {
            terms: BTreeMap::new(),
            symbolic: self.symbolic.clone(),
        };
        for (m, c) in &self.terms {
            let args = m.args();
            if args.len() >= 2 && args.iter().all(|a| a % 2 == 0) {
                // fold pairwise: ζ(a)ζ(b) = ratio · ζ(a+b)
                let mut weight = args[0];
                let mut ratio = T::one();
                for &a in &args[1..] {
                    ratio = ratio * even_zeta_product_ratio::<T>(weight, a);
                    weight += a;
                }
                out.add_term(ZetaMonomial::zeta(weight), c.clone() * ratio);
            } else {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Replace each even `ζ(2n)` factor by its exact rational multiple of
    /// `π^{2n}`. The input must be free of symbolic constants.
    pub fn even_zeta_to_pi(&self) -> Result<PiForm<T>, ClosedFormError> {
        if self.has_symbolic() {
            return Err(ClosedFormError::SymbolicPiReduction);
        }
        let mut out = PiForm {
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            let mut pi_pow = 0u32;
            let mut coeff = c.clone();
            let mut odd = Vec::new();
            for &a in m.args() {
                if a % 2 == 0 {
                    pi_pow += a;
                    coeff = coeff * zeta_even_pi_coeff::<T>(a / 2);
                } else {
                    odd.push(a);
                }
            }
            let key = (pi_pow, ZetaMonomial::new(odd));
            let slot = out.terms.entry(key).or_insert_with(T::zero);
            *slot = slot.clone() + coeff;
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn format(&self, style: FormatStyle) -> String {
        match style {
            FormatStyle::Text => self.to_string(),
            FormatStyle::Latex => self.format_latex(),
            FormatStyle::Json => self.to_json().to_string(),
        }
    }

    fn format_latex(&self) -> String {
        let mut out = String::new();
        let mut first = true;
        for (m, c) in &self.terms {
            push_signed_latex(&mut out, &mut first, c, &latex_monomial(m));
        }
        for (k, c) in &self.symbolic {
            let sym = match k {
                SymbolicSum::Power { hexp, npow } => format!("\\mathrm{{E}}_{{{hexp},{npow}}}"),
                SymbolicSum::Linear { order, npow } => format!("\\mathtt{{S}}_{{{order},{npow}}}"),
            };
            push_signed_latex(&mut out, &mut first, c, &sym);
        }
        if first {
            out.push('0');
        }
        out
    }

    /// Machine-readable form:
    /// `{"rational": "p/q", "terms": [{"zeta_args": [...], "coeff": "p/q"}, ...],
    ///   "symbolic": [{"l":…,"n":…,"coeff":"p/q"} | {"m":…,"n":…,"coeff":"p/q"}, ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let rational = self.rational_part().to_string();
        let terms: Vec<_> = self
            .terms
            .iter()
            .filter(|(m, _)| !m.is_unit())
            .map(|(m, c)| json!({"zeta_args": m.args(), "coeff": c.to_string()}))
            .collect();
        let symbolic: Vec<_> = self
            .symbolic
            .iter()
            .map(|(k, c)| match k {
                SymbolicSum::Power { hexp, npow } => {
                    json!({"l": hexp, "n": npow, "coeff": c.to_string()})
                }
                SymbolicSum::Linear { order, npow } => {
                    json!({"m": order, "n": npow, "coeff": c.to_string()})
                }
            })
            .collect();
        json!({"rational": rational, "terms": terms, "symbolic": symbolic})
    }
}

/// Render a monomial's factors in text, collapsing repeats to powers:
/// `zeta(2)*zeta(3)`, `zeta(3)^2`; the unit monomial yields an empty
/// string.
fn text_monomial(m: &ZetaMonomial) -> String {
    let mut out = String::new();
    let mut i = 0;
    let args = m.args();
    while i < args.len() {
        let a = args[i];
        let mut count = 1;
        while i + count < args.len() && args[i + count] == a {
            count += 1;
        }
        if !out.is_empty() {
            out.push('*');
        }
        out.push_str(&format!("zeta({a})"));
        if count > 1 {
            out.push_str(&format!("^{count}"));
        }
        i += count;
    }
    out
}

fn latex_monomial(m: &ZetaMonomial) -> String {
    let mut out = String::new();
    let mut i = 0;
    let args = m.args();
    while i < args.len() {
        let a = args[i];
        let mut count = 1;
        while i + count < args.len() && args[i + count] == a {
            count += 1;
        }
        out.push_str(&format!("\\zeta({a})"));
        if count > 1 {
            out.push_str(&format!("^{count}"));
        }
        i += count;
    }
    out
}

/// Append `± coeff·body` in text style.
fn push_signed_text<T: Scalar>(out: &mut String, first: &mut bool, coeff: &T, body: &str) {
    let neg = coeff.is_negative();
    let mag = coeff.abs();
    if *first {
        if neg {
            out.push('-');
        }
        *first = false;
    } else if neg {
        out.push_str(" - ");
    } else {
        out.push_str(" + ");
    }
    if body.is_empty() {
        out.push_str(&mag.to_string());
    } else if mag.is_one() {
        out.push_str(body);
    } else {
        out.push_str(&format!("{mag}*{body}"));
    }
}

/// Append `± coeff·body` in LaTeX style (`\frac{p}{q}` for non-integer
/// coefficients).
fn push_signed_latex<T: Scalar>(out: &mut String, first: &mut bool, coeff: &T, body: &str) {
    let neg = coeff.is_negative();
    let mag = coeff.abs();
    if *first {
        if neg {
            out.push('-');
        }
        *first = false;
    } else if neg {
        out.push_str(" - ");
    } else {
        out.push_str(" + ");
    }
    let mag_str = latex_rational(&mag);
    if body.is_empty() {
        out.push_str(&mag_str);
    } else if mag.is_one() {
        out.push_str(body);
    } else {
        out.push_str(&format!("{mag_str}{body}"));
    }
}

fn latex_rational<T: Scalar>(mag: &T) -> String {
    let s = mag.to_string();
    match s.split_once('/') {
        Some((p, q)) => format!("\\frac{{{p}}}{{{q}}}"),
        None => s,
    }
}

impl<T: Scalar> fmt::Display for ClosedForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let mut first = true;
        for (m, c) in &self.terms {
            push_signed_text(&mut out, &mut first, c, &text_monomial(m));
        }
        for (k, c) in &self.symbolic {
            push_signed_text(&mut out, &mut first, c, &k.to_string());
        }
        if first {
            out.push('0');
        }
        write!(f, "{out}")
    }
}

/// Result of the even-zeta reduction: a map from `(π power, odd-zeta
/// monomial)` to rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiForm<T> {
    terms: BTreeMap<(u32, ZetaMonomial), T>,
}

impl<T: Scalar> PiForm<T> {
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, ZetaMonomial), &T)> {
        self.terms.iter()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|((p, m), c)| {
                json!({"pi_pow": p, "zeta_args": m.args(), "coeff": c.to_string()})
            })
            .collect();
        json!({ "terms": terms })
    }
}

impl<T: Scalar> fmt::Display for PiForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        let mut first = true;
        for ((p, m), c) in &self.terms {
            let mut body = String::new();
            if *p > 0 {
                body.push_str("pi");
                if *p > 1 {
                    body.push_str(&format!("^{p}"));
                }
            }
            let zeta = text_monomial(m);
            if !zeta.is_empty() {
                if !body.is_empty() {
                    body.push('*');
                }
                body.push_str(&zeta);
            }
            push_signed_text(&mut out, &mut first, c, &body);
        }
        write!(f, "{out}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{from_int, from_ratio};
    use crate::Rational;

    fn rat(n: i64, d: i64) -> Rational {
        from_ratio(n, d)
    }

    #[test]
    fn monomial_product_is_multiset_union() {
        let a = ZetaMonomial::zeta(2);
        let b = ZetaMonomial::zeta(3);
        assert_eq!(a.product(&b), ZetaMonomial::new(vec![2, 3]));
        assert_eq!(b.product(&b), ZetaMonomial::new(vec![3, 3]));
    }

    #[test]
    fn mul_of_single_zetas() {
        let a = ClosedForm::<Rational>::zeta(2);
        let b = ClosedForm::<Rational>::zeta(3);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.to_string(), "zeta(2)*zeta(3)");
    }

    #[test]
    fn mul_rejects_symbolic() {
        let sym = ClosedForm::<Rational>::from_symbolic(
            SymbolicSum::Power { hexp: 2, npow: 6 },
            from_int(1),
        );
        assert_eq!(
            sym.mul(&ClosedForm::zeta(2)).unwrap_err(),
            ClosedFormError::UnsupportedProduct
        );
    }

    #[test]
    fn add_and_scale() {
        let a = ClosedForm::<Rational>::zeta(3).scale(&from_int(2));
        let b = ClosedForm::<Rational>::zeta(4).scale(&rat(5, 4));
        assert_eq!(a.add(&b).to_string(), "2*zeta(3) + 5/4*zeta(4)");
        assert!(a.scale(&from_int(0)).is_zero());
    }

    #[test]
    fn display_matches_reference_shapes() {
        // the quartic consecutive-product value
        let cf = ClosedForm::<Rational>::zeta(2)
            .scale(&rat(-4, 9))
            .add(&ClosedForm::from_term(ZetaMonomial::new(vec![2, 3]), rat(-1, 6)))
            .add(&ClosedForm::zeta(3).scale(&rat(-7, 24)))
            .add(&ClosedForm::zeta(4).scale(&rat(191, 144)))
            .add(&ClosedForm::zeta(5).scale(&rat(1, 2)));
        assert_eq!(
            cf.to_string(),
            "-4/9*zeta(2) - 1/6*zeta(2)*zeta(3) - 7/24*zeta(3) + 191/144*zeta(4) + 1/2*zeta(5)"
        );
        assert_eq!(ClosedForm::<Rational>::zero().to_string(), "0");
        let au = ClosedForm::<Rational>::zeta(4).scale(&rat(17, 4));
        assert_eq!(au.format(FormatStyle::Latex), "\\frac{17}{4}\\zeta(4)");
    }

    #[test]
    fn rational_constant_sorts_first() {
        let cf = ClosedForm::<Rational>::zeta(2)
            .scale(&rat(-16, 3))
            .add(&ClosedForm::from_rational(rat(491, 72)));
        assert_eq!(cf.to_string(), "491/72 - 16/3*zeta(2)");
    }

    #[test]
    fn even_fold() {
        // ζ(2)² → (5/2)ζ(4); mixed products untouched
        let sq = ClosedForm::<Rational>::from_term(ZetaMonomial::new(vec![2, 2]), from_int(1));
        assert_eq!(sq.fold_even_zeta_products().to_string(), "5/2*zeta(4)");
        let mixed = ClosedForm::<Rational>::from_term(ZetaMonomial::new(vec![2, 3]), from_int(1));
        assert_eq!(mixed.fold_even_zeta_products(), mixed);
    }

    #[test]
    fn pi_reduction() {
        let cf = ClosedForm::<Rational>::zeta(2);
        let pi = cf.even_zeta_to_pi().unwrap();
        assert_eq!(pi.to_string(), "1/6*pi^2");
        let cf4 = ClosedForm::<Rational>::zeta(4);
        assert_eq!(cf4.even_zeta_to_pi().unwrap().to_string(), "1/90*pi^4");
        let odd = ClosedForm::<Rational>::zeta(3);
        assert_eq!(odd.even_zeta_to_pi().unwrap().to_string(), "zeta(3)");
        let mixed = ClosedForm::<Rational>::from_term(ZetaMonomial::new(vec![2, 3]), from_int(6));
        assert_eq!(mixed.even_zeta_to_pi().unwrap().to_string(), "pi^2*zeta(3)");
    }

    #[test]
    fn json_shape() {
        let cf = ClosedForm::<Rational>::zeta(3)
            .scale(&from_int(2))
            .add(&ClosedForm::from_rational(rat(-1, 3)))
            .add(&ClosedForm::from_symbolic(
                SymbolicSum::Power { hexp: 2, npow: 6 },
                from_int(1),
            ));
        let v = cf.to_json();
        assert_eq!(v["rational"], "-1/3");
        assert_eq!(v["terms"][0]["zeta_args"][0], 3);
        assert_eq!(v["terms"][0]["coeff"], "2");
        assert_eq!(v["symbolic"][0]["l"], 2);
        assert_eq!(v["symbolic"][0]["n"], 6);
    }
}
