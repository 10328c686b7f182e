//! Series evaluation: group canonical terms, decide convergence, and
//! reduce every group through the reindexing identity.
//!
//! For a group `Σ_m c_m · Σ_k H_{k+m}^ℓ/(k+m)^n` the tail past the shift
//! is the full sum minus a prefix, `Σ_k H_{k+m}^ℓ/(k+m)^n = E(ℓ,n) −
//! P(ℓ,n,m)`, so the group's value is
//! `(Σ_m c_m)·E(ℓ,n) − Σ_m c_m·P(ℓ,n,m)`. When the coefficients sum to
//! zero the `E` term cancels — that is telescoping, the group's value is
//! a pure rational, and `E(ℓ,n)` is never consulted (so `n = 1` groups
//! and unknown table keys are fine). Groups with `n = 1` and a nonzero
//! coefficient sum diverge (the summand behaves like `ln^ℓ k / k`) and
//! are rejected.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::closed_form::{ClosedForm, SymbolicSum};
use crate::normalize::{normalize, NormalizeError};
use crate::table::{EulerSumKey, EulerTable};
use crate::term::{CanonicalTerm, SeriesExpression};
use crate::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError<T: Scalar> {
    /// An `n = 1` group whose coefficients do not cancel.
    #[error("divergent series: group (l={hexp}, n={npow}) has coefficient sum {coeff_sum}")]
    Divergent {
        hexp: u32,
        npow: u32,
        coeff_sum: T,
    },
    /// Strict mode only: the value needs an Euler sum with no known
    /// closed form.
    #[error("not reducible with the current table: requires E({},{})", key.hexp, key.npow)]
    NotReducible { key: EulerSumKey },
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
}

/// Canonical terms sharing `(ℓ, n)`, keyed by shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalGroup<T> {
    pub hexp: u32,
    pub npow: u32,
    pub coeffs: BTreeMap<u32, T>,
}

impl<T: Scalar> CanonicalGroup<T> {
    pub fn coeff_sum(&self) -> T {
        self.coeffs
            .values()
            .fold(T::zero(), |acc, c| acc + c.clone())
    }
}

impl<T: Scalar> fmt::Display for CanonicalGroup<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(l={}, n={}, {{", self.hexp, self.npow)?;
        for (i, (m, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}: {c}")?;
        }
        write!(f, "}})")
    }
}

/// Evaluation switches.
#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    /// Fail with [`EngineError::NotReducible`] instead of embedding a
    /// symbolic constant when a needed `E(ℓ,n)` is unknown.
    pub strict: bool,
}

/// Partition canonical terms by `(ℓ, n)`, in that order, coefficients
/// keyed by shift.
pub fn group_canonical<T: Scalar>(terms: &[CanonicalTerm<T>]) -> Vec<CanonicalGroup<T>> {
    let mut map: BTreeMap<(u32, u32), BTreeMap<u32, T>> = BTreeMap::new();
    for t in terms {
        let slot = map
            .entry((t.hexp, t.npow))
            .or_default()
            .entry(t.shift)
            .or_insert_with(T::zero);
        *slot = slot.clone() + t.coeff.clone();
    }
    map.into_iter()
        .filter_map(|((hexp, npow), mut coeffs)| {
            coeffs.retain(|_, c| !c.is_zero());
            if coeffs.is_empty() {
                None
            } else {
                Some(CanonicalGroup { hexp, npow, coeffs })
            }
        })
        .collect()
}

/// A group with `n = 1` converges only if its coefficients cancel;
/// groups with `n ≥ 2` always converge.
pub fn check_convergence<T: Scalar>(groups: &[CanonicalGroup<T>]) -> Result<(), EngineError<T>> {
    for g in groups {
        if g.npow == 1 {
            let sum = g.coeff_sum();
            if !sum.is_zero() {
                return Err(EngineError::Divergent {
                    hexp: g.hexp,
                    npow: g.npow,
                    coeff_sum: sum,
                });
            }
        }
    }
    Ok(())
}

/// Value of one convergent group:
/// `(Σ_m c_m)·E(ℓ,n) − Σ_m c_m·P(ℓ,n,m)`.
pub fn evaluate_group<T: Scalar>(
    group: &CanonicalGroup<T>,
    table: &EulerTable<T>,
    options: EvalOptions,
) -> Result<ClosedForm<T>, EngineError<T>> {
    let csum = group.coeff_sum();
    let mut value = ClosedForm::zero();
    for (&shift, coeff) in &group.coeffs {
        let prefix = table.partial_euler(group.hexp, group.npow, u64::from(shift));
        value = value.add(&ClosedForm::from_rational(-(coeff.clone() * prefix)));
    }
    if csum.is_zero() {
        return Ok(value);
    }
    if group.npow == 1 {
        return Err(EngineError::Divergent {
            hexp: group.hexp,
            npow: group.npow,
            coeff_sum: csum,
        });
    }
    let key = EulerSumKey {
        hexp: group.hexp,
        npow: group.npow,
    };
    match table.euler_full(key) {
        Some(full) => Ok(value.add(&full.scale(&csum))),
        None if options.strict => Err(EngineError::NotReducible { key }),
        None => Ok(value.add(&ClosedForm::from_symbolic(
            SymbolicSum::Power {
                hexp: key.hexp,
                npow: key.npow,
            },
            csum,
        ))),
    }
}

/// Normalize every term of the series, group, check convergence, and sum
/// the group values. Group order (and hence accumulation order) is the
/// sorted `(ℓ, n)` order, so output is reproducible bit for bit.
pub fn evaluate_series<T: Scalar>(
    series: &SeriesExpression<T>,
    table: &EulerTable<T>,
    options: EvalOptions,
) -> Result<ClosedForm<T>, EngineError<T>> {
    let groups = normalized_groups(series)?;
    check_convergence(&groups)?;
    let mut value = ClosedForm::zero();
    for g in &groups {
        value = value.add(&evaluate_group(g, table, options)?);
    }
    Ok(value)
}

/// Normalize all terms and group them; shared by the engine and the
/// numeric verifier's tail analysis.
pub fn normalized_groups<T: Scalar>(
    series: &SeriesExpression<T>,
) -> Result<Vec<CanonicalGroup<T>>, NormalizeError> {
    let mut canonical = Vec::new();
    for term in series.terms() {
        canonical.extend(normalize(term)?);
    }
    Ok(group_canonical(&canonical))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{from_int, from_ratio};
    use crate::term::{DenominatorFactor, GeneralTerm, HarmonicFactor};
    use crate::Rational;

    fn rat(n: i64, d: i64) -> Rational {
        from_ratio(n, d)
    }

    fn canonical(c: Rational, l: u32, m: u32, n: u32) -> CanonicalTerm<Rational> {
        CanonicalTerm::new(c, l, m, n).unwrap()
    }

    fn group(l: u32, n: u32, coeffs: &[(u32, Rational)]) -> CanonicalGroup<Rational> {
        CanonicalGroup {
            hexp: l,
            npow: n,
            coeffs: coeffs.iter().cloned().collect(),
        }
    }

    #[test]
    fn grouping_partitions_and_merges() {
        let terms = vec![
            canonical(rat(1, 1), 1, 0, 1),
            canonical(rat(-1, 1), 1, 1, 1),
            canonical(rat(1, 1), 1, 0, 2),
        ];
        let groups = group_canonical(&terms);
        assert_eq!(groups.len(), 2);
        assert_eq!((groups[0].hexp, groups[0].npow), (1, 1));
        assert_eq!(groups[0].coeffs.len(), 2);
        assert_eq!((groups[1].hexp, groups[1].npow), (1, 2));
    }

    #[test]
    fn convergence_rules() {
        // Σ H_k/k diverges
        let bad = group(1, 1, &[(0, rat(1, 1))]);
        assert!(matches!(
            check_convergence(&[bad]),
            Err(EngineError::Divergent { hexp: 1, npow: 1, .. })
        ));
        // the S4 shape converges: coefficients cancel
        let s4 = group(
            1,
            1,
            &[
                (0, rat(11, 4)),
                (1, rat(-41, 3)),
                (2, rat(197, 12)),
                (3, rat(-11, 2)),
            ],
        );
        assert!(check_convergence(&[s4]).is_ok());
        // p-series groups always converge
        let p = group(0, 2, &[(0, rat(7, 1))]);
        assert!(check_convergence(&[p]).is_ok());
    }

    #[test]
    fn telescoping_group_value() {
        // S4 = -299/144
        let table = EulerTable::new();
        let s4 = group(
            1,
            1,
            &[
                (0, rat(11, 4)),
                (1, rat(-41, 3)),
                (2, rat(197, 12)),
                (3, rat(-11, 2)),
            ],
        );
        let v = evaluate_group(&s4, &table, EvalOptions::default()).unwrap();
        assert_eq!(v, ClosedForm::from_rational(rat(-299, 144)));
    }

    #[test]
    fn reindexed_group_values() {
        let table = EulerTable::new();
        // S1 = 491/72 - (16/3) ζ(2)
        let s1 = group(
            0,
            2,
            &[(1, rat(11, 2)), (2, rat(-131, 6)), (3, rat(11, 1))],
        );
        let v = evaluate_group(&s1, &table, EvalOptions::default()).unwrap();
        assert_eq!(v.to_string(), "491/72 - 16/3*zeta(2)");
        // S10 = -8681/7776 - ζ(2)ζ(3) + 3ζ(5)
        let s10 = group(1, 4, &[(3, rat(1, 1))]);
        let v = evaluate_group(&s10, &table, EvalOptions::default()).unwrap();
        assert_eq!(
            v.to_string(),
            "-8681/7776 - zeta(2)*zeta(3) + 3*zeta(5)"
        );
        // S11 = 287/324 + (17/4) ζ(4)
        let s11 = group(2, 2, &[(1, rat(9, 1)), (2, rat(-15, 1)), (3, rat(7, 1))]);
        let v = evaluate_group(&s11, &table, EvalOptions::default()).unwrap();
        assert_eq!(v.to_string(), "287/324 + 17/4*zeta(4)");
        // S13 = 1237/15552
        let s13 = group(3, 2, &[(1, rat(1, 2)), (2, rat(-1, 1)), (3, rat(1, 2))]);
        let v = evaluate_group(&s13, &table, EvalOptions::default()).unwrap();
        assert_eq!(v, ClosedForm::from_rational(rat(1237, 15552)));
    }

    #[test]
    fn strict_mode_rejects_unknown_sums() {
        let table = EulerTable::new();
        let g = group(2, 6, &[(0, rat(1, 1))]);
        let lenient = evaluate_group(&g, &table, EvalOptions::default()).unwrap();
        assert!(lenient.has_symbolic());
        let strict = evaluate_group(&g, &table, EvalOptions { strict: true });
        assert!(matches!(
            strict,
            Err(EngineError::NotReducible {
                key: EulerSumKey { hexp: 2, npow: 6 }
            })
        ));
    }

    #[test]
    fn unit_telescoping_series() {
        // Σ 1/(k(k+1)) = 1
        let table = EulerTable::new();
        let t = GeneralTerm::new(
            rat(1, 1),
            vec![],
            vec![
                DenominatorFactor::new(0, 1).unwrap(),
                DenominatorFactor::new(1, 1).unwrap(),
            ],
        )
        .unwrap();
        let s = SeriesExpression::new(vec![t]);
        let v = evaluate_series(&s, &table, EvalOptions::default()).unwrap();
        assert_eq!(v, ClosedForm::from_rational(rat(1, 1)));
    }

    #[test]
    fn consecutive_pair_series() {
        // Σ H_k H_{k+1} / (k(k+1)) = ζ(2) + 2ζ(3)
        let table = EulerTable::new();
        let t = GeneralTerm::new(
            rat(1, 1),
            vec![
                HarmonicFactor::new(0, 1).unwrap(),
                HarmonicFactor::new(1, 1).unwrap(),
            ],
            vec![
                DenominatorFactor::new(0, 1).unwrap(),
                DenominatorFactor::new(1, 1).unwrap(),
            ],
        )
        .unwrap();
        let s = SeriesExpression::new(vec![t]);
        let v = evaluate_series(&s, &table, EvalOptions::default()).unwrap();
        assert_eq!(v.to_string(), "zeta(2) + 2*zeta(3)");
    }

    #[test]
    fn divergent_series_is_reported() {
        let table = EulerTable::new();
        let t = GeneralTerm::new(
            from_int::<Rational>(1),
            vec![HarmonicFactor::new(0, 1).unwrap()],
            vec![DenominatorFactor::new(0, 1).unwrap()],
        )
        .unwrap();
        let s = SeriesExpression::new(vec![t]);
        assert!(matches!(
            evaluate_series(&s, &table, EvalOptions::default()),
            Err(EngineError::Divergent { .. })
        ));
    }
}
