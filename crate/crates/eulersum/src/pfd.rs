//! Partial fraction decomposition of `1/Π (k+aᵢ)^{pᵢ}` with distinct
//! shifts `aᵢ`.
//!
//! The coefficient of `1/(k+aᵢ)^r` is read off a truncated power series:
//! around the pole `k = -aᵢ` (write `δ = k + aᵢ`) every other factor is
//! analytic, so expanding `Π_{j≠i} (δ + (aⱼ-aᵢ))^{-pⱼ}` to order
//! `pᵢ - 1` gives `α_{i, pᵢ-s}` as the coefficient of `δ^s`. All
//! arithmetic is exact.

use std::collections::BTreeMap;

use crate::scalar::{from_int, pow_u32, Scalar};
use crate::term::DenominatorFactor;

/// Multiply truncated power series (index = power of δ), keeping `len`
/// coefficients.
fn series_mul<T: Scalar>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); len];
    for (i, ai) in a.iter().enumerate() {
        if i >= len || ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] = out[i + j].clone() + ai.clone() * bj.clone();
        }
    }
    out
}

/// Coefficients of `(δ + d)^{-p}` up to order `len - 1`, `d ≠ 0`:
/// `Σ_s (-1)^s C(p+s-1, s) δ^s / d^{p+s}`.
fn shifted_pole_series<T: Scalar>(d: i64, p: u32, len: usize) -> Vec<T> {
    let d_scalar: T = from_int(d);
    let mut out = Vec::with_capacity(len);
    // running value: (-1)^s C(p+s-1, s) / d^(p+s)
    let mut value = T::one() / pow_u32(&d_scalar, p);
    let mut binom = T::one();
    for s in 0..len {
        if s > 0 {
            // C(p+s-1, s) = C(p+s-2, s-1) · (p+s-1)/s
            binom = binom * from_int::<T>(i64::from(p) + s as i64 - 1) / from_int::<T>(s as i64);
            let sign = if s % 2 == 0 { T::one() } else { -T::one() };
            value = sign * binom.clone() / pow_u32(&d_scalar, p + s as u32);
        }
        out.push(value.clone());
    }
    out
}

/// Exact partial fraction decomposition.
///
/// Returns the map `(shift, power) → α` with
/// `1/Π (k+aᵢ)^{pᵢ} = Σ α_{a,r}/(k+a)^r` as an identity in `k`.
///
/// The input must be non-empty with distinct shifts (the invariants of
/// [`crate::GeneralTerm`] guarantee both).
pub fn partial_fraction<T: Scalar>(denoms: &[DenominatorFactor]) -> BTreeMap<(u32, u32), T> {
    assert!(!denoms.is_empty(), "empty denominator product");
    let mut out = BTreeMap::new();
    for (i, di) in denoms.iter().enumerate() {
        let len = di.power as usize;
        let mut series = vec![T::zero(); len];
        series[0] = T::one();
        for (j, dj) in denoms.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = i64::from(dj.shift) - i64::from(di.shift);
            debug_assert!(d != 0, "duplicate denominator shifts");
            let factor = shifted_pole_series::<T>(d, dj.power, len);
            series = series_mul(&series, &factor, len);
        }
        for (s, c) in series.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let r = di.power - s as u32;
            out.insert((di.shift, r), c);
        }
    }
    out
}
