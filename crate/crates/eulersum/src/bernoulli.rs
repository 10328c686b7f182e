//! Bernoulli numbers and the even-zeta constants derived from them.
//!
//! `ζ(2n) = q_n π^{2n}` with `q_n = (-1)^{n+1} B_{2n} 2^{2n-1}/(2n)!`,
//! so any product of even zeta values is a rational multiple of the even
//! zeta value of the total weight. Both facts are used by the Euler-sum
//! table (to store linear sums in their conventional single-zeta form)
//! and by the opt-in π-reduction of closed forms.

use crate::scalar::{from_int, pow_u32, Scalar};

/// `B_0 ..= B_upto` (second Bernoulli convention, `B_1 = -1/2`), via the
/// defining recurrence `Σ_{j≤m} C(m+1, j) B_j = 0`.
pub fn bernoulli_numbers<T: Scalar>(upto: usize) -> Vec<T> {
    let mut b: Vec<T> = Vec::with_capacity(upto + 1);
    for m in 0..=upto {
        if m == 0 {
            b.push(T::one());
            continue;
        }
        // C(m+1, j) built incrementally
        let mut binom = T::one(); // C(m+1, 0)
        let mut acc = T::zero();
        for (j, bj) in b.iter().enumerate().take(m) {
            if j > 0 {
                binom = binom * from_int::<T>((m + 2 - j) as i64) / from_int::<T>(j as i64);
            }
            acc = acc + binom.clone() * bj.clone();
        }
        b.push(-acc / from_int::<T>((m + 1) as i64));
    }
    b
}

/// Exact factorial as a scalar.
pub fn factorial<T: Scalar>(n: u32) -> T {
    let mut value = T::one();
    for i in 2..=i64::from(n) {
        value = value * from_int::<T>(i);
    }
    value
}

/// The rational `q` with `ζ(2n) = q·π^{2n}`, `n ≥ 1`.
pub fn zeta_even_pi_coeff<T: Scalar>(n: u32) -> T {
    assert!(n >= 1);
    let b = bernoulli_numbers::<T>(2 * n as usize);
    let b2n = b[2 * n as usize].clone();
    let sign = if n % 2 == 1 { T::one() } else { -T::one() };
    sign * b2n * pow_u32(&from_int::<T>(2), 2 * n - 1) / factorial::<T>(2 * n)
}

/// The rational `ζ(a)·ζ(b)/ζ(a+b)` for even `a, b ≥ 2`.
pub fn even_zeta_product_ratio<T: Scalar>(a: u32, b: u32) -> T {
    assert!(a >= 2 && b >= 2 && a % 2 == 0 && b % 2 == 0);
    let qa = zeta_even_pi_coeff::<T>(a / 2);
    let qb = zeta_even_pi_coeff::<T>(b / 2);
    let qab = zeta_even_pi_coeff::<T>((a + b) / 2);
    qa * qb / qab
}
