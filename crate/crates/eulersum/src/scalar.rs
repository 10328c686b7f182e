//! The exact scalar abstraction.
//!
//! Every algebraic module in this crate is generic over [`Scalar`], an
//! exact field of characteristic zero expressed through `num-traits`
//! bounds. Exactness is a contract, not a compile-time guarantee, so the
//! trait is implemented explicitly for the rational types that satisfy it
//! rather than as a blanket impl (`f64` satisfies the bounds but not the
//! contract).

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num::rational::Ratio;
use num::{BigInt, BigRational, FromPrimitive, Num, Signed};

/// An exact rational scalar.
///
/// Required behavior beyond the trait bounds: `+`, `-`, `*`, `/` are
/// exact (no rounding), values are kept in lowest terms, and `Display`
/// prints `p/q` (or just `p` when the denominator is one).
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + FromPrimitive + FromStr + Display + Debug + 'static
{
    /// Lossless conversion into the arbitrary-precision rational, used at
    /// the boundary to the numeric verifier.
    fn to_big_rational(&self) -> BigRational;
}

impl Scalar for BigRational {
    fn to_big_rational(&self) -> BigRational {
        self.clone()
    }
}

impl Scalar for Ratio<i128> {
    fn to_big_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

/// `n` as a scalar.
pub fn from_int<T: Scalar>(n: i64) -> T {
    T::from_i64(n).expect("integer representable in scalar")
}

/// `n/d` as a scalar. Panics if `d == 0`.
pub fn from_ratio<T: Scalar>(n: i64, d: i64) -> T {
    assert!(d != 0, "zero denominator");
    from_int::<T>(n) / from_int::<T>(d)
}

/// `base^exp` by repeated squaring.
pub fn pow_u32<T: Scalar>(base: &T, exp: u32) -> T {
    let mut result = T::one();
    let mut sq = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = result * sq.clone();
        }
        e >>= 1;
        if e > 0 {
            sq = sq.clone() * sq;
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_helpers() {
        let x: BigRational = from_ratio(-3, 6);
        assert_eq!(x.to_string(), "-1/2");
        let y: Ratio<i128> = from_ratio(10, 4);
        assert_eq!(y.to_string(), "5/2");
    }

    #[test]
    fn pow_small() {
        let x: BigRational = from_ratio(2, 3);
        assert_eq!(pow_u32(&x, 0), BigRational::from_i64(1).unwrap());
        assert_eq!(pow_u32(&x, 3).to_string(), "8/27");
    }
}
