//! The exact coefficient domain: arbitrary-precision rationals.
//!
//! `num::BigRational` already maintains the invariants we need (always
//! reduced, denominator positive, canonical zero `0/1`), so the module
//! is a thin layer of constructors and the exact integer combinatorics
//! used by the rest of the crate.

use alloc::string::String;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::{Error, Result};

/// Exact rational scalar; the coefficient domain everywhere.
pub type Rational = BigRational;

/// Rational from machine integers. Panics on a zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Rational from a machine integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n!` as an exact integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// Odd double factorial `(2d'-1)!! = 1·3·5···(2d'-1)`, the number of
/// perfect matchings on `2d'` points. `d' = 0` gives the empty product 1.
pub fn double_factorial_odd(d_prime: usize) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = 1usize;
    while k + 1 < 2 * d_prime {
        k += 2;
        acc *= BigInt::from(k);
    }
    acc
}

/// Require an exact rational to be an integer, returning its numerator.
pub fn expect_integer(value: &Rational, context: &str) -> Result<BigInt> {
    if value.denom().is_one() {
        Ok(value.numer().clone())
    } else {
        Err(Error::NonIntegralResult {
            detail: alloc::format!("{context}: {value}"),
        })
    }
}

/// Signed content of a nonempty list of rationals: the positive rational
/// `c` with `values[i]/c` integral and jointly coprime, carrying the sign
/// of the first value. Used to normalize linear forms.
pub fn signed_content(values: &[&Rational]) -> Rational {
    debug_assert!(!values.is_empty());
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for v in values {
        num_gcd = num::Integer::gcd(&num_gcd, &v.numer().abs());
        den_lcm = num::Integer::lcm(&den_lcm, v.denom());
    }
    if num_gcd.is_zero() {
        return Rational::one();
    }
    let mut content = Rational::new(num_gcd, den_lcm);
    if values[0].is_negative() {
        content = -content;
    }
    content
}

/// Render a rational as `p/q`, or just `p` when it is an integer.
pub fn display(value: &Rational) -> String {
    alloc::format!("{value}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(double_factorial_odd(1), BigInt::from(1));
        assert_eq!(double_factorial_odd(4), BigInt::from(105));
        assert_eq!(double_factorial_odd(8), BigInt::from(2_027_025));
    }

    #[test]
    fn reduced_and_positive_denominator() {
        let v = rat(6, -8);
        assert_eq!(v, rat(-3, 4));
        assert!(v.denom() > &BigInt::zero());
        assert_eq!(rat(0, 7), rat_int(0));
    }

    #[test]
    fn integer_extraction() {
        assert_eq!(expect_integer(&rat(10, 2), "t").unwrap(), BigInt::from(5));
        assert!(expect_integer(&rat(1, 2), "t").is_err());
    }

    #[test]
    fn content_normalization() {
        let a = rat(4, 3);
        let b = rat(-2, 1);
        let c = signed_content(&[&a, &b]);
        assert_eq!(c, rat(2, 3));
        assert_eq!(&a / &c, rat_int(2));
        assert_eq!(&b / &c, rat_int(-3));
        let neg = signed_content(&[&b, &a]);
        assert_eq!(neg, rat(-2, 3));
    }
}
