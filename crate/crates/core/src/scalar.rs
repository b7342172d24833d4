//! Exact rational scalars.
//!
//! The whole kernel works over Q with arbitrary-precision rationals; there is
//! no floating point anywhere. `num_rational::BigRational` already keeps
//! values in lowest terms with a positive denominator, which is exactly the
//! canonical form we need.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar, always in lowest terms with positive denominator.
pub type Scalar = BigRational;

/// The scalar `n`.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// The scalar `n/d`. Panics on `d = 0`.
pub fn ratio(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Scalar {
    BigRational::zero()
}

pub fn one() -> Scalar {
    BigRational::one()
}

/// Parse a scalar written as `a` or `a/b` with optional sign.
pub fn parse(text: &str) -> Result<Scalar> {
    let s = text.trim();
    let err = |m: &str| Error::parse(0, format!("{m}: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err("bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| err("bad denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| err("bad integer"))?;
        Ok(BigRational::from_integer(n))
    }
}

/// `-1` to the given power, also for negative powers.
pub fn sign(parity: i64) -> Scalar {
    if parity.rem_euclid(2) == 0 {
        one()
    } else {
        -one()
    }
}

/// Render a scalar as `a` or `a/b`.
pub fn render(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// True when the scalar is a negative number (used for sign-aware printing).
pub fn is_negative(s: &Scalar) -> bool {
    s.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms() {
        let s = ratio(6, -4);
        assert_eq!(s, ratio(-3, 2));
        assert_eq!(render(&s), "-3/2");
        assert!(s.denom() > &BigInt::zero());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("-3/2").unwrap(), ratio(-3, 2));
        assert_eq!(parse(" 4/6 ").unwrap(), ratio(2, 3));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn signs() {
        assert_eq!(sign(0), one());
        assert_eq!(sign(3), -one());
        assert_eq!(sign(-1), -one());
    }
}
