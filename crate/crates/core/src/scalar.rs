//! Exact rational scalars.
//!
//! The ground field is Q. Scalars are arbitrary-precision rationals kept in
//! canonical reduced form (positive denominator, gcd 1), so equality is
//! structural and rendering is deterministic.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};

use crate::error::Error;

/// Arbitrary-precision rational number in reduced canonical form.
pub type Scalar = BigRational;

/// The integer `n` as a scalar.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// The fraction `n/d` as a scalar. `d` must be nonzero.
pub fn frac(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// `(-1)^k`, the sign of a Koszul commutation across degrees.
pub fn sign(k: u32) -> Scalar {
    if k % 2 == 0 {
        one()
    } else {
        -one()
    }
}

/// Renders a scalar as `p` or `p/q` with `q > 0`, e.g. `-3/2`.
pub fn render(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Parses `p` or `p/q` (optional leading sign, `q > 0` after reduction).
pub fn parse(text: &str) -> Result<Scalar, Error> {
    let bad = || Error::Parse {
        line: 0,
        column: 0,
        message: format!("expected a rational number, found `{text}`"),
    };
    let (num_text, den_text) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let numer: BigInt = num_text.parse().map_err(|_| bad())?;
    let denom: BigInt = match den_text {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(numer, denom))
}

/// True when the scalar is a (possibly negative) integer.
pub fn is_integer(s: &Scalar) -> bool {
    s.denom().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::traits::Signed;

    #[test]
    fn canonical_reduction() {
        assert_eq!(frac(2, 4), frac(1, 2));
        assert_eq!(frac(1, -2), frac(-1, 2));
        assert!(frac(1, -2).denom().is_positive());
    }

    #[test]
    fn render_and_parse_round_trip() {
        for s in [int(0), int(7), int(-3), frac(3, 2), frac(-5, 9)] {
            assert_eq!(parse(&render(&s)).unwrap(), s);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("1.5").is_err());
    }

    #[test]
    fn koszul_sign() {
        assert_eq!(sign(0), one());
        assert_eq!(sign(3), -one());
        assert_eq!(sign(4), one());
    }
}
