//! Exact differential forms with rational polynomial coefficients.

mod form;
mod group;
mod map;
mod poly;

pub use form::{wedge_sign, PolyForm};
pub use group::{group_average, is_invariant, AffineGroupElement, FiniteGroup, DEFAULT_ORDER_BOUND};
pub use map::PolyMap;
pub use poly::{Monomial, Polynomial};

use alloc::string::String;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational numbers.
pub type Rational = num_rational::BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse `"p/q"` or `"p"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Malformed(alloc::format!("invalid rational `{text}`"));
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Malformed(alloc::format!("zero denominator in `{text}`")));
    }
    Ok(Rational::new(n, d))
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        alloc::format!("{}", r.numer())
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("6/4").unwrap(), rational(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), integer(-7));
        assert_eq!(parse_rational("2/-4").unwrap(), rational(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&rational(-3, 6)), "-1/2");
        assert_eq!(format_rational(&integer(4)), "4");
    }
}
