//! Exact rational helpers. All truth values in the crate are `BigRational`s
//! kept in lowest terms by `num-rational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_u64(numer: u64, denom: u64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn in_unit_interval(value: &Rational) -> bool {
    !value.is_negative() && *value <= Rational::one()
}

/// Renders as `p/q`, or `p` when the denominator is one.
pub fn fmt_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses `p`, `p/q` or `-p/q` with decimal integers.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::InvalidArgument(format!("`{text}` is not an exact rational p/q"));
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = num.parse().map_err(|_| bad())?;
    let denom: BigInt = den.parse().map_err(|_| bad())?;
    if denom.is_zero() || denom.is_negative() {
        return Err(bad());
    }
    Ok(BigRational::new(numer, denom))
}

pub fn parse_unit_rational(text: &str) -> Result<Rational> {
    let value = parse_rational(text)?;
    if !in_unit_interval(&value) {
        return Err(Error::InvalidArgument(format!(
            "`{text}` is outside [0,1]"
        )));
    }
    Ok(value)
}

/// Denominator as `u64`, failing for values whose denominator does not fit.
pub fn denom_u64(value: &Rational) -> Result<u64> {
    u64::try_from(value.denom()).map_err(|_| {
        Error::InvalidArgument(format!(
            "denominator of {} exceeds the supported range",
            fmt_rational(value)
        ))
    })
}

pub fn numer_u64(value: &Rational) -> Result<u64> {
    u64::try_from(value.numer()).map_err(|_| {
        Error::InvalidArgument(format!(
            "numerator of {} exceeds the supported range",
            fmt_rational(value)
        ))
    })
}

pub fn max_rat(a: Rational, b: Rational) -> Rational {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn min_rat(a: Rational, b: Rational) -> Rational {
    if a <= b {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        assert_eq!(parse_rational("6/12").unwrap(), rat(1, 2));
        assert_eq!(fmt_rational(&rat(4, 2)), "2");
        assert_eq!(fmt_rational(&rat(-3, 9)), "-1/3");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_unit_rational("5/4").is_err());
    }
}
