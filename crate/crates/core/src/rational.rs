//! Exact rational numbers used for actions, thresholds and rotation numbers.
//!
//! Everything on the chain level is compared exactly, so actions never touch
//! floating point. Values are written as `p/q` strings in every file format.

use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational with 128-bit numerator and denominator.
pub type Rational = Ratio<i128>;

/// Builds `numer/denom`, panicking on a zero denominator.
pub fn rat(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}

pub fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// Canonical `p/q` rendering (integers keep the `/1`).
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rendering for display columns only.
pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Parses `p/q`, an integer, a decimal (`0.001`) or scientific notation
/// (`1e-3`, `2.5E4`) into an exact rational.
pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = i128::from_str(p.trim()).map_err(|_| bad())?;
        let q = i128::from_str(q.trim()).map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => {
            let e = i32::from_str(&t[i + 1..]).map_err(|_| bad())?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let negative = mantissa.starts_with('-');
    let digits = mantissa.strip_prefix(['+', '-']).unwrap_or(mantissa);
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{whole}{frac}");
    let numer = i128::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    let scale = exponent - frac.len() as i32;
    if scale.unsigned_abs() > 30 {
        return Err(bad());
    }
    let pow = 10i128.pow(scale.unsigned_abs());
    let mut value = if scale >= 0 {
        Rational::from_integer(numer.checked_mul(pow).ok_or_else(bad)?)
    } else {
        Rational::new(numer, pow)
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Parses a comma separated list of rationals.
pub fn parse_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse).collect()
}

pub fn is_integer(r: &Rational) -> bool {
    r.is_integer()
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

pub fn is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub mod serde_rational {
    //! Serde adapter storing a [`Rational`] as a `"p/q"` string.
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse("141421/100000").unwrap(), rat(141421, 100000));
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("0.001").unwrap(), rat(1, 1000));
        assert_eq!(parse("1e-6").unwrap(), rat(1, 1_000_000));
        assert_eq!(parse("-2.5E1").unwrap(), int(-25));
        assert_eq!(parse(".5").unwrap(), rat(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "1e", "--1", "1.2.3", "1e-99"] {
            assert!(parse(s).is_err(), "{s}");
        }
    }

    #[test]
    fn format_is_always_p_over_q() {
        assert_eq!(format(&int(2)), "2/1");
        assert_eq!(format(&rat(6, 4)), "3/2");
        assert_eq!(parse(&format(&rat(-7, 9))).unwrap(), rat(-7, 9));
    }
}
