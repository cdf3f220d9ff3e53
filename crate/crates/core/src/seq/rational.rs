//! Exact rationals and their `"num/den"` wire form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^e` for any integer `e`.
pub fn pow2(e: i64) -> Rational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// `base^e` for any integer `e` (`base` nonzero when `e < 0`).
pub fn pow(base: &Rational, e: i64) -> Rational {
    let p = num_traits::pow(base.clone(), e.unsigned_abs() as usize);
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Parses `"num/den"` or a bare integer.
pub fn parse(s: &str) -> Result<Rational> {
    let bad = || Error::ParseRational(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Always `"num/den"`, reduced, with a positive denominator.
pub fn format(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Lossy conversion for reporting.
pub fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale both into range through their bit lengths
            let shift = q.numer().bits().max(q.denom().bits()) as i64 - 900;
            let n = (q.numer() >> shift.max(0) as usize).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift.max(0) as usize).to_f64().unwrap_or(f64::INFINITY);
            if d == 0.0 {
                if q.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            } else {
                n / d
            }
        }
    }
}

pub mod serde_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_str_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&super::format(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| super::parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("2/1").unwrap(), integer(2));
        assert_eq!(parse(" -3 / 6 ").unwrap(), ratio(-1, 2));
        assert_eq!(parse("7").unwrap(), integer(7));
        assert!(parse("1/0").is_err());
        assert!(parse("a/2").is_err());
        assert_eq!(format(&ratio(6, -4)), "-3/2");
        assert_eq!(format(&integer(5)), "5/1");
    }

    #[test]
    fn powers() {
        assert_eq!(pow2(-5), ratio(1, 32));
        assert_eq!(pow2(3), integer(8));
        assert_eq!(pow(&ratio(2, 3), -2), ratio(9, 4));
        assert_eq!(pow(&integer(7), 0), integer(1));
    }

    #[test]
    fn float_conversion_survives_huge_values() {
        assert_eq!(to_f64(&ratio(1, 4)), 0.25);
        let tiny = pow2(-3000);
        assert_eq!(to_f64(&tiny), 0.0);
        let x = pow2(2000) / pow2(1999);
        assert_eq!(to_f64(&x), 2.0);
    }
}
