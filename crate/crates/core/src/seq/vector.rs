use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::rational::{self, Rational};
use crate::error::{Error, Result};

/// A finitely supported vector with exact rational coefficients on the
/// canonical basis `(e_n)`. Zero coefficients are never stored, so derived
/// equality is exact coefficient-wise equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FiniteVector {
    entries: BTreeMap<i64, Rational>,
}

impl FiniteVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `e_n`.
    pub fn basis(n: i64) -> Self {
        Self::term(n, rational::integer(1))
    }

    /// `c · e_n`.
    pub fn term(n: i64, c: Rational) -> Self {
        let mut v = Self::zero();
        v.add_term(n, c);
        v
    }

    /// Sums repeated indices and drops zeros.
    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(terms: I) -> Self {
        let mut v = Self::zero();
        for (n, c) in terms {
            v.add_term(n, c);
        }
        v
    }

    pub fn add_term(&mut self, n: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.entries.entry(n) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn get(&self, n: i64) -> Option<&Rational> {
        self.entries.get(&n)
    }

    pub fn coefficient(&self, n: i64) -> Rational {
        self.entries.get(&n).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.entries.iter().map(|(&n, c)| (n, c))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of nonzero coefficients.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        FiniteVector {
            entries: self.entries.iter().map(|(&n, x)| (n, x * c)).collect(),
        }
    }

    /// Moves every coefficient from `n` to `n + offset`.
    pub fn translate(&self, offset: i64) -> Self {
        FiniteVector {
            entries: self.entries.iter().map(|(&n, c)| (n + offset, c.clone())).collect(),
        }
    }

    pub fn l1_norm(&self) -> Rational {
        self.entries.values().map(|c| c.abs()).sum()
    }

    pub fn l2_norm_squared(&self) -> Rational {
        self.entries.values().map(|c| c * c).sum()
    }

    pub fn sup_norm(&self) -> Rational {
        self.entries
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn to_float(&self) -> super::FloatVector {
        super::FloatVector::from_terms(self.iter().map(|(n, c)| (n, rational::to_f64(c))))
    }
}

impl Add for &FiniteVector {
    type Output = FiniteVector;
    fn add(self, rhs: &FiniteVector) -> FiniteVector {
        let mut out = self.clone();
        for (n, c) in rhs.iter() {
            out.add_term(n, c.clone());
        }
        out
    }
}

impl Sub for &FiniteVector {
    type Output = FiniteVector;
    fn sub(self, rhs: &FiniteVector) -> FiniteVector {
        let mut out = self.clone();
        for (n, c) in rhs.iter() {
            out.add_term(n, -c.clone());
        }
        out
    }
}

impl Neg for &FiniteVector {
    type Output = FiniteVector;
    fn neg(self) -> FiniteVector {
        self.scale(&rational::integer(-1))
    }
}

impl Mul<&FiniteVector> for &Rational {
    type Output = FiniteVector;
    fn mul(self, rhs: &FiniteVector) -> FiniteVector {
        rhs.scale(self)
    }
}

impl fmt::Display for FiniteVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (n, c)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({})e{}", rational::format(c), n)?;
        }
        Ok(())
    }
}

/// Parses the shorthand `e3`, `e-1` or `0`; anything else must be the JSON
/// triple form.
pub fn parse_basis_shorthand(s: &str) -> Result<FiniteVector> {
    let t = s.trim();
    if t == "0" {
        return Ok(FiniteVector::zero());
    }
    t.strip_prefix('e')
        .and_then(|rest| rest.parse::<i64>().ok())
        .map(FiniteVector::basis)
        .ok_or_else(|| Error::InvalidArgument(format!("not a basis vector literal: {s:?}")))
}

// Wire form: [[index, numerator, denominator], ...]. Integers that do not fit
// in an i64 are written as decimal strings; both forms are accepted on input.

fn int_to_json(n: &BigInt) -> IntOrString {
    match n.to_i64() {
        Some(v) => IntOrString::Int(v),
        None => IntOrString::Str(n.to_string()),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntOrString {
    Int(i64),
    Str(String),
}

impl IntOrString {
    fn to_bigint(&self) -> std::result::Result<BigInt, String> {
        match self {
            IntOrString::Int(v) => Ok(BigInt::from(*v)),
            IntOrString::Str(s) => s.trim().parse().map_err(|_| format!("bad integer {s:?}")),
        }
    }
}

impl Serialize for FiniteVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.entries.len()))?;
        for (&n, c) in &self.entries {
            seq.serialize_element(&(n, int_to_json(c.numer()), int_to_json(c.denom())))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for FiniteVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let triples = Vec::<(i64, IntOrString, IntOrString)>::deserialize(d)?;
        let mut v = FiniteVector::zero();
        for (n, num, den) in triples {
            let num = num.to_bigint().map_err(de::Error::custom)?;
            let den = den.to_bigint().map_err(de::Error::custom)?;
            if den.is_zero() {
                return Err(de::Error::custom(format!("zero denominator at index {n}")));
            }
            v.add_term(n, Rational::new(num, den));
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::rational::ratio;

    #[test]
    fn no_stored_zeros() {
        let mut v = FiniteVector::basis(3);
        v.add_term(3, ratio(-1, 1));
        assert!(v.is_zero());
        assert_eq!(v, FiniteVector::zero());
        let w = FiniteVector::from_terms([(1, ratio(0, 1)), (2, ratio(1, 2))]);
        assert_eq!(w.support_len(), 1);
    }

    #[test]
    fn norms() {
        let v = FiniteVector::from_terms([(0, ratio(3, 1)), (5, ratio(-4, 1))]);
        assert_eq!(v.l1_norm(), ratio(7, 1));
        assert_eq!(v.l2_norm_squared(), ratio(25, 1));
        assert_eq!(v.sup_norm(), ratio(4, 1));
        assert_eq!(FiniteVector::zero().sup_norm(), ratio(0, 1));
    }

    #[test]
    fn wire_form() {
        let v = FiniteVector::from_terms([(0, ratio(1, 1)), (-2, ratio(-3, 8))]);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "[[-2,-3,8],[0,1,1]]");
        let back: FiniteVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
        let big: FiniteVector = serde_json::from_str(r#"[[1,"1","36893488147419103232"]]"#).unwrap();
        assert_eq!(big, FiniteVector::term(1, crate::seq::rational::pow2(-65)));
        assert_eq!(
            serde_json::to_string(&big).unwrap(),
            r#"[[1,1,"36893488147419103232"]]"#
        );
        assert!(serde_json::from_str::<FiniteVector>("[[0,1,0]]").is_err());
    }

    #[test]
    fn shorthand() {
        assert_eq!(parse_basis_shorthand("e0").unwrap(), FiniteVector::basis(0));
        assert_eq!(parse_basis_shorthand("e-3").unwrap(), FiniteVector::basis(-3));
        assert!(parse_basis_shorthand("0").unwrap().is_zero());
        assert!(parse_basis_shorthand("x1").is_err());
    }
}
