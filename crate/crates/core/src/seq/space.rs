use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{self, Rational};
use super::FiniteVector;
use crate::error::{Error, Result};

/// The `ℓ_p` exponent. Only exponents with exact membership tests exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Norm {
    #[default]
    L1,
    L2,
    Sup,
}

impl Serialize for Norm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Norm::L1 => s.serialize_u8(1),
            Norm::L2 => s.serialize_u8(2),
            Norm::Sup => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Norm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(1) => Ok(Norm::L1),
            Raw::Int(2) => Ok(Norm::L2),
            Raw::Str(s) if matches!(s.as_str(), "1" | "2" | "inf" | "infinity") => Ok(match s.as_str() {
                "1" => Norm::L1,
                "2" => Norm::L2,
                _ => Norm::Sup,
            }),
            _ => Err(serde::de::Error::custom("p must be 1, 2 or \"inf\"")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Laterality {
    /// Indices `n >= 0`.
    #[default]
    Unilateral,
    /// Indices in `ℤ`.
    Bilateral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub p: Norm,
    #[serde(default)]
    pub laterality: Laterality,
}

impl SpaceSpec {
    pub const L1: SpaceSpec = SpaceSpec {
        p: Norm::L1,
        laterality: Laterality::Unilateral,
    };

    pub fn new(p: Norm, laterality: Laterality) -> Self {
        SpaceSpec { p, laterality }
    }

    /// Whether `x` lives in this space (unilateral spaces have no negative
    /// indices).
    pub fn admits(&self, x: &FiniteVector) -> bool {
        self.laterality == Laterality::Bilateral || x.min_index().is_none_or(|n| n >= 0)
    }
}

/// `‖x‖_p < r`, decided exactly (squared for `p = 2`).
pub fn norm_less_than(x: &FiniteVector, p: Norm, r: &Rational) -> bool {
    match p {
        Norm::L1 => x.l1_norm() < *r,
        Norm::L2 => x.l2_norm_squared() < r * r,
        Norm::Sup => x.sup_norm() < *r,
    }
}

/// `‖x‖_p` as an exact rational where one exists; for `p = 2` this is the
/// squared norm.
pub fn norm_exact(x: &FiniteVector, p: Norm) -> Rational {
    match p {
        Norm::L1 => x.l1_norm(),
        Norm::L2 => x.l2_norm_squared(),
        Norm::Sup => x.sup_norm(),
    }
}

/// `‖x‖_p` as a float, for reports.
pub fn norm_f64(x: &FiniteVector, p: Norm) -> f64 {
    match p {
        Norm::L2 => rational::to_f64(&x.l2_norm_squared()).sqrt(),
        _ => rational::to_f64(&norm_exact(x, p)),
    }
}

/// An open ball around a finitely supported rational center.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub center: FiniteVector,
    #[serde(with = "rational::serde_str")]
    pub radius: Rational,
    #[serde(flatten)]
    pub space: SpaceSpec,
}

impl Ball {
    pub fn new(center: FiniteVector, radius: Rational, space: SpaceSpec) -> Result<Self> {
        let b = Ball { center, radius, space };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.radius <= Rational::zero() {
            return Err(Error::InvalidArgument(format!(
                "ball radius must be positive, got {}",
                rational::format(&self.radius)
            )));
        }
        if !self.space.admits(&self.center) {
            return Err(Error::InvalidArgument(
                "ball center has negative indices in a unilateral space".into(),
            ));
        }
        Ok(())
    }

    pub fn contains(&self, x: &FiniteVector) -> bool {
        in_ball(x, self)
    }

    /// Exact distance from the center (squared for `p = 2`).
    pub fn distance_exact(&self, x: &FiniteVector) -> Rational {
        norm_exact(&(x - &self.center), self.space.p)
    }
}

/// Strict, exact open-ball membership `‖x − center‖_p < radius`.
pub fn in_ball(x: &FiniteVector, ball: &Ball) -> bool {
    norm_less_than(&(x - &ball.center), ball.space.p, &ball.radius)
}

/// Relative tolerance for float-mode decisions.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// A finitely supported vector with `f64` coefficients, used only when a
/// scalar sequence has no exact values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FloatVector {
    entries: BTreeMap<i64, f64>,
}

impl FloatVector {
    pub fn from_terms<I: IntoIterator<Item = (i64, f64)>>(terms: I) -> Self {
        let mut entries = BTreeMap::new();
        for (n, c) in terms {
            *entries.entry(n).or_insert(0.0) += c;
        }
        entries.retain(|_, c| *c != 0.0);
        FloatVector { entries }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.entries.iter().map(|(&n, &c)| (n, c))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_terms(self.iter().map(|(n, x)| (n, x * c)))
    }

    pub fn norm(&self, p: Norm) -> f64 {
        let it = self.entries.values().map(|c| c.abs());
        match p {
            Norm::L1 => it.sum(),
            Norm::L2 => it.map(|c| c * c).sum::<f64>().sqrt(),
            Norm::Sup => it.fold(0.0, f64::max),
        }
    }

    pub fn distance(&self, center: &FiniteVector, p: Norm) -> f64 {
        let diff = Self::from_terms(self.iter().chain(center.iter().map(|(n, c)| (n, -rational::to_f64(c)))));
        diff.norm(p)
    }
}

/// Conservative float membership: inside only if the distance is below the
/// radius by the relative tolerance.
pub fn in_ball_float(x: &FloatVector, ball: &Ball) -> bool {
    let r = rational::to_f64(&ball.radius);
    x.distance(&ball.center, ball.space.p) < r * (1.0 - FLOAT_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::rational::ratio;

    fn ball(p: Norm, r: Rational) -> Ball {
        Ball::new(FiniteVector::basis(0), r, SpaceSpec::new(p, Laterality::Unilateral)).unwrap()
    }

    #[test]
    fn membership_examples() {
        let x = &FiniteVector::basis(0) + &FiniteVector::term(1, ratio(1, 8));
        assert!(in_ball(&x, &ball(Norm::L1, ratio(1, 4))));
        assert!(in_ball(&x, &ball(Norm::L2, ratio(1, 4))));
        assert!(!in_ball(&FiniteVector::basis(1), &ball(Norm::L1, ratio(1, 1))));
    }

    #[test]
    fn boundary_is_excluded() {
        let x = &FiniteVector::basis(0) + &FiniteVector::term(4, ratio(1, 4));
        for p in [Norm::L1, Norm::L2, Norm::Sup] {
            assert!(!in_ball(&x, &ball(p, ratio(1, 4))), "{p:?}");
        }
        // ℓ2 distance of (3/10, 4/10) is exactly 1/2
        let y = &FiniteVector::basis(0) + &FiniteVector::from_terms([(1, ratio(3, 10)), (2, ratio(4, 10))]);
        assert!(!in_ball(&y, &ball(Norm::L2, ratio(1, 2))));
        assert!(in_ball(&y, &ball(Norm::L2, ratio(501, 1000))));
        assert!(in_ball(&y, &ball(Norm::Sup, ratio(1, 2))));
    }

    #[test]
    fn ball_validation() {
        assert!(Ball::new(FiniteVector::zero(), ratio(0, 1), SpaceSpec::L1).is_err());
        assert!(Ball::new(FiniteVector::basis(-1), ratio(1, 1), SpaceSpec::L1).is_err());
        let bil = SpaceSpec::new(Norm::L1, Laterality::Bilateral);
        assert!(Ball::new(FiniteVector::basis(-1), ratio(1, 1), bil).is_ok());
    }

    #[test]
    fn norm_wire_form() {
        let s: SpaceSpec = serde_json::from_str(r#"{"p": 2}"#).unwrap();
        assert_eq!(s, SpaceSpec::new(Norm::L2, Laterality::Unilateral));
        let s: SpaceSpec = serde_json::from_str(r#"{"p": "inf", "laterality": "bilateral"}"#).unwrap();
        assert_eq!(s, SpaceSpec::new(Norm::Sup, Laterality::Bilateral));
        assert!(serde_json::from_str::<SpaceSpec>(r#"{"p": 3}"#).is_err());
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"p":"inf","laterality":"bilateral"}"#
        );
    }

    #[test]
    fn float_membership_is_conservative() {
        let b = ball(Norm::L1, ratio(1, 4));
        let on_edge = FloatVector::from_terms([(0, 1.0), (1, 0.25)]);
        assert!(!in_ball_float(&on_edge, &b));
        let inside = FloatVector::from_terms([(0, 1.0), (1, 0.2)]);
        assert!(in_ball_float(&inside, &b));
    }
}
