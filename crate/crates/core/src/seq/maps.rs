use num_integer::Roots;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{self, Rational};
use super::{FiniteVector, FloatVector, OperatorSpec};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

/// Scalars `λ_n` for the sequence `λ_n T^n`, with `λ_0 := 1` throughout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScalarSeq {
    One,
    /// `λ_n = 2^⌈√n⌉`, exact.
    DyadicSqrt,
    /// `λ_n = e^√n`, float only.
    ExpSqrt,
    /// `λ_1, λ_2, ...` listed explicitly.
    Explicit {
        #[serde(with = "rational::serde_str_vec")]
        values: Vec<Rational>,
    },
}

/// `⌈√n⌉`.
pub fn ceil_sqrt(n: u64) -> u64 {
    let s = n.sqrt();
    if s * s == n {
        s
    } else {
        s + 1
    }
}

impl ScalarSeq {
    pub fn is_exact(&self) -> bool {
        !matches!(self, ScalarSeq::ExpSqrt)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarSeq::Explicit { values } if values.iter().any(|v| *v <= Rational::zero()) => {
                Err(Error::InvalidArgument("explicit scalars must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn exact(&self, n: u64) -> Result<Rational> {
        if n == 0 {
            return Ok(Rational::one());
        }
        match self {
            ScalarSeq::One => Ok(Rational::one()),
            ScalarSeq::DyadicSqrt => Ok(rational::pow2(ceil_sqrt(n) as i64)),
            ScalarSeq::ExpSqrt => Err(Error::ModeMismatch(
                "e^sqrt(n) scalars have no exact values; use float mode".into(),
            )),
            ScalarSeq::Explicit { values } => values.get(n as usize - 1).cloned().ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "explicit scalar λ_{n} requested but only {} listed",
                    values.len()
                ))
            }),
        }
    }

    pub fn float(&self, n: u64) -> Result<f64> {
        match self {
            ScalarSeq::ExpSqrt => Ok((n as f64).sqrt().exp()),
            _ => Ok(rational::to_f64(&self.exact(n)?)),
        }
    }
}

/// `n ↦ T^n` or `n ↦ λ_n T^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapSequence {
    Iterates(OperatorSpec),
    ScaledIterates { scalars: ScalarSeq, operator: OperatorSpec },
}

impl MapSequence {
    /// Scaling by `One` reduces to plain iterates.
    pub fn new(operator: OperatorSpec, scalars: Option<ScalarSeq>) -> Self {
        match scalars {
            None | Some(ScalarSeq::One) => MapSequence::Iterates(operator),
            Some(scalars) => MapSequence::ScaledIterates { scalars, operator },
        }
    }

    pub fn operator(&self) -> &OperatorSpec {
        match self {
            MapSequence::Iterates(op) | MapSequence::ScaledIterates { operator: op, .. } => op,
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            MapSequence::Iterates(_) => true,
            MapSequence::ScaledIterates { scalars, .. } => scalars.is_exact(),
        }
    }

    pub fn scalar_exact(&self, n: u64) -> Result<Rational> {
        match self {
            MapSequence::Iterates(_) => Ok(Rational::one()),
            MapSequence::ScaledIterates { scalars, .. } => scalars.exact(n),
        }
    }

    pub fn scalar_float(&self, n: u64) -> Result<f64> {
        match self {
            MapSequence::Iterates(_) => Ok(1.0),
            MapSequence::ScaledIterates { scalars, .. } => scalars.float(n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.operator().validate()?;
        match self {
            MapSequence::ScaledIterates { scalars, .. } => scalars.validate(),
            _ => Ok(()),
        }
    }
}

/// `T_n x`, exactly.
pub fn iterate(seq: &MapSequence, x: &FiniteVector, n: u64) -> Result<FiniteVector> {
    let lambda = seq.scalar_exact(n)?;
    Ok(seq.operator().apply_power(x, n)?.scale(&lambda))
}

/// `T_n x` with the scalar applied in floating point.
pub fn iterate_float(seq: &MapSequence, x: &FiniteVector, n: u64) -> Result<FloatVector> {
    let lambda = seq.scalar_float(n)?;
    Ok(seq.operator().apply_power(x, n)?.to_float().scale(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::rational::integer;
    use crate::seq::{SpaceSpec, WeightSpec};

    fn b() -> OperatorSpec {
        OperatorSpec::backward(WeightSpec::Unit, SpaceSpec::L1)
    }

    #[test]
    fn ceil_sqrt_values() {
        let got: Vec<u64> = (0..11).map(ceil_sqrt).collect();
        assert_eq!(got, [0, 1, 2, 2, 2, 3, 3, 3, 3, 3, 4]);
    }

    #[test]
    fn iterate_examples() {
        let two_b = OperatorSpec::scaled(integer(2), b());
        let it = MapSequence::new(two_b, None);
        assert!(iterate(&it, &FiniteVector::basis(5), 6).unwrap().is_zero());

        let scaled = MapSequence::new(b(), Some(ScalarSeq::DyadicSqrt));
        assert_eq!(
            iterate(&scaled, &FiniteVector::basis(4), 4).unwrap(),
            FiniteVector::term(0, integer(4))
        );

        let pow = MapSequence::new(OperatorSpec::power(2, b()), None);
        assert_eq!(
            iterate(&pow, &FiniteVector::basis(4), 1).unwrap(),
            FiniteVector::basis(2)
        );
    }

    #[test]
    fn lambda_zero_is_one() {
        let x = FiniteVector::basis(3);
        for s in [
            ScalarSeq::DyadicSqrt,
            ScalarSeq::Explicit {
                values: vec![integer(9)],
            },
        ] {
            let seq = MapSequence::new(b(), Some(s));
            assert_eq!(iterate(&seq, &x, 0).unwrap(), x);
        }
        assert_eq!(ScalarSeq::ExpSqrt.float(0).unwrap(), 1.0);
    }

    #[test]
    fn mode_mismatch() {
        let seq = MapSequence::new(b(), Some(ScalarSeq::ExpSqrt));
        assert!(matches!(
            iterate(&seq, &FiniteVector::basis(3), 1),
            Err(Error::ModeMismatch(_))
        ));
        let y = iterate_float(&seq, &FiniteVector::basis(3), 1).unwrap();
        assert!((y.norm(crate::seq::Norm::L1) - 1f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn one_reduces_to_iterates() {
        assert_eq!(MapSequence::new(b(), Some(ScalarSeq::One)), MapSequence::Iterates(b()));
    }

    #[test]
    fn wire_form() {
        let s: ScalarSeq = serde_json::from_str(r#"{"kind": "dyadic-sqrt"}"#).unwrap();
        assert_eq!(s, ScalarSeq::DyadicSqrt);
        assert_eq!(
            serde_json::to_string(&ScalarSeq::ExpSqrt).unwrap(),
            r#"{"kind":"exp-sqrt"}"#
        );
    }
}
