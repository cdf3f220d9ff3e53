use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::rational::{self, Rational};
use super::space::{Laterality, SpaceSpec};
use super::{FiniteVector, WeightSpec};
use crate::error::{Error, Result};

/// Algebraic description of an operator on a sequence space.
///
/// Shifts follow `B_ω e_n = ω_n e_{n−1}` and `F_ω e_n = ω_{n+1} e_{n+1}`; on a
/// unilateral space `B_ω e_0 = 0`. An `r`-fold direct sum acts on component
/// `c` through the global indices `i·r + c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OperatorSpec {
    #[serde(rename = "backward")]
    BackwardShift {
        weights: WeightSpec,
        #[serde(flatten)]
        space: SpaceSpec,
    },
    #[serde(rename = "forward")]
    ForwardShift {
        weights: WeightSpec,
        #[serde(flatten)]
        space: SpaceSpec,
    },
    Scaled {
        #[serde(with = "rational::serde_str")]
        scalar: Rational,
        inner: Box<OperatorSpec>,
    },
    Power {
        exponent: u32,
        inner: Box<OperatorSpec>,
    },
    DirectSum {
        components: Vec<OperatorSpec>,
    },
}

impl OperatorSpec {
    pub fn backward(weights: WeightSpec, space: SpaceSpec) -> Self {
        OperatorSpec::BackwardShift { weights, space }
    }

    pub fn forward(weights: WeightSpec, space: SpaceSpec) -> Self {
        OperatorSpec::ForwardShift { weights, space }
    }

    pub fn scaled(scalar: Rational, inner: OperatorSpec) -> Self {
        OperatorSpec::Scaled {
            scalar,
            inner: Box::new(inner),
        }
    }

    pub fn power(exponent: u32, inner: OperatorSpec) -> Self {
        OperatorSpec::Power {
            exponent,
            inner: Box::new(inner),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorSpec::BackwardShift { weights, .. } | OperatorSpec::ForwardShift { weights, .. } => {
                weights.validate()
            }
            OperatorSpec::Scaled { inner, .. } => inner.validate(),
            OperatorSpec::Power { exponent, inner } => {
                if *exponent == 0 {
                    return Err(Error::InvalidArgument("power exponent must be >= 1".into()));
                }
                inner.validate()
            }
            OperatorSpec::DirectSum { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidArgument("direct sum needs a component".into()));
                }
                components.iter().try_for_each(OperatorSpec::validate)
            }
        }
    }

    /// The space of the innermost (first) shift.
    pub fn space(&self) -> SpaceSpec {
        match self {
            OperatorSpec::BackwardShift { space, .. } | OperatorSpec::ForwardShift { space, .. } => *space,
            OperatorSpec::Scaled { inner, .. } | OperatorSpec::Power { inner, .. } => inner.space(),
            OperatorSpec::DirectSum { components } => components[0].space(),
        }
    }

    /// `T x`.
    pub fn apply(&self, x: &FiniteVector) -> Result<FiniteVector> {
        match self {
            OperatorSpec::BackwardShift { weights, space } => shift(x, -1, *space, |i| weights.weight(i)),
            OperatorSpec::ForwardShift { weights, space } => shift(x, 1, *space, |i| weights.weight(i + 1)),
            OperatorSpec::Scaled { scalar, inner } => Ok(inner.apply(x)?.scale(scalar)),
            OperatorSpec::Power { exponent, inner } => (0..*exponent).try_fold(x.clone(), |y, _| inner.apply(&y)),
            OperatorSpec::DirectSum { components } => direct_sum(x, components, |op, part| op.apply(part)),
        }
    }

    /// `T^n x`, using closed forms for shift powers.
    pub fn apply_power(&self, x: &FiniteVector, n: u64) -> Result<FiniteVector> {
        if n == 0 {
            return Ok(x.clone());
        }
        let k = i64::try_from(n).map_err(|_| Error::InvalidArgument(format!("exponent {n} too large")))?;
        match self {
            OperatorSpec::BackwardShift { weights, space } => {
                shift(x, -k, *space, |i| weights.range_product(i - k + 1, i))
            }
            OperatorSpec::ForwardShift { weights, space } => {
                shift(x, k, *space, |i| weights.range_product(i + 1, i + k))
            }
            OperatorSpec::Scaled { scalar, inner } => Ok(inner.apply_power(x, n)?.scale(&rational::pow(scalar, k))),
            OperatorSpec::Power { exponent, inner } => {
                let total = n
                    .checked_mul(u64::from(*exponent))
                    .ok_or_else(|| Error::InvalidArgument("power exponent overflow".into()))?;
                inner.apply_power(x, total)
            }
            OperatorSpec::DirectSum { components } => direct_sum(x, components, |op, part| op.apply_power(part, n)),
        }
    }

    pub fn is_invertible(&self) -> bool {
        match self {
            OperatorSpec::BackwardShift { space, .. } | OperatorSpec::ForwardShift { space, .. } => {
                space.laterality == Laterality::Bilateral
            }
            OperatorSpec::Scaled { scalar, inner } => !scalar.is_zero() && inner.is_invertible(),
            OperatorSpec::Power { inner, .. } => inner.is_invertible(),
            OperatorSpec::DirectSum { components } => components.iter().all(OperatorSpec::is_invertible),
        }
    }

    /// `T^{-1} x`; only bilateral shifts (and scalings, powers and direct
    /// sums of them) are invertible.
    pub fn apply_inverse(&self, x: &FiniteVector) -> Result<FiniteVector> {
        if !self.is_invertible() {
            return Err(Error::InvalidArgument(
                "operator is not invertible (unilateral shift or zero scalar)".into(),
            ));
        }
        match self {
            OperatorSpec::BackwardShift { weights, space } => {
                shift(x, 1, *space, |i| Ok(weights.weight(i + 1)?.recip()))
            }
            OperatorSpec::ForwardShift { weights, space } => shift(x, -1, *space, |i| Ok(weights.weight(i)?.recip())),
            OperatorSpec::Scaled { scalar, inner } => Ok(inner.apply_inverse(x)?.scale(&scalar.recip())),
            OperatorSpec::Power { exponent, inner } => {
                (0..*exponent).try_fold(x.clone(), |y, _| inner.apply_inverse(&y))
            }
            OperatorSpec::DirectSum { components } => direct_sum(x, components, |op, part| op.apply_inverse(part)),
        }
    }

    /// `T^{-n} x`.
    pub fn apply_inverse_power(&self, x: &FiniteVector, n: u64) -> Result<FiniteVector> {
        (0..n).try_fold(x.clone(), |y, _| self.apply_inverse(&y))
    }
}

/// Moves `e_i` to `e_{i+offset}` with factor `factor(i)`; on a unilateral
/// space, terms landing below 0 vanish.
fn shift<F>(x: &FiniteVector, offset: i64, space: SpaceSpec, factor: F) -> Result<FiniteVector>
where
    F: Fn(i64) -> Result<Rational>,
{
    if !space.admits(x) {
        return Err(Error::InvalidArgument(
            "vector has negative indices in a unilateral space".into(),
        ));
    }
    let mut out = FiniteVector::zero();
    for (i, c) in x.iter() {
        let j = i + offset;
        if j < 0 && space.laterality == Laterality::Unilateral {
            continue;
        }
        out.add_term(j, c * factor(i)?);
    }
    Ok(out)
}

fn direct_sum<F>(x: &FiniteVector, components: &[OperatorSpec], f: F) -> Result<FiniteVector>
where
    F: Fn(&OperatorSpec, &FiniteVector) -> Result<FiniteVector>,
{
    let r = components.len() as i64;
    let mut parts = vec![FiniteVector::zero(); components.len()];
    for (i, c) in x.iter() {
        parts[i.rem_euclid(r) as usize].add_term(i.div_euclid(r), c.clone());
    }
    let mut out = FiniteVector::zero();
    for (c, (op, part)) in components.iter().zip(&parts).enumerate() {
        for (i, coef) in f(op, part)?.iter() {
            out.add_term(i * r + c as i64, coef.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::rational::{integer, ratio};
    use crate::seq::space::Norm;

    fn b() -> OperatorSpec {
        OperatorSpec::backward(WeightSpec::Unit, SpaceSpec::L1)
    }

    fn bilateral() -> SpaceSpec {
        SpaceSpec::new(Norm::L1, Laterality::Bilateral)
    }

    #[test]
    fn apply_examples() {
        let b2 = OperatorSpec::backward(WeightSpec::constant(integer(2)), SpaceSpec::L1);
        assert_eq!(
            b2.apply(&FiniteVector::basis(3)).unwrap(),
            FiniteVector::term(2, integer(2))
        );
        let minus_b = OperatorSpec::scaled(integer(-1), b());
        assert_eq!(
            minus_b.apply(&FiniteVector::basis(1)).unwrap(),
            FiniteVector::term(0, integer(-1))
        );
        let bb = OperatorSpec::backward(WeightSpec::Unit, bilateral());
        assert_eq!(bb.apply(&FiniteVector::basis(0)).unwrap(), FiniteVector::basis(-1));
        assert!(b().apply(&FiniteVector::basis(0)).unwrap().is_zero());
    }

    #[test]
    fn forward_is_right_inverse_of_backward() {
        let w = WeightSpec::Explicit {
            values: vec![integer(2), ratio(1, 3), integer(5), integer(7)],
        };
        let fwd = OperatorSpec::forward(w.clone(), SpaceSpec::L1);
        let bwd = OperatorSpec::backward(w, SpaceSpec::L1);
        let x = FiniteVector::from_terms([(0, ratio(1, 2)), (2, integer(3))]);
        // B_ω F_ω multiplies e_i by ω_{i+1}²
        let y = bwd.apply(&fwd.apply(&x).unwrap()).unwrap();
        assert_eq!(y, FiniteVector::from_terms([(0, ratio(2, 1)), (2, integer(75))]));
    }

    #[test]
    fn power_fast_path_matches_repeated_apply() {
        let ops = [
            OperatorSpec::backward(WeightSpec::Valley { m: 1 }, SpaceSpec::L1),
            OperatorSpec::forward(WeightSpec::constant(ratio(3, 2)), bilateral()),
            OperatorSpec::scaled(integer(-2), OperatorSpec::power(2, b())),
            OperatorSpec::DirectSum {
                components: vec![b(), OperatorSpec::forward(WeightSpec::Unit, SpaceSpec::L1)],
            },
        ];
        let x = FiniteVector::from_terms([(0, integer(1)), (7, ratio(-1, 3)), (30, integer(4))]);
        for op in &ops {
            for n in 0..12 {
                let slow = (0..n).try_fold(x.clone(), |y, _| op.apply(&y)).unwrap();
                assert_eq!(op.apply_power(&x, n).unwrap(), slow, "{op:?} n={n}");
            }
        }
    }

    #[test]
    fn direct_sum_acts_on_residue_classes() {
        let op = OperatorSpec::DirectSum {
            components: vec![b(), OperatorSpec::scaled(integer(3), b())],
        };
        // component 0 index 2 is global 4; component 1 index 2 is global 5
        let x = FiniteVector::from_terms([(4, integer(1)), (5, integer(1))]);
        let y = op.apply(&x).unwrap();
        assert_eq!(y, FiniteVector::from_terms([(2, integer(1)), (3, integer(3))]));
    }

    #[test]
    fn inverses() {
        let op = OperatorSpec::scaled(
            integer(-1),
            OperatorSpec::backward(WeightSpec::constant(ratio(2, 3)), bilateral()),
        );
        let x = FiniteVector::from_terms([(-3, integer(1)), (4, ratio(5, 7))]);
        assert_eq!(op.apply_inverse(&op.apply(&x).unwrap()).unwrap(), x);
        assert_eq!(op.apply(&op.apply_inverse(&x).unwrap()).unwrap(), x);
        let fwd = OperatorSpec::forward(WeightSpec::constant(integer(2)), bilateral());
        assert_eq!(fwd.apply_inverse(&fwd.apply(&x).unwrap()).unwrap(), x);
        assert!(matches!(b().apply_inverse(&x), Err(Error::InvalidArgument(_))));
        assert!(
            !OperatorSpec::scaled(integer(0), OperatorSpec::backward(WeightSpec::Unit, bilateral())).is_invertible()
        );
    }

    #[test]
    fn unilateral_rejects_negative_indices() {
        assert!(b().apply(&FiniteVector::basis(-1)).is_err());
    }

    #[test]
    fn wire_form() {
        let json = r#"{"kind": "backward", "weights": {"kind": "constant", "value": "2/1"}, "p": 1, "laterality": "unilateral"}"#;
        let op: OperatorSpec = serde_json::from_str(json).unwrap();
        assert_eq!(
            op,
            OperatorSpec::backward(WeightSpec::constant(integer(2)), SpaceSpec::L1)
        );
        let nested = OperatorSpec::power(2, OperatorSpec::scaled(integer(-1), op));
        let text = serde_json::to_string(&nested).unwrap();
        assert_eq!(serde_json::from_str::<OperatorSpec>(&text).unwrap(), nested);
        assert!(OperatorSpec::power(0, b()).validate().is_err());
        assert!(OperatorSpec::DirectSum { components: vec![] }.validate().is_err());
    }
}
