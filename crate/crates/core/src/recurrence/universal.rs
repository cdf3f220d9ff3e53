use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seq::rational::{self, Rational};
use crate::seq::{norm_exact, FiniteVector, FloatVector, Norm, OperatorSpec, ScalarSeq, SpaceSpec, WeightSpec};

fn check(y: &FiniteVector, k: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if !SpaceSpec::L1.admits(y) {
        return Err(Error::InvalidArgument("y must live on non-negative indices".into()));
    }
    if let Some(top) = y.max_index() {
        if k <= top as u64 {
            return Err(Error::Precondition(format!(
                "k = {k} must exceed the largest support index {top} of y"
            )));
        }
    }
    Ok(())
}

fn offset(j: u64, k: u64) -> Result<(u64, i64)> {
    let n = j
        .checked_mul(k)
        .filter(|&n| n <= i64::MAX as u64)
        .ok_or_else(|| Error::InvalidArgument("index overflow".into()))?;
    Ok((n, n as i64))
}

/// `ỹ = Σ_{j=0}^{m} S^{jk}(y) / λ_{jk}` with `S` the unweighted forward shift.
pub fn ap_universal_vector(lambda: &ScalarSeq, y: &FiniteVector, m: u64, k: u64) -> Result<FiniteVector> {
    check(y, k)?;
    let mut out = FiniteVector::zero();
    for j in 0..=m {
        let (n, shift) = offset(j, k)?;
        out = &out + &y.translate(shift).scale(&lambda.exact(n)?.recip());
    }
    Ok(out)
}

/// Float counterpart of [`ap_universal_vector`], for scalars without exact values.
pub fn ap_universal_vector_float(lambda: &ScalarSeq, y: &FiniteVector, m: u64, k: u64) -> Result<FloatVector> {
    check(y, k)?;
    let mut terms = Vec::new();
    for j in 0..=m {
        let (n, shift) = offset(j, k)?;
        let inv = 1.0 / lambda.float(n)?;
        terms.extend(y.iter().map(|(i, c)| (i + shift, rational::to_f64(c) * inv)));
    }
    Ok(FloatVector::from_terms(terms))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniversalReport {
    /// `‖λ_{lk} B^{lk} ỹ − y‖_p` for `l = 1..=m`; squared when `p = 2`.
    #[serde(with = "rational::serde_str_vec")]
    pub errors: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub max_error: Rational,
    /// Smallest `l` attaining the maximum.
    pub argmax_l: Option<u64>,
    pub squared: bool,
}

impl UniversalReport {
    /// The maximum error as a norm (square root taken for `p = 2`).
    pub fn max_error_f64(&self) -> f64 {
        let v = rational::to_f64(&self.max_error);
        if self.squared {
            v.sqrt()
        } else {
            v
        }
    }
}

/// `max_{1<=l<=m} ‖λ_{lk} B^{lk}(ỹ) − y‖_p`, computed by applying the shift
/// to the constructed vector (the `l = m` term is 0).
pub fn verify_universal(lambda: &ScalarSeq, y: &FiniteVector, m: u64, k: u64, p: Norm) -> Result<UniversalReport> {
    let tilde = ap_universal_vector(lambda, y, m, k)?;
    let b = OperatorSpec::backward(WeightSpec::Unit, SpaceSpec::new(p, Default::default()));
    let mut errors = Vec::new();
    for l in 1..=m {
        let (n, _) = offset(l, k)?;
        let image = b.apply_power(&tilde, n)?.scale(&lambda.exact(n)?);
        errors.push(norm_exact(&(&image - y), p));
    }
    let mut max_error = Rational::zero();
    let mut argmax_l = None;
    for (l, e) in (1..).zip(&errors) {
        if argmax_l.is_none() || *e > max_error {
            max_error = e.clone();
            argmax_l = Some(l);
        }
    }
    Ok(UniversalReport {
        errors,
        max_error,
        argmax_l,
        squared: p == Norm::L2,
    })
}

/// Float counterpart of [`verify_universal`].
pub fn verify_universal_float(lambda: &ScalarSeq, y: &FiniteVector, m: u64, k: u64, p: Norm) -> Result<f64> {
    let tilde = ap_universal_vector_float(lambda, y, m, k)?;
    let mut worst = 0.0f64;
    for l in 1..=m {
        let (n, shift) = offset(l, k)?;
        let scale = lambda.float(n)?;
        let image = FloatVector::from_terms(
            tilde
                .iter()
                .filter(|&(i, _)| i >= shift)
                .map(|(i, c)| (i - shift, c * scale)),
        );
        worst = worst.max(image.distance(y, p));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::rational::{integer, pow2, ratio};

    #[test]
    fn construction_examples() {
        let t = ap_universal_vector(&ScalarSeq::DyadicSqrt, &FiniteVector::basis(0), 2, 16).unwrap();
        assert_eq!(
            t,
            FiniteVector::from_terms([(0, integer(1)), (16, pow2(-4)), (32, pow2(-6))])
        );
        let y = FiniteVector::from_terms([(1, ratio(2, 3)), (3, integer(-1))]);
        assert_eq!(ap_universal_vector(&ScalarSeq::DyadicSqrt, &y, 0, 9).unwrap(), y);
        assert_eq!(
            ap_universal_vector(&ScalarSeq::One, &FiniteVector::basis(0), 2, 1).unwrap(),
            FiniteVector::from_terms([(0, integer(1)), (1, integer(1)), (2, integer(1))])
        );
    }

    #[test]
    fn precondition() {
        let y = FiniteVector::basis(5);
        assert!(matches!(
            ap_universal_vector(&ScalarSeq::One, &y, 2, 5),
            Err(Error::Precondition(_))
        ));
        assert!(ap_universal_vector(&ScalarSeq::ExpSqrt, &FiniteVector::basis(0), 1, 4).is_err());
    }

    #[test]
    fn errors() {
        let e0 = FiniteVector::basis(0);
        let r = verify_universal(&ScalarSeq::DyadicSqrt, &e0, 2, 16, Norm::L1).unwrap();
        assert_eq!(r.max_error, ratio(1, 4));
        assert_eq!(r.errors, [ratio(1, 4), integer(0)]);
        assert_eq!(r.argmax_l, Some(1));
        let r = verify_universal(&ScalarSeq::DyadicSqrt, &e0, 0, 16, Norm::L1).unwrap();
        assert_eq!(r.max_error, integer(0));
        let errs: Vec<Rational> = [16, 64, 256]
            .iter()
            .map(|&k| {
                verify_universal(&ScalarSeq::DyadicSqrt, &e0, 2, k, Norm::L1)
                    .unwrap()
                    .max_error
            })
            .collect();
        assert!(errs.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn float_matches_exact() {
        let e0 = FiniteVector::basis(0);
        let exact = verify_universal(&ScalarSeq::DyadicSqrt, &e0, 3, 25, Norm::L2).unwrap();
        let float = verify_universal_float(&ScalarSeq::DyadicSqrt, &e0, 3, 25, Norm::L2).unwrap();
        assert!((exact.max_error_f64() - float).abs() < 1e-12);
        let e = verify_universal_float(&ScalarSeq::ExpSqrt, &e0, 1, 16, Norm::L1).unwrap();
        assert!((e - 0.0).abs() < 1e-12);
        let e = verify_universal_float(&ScalarSeq::ExpSqrt, &e0, 2, 16, Norm::L1).unwrap();
        assert!((e - (4.0 - 32f64.sqrt()).exp()).abs() < 1e-12);
    }
}
