//! Independent re-verification of search results.
//!
//! Nothing here shares code with the searches: iterates are recomputed one
//! single step at a time and products of weights are multiplied out term by
//! term.

use num_traits::One;

use crate::ap::{ApWitness, Coloring, HitSet};
use crate::error::Result;
use crate::recurrence::{CriterionReport, InverseWitness, PairWitness, RecurrenceWitness, UniversalReport};
use crate::seq::{
    in_ball, in_ball_float, norm_exact, Ball, FiniteVector, FloatVector, Mode, Norm, OperatorSpec, Rational, ScalarSeq,
    SpaceSpec, WeightSpec,
};

/// `T^n x` by `n` single applications.
pub fn iterate_naive(op: &OperatorSpec, x: &FiniteVector, n: u64) -> Result<FiniteVector> {
    let mut y = x.clone();
    for _ in 0..n {
        if y.is_zero() {
            break;
        }
        y = op.apply(&y)?;
    }
    Ok(y)
}

fn progression_memberships(
    op: &OperatorSpec,
    x: &FiniteVector,
    ball: &Ball,
    a: u64,
    q: u64,
    m: u64,
) -> Result<Vec<bool>> {
    (0..=m)
        .map(|j| Ok(in_ball(&iterate_naive(op, x, a + j * q)?, ball)))
        .collect()
}

/// `T^{jq} x ∈ U` for `j = 0..=m`.
pub fn recurrence_memberships(op: &OperatorSpec, ball: &Ball, w: &RecurrenceWitness) -> Result<Vec<bool>> {
    progression_memberships(op, &w.x, ball, 0, w.q, w.m)
}

pub fn recurrence_witness(op: &OperatorSpec, ball: &Ball, w: &RecurrenceWitness) -> Result<bool> {
    Ok(w.q >= 1 && recurrence_memberships(op, ball, w)?.iter().all(|&b| b))
}

pub fn pair_witness(op: &OperatorSpec, u: &Ball, v1: &Ball, v2: &Ball, w: &PairWitness) -> Result<bool> {
    if !(in_ball(&w.x1, u) && in_ball(&w.x2, u)) || w.q == 0 {
        return Ok(false);
    }
    let one = progression_memberships(op, &w.x1, v1, w.a, w.q, w.m)?;
    let two = progression_memberships(op, &w.x2, v2, w.a, w.q, w.m)?;
    Ok(one.iter().chain(&two).all(|&b| b))
}

/// Every term of the progression lies in the set.
pub fn ap_in_set(set: &HitSet, ap: &ApWitness) -> bool {
    ap.length >= 1 && (0..ap.length).all(|j| set.contains(ap.initial + j * ap.step))
}

/// No monochromatic `k`-term progression in `{1, ..., n}` (position `i` of
/// the coloring is the color of `i + 1`).
pub fn coloring_avoids_aps(coloring: &Coloring, k: u64) -> bool {
    let n = coloring.0.len() as u64;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return n == 0;
    }
    for a in 1..=n {
        for d in 1..=n {
            let last = a + (k - 1) * d;
            if last > n {
                break;
            }
            let c = coloring.0[(a - 1) as usize];
            if (1..k).all(|j| coloring.0[(a + j * d - 1) as usize] == c) {
                return false;
            }
        }
    }
    true
}

/// `T^{−jn} y = T^{(m−j)n} x` for `j = 0..=m`, by single steps.
pub fn inverse_contract(op: &OperatorSpec, x: &FiniteVector, w: &InverseWitness, n: u64, m: u64) -> Result<bool> {
    for j in 0..=m {
        let mut back = w.y.clone();
        for _ in 0..j * n {
            back = op.apply_inverse(&back)?;
        }
        if back != iterate_naive(op, x, (m - j) * n)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `∏_{l=lo}^{hi} ω_l^{-1}`, one weight at a time.
pub fn inverse_weight_product_naive(w: &WeightSpec, lo: u64, hi: u64) -> Result<Rational> {
    let mut acc = Rational::one();
    for l in lo as i64..=hi as i64 {
        acc /= w.weight(l)?;
    }
    Ok(acc)
}

/// Every reported step satisfies the strict inequalities, and no smaller
/// step does.
pub fn criterion_report(w: &WeightSpec, report: &CriterionReport) -> Result<bool> {
    let top = report.p_max + report.m_max * report.q_max;
    // prefix[n] = ∏_{l=1}^{n} ω_l^{-1}, one weight at a time
    let mut prefix = Vec::with_capacity(top as usize + 1);
    prefix.push(Rational::one());
    for l in 1..=top as i64 {
        let next = &prefix[l as usize - 1] / w.weight(l)?;
        prefix.push(next);
    }
    let small =
        |p: u64, m: u64, q: u64| (1..=m).all(|j| &prefix[(j * q + p) as usize] / &prefix[p as usize] < report.epsilon);
    for c in &report.cells {
        if let Some(q) = c.q {
            if !small(c.p, c.m, q) || (1..q).any(|smaller| small(c.p, c.m, smaller)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Recomputes `‖λ_{lk} B^{lk} ỹ − y‖_p` for each `l` from a freshly built
/// `ỹ`, stepping the unweighted shift one index at a time.
pub fn universal_report(
    lambda: &ScalarSeq,
    y: &FiniteVector,
    m: u64,
    k: u64,
    p: Norm,
    report: &UniversalReport,
) -> Result<bool> {
    let mut tilde = FiniteVector::zero();
    for j in 0..=m {
        for (i, c) in y.iter() {
            tilde.add_term(i + (j * k) as i64, c / lambda.exact(j * k)?);
        }
    }
    let b = OperatorSpec::backward(WeightSpec::Unit, SpaceSpec::new(p, Default::default()));
    if report.errors.len() as u64 != m {
        return Ok(false);
    }
    for l in 1..=m {
        let image = iterate_naive(&b, &tilde, l * k)?.scale(&lambda.exact(l * k)?);
        if norm_exact(&(&image - y), p) != report.errors[l as usize - 1] {
            return Ok(false);
        }
    }
    Ok(report.errors.iter().all(|e| *e <= report.max_error) && (m == 0 || report.errors.contains(&report.max_error)))
}

/// Float recomputation of the largest universal-vector error.
pub fn universal_float(lambda: &ScalarSeq, y: &FiniteVector, m: u64, k: u64, p: Norm) -> Result<f64> {
    let mut worst = 0.0f64;
    for l in 1..=m {
        let mut terms = Vec::new();
        for j in l..=m {
            let factor = lambda.float(l * k)? / lambda.float(j * k)?;
            let shift = ((j - l) * k) as i64;
            terms.extend(
                y.iter()
                    .map(|(i, c)| (i + shift, crate::seq::rational::to_f64(c) * factor)),
            );
        }
        worst = worst.max(FloatVector::from_terms(terms).distance(y, p));
    }
    Ok(worst)
}

/// Counts `a <= horizon` with `λ_a T^{a+iq} x ∈ U` for all `i <= m`, every
/// iterate recomputed from `x`.
#[allow(clippy::too_many_arguments)]
pub fn puig_count(
    scalars: &ScalarSeq,
    op: &OperatorSpec,
    x: &FiniteVector,
    ball: &Ball,
    m: u64,
    q: u64,
    horizon: u64,
    mode: Mode,
) -> Result<u64> {
    let mut count = 0;
    for a in 0..=horizon {
        let mut all = true;
        for i in 0..=m {
            let z = iterate_naive(op, x, a + i * q)?;
            let inside = match mode {
                Mode::Exact => in_ball(&z.scale(&scalars.exact(a)?), ball),
                Mode::Float => in_ball_float(&z.to_float().scale(scalars.float(a)?), ball),
            };
            if !inside {
                all = false;
                break;
            }
        }
        count += u64::from(all);
    }
    Ok(count)
}
