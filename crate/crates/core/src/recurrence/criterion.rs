use serde::Serialize;

use super::require_unilateral;
use crate::ap::{find_homogeneous_ap, ApWitness, HitSet};
use crate::error::{Error, Result};
use crate::seq::rational::{self, Rational};
use crate::seq::{SpaceSpec, WeightSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionCell {
    /// Basis position offset.
    pub p: u64,
    pub m: u64,
    /// Smallest step with `a_{jq+p} / a_p < ε` for `1 <= j <= m`.
    pub q: Option<u64>,
    /// The position `p = 0` may or may not belong to the criterion.
    pub p_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionReport {
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    pub p_max: u64,
    pub m_max: u64,
    pub q_max: u64,
    pub includes_p_zero: bool,
    /// Row-major over `p = 0..=p_max`, then `m = 1..=m_max`.
    pub cells: Vec<CriterionCell>,
    /// True iff every cell has a step. Even then this is finite evidence only.
    pub complete: bool,
    /// True iff some cell has no step within `q_max`.
    pub inconclusive: bool,
}

impl CriterionReport {
    pub fn get(&self, p: u64, m: u64) -> Option<u64> {
        self.cells.iter().find(|c| c.p == p && c.m == m).and_then(|c| c.q)
    }
}

/// For every `p <= p_max` and `1 <= m <= m_max`, the smallest `q <= q_max`
/// with `‖L_{jq} e_p‖ = a_{jq+p} / a_p < ε` for all `1 <= j <= m`
/// (unilateral backward shift, `L` the forward lift).
pub fn shift_ap_criterion(
    w: &WeightSpec,
    space: &SpaceSpec,
    epsilon: &Rational,
    p_max: u64,
    m_max: u64,
    q_max: u64,
) -> Result<CriterionReport> {
    require_unilateral(space, "the progression criterion")?;
    w.validate()?;
    if *epsilon <= Rational::from_integer(0.into()) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    if m_max == 0 || q_max == 0 {
        return Err(Error::InvalidArgument("m_max and q_max must be positive".into()));
    }
    let mut cells = Vec::new();
    for p in 0..=p_max {
        for m in 1..=m_max {
            let mut found = None;
            for q in 1..=q_max {
                if all_small(w, epsilon, p, m, q)? {
                    found = Some(q);
                    break;
                }
            }
            cells.push(CriterionCell {
                p,
                m,
                q: found,
                p_zero: p == 0,
            });
        }
    }
    let complete = cells.iter().all(|c| c.q.is_some());
    Ok(CriterionReport {
        epsilon: epsilon.clone(),
        p_max,
        m_max,
        q_max,
        includes_p_zero: true,
        cells,
        complete,
        inconclusive: !complete,
    })
}

fn all_small(w: &WeightSpec, epsilon: &Rational, p: u64, m: u64, q: u64) -> Result<bool> {
    for j in 1..=m {
        let n = j
            .checked_mul(q)
            .and_then(|v| v.checked_add(p))
            .filter(|&v| v <= i64::MAX as u64)
            .ok_or_else(|| Error::InvalidArgument("index overflow".into()))?;
        if w.range_product(p as i64 + 1, n as i64)?.recip() >= *epsilon {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `∪_{m <= M} {l·q_m : 1 <= l <= m}`; it contains `{q_M, 2q_M, ..., M·q_M}`.
pub fn sucesion_alap_transform(q_list: &[u64]) -> Result<HitSet> {
    if q_list.is_empty() {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    if q_list.contains(&0) {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    let mut out = Vec::new();
    for (m, &q) in (1u64..).zip(q_list) {
        for l in 1..=m {
            out.push(
                l.checked_mul(q)
                    .ok_or_else(|| Error::InvalidArgument("step product overflow".into()))?,
            );
        }
    }
    HitSet::from_unsorted(out, None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KitaiRow {
    pub n: u64,
    /// `‖B_ω^n e_j‖`, zero once `n > j`.
    #[serde(with = "rational::serde_str")]
    pub backward_norm: Rational,
    /// `‖L_n e_j‖ = (∏_{l=j+1}^{j+n} ω_l)^{-1}`.
    #[serde(with = "rational::serde_str")]
    pub lift_norm: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KitaiProbe {
    pub index: u64,
    pub rows: Vec<KitaiRow>,
    /// Largest lift norm over the second half of the sequence.
    #[serde(with = "rational::serde_str")]
    pub tail_max_lift: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KitaiReport {
    pub probes: Vec<KitaiProbe>,
    /// Longest `{q, 2q, ..., Lq}` inside the sequence.
    pub homogeneous_ap: Option<ApWitness>,
    /// Every probe's tail lift norms stay below 1.
    pub pass: bool,
}

/// Finite evidence for the Kitai-type criterion along a sequence `(m_k)`
/// with progressions whose initial term equals their step.
pub fn kitai_ap_check(w: &WeightSpec, space: &SpaceSpec, seq: &HitSet, probes: &[u64]) -> Result<KitaiReport> {
    require_unilateral(space, "the Kitai check")?;
    w.validate()?;
    let tail_start = seq.len() / 2;
    let mut out = Vec::new();
    for &j in probes {
        let j = i64::try_from(j).map_err(|_| Error::InvalidArgument(format!("probe {j} too large")))?;
        let mut rows = Vec::new();
        let mut tail_max = Rational::from_integer(0.into());
        for (pos, &n) in seq.elements().iter().enumerate() {
            let n_i = i64::try_from(n).map_err(|_| Error::InvalidArgument(format!("index {n} too large")))?;
            let backward_norm = if n_i > j {
                Rational::from_integer(0.into())
            } else {
                w.range_product(j - n_i + 1, j)?
            };
            let lift_norm = w.range_product(j + 1, j + n_i)?.recip();
            if pos >= tail_start && lift_norm > tail_max {
                tail_max = lift_norm.clone();
            }
            rows.push(KitaiRow {
                n,
                backward_norm,
                lift_norm,
            });
        }
        out.push(KitaiProbe {
            index: j as u64,
            rows,
            tail_max_lift: tail_max,
        });
    }
    let one = Rational::from_integer(1.into());
    let pass = !seq.is_empty() && !out.is_empty() && out.iter().all(|p| p.tail_max_lift < one);
    Ok(KitaiReport {
        probes: out,
        homogeneous_ap: longest_homogeneous(seq),
        pass,
    })
}

fn longest_homogeneous(seq: &HitSet) -> Option<ApWitness> {
    // a homogeneous progression of length L contains one of each shorter length
    let mut best = None;
    let mut len = 1;
    while let Some(w) = find_homogeneous_ap(seq, len) {
        best = Some(w);
        len += 1;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::rational::{integer, ratio};
    use crate::seq::{Laterality, Norm, Valley};

    #[test]
    fn constant_two_gives_seven() {
        let r = shift_ap_criterion(
            &WeightSpec::constant(integer(2)),
            &SpaceSpec::L1,
            &ratio(1, 100),
            3,
            3,
            50,
        )
        .unwrap();
        assert_eq!(r.cells.len(), 12);
        assert!(r.cells.iter().all(|c| c.q == Some(7)));
        assert!(r.complete && !r.inconclusive && r.includes_p_zero);
        assert!(r.cells.iter().filter(|c| c.p_zero).all(|c| c.p == 0));
    }

    #[test]
    fn unit_weights_never_small() {
        let r = shift_ap_criterion(&WeightSpec::Unit, &SpaceSpec::L1, &ratio(1, 2), 3, 3, 10_000).unwrap();
        assert!(r.cells.iter().all(|c| c.q.is_none()));
        assert!(r.inconclusive && !r.complete);
    }

    #[test]
    fn valley_grid_is_populated() {
        let r = shift_ap_criterion(&WeightSpec::Valley { m: 3 }, &SpaceSpec::L1, &ratio(1, 8), 3, 3, 7200).unwrap();
        assert!(r.complete);
        assert!(r.cells.iter().all(|c| c.q.unwrap() <= 720));
    }

    #[test]
    fn bilateral_is_rejected() {
        let s = SpaceSpec::new(Norm::L1, Laterality::Bilateral);
        assert!(shift_ap_criterion(&WeightSpec::Unit, &s, &ratio(1, 2), 1, 1, 1).is_err());
    }

    #[test]
    fn sucesion_examples() {
        assert_eq!(
            sucesion_alap_transform(&[5, 7, 9]).unwrap().elements(),
            &[5, 7, 9, 14, 18, 27]
        );
        assert_eq!(sucesion_alap_transform(&[4]).unwrap().elements(), &[4]);
        let s = sucesion_alap_transform(&[3, 4, 5]).unwrap();
        assert_eq!(find_homogeneous_ap(&s, 3).map(|w| w.step), Some(5));
        assert!(sucesion_alap_transform(&[]).is_err());
    }

    #[test]
    fn kitai_constant_two() {
        let seq = HitSet::interval(1, 50);
        let r = kitai_ap_check(&WeightSpec::constant(integer(2)), &SpaceSpec::L1, &seq, &[0, 1]).unwrap();
        assert!(r.pass);
        for probe in &r.probes {
            for row in &probe.rows {
                assert_eq!(row.lift_norm, crate::seq::rational::pow2(-(row.n as i64)));
                let expect_zero = row.n > probe.index;
                assert_eq!(row.backward_norm == Rational::from_integer(0.into()), expect_zero);
            }
        }
        assert!(r.homogeneous_ap.unwrap().length >= 7);
    }

    #[test]
    fn kitai_unit_fails() {
        let r = kitai_ap_check(&WeightSpec::Unit, &SpaceSpec::L1, &HitSet::interval(1, 20), &[0]).unwrap();
        assert!(!r.pass);
        assert!(r.probes[0].rows.iter().all(|row| row.lift_norm == integer(1)));
    }

    #[test]
    fn kitai_valley() {
        let v = Valley::new(3).unwrap();
        let steps: Vec<u64> = (1..=3).map(|m| v.step(m).unwrap()).collect();
        let seq = sucesion_alap_transform(&steps).unwrap();
        let r = kitai_ap_check(&WeightSpec::Valley { m: 3 }, &SpaceSpec::L1, &seq, &[0]).unwrap();
        for row in &r.probes[0].rows {
            let m = steps.iter().position(|&q| row.n % q == 0 && row.n / q <= 3).unwrap() as i64 + 1;
            assert_eq!(row.lift_norm, crate::seq::rational::pow2(-(m + 1)));
        }
        assert!(r.pass);
    }
}
