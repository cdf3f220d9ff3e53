//! Quantitative scaffolding for multiply recurrent, non-weakly-mixing
//! operators: the growth function `f`, its integer inverse `m_l`, Gowers'
//! upper bound on `r_k(n)` and the progression-length function `k(n)`.
//!
//! **Every logarithm in this module is base 2.** Natural logarithms change
//! every value silently.

// `!(x >= a)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;

use crate::error::{Error, Result};

/// `log₂ log₂ log₂ t`.
pub fn log3(t: f64) -> f64 {
    t.log2().log2().log2()
}

/// `f(t) = t · √2^(−√(log₂log₂log₂ t))`, defined for `t >= 4`.
pub fn f_eval(t: f64) -> Result<f64> {
    if !(t >= 4.0) {
        return Err(Error::Domain(format!("f needs t >= 4, got {t}")));
    }
    let l3 = log3(t).max(0.0);
    Ok(t * (-(l3.sqrt()) / 2.0).exp2())
}

const MONOTONE_SAMPLES: u64 = 1024;

/// The unique integer `m >= 4` with `f(m) <= l < f(m + 1)`.
///
/// The bracket starts at `[4, max(16, 4l²)]` and doubles until `f` exceeds
/// `l`. Integer samples across the bracket must be strictly increasing
/// before bisection runs. On the reals `f` dips just above 4, so only
/// integer arguments are ever evaluated.
pub fn m_of_l(l: u64) -> Result<u64> {
    if l < 4 {
        return Err(Error::Domain(format!("m_l needs l >= 4, got {l}")));
    }
    let target = l as f64;
    let f = |m: u64| f_eval(m as f64);

    let mut hi = 16u64.max(l.saturating_mul(l).saturating_mul(4));
    while f(hi)? <= target {
        hi = hi
            .checked_mul(2)
            .ok_or_else(|| Error::Domain(format!("bracket for l = {l} overflows")))?;
    }
    check_monotone(4, hi)?;

    let (mut lo, mut hi) = (4u64, hi);
    let (mut f_lo, mut f_hi) = (f(lo)?, f(hi)?);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let f_mid = f(mid)?;
        if !(f_lo < f_mid && f_mid < f_hi) {
            return Err(Error::MonotonicityViolation {
                left: if f_mid <= f_lo { lo } else { mid },
                right: if f_mid <= f_lo { mid } else { hi },
            });
        }
        if f_mid <= target {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    Ok(lo)
}

/// Strictly increasing `f` on the first integers of `[lo, hi]` and on evenly
/// spaced integer samples across it.
fn check_monotone(lo: u64, hi: u64) -> Result<()> {
    let mut points: Vec<u64> = (lo..=hi.min(lo + 64)).collect();
    let span = hi - lo;
    points.extend(
        (0..=MONOTONE_SAMPLES).map(|i| lo + (u128::from(span) * u128::from(i) / u128::from(MONOTONE_SAMPLES)) as u64),
    );
    points.sort_unstable();
    points.dedup();
    strictly_increasing_on(&points)
}

/// Checks `f(p[i]) < f(p[i+1])` on a sorted grid of integers.
pub fn strictly_increasing_on(points: &[u64]) -> Result<()> {
    let mut prev: Option<(u64, f64)> = None;
    for &p in points {
        let v = f_eval(p as f64)?;
        if let Some((q, fq)) = prev {
            if !(fq < v) {
                return Err(Error::MonotonicityViolation { left: q, right: p });
            }
        }
        prev = Some((p, v));
    }
    Ok(())
}

/// Gowers' bound `n / (log₂log₂ n)^(2^(−2^(k+9))) − 1`, evaluated as
/// `2^(log₂ n − 2^(−2^(k+9))·log₂log₂log₂ n) − 1`.
///
/// In `f64` the correction underflows for every `k >= 2`, so the value is
/// `n − 1` to machine precision; see [`gowers_bound_gap_log2`] for the
/// resolved dependence on `k`.
pub fn gowers_bound(n: f64, k: u32) -> Result<f64> {
    check_bound_domain(n, k)?;
    let eps = (-(2f64.powi(k as i32 + 9))).exp2();
    Ok((n.log2() - eps * log3(n)).exp2() - 1.0)
}

/// `log₂(n − 1 − gowers_bound(n, k))`, computed without forming the bound.
/// Strictly decreasing in `k`, hence the bound is strictly increasing in `k`.
pub fn gowers_bound_gap_log2(n: f64, k: u32) -> Result<f64> {
    check_bound_domain(n, k)?;
    // x = 2^(−2^(k+9)) · L3 and n − 1 − bound = n (1 − 2^(−x))
    let log2_x = -(2f64.powi(k as i32 + 9)) + log3(n).log2();
    let log2_one_minus = if log2_x > -30.0 {
        let x = log2_x.exp2();
        (-(-x * std::f64::consts::LN_2).exp_m1()).log2()
    } else {
        log2_x + std::f64::consts::LN_2.log2()
    };
    Ok(n.log2() + log2_one_minus)
}

fn check_bound_domain(n: f64, k: u32) -> Result<()> {
    if !(n >= 16.0) {
        return Err(Error::Domain(format!("Gowers bound needs n >= 16, got {n}")));
    }
    if k < 2 {
        return Err(Error::Domain(format!("Gowers bound needs k >= 2, got {k}")));
    }
    Ok(())
}

/// `k(n) = ⌊log₂log₂ √L3 − 9⌋` from `L3 = log₂log₂log₂ n`.
pub fn k_of_n(l3: f64) -> Result<i64> {
    if !(l3 > 1.0) {
        return Err(Error::Domain(format!(
            "k(n) needs log2(sqrt(L3)) > 0, i.e. L3 > 1, got L3 = {l3}"
        )));
    }
    k_of_n_from_log2_l3(l3.log2())
}

/// [`k_of_n`] taking `log₂ L3`, for `L3` beyond `f64` range.
pub fn k_of_n_from_log2_l3(log2_l3: f64) -> Result<i64> {
    if !(log2_l3 > 0.0) {
        return Err(Error::Domain(format!("k(n) needs log2(L3) > 0, got {log2_l3}")));
    }
    Ok(((log2_l3 / 2.0).log2() - 9.0).floor() as i64)
}

/// A progression length of at most one carries no information.
pub fn is_vacuous(k: i64) -> bool {
    k <= 1
}

/// Relative residual of `(2^L3)^(1/√L3) = 2^(√L3)`.
pub fn identity_check(l3: f64) -> Result<f64> {
    if !(l3 > 0.0) {
        return Err(Error::Domain(format!("identity check needs L3 > 0, got {l3}")));
    }
    let l2 = l3.exp2();
    let rhs = l3.sqrt().exp2();
    Ok((l2.powf(1.0 / l3.sqrt()) - rhs).abs() / rhs)
}

/// One row of the quantitative table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GowersRow {
    pub l: u64,
    pub m_l: u64,
    pub f_at_m_l: f64,
    /// Gowers bound for `k = 3` at `n = m_l`; absent when `m_l < 16`.
    pub bound_r3: Option<f64>,
    /// `k(m_l)`; absent when `L3(m_l) <= 1`.
    pub k_of_n: Option<i64>,
    pub vacuous: bool,
}

impl GowersRow {
    pub const CSV_HEADER: [&'static str; 6] = ["l", "m_l", "f_at_m_l", "bound_r3", "k_of_n", "vacuous_flag"];

    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.l.to_string(),
            self.m_l.to_string(),
            self.f_at_m_l.to_string(),
            self.bound_r3.map(|b| b.to_string()).unwrap_or_default(),
            self.k_of_n.map(|k| k.to_string()).unwrap_or_default(),
            self.vacuous.to_string(),
        ]
    }
}

pub fn gowers_row(l: u64) -> Result<GowersRow> {
    let m_l = m_of_l(l)?;
    let n = m_l as f64;
    let bound_r3 = gowers_bound(n, 3).ok();
    let k = k_of_n(log3(n)).ok();
    Ok(GowersRow {
        l,
        m_l,
        f_at_m_l: f_eval(n)?,
        bound_r3,
        k_of_n: k,
        vacuous: k.is_none_or(is_vacuous),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1.0)
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_eval(4.0).unwrap(), 4.0);
        assert!(close(f_eval(16.0).unwrap(), 16.0 / 2f64.sqrt(), 1e-12));
        // L3(2^16) = 2, so f = 2^16 · 2^(−√2/2)
        let oracle = 65536.0 * 2f64.powf(-(2f64.sqrt()) / 2.0);
        assert!(close(f_eval(65536.0).unwrap(), oracle, 1e-12));
        assert!((f_eval(65536.0).unwrap() - 4.0144e4).abs() < 5.0);
        assert!(matches!(f_eval(3.9), Err(Error::Domain(_))));
    }

    #[test]
    fn f_dips_on_the_reals_near_four() {
        assert!(f_eval(4.01).unwrap() < f_eval(4.0).unwrap());
        assert!(f_eval(5.0).unwrap() > f_eval(4.0).unwrap());
    }

    #[test]
    fn m_examples() {
        assert_eq!(m_of_l(4).unwrap(), 4);
        assert_eq!(m_of_l(11).unwrap(), 15);
        let v = m_of_l(8).unwrap();
        assert!(f_eval(v as f64).unwrap() <= 8.0 && 8.0 < f_eval(v as f64 + 1.0).unwrap());
        assert!(matches!(m_of_l(3), Err(Error::Domain(_))));
    }

    #[test]
    fn monotonicity_guard_rejects_non_monotone_grids() {
        // 4 < 5 on the integers, but the real point just above 4 is lower.
        assert!(strictly_increasing_on(&[4, 5, 6]).is_ok());
        assert!(matches!(
            strictly_increasing_on(&[6, 5]),
            Err(Error::MonotonicityViolation { left: 6, right: 5 })
        ));
    }

    #[test]
    fn bound_examples() {
        assert!((gowers_bound(65536.0, 3).unwrap() - 65535.0).abs() <= 1.0);
        assert!(matches!(gowers_bound(15.0, 3), Err(Error::Domain(_))));
        let g: Vec<f64> = (2..=4).map(|k| gowers_bound_gap_log2(65536.0, k).unwrap()).collect();
        assert!(g[0] > g[1] && g[1] > g[2], "{g:?}");
        let b: Vec<f64> = (2..=4).map(|k| gowers_bound(65536.0, k).unwrap()).collect();
        assert!(b[0] <= b[1] && b[1] <= b[2]);
    }

    #[test]
    fn gap_matches_direct_evaluation_when_resolvable() {
        // log2(1 - 2^-x) ≈ log2(x ln 2) for small x
        let x: f64 = 1e-10;
        let direct = (-(-x * std::f64::consts::LN_2).exp_m1()).log2();
        let approx = x.log2() + std::f64::consts::LN_2.log2();
        assert!((direct - approx).abs() < 1e-9);
    }

    #[test]
    fn k_examples() {
        assert_eq!(k_of_n(4.0).unwrap(), -9);
        assert!(is_vacuous(-9));
        assert_eq!(k_of_n_from_log2_l3(1024.0).unwrap(), 0);
        assert!(is_vacuous(0));
        assert!(matches!(k_of_n(1.0), Err(Error::Domain(_))));
        assert!(matches!(k_of_n_from_log2_l3(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn identity_examples() {
        assert_eq!(identity_check(4.0).unwrap(), 0.0);
        assert_eq!(identity_check(1.0).unwrap(), 0.0);
        assert!(identity_check(6.25).unwrap() < 1e-9);
        assert!(identity_check(0.0).is_err());
    }

    #[test]
    fn rows() {
        let r = gowers_row(4).unwrap();
        assert_eq!((r.m_l, r.bound_r3, r.k_of_n, r.vacuous), (4, None, None, true));
        let r = gowers_row(100).unwrap();
        assert!(r.bound_r3.is_some() && r.k_of_n.is_some() && r.vacuous);
        assert_eq!(r.csv_fields().len(), GowersRow::CSV_HEADER.len());
    }
}
