use serde::Serialize;

use super::HitSet;
use crate::error::{Error, Result};
use crate::seq::rational::{self, Rational};

/// Finite-horizon proxies for lower, upper and Banach upper density.
///
/// `lower_proxy` and `upper_proxy` are the min and max of
/// `|S ∩ [0, n]| / (n + 1)` over `n ∈ [⌈h/2⌉, h]`. `banach_upper_proxy` is the
/// best window average `|S ∩ [k, k + window)| / window` over windows inside
/// `[0, h]`, floored at `upper_proxy` (the Banach upper density dominates the
/// upper density, and a fixed window alone can undershoot it).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityEstimate {
    #[serde(with = "rational::serde_str")]
    pub lower_proxy: Rational,
    #[serde(with = "rational::serde_str")]
    pub upper_proxy: Rational,
    #[serde(with = "rational::serde_str")]
    pub banach_upper_proxy: Rational,
    #[serde(with = "rational::serde_str")]
    pub window_maximum: Rational,
    pub horizon: u64,
    pub window: u64,
}

// (num, den) with cross-multiplied comparison
#[derive(Clone, Copy)]
struct Frac(u64, u64);

impl Frac {
    fn lt(self, o: Frac) -> bool {
        u128::from(self.0) * u128::from(o.1) < u128::from(o.0) * u128::from(self.1)
    }

    fn to_rational(self) -> Rational {
        rational::ratio(self.0 as i64, self.1 as i64)
    }
}

pub fn density_report(set: &HitSet, window: u64) -> Result<DensityEstimate> {
    let h = set.horizon();
    if window == 0 || window > h.saturating_add(1) {
        return Err(Error::InvalidArgument(format!(
            "window must be in [1, horizon + 1] = [1, {}], got {window}",
            h.saturating_add(1)
        )));
    }
    let el = set.elements();
    // |S ∩ [0, x]|
    let count_upto = |x: u64| el.partition_point(|&e| e <= x) as u64;

    let start = h.div_ceil(2);
    let first = Frac(count_upto(start), start + 1);
    let (mut lower, mut upper) = (first, first);
    for n in start + 1..=h {
        let f = Frac(count_upto(n), n + 1);
        if f.lt(lower) {
            lower = f;
        }
        if upper.lt(f) {
            upper = f;
        }
    }

    let mut best = 0u64;
    for k in 0..=(h + 1 - window) {
        let below = if k == 0 { 0 } else { count_upto(k - 1) };
        best = best.max(count_upto(k + window - 1) - below);
    }
    let window_max = Frac(best, window);
    let banach = if window_max.lt(upper) { upper } else { window_max };

    Ok(DensityEstimate {
        lower_proxy: lower.to_rational(),
        upper_proxy: upper.to_rational(),
        banach_upper_proxy: banach.to_rational(),
        window_maximum: window_max.to_rational(),
        horizon: h,
        window,
    })
}
