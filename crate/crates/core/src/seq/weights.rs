use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{self, Rational};
use crate::ap::HitSet;
use crate::error::{Error, Result};

/// Weights `ω_n` of a weighted shift, with the convention `B_ω e_n = ω_n e_{n−1}`.
///
/// The basis size `a_n = ∏_{l=1}^{n} ω_l^{-1}` is the norm of the `n`-fold
/// forward lift of `e_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightSpec {
    /// `ω_n = value` for every `n`.
    Constant {
        #[serde(with = "rational::serde_str")]
        value: Rational,
    },
    /// `ω_1, ω_2, ...` listed explicitly; other indices are inaccessible.
    Explicit {
        #[serde(with = "rational::serde_str_vec")]
        values: Vec<Rational>,
    },
    /// The valley family with `m` valley levels, see [`Valley`].
    Valley { m: u32 },
    /// `ω_n = 1`.
    Unit,
}

impl WeightSpec {
    pub fn constant(value: Rational) -> Self {
        WeightSpec::Constant { value }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::Constant { value } if *value <= Rational::zero() => Err(Error::InvalidArgument(format!(
                "constant weight must be positive, got {}",
                rational::format(value)
            ))),
            WeightSpec::Explicit { values } => match values.iter().position(|w| *w <= Rational::zero()) {
                Some(i) => Err(Error::InvalidArgument(format!(
                    "explicit weight {} (index {}) is not positive",
                    rational::format(&values[i]),
                    i + 1
                ))),
                None => Ok(()),
            },
            WeightSpec::Valley { m } => Valley::new(*m).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// `ω_n`.
    pub fn weight(&self, n: i64) -> Result<Rational> {
        self.range_product(n, n)
    }

    /// `∏_{l=lo}^{hi} ω_l`, 1 for an empty range.
    pub fn range_product(&self, lo: i64, hi: i64) -> Result<Rational> {
        if hi < lo {
            return Ok(Rational::one());
        }
        match self {
            WeightSpec::Unit => Ok(Rational::one()),
            WeightSpec::Constant { value } => Ok(rational::pow(value, hi - lo + 1)),
            WeightSpec::Valley { m } => {
                let v = Valley::new(*m)?;
                // ω_l = a_{l−1}/a_l telescopes
                Ok(rational::pow2(i64::from(v.depth(hi)) - i64::from(v.depth(lo - 1))))
            }
            WeightSpec::Explicit { values } => {
                let len = values.len() as i64;
                for l in [lo, hi] {
                    if l < 1 || l > len {
                        return Err(Error::WeightOutOfRange {
                            index: l,
                            range: format!("[1, {len}]"),
                        });
                    }
                }
                Ok(values[(lo - 1) as usize..hi as usize].iter().product())
            }
        }
    }

    /// `a_n = ∏_{l=1}^{n} ω_l^{-1}`.
    pub fn weight_product(&self, n: u64) -> Result<Rational> {
        Ok(self.range_product(1, n as i64)?.recip())
    }

    /// An upper bound for `sup_n ω_n`, hence `‖B_ω^n‖ <= bound^n` on `ℓ_p`.
    pub fn sup_bound(&self) -> Rational {
        match self {
            WeightSpec::Unit => Rational::one(),
            WeightSpec::Constant { value } => value.clone(),
            WeightSpec::Valley { .. } => rational::integer(2),
            WeightSpec::Explicit { values } => values.iter().max().cloned().unwrap_or_else(Rational::one),
        }
    }
}

/// A shift that is multiply recurrent but not mixing.
///
/// With `q_m = (m+3)!` for `1 <= m <= M`, the profile
/// `g(n) = max_{m, 1<=j<=m} max(0, m + 1 − dist(n, [j·q_m, j·q_m + m]))`
/// is 1-Lipschitz, and `a_n = 2^{−g(n)}`, `ω_n = a_{n−1}/a_n ∈ {1/2, 1, 2}`.
/// So `a_{j·q_m + p} = 2^{−(m+1)}` for `p, j <= m`, and `a_n = 1` away from
/// the valleys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valley {
    levels: u32,
    steps: Vec<i64>,
}

impl Valley {
    /// `(m+3)!` must fit in an `i64`.
    pub const MAX_LEVELS: u32 = 17;

    pub fn new(levels: u32) -> Result<Self> {
        if levels == 0 || levels > Self::MAX_LEVELS {
            return Err(Error::InvalidArgument(format!(
                "valley levels must be in [1, {}], got {levels}",
                Self::MAX_LEVELS
            )));
        }
        let steps = (1..=i64::from(levels)).map(|m| (1..=m + 3).product()).collect();
        Ok(Valley { levels, steps })
    }

    /// `q_m = (m+3)!`.
    pub fn step(&self, m: u32) -> Option<u64> {
        self.steps.get((m as usize).checked_sub(1)?).map(|&q| q as u64)
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// `g(n)`, so that `a_n = 2^{−g(n)}`.
    pub fn depth(&self, n: i64) -> u32 {
        let mut g = 0i64;
        for (m, &q) in (1..=i64::from(self.levels)).zip(&self.steps) {
            for j in 1..=m {
                let (lo, hi) = (j * q, j * q + m);
                let dist = if n < lo {
                    lo - n
                } else if n > hi {
                    n - hi
                } else {
                    0
                };
                g = g.max(m + 1 - dist);
            }
        }
        g as u32
    }

    /// `{n <= horizon : a_n < 1}`.
    pub fn indices(&self, horizon: u64) -> HitSet {
        let mut out = Vec::new();
        for (m, &q) in (1..=i64::from(self.levels)).zip(&self.steps) {
            for j in 1..=m {
                let lo = (j * q - m).max(0);
                let hi = (j * q + 2 * m).min(horizon as i64);
                out.extend((lo..=hi).filter(|&n| self.depth(n) > 0).map(|n| n as u64));
            }
        }
        HitSet::from_unsorted(out, Some(horizon)).expect("indices are bounded by the horizon")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::rational::{integer, ratio};

    /// Direct product of the individual weights.
    fn naive_product(w: &WeightSpec, n: u64) -> Rational {
        (1..=n as i64).map(|l| w.weight(l).unwrap().recip()).product()
    }

    #[test]
    fn products() {
        assert_eq!(
            WeightSpec::constant(integer(2)).weight_product(5).unwrap(),
            ratio(1, 32)
        );
        assert_eq!(WeightSpec::Unit.weight_product(10_000).unwrap(), integer(1));
        let e = WeightSpec::Explicit {
            values: vec![integer(2), ratio(1, 3), integer(5)],
        };
        assert_eq!(e.weight_product(3).unwrap(), ratio(3, 10));
        assert!(matches!(
            e.weight_product(4),
            Err(Error::WeightOutOfRange { index: 4, .. })
        ));
        assert!(matches!(e.weight(0), Err(Error::WeightOutOfRange { index: 0, .. })));
    }

    #[test]
    fn valley_depths() {
        let v = Valley::new(3).unwrap();
        let w = WeightSpec::Valley { m: 3 };
        assert_eq!((v.step(1), v.step(2), v.step(3)), (Some(24), Some(120), Some(720)));
        for m in 1..=3u32 {
            let q = v.step(m).unwrap();
            for j in 1..=u64::from(m) {
                for p in 0..=u64::from(m) {
                    assert_eq!(
                        w.weight_product(j * q + p).unwrap(),
                        rational::pow2(-(i64::from(m) + 1))
                    );
                }
            }
        }
        assert_eq!(w.weight_product(500).unwrap(), integer(1));
        assert_eq!(w.weight_product(0).unwrap(), integer(1));
    }

    #[test]
    fn valley_weights_are_bounded() {
        let w = WeightSpec::Valley { m: 3 };
        for n in -5..2400 {
            let x = w.weight(n).unwrap();
            assert!(x == ratio(1, 2) || x == integer(1) || x == integer(2), "ω_{n} = {x}");
        }
    }

    #[test]
    fn closed_forms_match_products() {
        let cases = [
            WeightSpec::constant(ratio(3, 2)),
            WeightSpec::Valley { m: 2 },
            WeightSpec::Unit,
        ];
        for w in &cases {
            for n in [0, 1, 7, 24, 25, 26, 119, 121, 130, 245] {
                assert_eq!(w.weight_product(n).unwrap(), naive_product(w, n), "{w:?} n={n}");
            }
        }
    }

    #[test]
    fn validation() {
        assert!(WeightSpec::constant(integer(0)).validate().is_err());
        assert!(WeightSpec::Explicit {
            values: vec![integer(1), integer(-1)]
        }
        .validate()
        .is_err());
        assert!(WeightSpec::Valley { m: 0 }.validate().is_err());
        assert!(WeightSpec::Valley { m: 18 }.validate().is_err());
        assert!(WeightSpec::Valley { m: 17 }.validate().is_ok());
    }

    #[test]
    fn valley_indices_are_sparse() {
        let v = Valley::new(3).unwrap();
        let idx = v.indices(100_000);
        assert!(idx.elements().iter().all(|&n| v.depth(n as i64) > 0));
        assert!(idx.contains(720) && idx.contains(24) && !idx.contains(0));
        // each valley of level m occupies 3m + 1 indices
        assert_eq!(idx.len(), 4 + 2 * 7 + 3 * 10);
    }

    #[test]
    fn wire_form() {
        let w: WeightSpec = serde_json::from_str(r#"{"kind": "constant", "value": "2/1"}"#).unwrap();
        assert_eq!(w, WeightSpec::constant(integer(2)));
        let w: WeightSpec = serde_json::from_str(r#"{"kind": "valley", "m": 3}"#).unwrap();
        assert_eq!(w, WeightSpec::Valley { m: 3 });
        let w: WeightSpec = serde_json::from_str(r#"{"kind": "unit"}"#).unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), r#"{"kind":"unit"}"#);
    }
}
