//! Arithmetic-progression structure of finite sets of naturals.
//!
//! A [`HitSet`] is a finite, truncated return-time set. Every operation here
//! is a pure function of its input. Lengths count terms: the progression
//! `{a, a+k, ..., a+mk}` has length `m + 1`.

mod density;
mod szemeredi;
mod vdw;

pub use density::{density_report, DensityEstimate};
pub use szemeredi::{szemeredi_r, szemeredi_r_with_budget, SZEMEREDI_DEFAULT_MAX_N};
pub use vdw::{vdw_check, vdw_check_with_budget, Coloring, VdwOutcome, VDW_DEFAULT_MAX_N};

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite set of return times, truncated at an inclusive horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HitSet {
    elements: Vec<u64>,
    horizon: u64,
}

impl HitSet {
    /// Builds a set from strictly increasing elements, all `<= horizon`.
    pub fn new(elements: Vec<u64>, horizon: u64) -> Result<Self> {
        if let Some(w) = elements.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "elements must be strictly increasing, found {} before {}",
                w[0], w[1]
            )));
        }
        if let Some(&last) = elements.last() {
            if last > horizon {
                return Err(Error::InvalidArgument(format!(
                    "element {last} exceeds horizon {horizon}"
                )));
            }
        }
        Ok(HitSet { elements, horizon })
    }

    /// Sorts and deduplicates. The horizon defaults to the largest element
    /// (or 0 for an empty set).
    pub fn from_unsorted<I: IntoIterator<Item = u64>>(items: I, horizon: Option<u64>) -> Result<Self> {
        let mut elements: Vec<u64> = items.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        let horizon = horizon.unwrap_or_else(|| elements.last().copied().unwrap_or(0));
        HitSet::new(elements, horizon)
    }

    pub fn empty(horizon: u64) -> Self {
        HitSet {
            elements: Vec::new(),
            horizon,
        }
    }

    /// The interval `{lo, ..., hi}` with horizon `hi`.
    pub fn interval(lo: u64, hi: u64) -> Self {
        HitSet {
            elements: (lo..=hi).collect(),
            horizon: hi,
        }
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.elements.binary_search(&n).is_ok()
    }

    pub fn is_subset_of(&self, other: &HitSet) -> bool {
        self.elements.iter().all(|&n| other.contains(n))
    }
}

/// An arithmetic progression `initial, initial + step, ...` with `length` terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ApWitness {
    pub initial: u64,
    pub step: u64,
    pub length: u64,
}

impl ApWitness {
    pub fn terms(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.length).map(move |j| self.initial + j * self.step)
    }

    pub fn last(&self) -> u64 {
        self.initial + (self.length - 1) * self.step
    }
}

/// Longest progression contained in `set`; ties go to the smallest step,
/// then the smallest initial term. `None` only for the empty set.
///
/// Quadratic dynamic programme over pairs of elements: `len[j][i]` is the
/// length of the longest progression whose last two terms are `a[j] < a[i]`.
pub fn longest_ap(set: &HitSet) -> Option<ApWitness> {
    let a = set.elements();
    let n = a.len();
    match n {
        0 => return None,
        1 => {
            return Some(ApWitness {
                initial: a[0],
                step: 1,
                length: 1,
            })
        }
        _ => {}
    }

    let index: HashMap<u64, usize> = a.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut len = vec![0u32; n * n];
    let mut best = ApWitness {
        initial: a[0],
        step: a[1] - a[0],
        length: 2,
    };

    for i in 1..n {
        for j in 0..i {
            let step = a[i] - a[j];
            let l = match a[j].checked_sub(step).and_then(|prev| index.get(&prev)) {
                Some(&k) => len[k * n + j] + 1,
                None => 2,
            };
            len[j * n + i] = l;
            let candidate = ApWitness {
                initial: a[i] - (u64::from(l) - 1) * step,
                step,
                length: u64::from(l),
            };
            if better(&candidate, &best) {
                best = candidate;
            }
        }
    }
    Some(best)
}

fn better(c: &ApWitness, best: &ApWitness) -> bool {
    (std::cmp::Reverse(c.length), c.step, c.initial) < (std::cmp::Reverse(best.length), best.step, best.initial)
}

/// First progression with exactly `length` terms in `(step, initial)` order.
pub fn find_ap(set: &HitSet, length: u64) -> Option<ApWitness> {
    let a = set.elements();
    let (&lo, &hi) = (a.first()?, a.last()?);
    if length == 0 {
        return None;
    }
    if length == 1 {
        return Some(ApWitness {
            initial: lo,
            step: 1,
            length: 1,
        });
    }
    let members: HashSet<u64> = a.iter().copied().collect();
    let max_step = (hi - lo) / (length - 1);
    for step in 1..=max_step {
        for &initial in a {
            if initial + (length - 1) * step > hi {
                break;
            }
            if (1..length).all(|j| members.contains(&(initial + j * step))) {
                return Some(ApWitness { initial, step, length });
            }
        }
    }
    None
}

/// A progression `{q, 2q, ..., mq}` (initial term equal to the step),
/// smallest `q` first.
pub fn find_homogeneous_ap(set: &HitSet, m: u64) -> Option<ApWitness> {
    let hi = *set.elements().last()?;
    if m == 0 {
        return None;
    }
    set.elements()
        .iter()
        .copied()
        .filter(|&q| q >= 1)
        .take_while(|&q| q.checked_mul(m).is_some_and(|top| top <= hi))
        .find(|&q| (2..=m).all(|j| set.contains(j * q)))
        .map(|q| ApWitness {
            initial: q,
            step: q,
            length: m,
        })
}

/// Number of initial terms `a` with `{a, a+step, ..., a+(length-1)step}` inside `set`.
pub fn count_aps_with_step(set: &HitSet, step: u64, length: u64) -> u64 {
    if length == 0 || step == 0 {
        return 0;
    }
    let Some(&hi) = set.elements().last() else {
        return 0;
    };
    set.elements()
        .iter()
        .take_while(|&&a| {
            a.checked_add((length - 1).saturating_mul(step))
                .is_some_and(|t| t <= hi)
        })
        .filter(|&&a| (1..length).all(|j| set.contains(a + j * step)))
        .count() as u64
}

/// Finite-horizon proxy for membership in the family of sets that, for a
/// given length, contain infinitely many progressions of one common step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum ApBarVerdict {
    Pass {
        step: u64,
        count: u64,
    },
    /// No step up to the horizon reached the threshold. This is a statement
    /// about the truncated data only.
    Fail {
        inconclusive: bool,
    },
}

pub fn ap_bar_estimate(set: &HitSet, length: u64, threshold: u64) -> ApBarVerdict {
    let fail = ApBarVerdict::Fail { inconclusive: true };
    if length == 0 {
        return fail;
    }
    let span = match (set.elements().first(), set.elements().last()) {
        (Some(&lo), Some(&hi)) => hi - lo,
        _ => 0,
    };
    for step in 1..=set.horizon().max(1) {
        if length >= 2 && step > span / (length - 1) && threshold > 0 {
            break;
        }
        let count = count_aps_with_step(set, step, length);
        if count >= threshold {
            return ApBarVerdict::Pass { step, count };
        }
    }
    fail
}
