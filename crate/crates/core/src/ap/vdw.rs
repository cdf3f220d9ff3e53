use std::fmt;

use serde::{Serialize, Serializer};

use super::szemeredi::closes_progression;
use crate::error::{Error, Result};

/// Default budget on `N`.
pub const VDW_DEFAULT_MAX_N: u64 = 12;

const HARD_MAX_N: u64 = 63;

/// A 2-colouring of `{1, ..., N}`; `true` is blue. Displayed as `R`/`B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring(pub Vec<bool>);

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|&b| f.write_str(if b { "B" } else { "R" }))
    }
}

impl Serialize for Coloring {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum VdwOutcome {
    /// Every 2-colouring has a monochromatic progression.
    Forced,
    Counterexample {
        coloring: Coloring,
    },
}

pub fn vdw_check(n: u64, k: u64) -> Result<VdwOutcome> {
    vdw_check_with_budget(n, k, VDW_DEFAULT_MAX_N)
}

/// Backtracking over colourings of `1..=n` in order, red first. Colour 1 is
/// fixed to red; complements preserve monochromatic progressions.
pub fn vdw_check_with_budget(n: u64, k: u64, max_n: u64) -> Result<VdwOutcome> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be >= 2, got {k}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let limit = max_n.min(HARD_MAX_N);
    if n > limit {
        return Err(Error::BudgetExceeded {
            what: "N",
            requested: n,
            limit,
        });
    }
    let mut colors = [0u64; 2];
    colors[0] |= 1 << 1;
    Ok(match extend(2, n, k, &mut colors) {
        true => {
            let blue = colors[1];
            VdwOutcome::Counterexample {
                coloring: Coloring((1..=n).map(|i| blue >> i & 1 == 1).collect()),
            }
        }
        false => VdwOutcome::Forced,
    })
}

fn extend(pos: u64, n: u64, k: u64, colors: &mut [u64; 2]) -> bool {
    if pos > n {
        return true;
    }
    for c in 0..2 {
        if !closes_progression(colors[c], pos, k) {
            colors[c] |= 1 << pos;
            if extend(pos + 1, n, k, colors) {
                return true;
            }
            colors[c] &= !(1 << pos);
        }
    }
    false
}
