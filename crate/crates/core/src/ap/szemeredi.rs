use crate::error::{Error, Result};

/// Default budget on `n`.
pub const SZEMEREDI_DEFAULT_MAX_N: u64 = 25;

const HARD_MAX_N: u64 = 63;

/// Exact `r_k(n)`: the largest size of a subset of `{1, ..., n}` with no
/// `k`-term arithmetic progression, under the default budget.
pub fn szemeredi_r(n: u64, k: u64) -> Result<u64> {
    szemeredi_r_with_budget(n, k, SZEMEREDI_DEFAULT_MAX_N).map(|(r, _)| r)
}

/// Same as [`szemeredi_r`] with an explicit budget; also returns one extremal
/// set (the first one met in include-first search order).
pub fn szemeredi_r_with_budget(n: u64, k: u64, max_n: u64) -> Result<(u64, Vec<u64>)> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be >= 2, got {k}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let limit = max_n.min(HARD_MAX_N);
    if n > limit {
        return Err(Error::BudgetExceeded {
            what: "n",
            requested: n,
            limit,
        });
    }

    // r[len] = r_k(len). A set of size r[len-1] + 1 inside {1..len} must
    // use both endpoints, and any suffix interval of length t holds at most
    // r[t] further elements (translation invariance).
    let mut r = vec![0u64; n as usize + 1];
    let mut extremal = 0u64;
    for len in 1..=n {
        let target = r[len as usize - 1] + 1;
        let mut search = Search {
            len,
            k,
            target,
            r: &r,
            found: None,
        };
        search.dfs(2, 1 << 1, 1);
        match search.found {
            Some(mask) => {
                r[len as usize] = target;
                extremal = mask;
            }
            None => r[len as usize] = target - 1,
        }
    }
    let set = (1..=n).filter(|i| extremal >> i & 1 == 1).collect();
    Ok((r[n as usize], set))
}

struct Search<'a> {
    len: u64,
    k: u64,
    target: u64,
    r: &'a [u64],
    found: Option<u64>,
}

impl Search<'_> {
    /// Decide positions `pos..=len`; bit `i` of `mask` marks element `i`.
    fn dfs(&mut self, pos: u64, mask: u64, size: u64) {
        if self.found.is_some() {
            return;
        }
        if pos > self.len {
            if size >= self.target {
                self.found = Some(mask);
            }
            return;
        }
        if size + self.r[(self.len - pos + 1) as usize] < self.target {
            return;
        }
        if !closes_progression(mask, pos, self.k) {
            self.dfs(pos + 1, mask | 1 << pos, size + 1);
        }
        // the last position is forced in
        if pos < self.len {
            self.dfs(pos + 1, mask, size);
        }
    }
}

/// Whether adding `x` (larger than every element of `mask`) completes a
/// `k`-term progression ending at `x`.
pub(crate) fn closes_progression(mask: u64, x: u64, k: u64) -> bool {
    if k < 2 {
        return true;
    }
    let mut d = 1;
    while (k - 1) * d < x {
        if (1..k).all(|j| mask >> (x - j * d) & 1 == 1) {
            return true;
        }
        d += 1;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(szemeredi_r(5, 3).unwrap(), 4);
        assert_eq!(szemeredi_r(4, 5).unwrap(), 4);
        assert_eq!(szemeredi_r(1, 3).unwrap(), 1);
        assert_eq!(szemeredi_r(10, 2).unwrap(), 1);
    }

    #[test]
    fn extremal_set_is_progression_free() {
        let (r, set) = szemeredi_r_with_budget(9, 3, 25).unwrap();
        assert_eq!(set.len() as u64, r);
        let mask = set.iter().fold(0u64, |m, &i| m | 1 << i);
        for &x in &set {
            let below = mask & ((1u64 << x) - 1);
            assert!(!closes_progression(below, x, 3));
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(szemeredi_r(26, 3), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(szemeredi_r(5, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(szemeredi_r(0, 3), Err(Error::InvalidArgument(_))));
    }
}
