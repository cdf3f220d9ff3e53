//! Recurrence experiments for weighted shifts and scaled iterates.
//!
//! Every search here is a semi-decision over bounded ranges: a returned
//! witness has been checked exactly, while [`SearchOutcome::Exhausted`] only
//! says nothing was found within the bounds and is never a refutation.
//!
//! Recurrence operations use `m` for the number of steps, so a witness of
//! order `m` covers the iterates `0, q, ..., mq`.

mod criterion;
mod orbit;
mod transfer;
mod universal;
mod witness;

pub use criterion::{
    kitai_ap_check, shift_ap_criterion, sucesion_alap_transform, CriterionCell, CriterionReport, KitaiProbe,
    KitaiReport, KitaiRow,
};
pub use orbit::{puig_count, return_set};
pub use transfer::{
    inverse_witness, power_rotation_transfer, return_set_transfer, transfer_core_ball, InverseWitness,
    PowerRotationReport, ReturnTransfer,
};
pub use universal::{
    ap_universal_vector, ap_universal_vector_float, verify_universal, verify_universal_float, UniversalReport,
};
pub use witness::{
    multirec_witness, nested_ball_refinement, weak_mixing_pair_search, NestedReport, NestedStage, PairWitness,
    RecurrenceWitness,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::seq::{FiniteVector, Laterality, SpaceSpec, WeightSpec};

/// Why a bounded search stopped without a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exhaustion {
    pub reason: String,
    /// The stage at which a staged search failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<u32>,
    /// Always true: exhaustion of a bounded range decides nothing.
    pub inconclusive: bool,
}

impl Exhaustion {
    pub fn new(reason: impl Into<String>) -> Self {
        Exhaustion {
            reason: reason.into(),
            stage: None,
            inconclusive: true,
        }
    }

    pub fn at_stage(stage: u32, reason: impl Into<String>) -> Self {
        Exhaustion {
            stage: Some(stage),
            ..Exhaustion::new(reason)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    Exhausted(Exhaustion),
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            SearchOutcome::Exhausted(_) => None,
        }
    }

    pub fn as_found(&self) -> Option<&T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            SearchOutcome::Exhausted(_) => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, SearchOutcome::Exhausted(e) if e.inconclusive)
    }
}

/// The weighted forward lift `L_q`: `e_n ↦ (∏_{l=n+1}^{n+q} ω_l)^{-1} e_{n+q}`,
/// a right inverse of `B_ω^q` on finitely supported vectors.
pub fn forward_lift(w: &WeightSpec, v: &FiniteVector, q: u64) -> Result<FiniteVector> {
    let q = i64::try_from(q).map_err(|_| Error::InvalidArgument(format!("lift length {q} too large")))?;
    let mut out = FiniteVector::zero();
    for (n, c) in v.iter() {
        out.add_term(n + q, c / w.range_product(n + 1, n + q)?);
    }
    Ok(out)
}

fn require_unilateral(space: &SpaceSpec, what: &str) -> Result<()> {
    if space.laterality != Laterality::Unilateral {
        return Err(Error::InvalidArgument(format!("{what} needs a unilateral space")));
    }
    Ok(())
}

/// Smallest admissible step: 1, or one past the support.
fn first_step_above(v: &FiniteVector) -> u64 {
    v.max_index().map_or(1, |n| (n + 1).max(1) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::rational::{integer, ratio};
    use crate::seq::OperatorSpec;

    #[test]
    fn lift_is_right_inverse() {
        let w = WeightSpec::Valley { m: 2 };
        let op = OperatorSpec::backward(w.clone(), SpaceSpec::L1);
        let y = FiniteVector::from_terms([(0, integer(1)), (3, ratio(-2, 3))]);
        for q in [1, 5, 24, 121] {
            let lifted = forward_lift(&w, &y, q).unwrap();
            assert_eq!(op.apply_power(&lifted, q).unwrap(), y);
        }
        let two = WeightSpec::constant(integer(2));
        assert_eq!(
            forward_lift(&two, &FiniteVector::basis(0), 3).unwrap(),
            FiniteVector::term(3, ratio(1, 8))
        );
    }

    #[test]
    fn exhaustion_is_inconclusive() {
        let o: SearchOutcome<()> = SearchOutcome::Exhausted(Exhaustion::at_stage(2, "x"));
        assert!(o.is_inconclusive() && !o.is_found());
        let json = serde_json::to_value(Exhaustion::new("none")).unwrap();
        assert_eq!(json["inconclusive"], true);
        assert!(json.get("stage").is_none());
    }
}
