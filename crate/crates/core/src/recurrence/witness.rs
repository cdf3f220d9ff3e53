use serde::Serialize;

use super::{first_step_above, forward_lift, require_unilateral, Exhaustion, SearchOutcome};
use crate::error::{Error, Result};
use crate::seq::rational;
use crate::seq::{in_ball, Ball, FiniteVector, OperatorSpec, SpaceSpec, WeightSpec};

/// A point `x` with `T^{jq} x ∈ U` for `0 <= j <= m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecurrenceWitness {
    pub q: u64,
    pub x: FiniteVector,
    pub m: u64,
    pub verified_memberships: Vec<bool>,
}

fn memberships(op: &OperatorSpec, x: &FiniteVector, ball: &Ball, offset: u64, q: u64, m: u64) -> Result<Vec<bool>> {
    let mut out = Vec::with_capacity(m as usize + 1);
    let mut y = op.apply_power(x, offset)?;
    for j in 0..=m {
        if j > 0 {
            y = op.apply_power(&y, q)?;
        }
        out.push(in_ball(&y, ball));
    }
    Ok(out)
}

/// `y + L_q(y) + ... + L_q^m(y)`.
fn lift_sum(w: &WeightSpec, y: &FiniteVector, q: u64, m: u64) -> Result<FiniteVector> {
    let mut x = y.clone();
    let mut term = y.clone();
    for _ in 0..m {
        term = forward_lift(w, &term, q)?;
        x = &x + &term;
    }
    Ok(x)
}

fn check_search_args(w: &WeightSpec, space: &SpaceSpec, balls: &[&Ball], m: u64) -> Result<()> {
    require_unilateral(space, "witness search")?;
    w.validate()?;
    for b in balls {
        b.validate()?;
    }
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    Ok(())
}

/// Searches `q` upward from one past the support of the center `y` of `U`,
/// trying `x = y + Σ_{j=1}^{m} L_q^j(y)`. Since `B_ω^{jq} x` is the tail of
/// the same sum, small lifts put every `T^{jq} x` near `y`.
pub fn multirec_witness(
    w: &WeightSpec,
    space: &SpaceSpec,
    ball: &Ball,
    m: u64,
    q_max: u64,
) -> Result<SearchOutcome<RecurrenceWitness>> {
    check_search_args(w, space, &[ball], m)?;
    let op = OperatorSpec::backward(w.clone(), *space);
    let y = &ball.center;
    for q in first_step_above(y)..=q_max {
        let x = lift_sum(w, y, q, m)?;
        let verified = memberships(&op, &x, ball, 0, q, m)?;
        if verified.iter().all(|&b| b) {
            return Ok(SearchOutcome::Found(RecurrenceWitness {
                q,
                x,
                m,
                verified_memberships: verified,
            }));
        }
    }
    Ok(SearchOutcome::Exhausted(Exhaustion::new(format!(
        "no lift-sum witness with q <= {q_max}"
    ))))
}

/// Two points of `U` whose orbits visit `V_1`, `V_2` along one progression
/// `a, a+q, ..., a+mq`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub x1: FiniteVector,
    pub x2: FiniteVector,
    pub a: u64,
    pub q: u64,
    pub m: u64,
    /// `[x1 ∈ U, x2 ∈ U]`.
    pub start_memberships: [bool; 2],
    /// `T^{a+jq} x_i ∈ V_i` for `j = 0..=m`.
    pub memberships_1: Vec<bool>,
    pub memberships_2: Vec<bool>,
}

/// Candidates `x_i = u + Σ_{j=0}^{m} L_{a+jq}(v_i)` with `u`, `v_i` the ball
/// centers, `a` beyond the support of `u` and `q` beyond that of `v_i`, so
/// `T^{a+jq} x_i = v_i + Σ_{j'>j} L_{(j'−j)q}(v_i)`.
#[allow(clippy::too_many_arguments)]
pub fn weak_mixing_pair_search(
    w: &WeightSpec,
    space: &SpaceSpec,
    u: &Ball,
    v1: &Ball,
    v2: &Ball,
    m: u64,
    a_max: u64,
    q_max: u64,
) -> Result<SearchOutcome<PairWitness>> {
    check_search_args(w, space, &[u, v1, v2], m)?;
    let op = OperatorSpec::backward(w.clone(), *space);
    let q_lo = first_step_above(&v1.center).max(first_step_above(&v2.center));
    for a in first_step_above(&u.center)..=a_max {
        for q in q_lo..=q_max {
            let candidate = |v: &FiniteVector| -> Result<FiniteVector> {
                let mut x = u.center.clone();
                for j in 0..=m {
                    x = &x + &forward_lift(w, v, a + j * q)?;
                }
                Ok(x)
            };
            let x1 = candidate(&v1.center)?;
            let x2 = candidate(&v2.center)?;
            let start = [in_ball(&x1, u), in_ball(&x2, u)];
            if !(start[0] && start[1]) {
                continue;
            }
            let memberships_1 = memberships(&op, &x1, v1, a, q, m)?;
            let memberships_2 = memberships(&op, &x2, v2, a, q, m)?;
            if memberships_1.iter().chain(&memberships_2).all(|&b| b) {
                return Ok(SearchOutcome::Found(PairWitness {
                    x1,
                    x2,
                    a,
                    q,
                    m,
                    start_memberships: start,
                    memberships_1,
                    memberships_2,
                }));
            }
        }
    }
    Ok(SearchOutcome::Exhausted(Exhaustion::new(format!(
        "no pair witness with a <= {a_max}, q <= {q_max}"
    ))))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NestedStage {
    pub ball: Ball,
    /// `None` for the initial ball.
    pub q: Option<u64>,
    /// `T^{j q} (center) ∈ ball` for `j = 0..=stage`.
    pub memberships: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NestedReport {
    pub stages: Vec<NestedStage>,
    /// Center of the last ball.
    pub point: FiniteVector,
}

/// Finite stages of the nested-ball construction. Stage `s` finds a witness
/// `x_s` of order `s` in `Ball(c_{s−1}, r_{s−1}/4)` and sets
/// `U_s = Ball(x_s, r_{s−1}/2)`; the triangle inequality gives
/// `closure(U_s) ⊂ U_{s−1}` and `T^{j q_s} x_s ∈ U_s`.
pub fn nested_ball_refinement(
    w: &WeightSpec,
    space: &SpaceSpec,
    ball: &Ball,
    stages: u32,
    q_max: u64,
) -> Result<SearchOutcome<NestedReport>> {
    require_unilateral(space, "nested refinement")?;
    ball.validate()?;
    let op = OperatorSpec::backward(w.clone(), *space);
    let mut out = vec![NestedStage {
        ball: ball.clone(),
        q: None,
        memberships: vec![true],
    }];
    let mut current = ball.clone();
    let quarter = rational::ratio(1, 4);
    let half = rational::ratio(1, 2);
    for s in 1..=stages {
        let inner = Ball::new(current.center.clone(), &current.radius * &quarter, current.space)?;
        let Some(found) = multirec_witness(w, space, &inner, u64::from(s), q_max)?.found() else {
            return Ok(SearchOutcome::Exhausted(Exhaustion::at_stage(
                s,
                format!("stage {s}: no witness with q <= {q_max}"),
            )));
        };
        let next = Ball::new(found.x.clone(), &current.radius * &half, current.space)?;
        let verified = memberships(&op, &found.x, &next, 0, found.q, u64::from(s))?;
        debug_assert!(verified.iter().all(|&b| b));
        out.push(NestedStage {
            ball: next.clone(),
            q: Some(found.q),
            memberships: verified,
        });
        current = next;
    }
    Ok(SearchOutcome::Found(NestedReport {
        point: current.center,
        stages: out,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::rational::{integer, ratio};
    use crate::seq::Rational;

    fn two() -> WeightSpec {
        WeightSpec::constant(integer(2))
    }

    fn ball(c: FiniteVector, r: Rational) -> Ball {
        Ball::new(c, r, SpaceSpec::L1).unwrap()
    }

    #[test]
    fn constant_two_witness() {
        let u = ball(FiniteVector::basis(0), ratio(1, 4));
        let w = multirec_witness(&two(), &SpaceSpec::L1, &u, 2, 10)
            .unwrap()
            .found()
            .unwrap();
        assert_eq!(w.q, 3);
        assert_eq!(
            w.x,
            FiniteVector::from_terms([(0, integer(1)), (3, ratio(1, 8)), (6, ratio(1, 64))])
        );
        assert_eq!(w.verified_memberships, [true, true, true]);
        let op = OperatorSpec::backward(two(), SpaceSpec::L1);
        assert_eq!(u.distance_exact(&w.x), ratio(9, 64));
        assert_eq!(u.distance_exact(&op.apply_power(&w.x, 3).unwrap()), ratio(1, 8));
        assert_eq!(op.apply_power(&w.x, 6).unwrap(), FiniteVector::basis(0));
    }

    #[test]
    fn unit_weights_exhaust() {
        // x ∈ Ball(e_0, 1/4) and B^q x ∈ Ball(e_0, 1/4) force |x_0| > 3/4 and
        // |x_q| > 3/4, so ‖x − e_0‖ > 3/4: no witness exists for any q.
        let u = ball(FiniteVector::basis(0), ratio(1, 4));
        let o = multirec_witness(&WeightSpec::Unit, &SpaceSpec::L1, &u, 1, 200).unwrap();
        assert!(o.is_inconclusive());
    }

    #[test]
    fn zero_center_is_fixed() {
        let u = ball(FiniteVector::zero(), integer(1));
        let w = multirec_witness(&WeightSpec::Valley { m: 2 }, &SpaceSpec::L1, &u, 4, 3)
            .unwrap()
            .found()
            .unwrap();
        assert_eq!((w.q, w.x.is_zero()), (1, true));
    }

    #[test]
    fn pair_examples() {
        let unit = ball(FiniteVector::zero(), integer(1));
        let p = weak_mixing_pair_search(&two(), &SpaceSpec::L1, &unit, &unit, &unit, 3, 5, 5)
            .unwrap()
            .found()
            .unwrap();
        assert!(p.x1.is_zero() && p.x2.is_zero());
        assert_eq!((p.a, p.q), (1, 1));

        let u = ball(FiniteVector::basis(0), ratio(1, 2));
        let v1 = ball(FiniteVector::zero(), ratio(1, 2));
        let p = weak_mixing_pair_search(&two(), &SpaceSpec::L1, &u, &v1, &u, 1, 10, 10)
            .unwrap()
            .found()
            .unwrap();
        assert_eq!(p.x1, FiniteVector::basis(0));
        assert!(p.memberships_2.iter().all(|&b| b));

        let small = ball(FiniteVector::basis(0), ratio(1, 4));
        let o = weak_mixing_pair_search(&WeightSpec::Unit, &SpaceSpec::L1, &small, &small, &small, 1, 8, 8).unwrap();
        assert!(o.is_inconclusive());
    }

    #[test]
    fn nested_examples() {
        let u = ball(FiniteVector::basis(0), ratio(1, 2));
        let r = nested_ball_refinement(&two(), &SpaceSpec::L1, &u, 0, 64)
            .unwrap()
            .found()
            .unwrap();
        assert_eq!(r.stages.len(), 1);
        assert_eq!(r.point, FiniteVector::basis(0));

        let r = nested_ball_refinement(&two(), &SpaceSpec::L1, &u, 2, 64)
            .unwrap()
            .found()
            .unwrap();
        assert_eq!(r.stages.len(), 3);
        for (s, st) in r.stages.iter().enumerate().skip(1) {
            assert_eq!(st.memberships.len(), s + 1);
            assert!(st.memberships.iter().all(|&b| b));
            assert_eq!(st.ball.radius, &r.stages[s - 1].ball.radius / integer(2));
        }

        let small = ball(FiniteVector::basis(0), ratio(1, 4));
        match nested_ball_refinement(&WeightSpec::Unit, &SpaceSpec::L1, &small, 1, 64).unwrap() {
            SearchOutcome::Exhausted(e) => assert_eq!((e.stage, e.inconclusive), (Some(1), true)),
            SearchOutcome::Found(_) => panic!("unit weights cannot recur"),
        }
    }

    #[test]
    fn deterministic() {
        let u = ball(
            FiniteVector::from_terms([(0, integer(1)), (2, ratio(1, 3))]),
            ratio(1, 5),
        );
        let a = multirec_witness(&WeightSpec::Valley { m: 2 }, &SpaceSpec::L1, &u, 2, 300).unwrap();
        let b = multirec_witness(&WeightSpec::Valley { m: 2 }, &SpaceSpec::L1, &u, 2, 300).unwrap();
        assert_eq!(a, b);
    }
}
