use num_traits::{One, Zero};
use serde::Serialize;

use super::{return_set, RecurrenceWitness};
use crate::ap::HitSet;
use crate::error::{Error, Result};
use crate::seq::rational::{self, Rational};
use crate::seq::{in_ball, Ball, FiniteVector, MapSequence, Mode, Norm, OperatorSpec, SpaceSpec, WeightSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InverseWitness {
    pub y: FiniteVector,
    /// `T^{−jn} y = T^{(m−j)n} x` for `j = 0..=m`.
    pub contract: Vec<bool>,
}

/// `y = T^{mn} x`, so that `T^{−jn} y = T^{(m−j)n} x` for `0 <= j <= m`.
pub fn inverse_witness(op: &OperatorSpec, x: &FiniteVector, n: u64, m: u64) -> Result<InverseWitness> {
    if !op.is_invertible() {
        return Err(Error::InvalidArgument(
            "inverse witness needs an invertible operator (bilateral shifts)".into(),
        ));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("n and m must be positive".into()));
    }
    let total = m
        .checked_mul(n)
        .ok_or_else(|| Error::InvalidArgument("m·n overflows".into()))?;
    let y = op.apply_power(x, total)?;
    let mut contract = Vec::new();
    let mut back = y.clone();
    for j in 0..=m {
        if j > 0 {
            back = op.apply_inverse_power(&back, n)?;
        }
        contract.push(back == op.apply_power(x, (m - j) * n)?);
    }
    Ok(InverseWitness { y, contract })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerRotationReport {
    /// `(−T)^{jq} x ∈ (−1)^{jq} U` for `j = 0..=m`.
    pub rotation_step_q: Vec<bool>,
    /// `(−T)^{2jq} x ∈ U` for `2j <= m`.
    pub rotation_step_2q: Vec<bool>,
    /// `(T^2)^{jq} x ∈ U` for `2j <= m`.
    pub square_power: Vec<bool>,
}

impl PowerRotationReport {
    pub fn all_verified(&self) -> bool {
        self.rotation_step_q
            .iter()
            .chain(&self.rotation_step_2q)
            .chain(&self.square_power)
            .all(|&b| b)
    }
}

/// Recomputes a witness of `T` under `−T` and `T^2`, by direct iteration
/// of the transformed operators.
pub fn power_rotation_transfer(
    op: &OperatorSpec,
    ball: &Ball,
    witness: &RecurrenceWitness,
) -> Result<PowerRotationReport> {
    let minus = OperatorSpec::scaled(-Rational::one(), op.clone());
    let square = OperatorSpec::power(2, op.clone());
    let flipped = Ball::new(-&ball.center, ball.radius.clone(), ball.space)?;
    let (q, x) = (witness.q, &witness.x);
    let mut rotation_step_q = Vec::new();
    for j in 0..=witness.m {
        let target = if (j * q) % 2 == 0 { ball } else { &flipped };
        rotation_step_q.push(in_ball(&minus.apply_power(x, j * q)?, target));
    }
    let mut rotation_step_2q = Vec::new();
    let mut square_power = Vec::new();
    for j in 0..=witness.m / 2 {
        rotation_step_2q.push(in_ball(&minus.apply_power(x, 2 * j * q)?, ball));
        square_power.push(in_ball(&square.apply_power(x, j * q)?, ball));
    }
    Ok(PowerRotationReport {
        rotation_step_q,
        rotation_step_2q,
        square_power,
    })
}

/// A ball around the witness point inside `V = ∩_{j<=m} T^{−jq} U`.
///
/// With `d_j` the distance of `T^{jq} x` from the center of `U`, the radius
/// is `min_j (r − d_j) / s^{jq}` where `s` bounds the weights, since
/// `‖B_ω^n‖ <= s^n`. For `p = 2` the margin `r − d_j` is replaced by the
/// rational lower bound `(r² − d_j²) / 2r`.
pub fn transfer_core_ball(w: &WeightSpec, space: &SpaceSpec, ball: &Ball, witness: &RecurrenceWitness) -> Result<Ball> {
    let op = OperatorSpec::backward(w.clone(), *space);
    let s = w.sup_bound();
    let r = &ball.radius;
    let mut rho: Option<Rational> = None;
    let mut z = witness.x.clone();
    for j in 0..=witness.m {
        if j > 0 {
            z = op.apply_power(&z, witness.q)?;
        }
        let d = ball.distance_exact(&z);
        let margin = match ball.space.p {
            Norm::L2 => (r * r - d) / (r * rational::integer(2)),
            _ => r - d,
        };
        if margin <= Rational::zero() {
            return Err(Error::Precondition(format!("witness iterate {j} is not inside U")));
        }
        let jq = i64::try_from(j * witness.q).map_err(|_| Error::InvalidArgument("step overflow".into()))?;
        let bound = margin / rational::pow(&s, jq);
        rho = Some(match rho {
            Some(cur) if cur <= bound => cur,
            _ => bound,
        });
    }
    Ball::new(witness.x.clone(), rho.expect("m + 1 >= 1 iterates"), ball.space)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReturnTransfer {
    pub core: Ball,
    /// Return times of `x'` to the core ball.
    pub core_hits: HitSet,
    /// Return times of `x'` to `U`, up to `horizon + mq`.
    pub target_hits: HitSet,
    /// `{n, n+q, ..., n+mq}` lies in `target_hits` for every `n` in `core_hits`.
    pub all_transferred: bool,
}

/// Every visit of `x'` to the core ball at time `n` yields the progression
/// `n, n+q, ..., n+mq` of visits to `U`.
pub fn return_set_transfer(
    w: &WeightSpec,
    space: &SpaceSpec,
    ball: &Ball,
    witness: &RecurrenceWitness,
    x_prime: &FiniteVector,
    horizon: u64,
) -> Result<ReturnTransfer> {
    let core = transfer_core_ball(w, space, ball, witness)?;
    let seq = MapSequence::Iterates(OperatorSpec::backward(w.clone(), *space));
    let span = witness
        .m
        .checked_mul(witness.q)
        .and_then(|s| s.checked_add(horizon))
        .ok_or_else(|| Error::InvalidArgument("horizon overflow".into()))?;
    let core_hits = return_set(&seq, x_prime, &core, horizon, Mode::Exact)?;
    let target_hits = return_set(&seq, x_prime, ball, span, Mode::Exact)?;
    let all_transferred = core_hits
        .elements()
        .iter()
        .all(|&n| (0..=witness.m).all(|j| target_hits.contains(n + j * witness.q)));
    Ok(ReturnTransfer {
        core,
        core_hits,
        target_hits,
        all_transferred,
    })
}
