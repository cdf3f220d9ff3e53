use crate::ap::HitSet;
use crate::error::{Error, Result};
use crate::seq::{in_ball, in_ball_float, Ball, FiniteVector, MapSequence, Mode, OperatorSpec, ScalarSeq};

fn check_mode(seq: &MapSequence, mode: Mode) -> Result<()> {
    if mode == Mode::Exact && !seq.is_exact() {
        return Err(Error::ModeMismatch(
            "scalar sequence has no exact values; rerun in float mode".into(),
        ));
    }
    Ok(())
}

/// `λ·y ∈ U`, exactly or with the conservative float test.
fn scaled_member(seq: &MapSequence, n: u64, y: &FiniteVector, ball: &Ball, mode: Mode) -> Result<bool> {
    Ok(match mode {
        Mode::Exact => in_ball(&y.scale(&seq.scalar_exact(n)?), ball),
        Mode::Float => in_ball_float(&y.to_float().scale(seq.scalar_float(n)?), ball),
    })
}

/// `{n <= horizon : T_n x ∈ U}` for `T_n = λ_n T^n`.
///
/// The orbit `T^n x` is advanced one step at a time; once it vanishes every
/// later iterate is 0, whatever the scalars.
pub fn return_set(seq: &MapSequence, x: &FiniteVector, ball: &Ball, horizon: u64, mode: Mode) -> Result<HitSet> {
    check_mode(seq, mode)?;
    ball.validate()?;
    let op = seq.operator();
    let mut hits = Vec::new();
    let mut y = x.clone();
    for n in 0..=horizon {
        if y.is_zero() {
            if scaled_member(seq, n, &y, ball, mode)? {
                hits.extend(n..=horizon);
            }
            break;
        }
        if scaled_member(seq, n, &y, ball, mode)? {
            hits.push(n);
        }
        if n < horizon {
            y = op.apply(&y)?;
        }
    }
    HitSet::new(hits, horizon)
}

/// Counts `a <= horizon` with `λ_a T^{a+iq} x ∈ U` for every `0 <= i <= m`,
/// i.e. `λ_a T^a x ∈ ∩_{i<=m} T^{−iq} U`.
#[allow(clippy::too_many_arguments)]
pub fn puig_count(
    scalars: &ScalarSeq,
    op: &OperatorSpec,
    x: &FiniteVector,
    ball: &Ball,
    m: u64,
    q: u64,
    horizon: u64,
    mode: Mode,
) -> Result<u64> {
    if q == 0 {
        return Err(Error::InvalidArgument("step q must be positive".into()));
    }
    let seq = MapSequence::ScaledIterates {
        scalars: scalars.clone(),
        operator: op.clone(),
    };
    check_mode(&seq, mode)?;
    ball.validate()?;
    let mut count = 0;
    let mut y = x.clone();
    for a in 0..=horizon {
        let mut ok = true;
        let mut z = y.clone();
        for i in 0..=m {
            if i > 0 {
                z = op.apply_power(&z, q)?;
            }
            // λ_a scales every iterate of the block, not λ_{a+iq}
            if !scaled_member(&seq, a, &z, ball, mode)? {
                ok = false;
                break;
            }
        }
        count += u64::from(ok);
        if a < horizon {
            y = op.apply(&y)?;
        }
    }
    Ok(count)
}
