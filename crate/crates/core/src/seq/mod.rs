//! Sequence-space kernel: exact finitely supported vectors, `ℓ_p` balls
//! (`p ∈ {1, 2, ∞}`) and the operator algebra of weighted shifts.

mod maps;
mod operator;
pub mod rational;
mod space;
mod vector;
mod weights;

pub use maps::{ceil_sqrt, iterate, iterate_float, MapSequence, Mode, ScalarSeq};
pub use operator::OperatorSpec;
pub use rational::Rational;
pub use space::{
    in_ball, in_ball_float, norm_exact, norm_f64, norm_less_than, Ball, FloatVector, Laterality, Norm, SpaceSpec,
    FLOAT_TOLERANCE,
};
pub use vector::{parse_basis_shorthand, FiniteVector};
pub use weights::{Valley, WeightSpec};

/// `apply(op, x)`.
pub fn apply(op: &OperatorSpec, x: &FiniteVector) -> crate::Result<FiniteVector> {
    op.apply(x)
}

/// `a_n = ∏_{l=1}^{n} ω_l^{-1}`.
pub fn weight_product(w: &WeightSpec, n: u64) -> crate::Result<Rational> {
    w.weight_product(n)
}
