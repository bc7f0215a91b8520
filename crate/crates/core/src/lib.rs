//! Discrete fractional calculus on unit-spaced grids.
//!
//! Implements the left and right, delta and nabla fractional sums and
//! differences in two formulations:
//!
//! * **Riemann** ([`riemann`]): kernel sums against falling/rising factorial
//!   functions, the discrete analogue of the Riemann–Liouville integral.
//! * **Binomial** ([`glbinomial`]): truncated convolutions with
//!   Grünwald–Letnikov weights `(−1)^k C(±α, k)`, with a fast FFT path.
//!
//! The two formulations agree on every shared grid point; [`verify`] machine
//! checks that equivalence together with the dual identities, Q-operator
//! identities, initial-value characterizations and the factorial-function
//! calculus that underpin it, over randomized inputs with per-identity
//! tolerances.

pub mod error;
pub mod glbinomial;
pub mod grid;
pub mod riemann;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use glbinomial::{gl_apply, gl_apply_fast, ConvolutionPlan};
pub use grid::{
    binomial_diff, delta, iterate_diff, nabla, q_reflect, AnchorPair, Family, GridFunction,
};
pub use riemann::{
    riemann_diff, riemann_diff_alt, riemann_sum, Formulation, Kind, OperatorSpec, Side,
};
pub use specfun::{
    falling_factorial, gamma, gamma_ratio, gl_weights, rising_factorial, GLWeights, Order,
    WeightMode,
};
pub use verify::{run_check, run_suite, IdentityCheck, Verdict, VerificationReport};

/// Applies the operator described by `spec` to `f`, dispatching on
/// formulation and kind.
///
/// Riemann differences use the composed form of the definitions, not the
/// single-sum alternative; binomial operators use the direct summation path.
pub fn apply(spec: &OperatorSpec, f: &GridFunction) -> Result<GridFunction> {
    match (spec.formulation, spec.kind) {
        (Formulation::Riemann, Kind::Sum) => riemann_sum(spec, f),
        (Formulation::Riemann, Kind::Difference) => riemann_diff(spec, f),
        (Formulation::Binomial, _) => gl_apply(spec, f),
    }
}

/// Like [`apply`], but binomial operators take the fast convolution path on
/// long grids.
pub fn apply_fast(spec: &OperatorSpec, f: &GridFunction) -> Result<GridFunction> {
    match (spec.formulation, spec.kind) {
        (Formulation::Riemann, Kind::Sum) => riemann_sum(spec, f),
        (Formulation::Riemann, Kind::Difference) => riemann_diff(spec, f),
        (Formulation::Binomial, _) => gl_apply_fast(spec, f),
    }
}
