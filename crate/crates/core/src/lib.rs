//! Discretizations of the variable-order Caputo derivative
//!
//! D^{α(t)} u(t) = 1/Γ(1-α(t)) ∫_0^t (t-τ)^{-α(t)} u'(τ) dτ
//!
//! on a uniform grid, in three flavours:
//!
//! * [`Scheme::L1`], the direct L1 formula with O(n) memory per point and O(n²) work;
//! * [`Scheme::Fl1`], the fast L1 formula that compresses the kernel
//!   (t-τ)^{-α} with an exponential sum, which breaks down as α_* → 0;
//! * [`Scheme::Rfl1`], the robust fast variant that integrates by parts first
//!   and compresses (t-τ)^{-1-α}, so the exponent band stays inside [1, 2).
//!
//! The [`schemes`] module couples them with a three-point spatial stencil to
//! march the mobile-immobile diffusion equation, or the scalar equation
//! u' + ζ D^{α(t)} u = f.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod caputo;
pub mod error;
pub mod esa;
pub mod grid;
pub mod order;
pub mod problem;
pub mod schemes;
pub mod special;

pub use caputo::{
    build_operator, rfl1_weights, CaputoOperator, Fl1State, KernelWeights, L1State, Rfl1State,
    Scheme,
};
pub use error::{Error, Result};
pub use esa::{build_quadrature, EsaConfig, EsaQuadrature, Parameterization};
pub use grid::{SpatialGrid, TimeGrid};
pub use order::{alpha_profile, VoOrderProfile};
pub use problem::{OdeProblem, ProblemSpec, SolutionField};
pub use schemes::{
    solve_ode, solve_pde, thomas_solve, EpsilonPolicy, OdeStepper, PdeStepper, SolveOptions,
    SolveOutcome, SpatialOperator, StepSystem,
};
pub use special::gamma;
