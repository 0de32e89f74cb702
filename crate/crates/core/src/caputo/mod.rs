//! Discrete variable-order Caputo derivative operators.
//!
//! Every operator splits its value at level k into an implicit part and an
//! explicit history part,
//!
//! ```text
//! D_k u = s^(k) · u^k + H_k(u^0, …, u^{k-1}),   s^(k) = Δt^{-α_k} / Γ(2 - α_k),
//! ```
//!
//! so an implicit time stepper only ever sees s^(k) on the diagonal. The
//! operators act on a block of independent points (one per interior spatial
//! node, or a single point for scalar problems) that share grid and order.
//!
//! Driving protocol for each level k = 1, 2, …:
//! [`CaputoOperator::advance`], then any number of
//! [`CaputoOperator::implicit_coefficient`] / [`CaputoOperator::history`]
//! queries, then [`CaputoOperator::commit`] with u^k.

mod fl1;
mod l1;
mod rfl1;
mod weights;

use std::fmt;
use std::str::FromStr;

pub use fl1::Fl1State;
pub use l1::L1State;
pub use rfl1::Rfl1State;
pub use weights::{rfl1_weights, KernelWeights};

use crate::error::{Error, Result};
use crate::special::gamma_unchecked;

/// Which discretization of the Caputo derivative to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Direct piecewise-linear convolution, O(k) work per level.
    L1,
    /// Exponential-sum compression of the original kernel; needs α_* > 0.
    Fl1,
    /// Integration by parts, then exponential-sum compression of the
    /// shifted kernel; valid down to α_* = 0.
    Rfl1,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::L1 => "l1",
            Scheme::Fl1 => "fl1",
            Scheme::Rfl1 => "rfl1",
        }
    }

    pub fn is_fast(&self) -> bool {
        !matches!(self, Scheme::L1)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Scheme::L1),
            "fl1" | "f-l1" => Ok(Scheme::Fl1),
            "rfl1" | "rf-l1" => Ok(Scheme::Rfl1),
            other => Err(Error::InvalidProblem(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Incremental state of a discrete Caputo operator.
pub trait CaputoOperator: Send {
    /// Number of points the operator carries.
    fn points(&self) -> usize;

    /// The level the next `advance` / `commit` pair refers to.
    fn level(&self) -> usize;

    /// Brings the internal accumulators to the current level.
    fn advance(&mut self);

    /// s^(k) at the current level. Requires `advance`.
    fn implicit_coefficient(&self) -> f64;

    /// Writes H_k for every point into `out`. Requires `advance`.
    fn history(&self, out: &mut [f64]);

    /// Stores u^k and moves to level k + 1.
    fn commit(&mut self, values: &[f64]);

    /// Count of 64-bit values the operator keeps alive.
    fn retained_values(&self) -> usize;

    /// Number of exponential terms, if the operator is a fast one.
    fn quadrature_len(&self) -> Option<usize> {
        None
    }

    /// Evaluates D_k u at the current level for the given u^k and commits it.
    /// Advances first if that has not happened yet for this level.
    fn apply(&mut self, values: &[f64], out: &mut [f64]);

    /// Scalar convenience for single-point operators.
    fn apply_scalar(&mut self, value: f64) -> f64 {
        let mut out = [0.0];
        self.apply(&[value], &mut out);
        out[0]
    }
}

/// s^(k) = Δt^{-α} / Γ(2 - α). Shared by every scheme so that the level-one
/// step is bit-identical across them.
pub(crate) fn local_scale(alpha: f64, dt: f64) -> f64 {
    dt.powf(-alpha) / gamma_unchecked(2.0 - alpha)
}

pub(crate) fn check_points(expected: usize, got: usize) {
    assert_eq!(
        expected, got,
        "operator carries {expected} points, slice has {got}"
    );
}

/// Builds the operator state for `scheme` starting from u^0.
pub fn build_operator(
    scheme: Scheme,
    grid: crate::grid::TimeGrid,
    profile: crate::order::VoOrderProfile,
    epsilon: f64,
    initial: &[f64],
) -> Result<Box<dyn CaputoOperator>> {
    Ok(match scheme {
        Scheme::L1 => Box::new(L1State::new(grid, profile, initial)),
        Scheme::Fl1 => Box::new(Fl1State::new(grid, profile, epsilon, initial)?),
        Scheme::Rfl1 => Box::new(Rfl1State::new(grid, profile, epsilon, initial)?),
    })
}
