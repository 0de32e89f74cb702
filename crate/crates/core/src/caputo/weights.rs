//! Robust fast L1 operator written as a weighted sum over the full history,
//!
//! D_k u = s^(k) (u^k - Σ_{l=0}^{k-1} d_l^(k) u^l).
//!
//! Only used for verification: the weights cost O(k·N_ε) to build.

use super::local_scale;
use super::rfl1::{hat_falling, hat_rising};
use crate::error::{Error, Result};
use crate::esa::EsaQuadrature;
use crate::grid::TimeGrid;
use crate::order::VoOrderProfile;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights {
    /// s^(k) = Δt^{-α_k} / Γ(2 - α_k)
    pub scale: f64,
    /// d_0^(k), …, d_{k-1}^(k)
    pub weights: Vec<f64>,
}

impl KernelWeights {
    pub fn level(&self) -> usize {
        self.weights.len()
    }

    /// s^(k) (u^k - Σ d_l u^l) for a history u^0..u^k.
    pub fn apply(&self, history: &[f64]) -> f64 {
        let k = self.level();
        assert_eq!(history.len(), k + 1, "need levels 0..=k");
        let past: f64 = self.weights.iter().zip(history).map(|(d, u)| d * u).sum();
        self.scale * (history[k] - past)
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Builds s^(k) and d_l^(k) in closed form from a shifted-band quadrature.
///
/// With x_i = λ_i Δt / T and c = α(1-α) Δt^{α-1} / T^{1+α}:
///
/// ```text
/// d_0     = (1-α) k^{-α} + c Σ θ_i R_i(0)
/// d_l     = c Σ θ_i (L_i(l) + R_i(l)),        0 < l < k-1
/// d_{k-1} = α + c Σ θ_i L_i(k-1)
/// ```
///
/// where L_i(l) = ∫_{t_{l-1}}^{t_l} (τ - t_{l-1}) e^{-λ_i(t_k-τ)/T} dτ and
/// R_i(l) = ∫_{t_l}^{t_{l+1}} (t_{l+1} - τ) e^{-λ_i(t_k-τ)/T} dτ.
pub fn rfl1_weights(
    k: usize,
    grid: &TimeGrid,
    profile: &VoOrderProfile,
    quadrature: &EsaQuadrature,
) -> Result<KernelWeights> {
    if k == 0 || k > grid.steps() {
        return Err(Error::Domain {
            what: "kernel weights (level must lie in 1..=n)",
            value: k as f64,
        });
    }
    let dt = grid.dt();
    let horizon = grid.horizon();
    let alpha = profile.eval(grid.node(k));
    let scale = local_scale(alpha, dt);
    if k == 1 {
        return Ok(KernelWeights {
            scale,
            weights: vec![1.0],
        });
    }
    let theta = quadrature.step_weights(1.0 + alpha)?;
    let c = alpha * (1.0 - alpha) * dt.powf(alpha - 1.0) / horizon.powf(1.0 + alpha);

    // Per exponent, Δt² times the unshifted left/right hat integrals.
    let terms: Vec<(f64, f64, f64)> = quadrature
        .exponents()
        .iter()
        .map(|&lambda| {
            let x = lambda * dt / horizon;
            (x, dt * dt * hat_rising(x), dt * dt * hat_falling(x))
        })
        .collect();
    // L_i(l) carries e^{-(k-l)x}; R_i(l) carries e^{-(k-l-1)x}.
    let left = |l: usize| -> f64 {
        terms
            .iter()
            .zip(&theta)
            .map(|(&(x, rise, _), &w)| w * rise * (-((k - l) as f64) * x).exp())
            .sum()
    };
    let right = |l: usize| -> f64 {
        terms
            .iter()
            .zip(&theta)
            .map(|(&(x, _, fall), &w)| w * fall * (-((k - l - 1) as f64) * x).exp())
            .sum()
    };

    let mut weights = Vec::with_capacity(k);
    weights.push((1.0 - alpha) * (k as f64).powf(-alpha) + c * right(0));
    for l in 1..k - 1 {
        weights.push(c * (left(l) + right(l)));
    }
    weights.push(alpha + c * left(k - 1));
    Ok(KernelWeights { scale, weights })
}
