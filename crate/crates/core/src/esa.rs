//! Exponential-sum approximation of the power kernel s^{-β} on [δ, 1].
//!
//! For β in a band [β_*, β^*] the kernel is replaced by
//!
//! ```text
//! s^{-β} ≈ Σ_{i = N_lo+1}^{N_hi} θ_i e^{-λ_i s},   λ_i = e^{ih},   θ_i = h e^{βih} / Γ(β)
//! ```
//!
//! with a uniform relative tolerance ε. The exponents depend only on the band,
//! ε and δ; the weights depend on the current β and are cheap to regenerate.

use crate::error::{Error, Result};
use crate::special::gamma_unchecked;

/// Which kernel exponent band the quadrature serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameterization {
    /// β = 1 + α ∈ [1, 2): the integrated-by-parts kernel of the robust scheme.
    Shifted,
    /// β = α ∈ (0, 1): the original Caputo kernel.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsaConfig {
    pub parameterization: Parameterization,
    /// β_*
    pub beta_lo: f64,
    /// β^*
    pub beta_hi: f64,
    pub epsilon: f64,
    /// δ = Δt / T
    pub ratio: f64,
}

impl EsaConfig {
    /// Band β ∈ [1 + α_*, 1 + α^*].
    pub fn shifted(alpha_lo: f64, alpha_hi: f64, epsilon: f64, ratio: f64) -> Self {
        Self {
            parameterization: Parameterization::Shifted,
            beta_lo: 1.0 + alpha_lo,
            beta_hi: 1.0 + alpha_hi,
            epsilon,
            ratio,
        }
    }

    /// Band β ∈ [α_*, α^*].
    pub fn direct(alpha_lo: f64, alpha_hi: f64, epsilon: f64, ratio: f64) -> Self {
        Self {
            parameterization: Parameterization::Direct,
            beta_lo: alpha_lo,
            beta_hi: alpha_hi,
            epsilon,
            ratio,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidQuadrature(msg));
        if !(self.epsilon > 0.0) || self.epsilon > (-1.0f64).exp() {
            return bad(format!(
                "epsilon must lie in (0, 1/e], got {}",
                self.epsilon
            ));
        }
        if !(self.ratio > 0.0) || self.ratio > 1.0 {
            return bad(format!("step ratio must lie in (0, 1], got {}", self.ratio));
        }
        if !(self.beta_lo <= self.beta_hi) {
            return bad(format!(
                "empty exponent band [{}, {}]",
                self.beta_lo, self.beta_hi
            ));
        }
        match self.parameterization {
            Parameterization::Shifted => {
                if !(self.beta_lo >= 1.0 && self.beta_hi < 2.0) {
                    return bad(format!(
                        "shifted band must satisfy 1 <= beta_* <= beta^* < 2, got [{}, {}]",
                        self.beta_lo, self.beta_hi
                    ));
                }
            }
            Parameterization::Direct => {
                if !(self.beta_lo > 0.0) {
                    return Err(Error::EsaLowerIndexDiverges {
                        lower_bound: self.beta_lo,
                    });
                }
                if !(self.beta_hi < 1.0) {
                    return bad(format!(
                        "direct band must satisfy 0 < beta_* <= beta^* < 1, got [{}, {}]",
                        self.beta_lo, self.beta_hi
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Exponents and index range of an exponential-sum approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct EsaQuadrature {
    config: EsaConfig,
    step: f64,
    lower_index: i64,
    upper_index: i64,
    exponents: Vec<f64>,
}

/// Builds the quadrature for `config`.
///
/// The step is h = 2π / (log 3 + β^* log(1/cos 1) + log(1/ε)); the index range
/// runs from N_lo + 1 to N_hi with
///
/// ```text
/// N_lo = ⌈(log ε + log Γ(1 + β^*)) / (h β_*)⌉
/// N_hi = ⌊(log(1/δ) + log log(1/ε) + log β_* + 1/2) / h⌋
/// ```
pub fn build_quadrature(config: EsaConfig) -> Result<EsaQuadrature> {
    config.validate()?;
    let EsaConfig {
        beta_lo,
        beta_hi,
        epsilon,
        ratio,
        ..
    } = config;
    let log_inv_eps = -epsilon.ln();
    let step =
        2.0 * std::f64::consts::PI / (3f64.ln() + beta_hi * (-(1f64.cos().ln())) + log_inv_eps);
    let lower = ((epsilon.ln() + gamma_unchecked(1.0 + beta_hi).ln()) / (step * beta_lo)).ceil();
    let upper = ((-ratio.ln() + log_inv_eps.ln() + beta_lo.ln() + 0.5) / step).floor();
    if !lower.is_finite() || !upper.is_finite() {
        return Err(Error::InvalidQuadrature(format!(
            "non-finite index range [{lower}, {upper}]"
        )));
    }
    let (lower_index, upper_index) = (lower as i64, upper as i64);
    let exponents = (lower_index + 1..=upper_index)
        .map(|i| (i as f64 * step).exp())
        .collect();
    Ok(EsaQuadrature {
        config,
        step,
        lower_index,
        upper_index,
        exponents,
    })
}

impl EsaQuadrature {
    pub fn config(&self) -> &EsaConfig {
        &self.config
    }

    /// h
    pub fn step(&self) -> f64 {
        self.step
    }

    /// N_lo (exclusive)
    pub fn lower_index(&self) -> i64 {
        self.lower_index
    }

    /// N_hi (inclusive)
    pub fn upper_index(&self) -> i64 {
        self.upper_index
    }

    /// N_ε, the number of exponential terms.
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// λ_i = e^{ih}, ascending.
    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.lower_index + 1..=self.upper_index
    }

    fn check_beta(&self, beta: f64) -> Result<()> {
        if !(self.config.beta_lo..=self.config.beta_hi).contains(&beta) {
            return Err(Error::Domain {
                what: "quadrature weights (beta outside the configured band)",
                value: beta,
            });
        }
        Ok(())
    }

    /// θ_i = h e^{βih} / Γ(β) over the index range.
    pub fn step_weights(&self, beta: f64) -> Result<Vec<f64>> {
        self.check_beta(beta)?;
        let mut out = vec![0.0; self.len()];
        self.fill_weights(beta, &mut out);
        Ok(out)
    }

    /// Writes θ_i scaled by `1 / Γ(β)` into `out` without the band check.
    pub(crate) fn fill_weights(&self, beta: f64, out: &mut [f64]) {
        let scale = self.step / gamma_unchecked(beta);
        for (w, i) in out.iter_mut().zip(self.indices()) {
            *w = scale * (beta * i as f64 * self.step).exp();
        }
    }

    /// Σ θ_i e^{-λ_i s}.
    pub fn kernel_eval(&self, beta: f64, s: f64) -> Result<f64> {
        let weights = self.step_weights(beta)?;
        Ok(self
            .exponents
            .iter()
            .zip(&weights)
            .map(|(&lambda, &w)| {
                let x = lambda * s;
                if x > 745.0 {
                    0.0
                } else {
                    w * (-x).exp()
                }
            })
            .sum())
    }

    /// Right-hand side of the a-priori bound on the number of terms,
    /// (2 log(1/ε) + log β^* + 2)(log(1/δ) + log(1/ε)/β_* + log log(1/ε) + 3/2) / 10.
    pub fn size_bound(&self) -> f64 {
        let c = &self.config;
        let l = -c.epsilon.ln();
        (2.0 * l + c.beta_hi.ln() + 2.0) * (-c.ratio.ln() + l / c.beta_lo + l.ln() + 1.5) / 10.0
    }
}
