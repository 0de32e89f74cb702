use super::{check_points, local_scale, CaputoOperator};
use crate::error::Result;
use crate::esa::{build_quadrature, EsaConfig, EsaQuadrature};
use crate::grid::TimeGrid;
use crate::order::VoOrderProfile;
use crate::special::gamma_unchecked;

/// Fast L1 operator compressing the original kernel (t_k - τ)^{-α_k}.
///
/// Accumulators follow
/// F̃_{k,i} = e^{-x_i} F̃_{k-1,i} + T (e^{-x_i} - e^{-2x_i}) / (λ_i Δt) · (u^{k-1} - u^{k-2})
/// with x_i = λ_i Δt / T. Construction fails when α_* = 0.
#[derive(Debug, Clone)]
pub struct Fl1State {
    grid: TimeGrid,
    profile: VoOrderProfile,
    quadrature: EsaQuadrature,
    points: usize,
    level: usize,
    decay: Vec<f64>,
    coef: Vec<f64>,
    acc: Vec<f64>,
    prev: Vec<f64>,
    prev2: Vec<f64>,
    weights: Vec<f64>,
    scale: f64,
    // T^{-α} / Γ(1 - α)
    history_factor: f64,
    advanced: bool,
}

impl Fl1State {
    pub fn new(
        grid: TimeGrid,
        profile: VoOrderProfile,
        epsilon: f64,
        initial: &[f64],
    ) -> Result<Self> {
        let config = EsaConfig::direct(profile.lower(), profile.upper(), epsilon, grid.ratio());
        let quadrature = build_quadrature(config)?;
        let dt = grid.dt();
        let n = quadrature.len();
        let mut decay = Vec::with_capacity(n);
        let mut coef = Vec::with_capacity(n);
        for &lambda in quadrature.exponents() {
            let x = dt * lambda / grid.horizon();
            let e = (-x).exp();
            decay.push(e);
            // T (e^{-x} - e^{-2x}) / (λ Δt) = e^{-x} (1 - e^{-x}) / x
            coef.push(e * -(-x).exp_m1() / x);
        }
        let points = initial.len();
        Ok(Self {
            grid,
            profile,
            points,
            level: 1,
            decay,
            coef,
            acc: vec![0.0; points * n],
            prev: initial.to_vec(),
            prev2: vec![0.0; points],
            weights: vec![0.0; n],
            scale: 0.0,
            history_factor: 0.0,
            advanced: false,
            quadrature,
        })
    }

    pub fn quadrature(&self) -> &EsaQuadrature {
        &self.quadrature
    }
}

impl CaputoOperator for Fl1State {
    fn points(&self) -> usize {
        self.points
    }

    fn level(&self) -> usize {
        self.level
    }

    fn advance(&mut self) {
        let k = self.level;
        let alpha = self.profile.eval(self.grid.node(k));
        self.scale = local_scale(alpha, self.grid.dt());
        if k >= 2 {
            self.history_factor = self.grid.horizon().powf(-alpha) / gamma_unchecked(1.0 - alpha);
            let n = self.quadrature.len();
            for p in 0..self.points {
                let diff = self.prev[p] - self.prev2[p];
                let acc = &mut self.acc[p * n..(p + 1) * n];
                for (i, f) in acc.iter_mut().enumerate() {
                    *f = self.decay[i] * *f + self.coef[i] * diff;
                }
            }
            self.quadrature.fill_weights(alpha, &mut self.weights);
        }
        self.advanced = true;
    }

    fn implicit_coefficient(&self) -> f64 {
        debug_assert!(self.advanced);
        self.scale
    }

    fn history(&self, out: &mut [f64]) {
        debug_assert!(self.advanced);
        check_points(self.points, out.len());
        if self.level == 1 {
            for (o, &u) in out.iter_mut().zip(&self.prev) {
                *o = -u * self.scale;
            }
            return;
        }
        let n = self.quadrature.len();
        for (p, o) in out.iter_mut().enumerate() {
            let acc = &self.acc[p * n..(p + 1) * n];
            let sum: f64 = acc.iter().zip(&self.weights).map(|(f, w)| f * w).sum();
            *o = self.history_factor * sum - self.scale * self.prev[p];
        }
    }

    fn commit(&mut self, values: &[f64]) {
        check_points(self.points, values.len());
        std::mem::swap(&mut self.prev2, &mut self.prev);
        self.prev.copy_from_slice(values);
        self.level += 1;
        self.advanced = false;
    }

    fn retained_values(&self) -> usize {
        let n = self.quadrature.len();
        self.points * (n + 2) + 3 * n
    }

    fn quadrature_len(&self) -> Option<usize> {
        Some(self.quadrature.len())
    }

    fn apply(&mut self, values: &[f64], out: &mut [f64]) {
        if !self.advanced {
            self.advance();
        }
        self.history(out);
        let s = self.scale;
        for (o, &u) in out.iter_mut().zip(values) {
            *o += s * u;
        }
        self.commit(values);
    }
}
