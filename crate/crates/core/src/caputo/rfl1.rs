use super::{check_points, local_scale, CaputoOperator};
use crate::error::Result;
use crate::esa::{build_quadrature, EsaConfig, EsaQuadrature};
use crate::grid::TimeGrid;
use crate::order::VoOrderProfile;
use crate::special::gamma_unchecked;

/// Below this argument the hat-integral factors are evaluated by series.
pub(crate) const SERIES_THRESHOLD: f64 = 1e-3;

/// (1 - e^{-x} - x e^{-x}) / x², the weight of the left endpoint of a linear
/// piece integrated against a decaying exponential.
pub(crate) fn hat_falling(x: f64) -> f64 {
    if x <= SERIES_THRESHOLD {
        0.5 + x * (-1.0 / 3.0 + x * (1.0 / 8.0 + x * (-1.0 / 30.0 + x / 144.0)))
    } else {
        (-(-x).exp_m1() - x * (-x).exp()) / (x * x)
    }
}

/// (x - 1 + e^{-x}) / x², the weight of the right endpoint.
pub(crate) fn hat_rising(x: f64) -> f64 {
    if x <= SERIES_THRESHOLD {
        0.5 + x * (-1.0 / 6.0 + x * (1.0 / 24.0 + x * (-1.0 / 120.0 + x / 720.0)))
    } else {
        (x + (-x).exp_m1()) / (x * x)
    }
}

/// Robust fast L1 operator.
///
/// The history integral is integrated by parts so that the kernel becomes
/// (t_k - τ)^{-1-α_k}, which is compressed with a shifted-band exponential
/// sum. Per point it keeps u^0, u^{k-1}, u^{k-2} and one accumulator
///
/// ```text
/// F_{k,i} = ∫_0^{t_{k-1}} L(τ) e^{-λ_i (t_k - τ)/T} dτ
/// ```
///
/// per exponent, where L is the piecewise-linear interpolant of the history.
#[derive(Debug, Clone)]
pub struct Rfl1State {
    grid: TimeGrid,
    profile: VoOrderProfile,
    quadrature: EsaQuadrature,
    points: usize,
    level: usize,
    // per exponent: e^{-x}, coefficient of u^{k-2}, coefficient of u^{k-1}
    decay: Vec<f64>,
    coef_older: Vec<f64>,
    coef_newer: Vec<f64>,
    // point-major, points × N_ε
    acc: Vec<f64>,
    initial: Vec<f64>,
    prev: Vec<f64>,
    prev2: Vec<f64>,
    weights: Vec<f64>,
    cur: LevelConsts,
    advanced: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct LevelConsts {
    scale: f64,
    // 1 / Γ(1 - α)
    inv_gamma: f64,
    dt_pow: f64,
    tk_pow: f64,
    // α / T^{1+α}
    kernel_factor: f64,
}

impl Rfl1State {
    pub fn new(
        grid: TimeGrid,
        profile: VoOrderProfile,
        epsilon: f64,
        initial: &[f64],
    ) -> Result<Self> {
        let config = EsaConfig::shifted(profile.lower(), profile.upper(), epsilon, grid.ratio());
        let quadrature = build_quadrature(config)?;
        Ok(Self::with_quadrature(grid, profile, quadrature, initial))
    }

    /// Uses an already built shifted-band quadrature.
    pub fn with_quadrature(
        grid: TimeGrid,
        profile: VoOrderProfile,
        quadrature: EsaQuadrature,
        initial: &[f64],
    ) -> Self {
        let dt = grid.dt();
        let t = grid.horizon();
        let n = quadrature.len();
        let mut decay = Vec::with_capacity(n);
        let mut coef_older = Vec::with_capacity(n);
        let mut coef_newer = Vec::with_capacity(n);
        for &lambda in quadrature.exponents() {
            let x = dt * lambda / t;
            let e = (-x).exp();
            decay.push(e);
            coef_older.push(dt * e * hat_falling(x));
            coef_newer.push(dt * e * hat_rising(x));
        }
        let points = initial.len();
        Self {
            grid,
            profile,
            points,
            level: 1,
            decay,
            coef_older,
            coef_newer,
            acc: vec![0.0; points * n],
            initial: initial.to_vec(),
            prev: initial.to_vec(),
            prev2: vec![0.0; points],
            weights: vec![0.0; n],
            cur: LevelConsts::default(),
            advanced: false,
            quadrature,
        }
    }

    pub fn quadrature(&self) -> &EsaQuadrature {
        &self.quadrature
    }

    /// F_{k,i} for point `p` at the advanced level.
    pub fn accumulators(&self, p: usize) -> &[f64] {
        let n = self.quadrature.len();
        &self.acc[p * n..(p + 1) * n]
    }

    /// θ_i^(k) at the advanced level.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl CaputoOperator for Rfl1State {
    fn points(&self) -> usize {
        self.points
    }

    fn level(&self) -> usize {
        self.level
    }

    fn advance(&mut self) {
        let k = self.level;
        let dt = self.grid.dt();
        let tk = self.grid.node(k);
        let alpha = self.profile.eval(tk);
        self.cur = LevelConsts {
            scale: local_scale(alpha, dt),
            inv_gamma: 1.0 / gamma_unchecked(1.0 - alpha),
            dt_pow: dt.powf(-alpha),
            tk_pow: tk.powf(-alpha),
            kernel_factor: alpha / self.grid.horizon().powf(1.0 + alpha),
        };
        if k >= 2 {
            let n = self.quadrature.len();
            for p in 0..self.points {
                let (older, newer) = (self.prev2[p], self.prev[p]);
                let acc = &mut self.acc[p * n..(p + 1) * n];
                for (i, f) in acc.iter_mut().enumerate() {
                    *f = self.decay[i] * *f
                        + self.coef_older[i] * older
                        + self.coef_newer[i] * newer;
                }
            }
            self.quadrature.fill_weights(1.0 + alpha, &mut self.weights);
        }
        self.advanced = true;
    }

    fn implicit_coefficient(&self) -> f64 {
        debug_assert!(self.advanced);
        self.cur.scale
    }

    fn history(&self, out: &mut [f64]) {
        debug_assert!(self.advanced);
        check_points(self.points, out.len());
        let c = self.cur;
        if self.level == 1 {
            for (o, &u) in out.iter_mut().zip(&self.prev) {
                *o = -u * c.scale;
            }
            return;
        }
        let n = self.quadrature.len();
        for (p, o) in out.iter_mut().enumerate() {
            let acc = &self.acc[p * n..(p + 1) * n];
            let sum: f64 = acc.iter().zip(&self.weights).map(|(f, w)| f * w).sum();
            let tail = self.prev[p] * c.dt_pow - self.initial[p] * c.tk_pow - c.kernel_factor * sum;
            *o = c.inv_gamma * tail - c.scale * self.prev[p];
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
        // accumulators and three stored levels per point; exponent tables and weights
        self.points * (n + 3) + 4 * n
    }

    fn quadrature_len(&self) -> Option<usize> {
        Some(self.quadrature.len())
    }

    fn apply(&mut self, values: &[f64], out: &mut [f64]) {
        if !self.advanced {
            self.advance();
        }
        self.history(out);
        let s = self.cur.scale;
        for (o, &u) in out.iter_mut().zip(values) {
            *o += s * u;
        }
        self.commit(values);
    }
}
