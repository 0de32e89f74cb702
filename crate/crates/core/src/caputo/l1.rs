use super::{check_points, local_scale, CaputoOperator};
use crate::grid::TimeGrid;
use crate::order::VoOrderProfile;

/// Direct L1 operator.
///
/// With a_j = (j+1)^{1-α_k} - j^{1-α_k} the operator is
/// s^(k) Σ_{j=1}^{k} a_{k-j} (u^j - u^{j-1}); every increment is kept, so a
/// constant history contributes exactly zero.
#[derive(Debug, Clone)]
pub struct L1State {
    grid: TimeGrid,
    profile: VoOrderProfile,
    points: usize,
    level: usize,
    last: Vec<f64>,
    // increments[j-1][p] = u^j_p - u^{j-1}_p
    increments: Vec<Vec<f64>>,
    // a_j^(k) for j = 0..k at the advanced level
    coeffs: Vec<f64>,
    scale: f64,
    advanced: bool,
}

impl L1State {
    pub fn new(grid: TimeGrid, profile: VoOrderProfile, initial: &[f64]) -> Self {
        Self {
            grid,
            profile,
            points: initial.len(),
            level: 1,
            last: initial.to_vec(),
            increments: Vec::new(),
            coeffs: Vec::new(),
            scale: 0.0,
            advanced: false,
        }
    }

    /// Number of stored levels, u^0..u^{k-1}.
    pub fn history_len(&self) -> usize {
        self.increments.len() + 1
    }
}

impl CaputoOperator for L1State {
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
        let expo = 1.0 - alpha;
        self.coeffs.clear();
        let mut prev = 0.0;
        for j in 1..=k {
            let p = (j as f64).powf(expo);
            self.coeffs.push(p - prev);
            prev = p;
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
        let k = self.level;
        // a_0 = 1 multiplies -u^{k-1}
        for (o, &u) in out.iter_mut().zip(&self.last) {
            *o = -u;
        }
        for (j, inc) in self.increments.iter().enumerate() {
            // increment j+1 carries weight a_{k-(j+1)}
            let a = self.coeffs[k - j - 1];
            for (o, &d) in out.iter_mut().zip(inc) {
                *o += a * d;
            }
        }
        for o in out.iter_mut() {
            *o *= self.scale;
        }
    }

    fn commit(&mut self, values: &[f64]) {
        check_points(self.points, values.len());
        let inc = values
            .iter()
            .zip(&self.last)
            .map(|(&u, &prev)| u - prev)
            .collect();
        self.increments.push(inc);
        self.last.copy_from_slice(values);
        self.level += 1;
        self.advanced = false;
    }

    fn retained_values(&self) -> usize {
        self.history_len() * self.points
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
