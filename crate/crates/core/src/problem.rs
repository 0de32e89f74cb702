//! Problem data and solution storage.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{SpatialGrid, TimeGrid};

type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Data of the mobile-immobile problem
///
/// u_t + ζ·D^{α(t)} u = (p(x) u_x)_x + f(x, t) on (x_l, x_r) × (0, T],
/// u(x, 0) = φ(x), u = 0 on the boundary.
#[derive(Clone)]
pub struct ProblemSpec {
    capacity: f64,
    diffusivity: SpaceFn,
    source: SpaceTimeFn,
    initial: SpaceFn,
    left: f64,
    right: f64,
    horizon: f64,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("capacity", &self.capacity)
            .field("domain", &(self.left, self.right))
            .field("horizon", &self.horizon)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn new<P, S, I>(
        capacity: f64,
        diffusivity: P,
        source: S,
        initial: I,
        domain: (f64, f64),
        horizon: f64,
    ) -> Result<Self>
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        S: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        I: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(capacity > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "capacity must be positive, got {capacity}"
            )));
        }
        let (left, right) = domain;
        if !(right > left) {
            return Err(Error::InvalidProblem(format!(
                "empty domain [{left}, {right}]"
            )));
        }
        if !(horizon > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        const SAMPLES: usize = 1000;
        for i in 0..=SAMPLES {
            let x = left + (right - left) * i as f64 / SAMPLES as f64;
            let p = diffusivity(x);
            if !(p > 0.0) {
                return Err(Error::InvalidProblem(format!(
                    "p({x}) = {p} is not positive"
                )));
            }
        }
        Ok(Self {
            capacity,
            diffusivity: Arc::new(diffusivity),
            source: Arc::new(source),
            initial: Arc::new(initial),
            left,
            right,
            horizon,
        })
    }

    /// ζ = 1, p = 1, φ = sin(πx), f = 0 on [0, 1] × (0, 1].
    pub fn sine_decay() -> Self {
        Self::new(
            1.0,
            |_| 1.0,
            |_, _| 0.0,
            |x| (PI * x).sin(),
            (0.0, 1.0),
            1.0,
        )
        .expect("valid built-in problem")
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn diffusivity(&self, x: f64) -> f64 {
        (self.diffusivity)(x)
    }

    pub fn source(&self, x: f64, t: f64) -> f64 {
        (self.source)(x, t)
    }

    pub fn initial(&self, x: f64) -> f64 {
        (self.initial)(x)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.left, self.right)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn spatial_grid(&self, cells: usize) -> Result<SpatialGrid> {
        SpatialGrid::new(self.left, self.right, cells)
    }
}

/// Scalar problem u' + ζ·D^{α(t)} u = f(t), u(0) = u0.
#[derive(Clone)]
pub struct OdeProblem {
    capacity: f64,
    source: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    initial: f64,
    horizon: f64,
}

impl fmt::Debug for OdeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeProblem")
            .field("capacity", &self.capacity)
            .field("initial", &self.initial)
            .field("horizon", &self.horizon)
            .finish_non_exhaustive()
    }
}

impl OdeProblem {
    pub fn new<S>(capacity: f64, source: S, initial: f64, horizon: f64) -> Result<Self>
    where
        S: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(capacity > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "capacity must be positive, got {capacity}"
            )));
        }
        if !(horizon > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        Ok(Self {
            capacity,
            source: Arc::new(source),
            initial,
            horizon,
        })
    }

    /// ζ = 1, f ≡ 1, u(0) = 1, T = 1.
    pub fn unit_source() -> Self {
        Self::new(1.0, |_| 1.0, 1.0, 1.0).expect("valid built-in problem")
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn source(&self, t: f64) -> f64 {
        (self.source)(t)
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }
}

/// Computed values U_j^k. Level 0 and level n are always kept; intermediate
/// levels only when the solve was asked to keep the full trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    time: TimeGrid,
    space: Option<SpatialGrid>,
    levels: Vec<usize>,
    values: Vec<Vec<f64>>,
}

impl SolutionField {
    pub(crate) fn new(time: TimeGrid, space: Option<SpatialGrid>) -> Self {
        Self {
            time,
            space,
            levels: Vec::new(),
            values: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, k: usize, values: Vec<f64>) {
        self.levels.push(k);
        self.values.push(values);
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time
    }

    pub fn spatial_grid(&self) -> Option<&SpatialGrid> {
        self.space.as_ref()
    }

    /// Stored level indices, ascending.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// Values at level k if that level was kept.
    pub fn level(&self, k: usize) -> Option<&[f64]> {
        self.levels
            .binary_search(&k)
            .ok()
            .map(|i| self.values[i].as_slice())
    }

    pub fn final_values(&self) -> &[f64] {
        self.values.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Final-time scalar for ODE solutions.
    pub fn final_scalar(&self) -> f64 {
        self.final_values()[0]
    }

    /// Scalar trace (u^k over the kept levels) for ODE solutions.
    pub fn scalar_trace(&self) -> Vec<f64> {
        self.values.iter().map(|v| v[0]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_data() {
        assert!(ProblemSpec::new(0.0, |_| 1.0, |_, _| 0.0, |_| 0.0, (0.0, 1.0), 1.0).is_err());
        assert!(ProblemSpec::new(1.0, |x| x - 0.5, |_, _| 0.0, |_| 0.0, (0.0, 1.0), 1.0).is_err());
        assert!(ProblemSpec::new(1.0, |_| 1.0, |_, _| 0.0, |_| 0.0, (1.0, 0.0), 1.0).is_err());
        assert!(OdeProblem::new(-1.0, |_| 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn builtin_problems() {
        let p = ProblemSpec::sine_decay();
        assert_eq!(p.capacity(), 1.0);
        assert!((p.initial(0.5) - 1.0).abs() < 1e-15);
        let o = OdeProblem::unit_source();
        assert_eq!(o.initial(), 1.0);
        assert_eq!(o.source(0.3), 1.0);
    }
}
