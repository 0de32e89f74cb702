use crate::error::{Error, Result};

/// Uniform time grid on [0, T] with `n` steps.
///
/// Only the horizon and step count are stored; the step and the nodes are
/// derived so that `t_n == T` holds exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidGrid("need at least one time step".into()));
        }
        Ok(Self { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// Δt / T.
    pub fn ratio(&self) -> f64 {
        1.0 / self.steps as f64
    }

    /// t_k = k·Δt, with t_n returned as T exactly.
    pub fn node(&self, k: usize) -> f64 {
        if k == self.steps {
            self.horizon
        } else {
            k as f64 * self.dt()
        }
    }
}

/// Uniform spatial grid on [x_l, x_r] with `m` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    left: f64,
    right: f64,
    cells: usize,
}

impl SpatialGrid {
    pub fn new(left: f64, right: f64, cells: usize) -> Result<Self> {
        if !(right > left) || !left.is_finite() || !right.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need x_l < x_r, got [{left}, {right}]"
            )));
        }
        if cells < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least two cells, got {cells}"
            )));
        }
        Ok(Self { left, right, cells })
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn dx(&self) -> f64 {
        (self.right - self.left) / self.cells as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.cells {
            self.right
        } else {
            self.left + j as f64 * self.dx()
        }
    }

    /// x_{j+1/2}, the midpoint between nodes j and j+1.
    pub fn midpoint(&self, j: usize) -> f64 {
        0.5 * (self.node(j) + self.node(j + 1))
    }

    /// Number of interior nodes, m − 1.
    pub fn interior(&self) -> usize {
        self.cells - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_nodes_hit_endpoints() {
        let g = TimeGrid::new(1.0, 3).unwrap();
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(3), 1.0);
        for k in 1..=3 {
            let diff = g.node(k) - g.node(k - 1);
            assert!((diff - g.dt()).abs() <= f64::EPSILON * 2.0);
        }
    }

    #[test]
    fn spatial_midpoints_between_nodes() {
        let g = SpatialGrid::new(-0.3, 1.7, 7).unwrap();
        assert_eq!(g.node(0), -0.3);
        assert_eq!(g.node(7), 1.7);
        for j in 0..7 {
            let mid = g.midpoint(j);
            assert!(g.node(j) < mid && mid < g.node(j + 1));
        }
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(TimeGrid::new(0.0, 4).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
        assert!(SpatialGrid::new(1.0, 1.0, 4).is_err());
        assert!(SpatialGrid::new(0.0, 1.0, 1).is_err());
    }
}
