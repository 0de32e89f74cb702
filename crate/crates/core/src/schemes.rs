//! Implicit finite-difference time steppers.
//!
//! Each level solves
//!
//! ```text
//! (1/Δt + ζ s^(k)) U^k - Δ_x U^k = U^{k-1}/Δt - ζ H_k + f^k
//! ```
//!
//! on the interior nodes, where s^(k) and H_k come from the chosen Caputo
//! operator and Δ_x is the conservative three-point stencil with p evaluated
//! at the cell midpoints. The matrix is strictly diagonally dominant, so the
//! Thomas algorithm needs no pivoting.

use crate::caputo::{build_operator, CaputoOperator, Scheme};
use crate::error::{Error, Result};
use crate::grid::{SpatialGrid, TimeGrid};
use crate::order::VoOrderProfile;
use crate::problem::{OdeProblem, ProblemSpec, SolutionField};

/// How the exponential-sum tolerance is chosen for the fast schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonPolicy {
    /// ε = (Δt/T)²
    DtSquared,
    Fixed(f64),
}

impl EpsilonPolicy {
    pub fn resolve(&self, grid: &TimeGrid) -> f64 {
        match *self {
            EpsilonPolicy::DtSquared => grid.ratio() * grid.ratio(),
            EpsilonPolicy::Fixed(eps) => eps,
        }
    }
}

/// Δ_x restricted to the interior nodes 1..m-1, stored as three diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialOperator {
    pub sub: Vec<f64>,
    pub main: Vec<f64>,
    pub sup: Vec<f64>,
}

impl SpatialOperator {
    pub fn new(grid: &SpatialGrid, p: impl Fn(f64) -> f64) -> Self {
        let inv_dx2 = 1.0 / (grid.dx() * grid.dx());
        let interior = grid.interior();
        let mut sub = Vec::with_capacity(interior);
        let mut main = Vec::with_capacity(interior);
        let mut sup = Vec::with_capacity(interior);
        for j in 1..grid.cells() {
            let west = p(grid.midpoint(j - 1)) * inv_dx2;
            let east = p(grid.midpoint(j)) * inv_dx2;
            sub.push(west);
            main.push(-(west + east));
            sup.push(east);
        }
        Self { sub, main, sup }
    }

    pub fn len(&self) -> usize {
        self.main.len()
    }

    pub fn is_empty(&self) -> bool {
        self.main.is_empty()
    }
}

/// One tridiagonal system. `sub[0]` and `sup[len-1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl StepSystem {
    /// Smallest margin |diag_j| - |sub_j| - |sup_j| over all rows.
    pub fn dominance_margin(&self) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|j| {
                let lo = if j > 0 { self.sub[j].abs() } else { 0.0 };
                let hi = if j + 1 < n { self.sup[j].abs() } else { 0.0 };
                self.diag[j].abs() - lo - hi
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn solve(&self) -> Result<Vec<f64>> {
        thomas_solve(self)
    }
}

/// Thomas algorithm: forward elimination, back substitution.
pub fn thomas_solve(system: &StepSystem) -> Result<Vec<f64>> {
    let n = system.diag.len();
    if system.sub.len() != n || system.sup.len() != n || system.rhs.len() != n {
        return Err(Error::Dimension(format!(
            "tridiagonal system of order {n} with sub {}, sup {}, rhs {}",
            system.sub.len(),
            system.sup.len(),
            system.rhs.len()
        )));
    }
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    thomas_in_place(
        &system.sub,
        &system.diag,
        &system.sup,
        &system.rhs,
        &mut c,
        &mut x,
    )?;
    Ok(x)
}

fn thomas_in_place(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
    scratch: &mut [f64],
    x: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut pivot = diag[0];
    if pivot.abs() < tiny {
        return Err(Error::SingularPivot { row: 0, pivot });
    }
    scratch[0] = sup[0] / pivot;
    x[0] = rhs[0] / pivot;
    for j in 1..n {
        pivot = diag[j] - sub[j] * scratch[j - 1];
        if pivot.abs() < tiny {
            return Err(Error::SingularPivot { row: j, pivot });
        }
        scratch[j] = if j + 1 < n { sup[j] / pivot } else { 0.0 };
        x[j] = (rhs[j] - sub[j] * x[j - 1]) / pivot;
    }
    for j in (0..n - 1).rev() {
        x[j] -= scratch[j] * x[j + 1];
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveOptions {
    /// Keep every level in the returned field instead of only 0 and n.
    pub keep_trace: bool,
}

/// Result of a full solve with the quantities reported by benchmarks.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub field: SolutionField,
    /// Values retained by the Caputo operator at the end of the march.
    pub retained_values: usize,
    /// N_ε for the fast schemes.
    pub quadrature_len: Option<usize>,
    pub epsilon: f64,
}

/// Time stepper for the one-dimensional problem on the interior nodes.
pub struct PdeStepper {
    time: TimeGrid,
    space: SpatialGrid,
    capacity: f64,
    problem: ProblemSpec,
    lap: SpatialOperator,
    op: Box<dyn CaputoOperator>,
    current: Vec<f64>,
    history: Vec<f64>,
    system: StepSystem,
    scratch: Vec<f64>,
    next: Vec<f64>,
    assembled: bool,
}

impl std::fmt::Debug for PdeStepper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PdeStepper")
            .field("time", &self.time)
            .field("space", &self.space)
            .field("level", &self.op.level())
            .finish_non_exhaustive()
    }
}

impl PdeStepper {
    pub fn new(
        scheme: Scheme,
        problem: &ProblemSpec,
        profile: &VoOrderProfile,
        time: TimeGrid,
        space: SpatialGrid,
        epsilon: f64,
    ) -> Result<Self> {
        check_horizon(profile, time.horizon())?;
        if (problem.horizon() - time.horizon()).abs() > 0.0 {
            return Err(Error::InvalidProblem(format!(
                "time grid horizon {} differs from problem horizon {}",
                time.horizon(),
                problem.horizon()
            )));
        }
        let interior = space.interior();
        let current: Vec<f64> = (1..space.cells())
            .map(|j| problem.initial(space.node(j)))
            .collect();
        let op = build_operator(scheme, time, profile.clone(), epsilon, &current)?;
        let lap = SpatialOperator::new(&space, |x| problem.diffusivity(x));
        let system = StepSystem {
            sub: lap.sub.iter().map(|v| -v).collect(),
            diag: vec![0.0; interior],
            sup: lap.sup.iter().map(|v| -v).collect(),
            rhs: vec![0.0; interior],
        };
        Ok(Self {
            time,
            space,
            capacity: problem.capacity(),
            problem: problem.clone(),
            lap,
            op,
            current,
            history: vec![0.0; interior],
            system,
            scratch: vec![0.0; interior],
            next: vec![0.0; interior],
            assembled: false,
        })
    }

    /// Level that the next call to `step` computes.
    pub fn level(&self) -> usize {
        self.op.level()
    }

    /// Interior values of the last computed level.
    pub fn interior(&self) -> &[f64] {
        &self.current
    }

    /// Values at all nodes 0..=m of the last computed level.
    pub fn full_level(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.space.cells() + 1);
        if self.level() == 1 {
            v.push(self.problem.initial(self.space.left()));
            v.extend_from_slice(&self.current);
            v.push(self.problem.initial(self.space.right()));
        } else {
            v.push(0.0);
            v.extend_from_slice(&self.current);
            v.push(0.0);
        }
        v
    }

    /// System assembled for the current level, before solving.
    pub fn system(&self) -> &StepSystem {
        &self.system
    }

    /// Advances the operator and assembles the system of the next level.
    /// Calling it again before `step` is a no-op.
    pub fn assemble(&mut self) {
        if self.assembled {
            return;
        }
        self.assembled = true;
        let k = self.op.level();
        let dt = self.time.dt();
        let t = self.time.node(k);
        self.op.advance();
        let s = self.op.implicit_coefficient();
        self.op.history(&mut self.history);
        let shift = 1.0 / dt + self.capacity * s;
        for (j, d) in self.system.diag.iter_mut().enumerate() {
            *d = shift - self.lap.main[j];
        }
        for (j, r) in self.system.rhs.iter_mut().enumerate() {
            let x = self.space.node(j + 1);
            *r = self.current[j] / dt - self.capacity * self.history[j] + self.problem.source(x, t);
        }
    }

    /// Computes the next level.
    pub fn step(&mut self) -> Result<()> {
        if self.op.level() > self.time.steps() {
            return Err(Error::InvalidGrid("march already reached t = T".into()));
        }
        self.assemble();
        debug_assert!(self.system.dominance_margin() > 0.0);
        thomas_in_place(
            &self.system.sub,
            &self.system.diag,
            &self.system.sup,
            &self.system.rhs,
            &mut self.scratch,
            &mut self.next,
        )?;
        std::mem::swap(&mut self.current, &mut self.next);
        self.op.commit(&self.current);
        self.assembled = false;
        Ok(())
    }

    pub fn operator(&self) -> &dyn CaputoOperator {
        self.op.as_ref()
    }
}

/// Time stepper for u' + ζ D^{α(t)} u = f(t).
pub struct OdeStepper {
    time: TimeGrid,
    problem: OdeProblem,
    op: Box<dyn CaputoOperator>,
    current: f64,
}

impl std::fmt::Debug for OdeStepper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OdeStepper")
            .field("time", &self.time)
            .field("level", &self.op.level())
            .field("current", &self.current)
            .finish_non_exhaustive()
    }
}

impl OdeStepper {
    pub fn new(
        scheme: Scheme,
        problem: &OdeProblem,
        profile: &VoOrderProfile,
        time: TimeGrid,
        epsilon: f64,
    ) -> Result<Self> {
        check_horizon(profile, time.horizon())?;
        if problem.horizon() != time.horizon() {
            return Err(Error::InvalidProblem(format!(
                "time grid horizon {} differs from problem horizon {}",
                time.horizon(),
                problem.horizon()
            )));
        }
        let current = problem.initial();
        let op = build_operator(scheme, time, profile.clone(), epsilon, &[current])?;
        Ok(Self {
            time,
            problem: problem.clone(),
            op,
            current,
        })
    }

    pub fn level(&self) -> usize {
        self.op.level()
    }

    pub fn value(&self) -> f64 {
        self.current
    }

    pub fn step(&mut self) -> Result<f64> {
        let k = self.op.level();
        if k > self.time.steps() {
            return Err(Error::InvalidGrid("march already reached t = T".into()));
        }
        let dt = self.time.dt();
        let zeta = self.problem.capacity();
        self.op.advance();
        let s = self.op.implicit_coefficient();
        let mut h = [0.0];
        self.op.history(&mut h);
        let rhs = self.current / dt - zeta * h[0] + self.problem.source(self.time.node(k));
        self.current = rhs / (1.0 / dt + zeta * s);
        self.op.commit(&[self.current]);
        Ok(self.current)
    }

    pub fn operator(&self) -> &dyn CaputoOperator {
        self.op.as_ref()
    }
}

fn check_horizon(profile: &VoOrderProfile, horizon: f64) -> Result<()> {
    if profile.horizon() != horizon {
        return Err(Error::InvalidProfile(format!(
            "order profile defined on [0, {}] but the grid ends at {horizon}",
            profile.horizon()
        )));
    }
    Ok(())
}

/// Marches the scalar problem to t = T.
pub fn solve_ode(
    scheme: Scheme,
    problem: &OdeProblem,
    profile: &VoOrderProfile,
    time: TimeGrid,
    epsilon: EpsilonPolicy,
    options: SolveOptions,
) -> Result<SolveOutcome> {
    let eps = epsilon.resolve(&time);
    let mut stepper = OdeStepper::new(scheme, problem, profile, time, eps)?;
    let mut field = SolutionField::new(time, None);
    field.push(0, vec![stepper.value()]);
    for k in 1..=time.steps() {
        let u = stepper.step()?;
        if options.keep_trace || k == time.steps() {
            field.push(k, vec![u]);
        }
    }
    Ok(SolveOutcome {
        field,
        retained_values: stepper.operator().retained_values(),
        quadrature_len: stepper.operator().quadrature_len(),
        epsilon: eps,
    })
}

/// Marches the diffusion problem to t = T on `cells` spatial cells.
pub fn solve_pde(
    scheme: Scheme,
    problem: &ProblemSpec,
    profile: &VoOrderProfile,
    time: TimeGrid,
    cells: usize,
    epsilon: EpsilonPolicy,
    options: SolveOptions,
) -> Result<SolveOutcome> {
    let eps = epsilon.resolve(&time);
    let space = problem.spatial_grid(cells)?;
    let mut stepper = PdeStepper::new(scheme, problem, profile, time, space, eps)?;
    let mut field = SolutionField::new(time, Some(space));
    field.push(0, stepper.full_level());
    for k in 1..=time.steps() {
        stepper.step()?;
        if options.keep_trace || k == time.steps() {
            field.push(k, stepper.full_level());
        }
    }
    Ok(SolveOutcome {
        field,
        retained_values: stepper.operator().retained_values(),
        quadrature_len: stepper.operator().quadrature_len(),
        epsilon: eps,
    })
}
