//! Grid-refinement studies.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fastcaputo::{
    solve_ode, solve_pde, EpsilonPolicy, EsaConfig, OdeProblem, ProblemSpec, Scheme, SolutionField,
    SolveOptions, SolveOutcome, TimeGrid, VoOrderProfile,
};

use crate::error::{BenchError, Result};
use crate::probe::timing_and_memory_probe;
use crate::reference::{
    cache_reference, compute_reference, load_reference, read_header, Provenance, Reference,
    ReferenceKey,
};
use crate::report::{rates, ConvergenceReport, ConvergenceRow};

/// Samples used to validate the order profile.
pub const PROFILE_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    /// u' + D^{α(t)} u = 1, u(0) = 1 on (0, 1].
    Ode,
    /// u_t + D^{α(t)} u = u_xx, u(x, 0) = sin(πx) on (0, 1) × (0, 1].
    Pde,
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Example::Ode => "ode",
            Example::Pde => "pde",
        })
    }
}

impl FromStr for Example {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ode" => Ok(Example::Ode),
            "pde" => Ok(Example::Pde),
            other => Err(BenchError::Config(format!("unknown example {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Refine n with m fixed.
    Temporal,
    /// Refine m with n fixed.
    Spatial,
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sweep::Temporal => "temporal",
            Sweep::Spatial => "spatial",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceSpec {
    /// Fine RF-L1 solve at this resolution (the swept one; the other is fixed).
    Compute(usize),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub example: Example,
    pub sweep: Sweep,
    pub scheme: Scheme,
    pub alpha0: f64,
    pub alpha_t: f64,
    /// Swept resolutions, strictly increasing powers of two.
    pub resolutions: Vec<usize>,
    /// m for temporal PDE sweeps, n for spatial ones; unused for the ODE.
    pub fixed: Option<usize>,
    pub epsilon: EpsilonPolicy,
    pub reference: ReferenceSpec,
    /// Computed references are cached here when set.
    pub cache_dir: Option<PathBuf>,
    /// CSV destination; a Markdown twin is written next to it.
    pub output: Option<PathBuf>,
}

fn powers_of_two(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

impl StudyConfig {
    /// ODE temporal study over n = 2^9..2^13 against n = 2^17.
    pub fn ode_temporal(scheme: Scheme, alpha0: f64, alpha_t: f64) -> Self {
        Self {
            example: Example::Ode,
            sweep: Sweep::Temporal,
            scheme,
            alpha0,
            alpha_t,
            resolutions: powers_of_two(9, 13),
            fixed: None,
            epsilon: EpsilonPolicy::DtSquared,
            reference: ReferenceSpec::Compute(1 << 17),
            cache_dir: None,
            output: None,
        }
    }

    /// PDE temporal study over n = 2^8..2^12 with m = 2^8 against n = 2^15.
    pub fn pde_temporal(scheme: Scheme, alpha0: f64, alpha_t: f64) -> Self {
        Self {
            example: Example::Pde,
            sweep: Sweep::Temporal,
            resolutions: powers_of_two(8, 12),
            fixed: Some(1 << 8),
            reference: ReferenceSpec::Compute(1 << 15),
            ..Self::ode_temporal(scheme, alpha0, alpha_t)
        }
    }

    /// PDE spatial study over m = 2^3..2^6 with n = 2^12 against m = 2^9.
    pub fn pde_spatial(scheme: Scheme, alpha0: f64, alpha_t: f64) -> Self {
        Self {
            example: Example::Pde,
            sweep: Sweep::Spatial,
            resolutions: powers_of_two(3, 6),
            fixed: Some(1 << 12),
            reference: ReferenceSpec::Compute(1 << 9),
            ..Self::ode_temporal(scheme, alpha0, alpha_t)
        }
    }

    pub fn profile(&self) -> Result<VoOrderProfile> {
        Ok(VoOrderProfile::sine(
            self.alpha0,
            self.alpha_t,
            1.0,
            PROFILE_SAMPLES,
        )?)
    }

    /// (n, m) of the run at swept resolution `r`.
    fn grids(&self, r: usize) -> (usize, Option<usize>) {
        match (self.example, self.sweep) {
            (Example::Ode, _) => (r, None),
            (Example::Pde, Sweep::Temporal) => (r, self.fixed),
            (Example::Pde, Sweep::Spatial) => (self.fixed.unwrap_or(0), Some(r)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(BenchError::Config(msg));
        if self.resolutions.is_empty() {
            return cfg("resolution list is empty".into());
        }
        for &r in &self.resolutions {
            if !r.is_power_of_two() {
                return cfg(format!("resolution {r} is not a power of two"));
            }
        }
        if self.resolutions.windows(2).any(|w| w[0] >= w[1]) {
            return cfg("resolutions must be strictly increasing".into());
        }
        match (self.example, self.sweep, self.fixed) {
            (Example::Ode, Sweep::Spatial, _) => return cfg("the ODE has no spatial sweep".into()),
            (Example::Pde, _, None) => {
                return cfg("PDE studies need the fixed counterpart resolution".into())
            }
            (Example::Pde, Sweep::Spatial, Some(_)) if self.resolutions[0] < 2 => {
                return cfg("spatial resolutions need at least two cells".into())
            }
            (Example::Pde, Sweep::Temporal, Some(m)) if m < 2 => {
                return cfg(format!("spatial resolution {m} needs at least two cells"))
            }
            _ => {}
        }
        if let EpsilonPolicy::Fixed(eps) = self.epsilon {
            if !(eps > 0.0 && eps <= (-1.0f64).exp()) {
                return cfg(format!("epsilon {eps} outside (0, 1/e]"));
            }
        }
        let profile = self.profile()?;
        if let ReferenceSpec::Compute(fine) = self.reference {
            let finest = *self.resolutions.last().expect("non-empty");
            if fine <= finest || !fine.is_multiple_of(finest) {
                return cfg(format!(
                    "reference resolution {fine} must be a proper multiple of {finest}"
                ));
            }
        }
        if self.scheme == Scheme::Fl1 {
            for &r in &self.resolutions {
                let time = TimeGrid::new(1.0, self.grids(r).0)?;
                let eps = self.epsilon.resolve(&time);
                EsaConfig::direct(profile.lower(), profile.upper(), eps, time.ratio())
                    .validate()?;
            }
        }
        Ok(())
    }

    /// Key of a fine RF-L1 reference on n = `steps`, m = `cells`.
    pub fn key_for(&self, steps: usize, cells: Option<usize>) -> ReferenceKey {
        let r = 1.0 / steps as f64;
        let epsilon = match self.epsilon {
            EpsilonPolicy::DtSquared => r * r,
            EpsilonPolicy::Fixed(e) => e,
        };
        ReferenceKey {
            example: self.example,
            alpha0: self.alpha0,
            alpha_t: self.alpha_t,
            steps,
            cells,
            epsilon,
            scheme: Scheme::Rfl1,
        }
    }

    /// Key of the computed reference, if the reference is not a file.
    pub fn reference_key(&self) -> Option<ReferenceKey> {
        let ReferenceSpec::Compute(fine) = self.reference else {
            return None;
        };
        Some(match (self.example, self.sweep) {
            (Example::Pde, Sweep::Spatial) => self.key_for(self.fixed?, Some(fine)),
            (Example::Pde, Sweep::Temporal) => self.key_for(fine, self.fixed),
            (Example::Ode, _) => self.key_for(fine, None),
        })
    }
}

/// Maximum deviation at the final time over the nodes shared with the reference.
pub fn compute_error(solution: &SolutionField, reference: &Reference) -> Result<f64> {
    let steps = solution.time_grid().steps();
    if !reference.steps.is_multiple_of(steps) {
        return Err(BenchError::Grid(format!(
            "reference n = {} is not a multiple of n = {steps}",
            reference.steps
        )));
    }
    let values = solution.final_values();
    let stride = match (solution.spatial_grid(), reference.cells) {
        (None, None) => 1,
        (Some(g), Some(fine)) if fine.is_multiple_of(g.cells()) => fine / g.cells(),
        (Some(g), Some(fine)) => {
            return Err(BenchError::Grid(format!(
                "reference m = {fine} is not a multiple of m = {}",
                g.cells()
            )))
        }
        _ => {
            return Err(BenchError::Grid(
                "ODE and PDE fields cannot be compared".into(),
            ))
        }
    };
    if (values.len() - 1) * stride + 1 != reference.final_values.len() {
        return Err(BenchError::Grid(format!(
            "{} values against a reference of {}",
            values.len(),
            reference.final_values.len()
        )));
    }
    Ok(values
        .iter()
        .enumerate()
        .map(|(j, v)| (v - reference.final_values[j * stride]).abs())
        .fold(0.0, f64::max))
}

/// One solve of the configured example at swept resolution `r`.
pub fn run_single(config: &StudyConfig, r: usize) -> fastcaputo::Result<SolveOutcome> {
    let profile = VoOrderProfile::sine(config.alpha0, config.alpha_t, 1.0, PROFILE_SAMPLES)?;
    let (n, m) = config.grids(r);
    let time = TimeGrid::new(1.0, n)?;
    match config.example {
        Example::Ode => solve_ode(
            config.scheme,
            &OdeProblem::unit_source(),
            &profile,
            time,
            config.epsilon,
            SolveOptions::default(),
        ),
        Example::Pde => solve_pde(
            config.scheme,
            &ProblemSpec::sine_decay(),
            &profile,
            time,
            m.unwrap_or(0),
            config.epsilon,
            SolveOptions::default(),
        ),
    }
}

fn obtain_reference(config: &StudyConfig) -> Result<(Reference, Provenance, ReferenceKey)> {
    match &config.reference {
        ReferenceSpec::File(path) => {
            let header = read_header(path)?;
            let key = config.key_for(header.steps, header.cells);
            let reference = load_reference(path, &key)?;
            Ok((reference, Provenance::Loaded(path.clone()), key))
        }
        ReferenceSpec::Compute(_) => {
            let key = config
                .reference_key()
                .expect("computed reference has a key");
            let (reference, provenance) = match &config.cache_dir {
                Some(dir) => cache_reference(dir, &key)?,
                None => (compute_reference(&key)?, Provenance::Computed),
            };
            Ok((reference, provenance, key))
        }
    }
}

/// Runs every resolution of the study and writes the report if requested.
pub fn run_convergence_study(config: &StudyConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let (reference, provenance, key) = obtain_reference(config)?;
    let mut rows = Vec::with_capacity(config.resolutions.len());
    for &r in &config.resolutions {
        let (outcome, probe) = timing_and_memory_probe(|| run_single(config, r))?;
        let error = compute_error(&outcome.field, &reference)?;
        rows.push(ConvergenceRow {
            resolution: r,
            error,
            rate: None,
            cpu_s: probe.seconds,
            mem_values: probe.retained_values,
            quad_count: probe.quadrature_len,
        });
    }
    let errors: Vec<f64> = rows.iter().map(|row| row.error).collect();
    for (row, rate) in rows.iter_mut().zip(rates(&errors)) {
        row.rate = rate;
    }
    let report = ConvergenceReport {
        config: describe(config),
        reference: format!("{} [{provenance}]", key.describe()),
        date: chrono::Local::now().to_rfc3339(),
        rows,
    };
    if let Some(path) = &config.output {
        report.write(path)?;
    }
    Ok(report)
}

fn describe(config: &StudyConfig) -> String {
    let fixed = match (config.example, config.sweep, config.fixed) {
        (Example::Pde, Sweep::Temporal, Some(m)) => format!(", m={m}"),
        (Example::Pde, Sweep::Spatial, Some(n)) => format!(", n={n}"),
        _ => String::new(),
    };
    let eps = match config.epsilon {
        EpsilonPolicy::DtSquared => "dt2".to_string(),
        EpsilonPolicy::Fixed(e) => format!("{e:e}"),
    };
    format!(
        "{} {} {} alpha=({}, {}){fixed} eps={eps}",
        config.example, config.sweep, config.scheme, config.alpha0, config.alpha_t
    )
}
