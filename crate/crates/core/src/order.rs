//! Variable fractional order α(t).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// The smooth monotone profile interpolating α(0) and α(T):
///
/// α(t) = α(T) + (α(0) − α(T))·(1 − t/T − sin(2π(1 − t/T))/(2π)).
pub fn alpha_profile(t: f64, alpha0: f64, alpha_t: f64, horizon: f64) -> Result<f64> {
    if !(0.0..=horizon).contains(&t) {
        return Err(Error::Domain {
            what: "alpha_profile (t must lie in [0, T])",
            value: t,
        });
    }
    Ok(sine_profile(t, alpha0, alpha_t, horizon))
}

fn sine_profile(t: f64, alpha0: f64, alpha_t: f64, horizon: f64) -> f64 {
    if t == 0.0 {
        return alpha0;
    }
    if t == horizon {
        return alpha_t;
    }
    let s = 1.0 - t / horizon;
    alpha_t + (alpha0 - alpha_t) * (s - (2.0 * PI * s).sin() / (2.0 * PI))
}

#[derive(Clone)]
enum Kind {
    Sine { alpha0: f64, alpha_t: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// An order function on [0, T] together with bounds α_* ≤ α(t) ≤ α^* < 1.
#[derive(Clone)]
pub struct VoOrderProfile {
    kind: Kind,
    horizon: f64,
    lower: f64,
    upper: f64,
}

impl fmt::Debug for VoOrderProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("VoOrderProfile");
        if let Kind::Sine { alpha0, alpha_t } = self.kind {
            d.field("alpha0", &alpha0).field("alpha_t", &alpha_t);
        } else {
            d.field("kind", &"custom");
        }
        d.field("horizon", &self.horizon)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish()
    }
}

impl VoOrderProfile {
    /// The built-in sine profile. Bounds are the endpoint values (the profile
    /// is monotone); they are checked on `samples + 1` equispaced points.
    pub fn sine(alpha0: f64, alpha_t: f64, horizon: f64, samples: usize) -> Result<Self> {
        let profile = Self {
            kind: Kind::Sine { alpha0, alpha_t },
            horizon,
            lower: alpha0.min(alpha_t),
            upper: alpha0.max(alpha_t),
        };
        profile.validate(samples)?;
        Ok(profile)
    }

    /// A constant order.
    pub fn constant(alpha: f64, horizon: f64) -> Result<Self> {
        Self::sine(alpha, alpha, horizon, 1)
    }

    /// A user-supplied order. Bounds are taken from `samples + 1` equispaced
    /// evaluations; the solvers sample at least 10·n points so that every
    /// time node is covered.
    pub fn custom<F>(f: F, horizon: f64, samples: usize) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_horizon(horizon)?;
        let samples = samples.max(1);
        let (lower, upper) = (0..=samples)
            .map(|i| f(node(i, samples, horizon)))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
                (lo.min(a), hi.max(a))
            });
        let profile = Self {
            kind: Kind::Custom(Arc::new(f)),
            horizon,
            lower,
            upper,
        };
        profile.validate(samples)?;
        Ok(profile)
    }

    fn validate(&self, samples: usize) -> Result<()> {
        check_horizon(self.horizon)?;
        if !(self.lower >= 0.0) || !(self.upper < 1.0) {
            return Err(Error::InvalidProfile(format!(
                "need 0 <= alpha_* <= alpha^* < 1, got [{}, {}]",
                self.lower, self.upper
            )));
        }
        let samples = samples.max(1);
        for i in 0..=samples {
            let t = node(i, samples, self.horizon);
            let a = self.eval(t);
            if !(self.lower..=self.upper).contains(&a) {
                return Err(Error::InvalidProfile(format!(
                    "alpha({t}) = {a} outside [{}, {}]",
                    self.lower, self.upper
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Sine { alpha0, alpha_t } => sine_profile(t, *alpha0, *alpha_t, self.horizon),
            Kind::Custom(f) => f(t),
        }
    }

    /// α_*
    pub fn lower(&self) -> f64 {
        self.lower
    }

    /// α^*
    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// (α(0), α(T)) for the built-in profile.
    pub fn endpoints(&self) -> Option<(f64, f64)> {
        match self.kind {
            Kind::Sine { alpha0, alpha_t } => Some((alpha0, alpha_t)),
            Kind::Custom(_) => None,
        }
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidProfile(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    Ok(())
}

fn node(i: usize, samples: usize, horizon: f64) -> f64 {
    if i == samples {
        horizon
    } else {
        horizon * i as f64 / samples as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_midpoint() {
        let (a0, at, t) = (0.05, 0.5, 2.0);
        assert_eq!(alpha_profile(0.0, a0, at, t).unwrap(), a0);
        assert_eq!(alpha_profile(t, a0, at, t).unwrap(), at);
        let mid = alpha_profile(1.0, a0, at, t).unwrap();
        assert!((mid - 0.5 * (a0 + at)).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_time_is_rejected() {
        assert!(alpha_profile(-1e-9, 0.0, 0.2, 1.0).is_err());
        assert!(alpha_profile(1.0 + 1e-9, 0.0, 0.2, 1.0).is_err());
    }

    #[test]
    fn monotone_for_reported_parameters() {
        for (a0, at) in [(0.0, 0.2), (0.05, 0.5), (0.2, 0.6), (0.6, 0.1)] {
            let p = VoOrderProfile::sine(a0, at, 1.0, 10_000).unwrap();
            let vals: Vec<f64> = (0..=10_000).map(|i| p.eval(i as f64 / 1e4)).collect();
            let increasing = at >= a0;
            for w in vals.windows(2) {
                if increasing {
                    assert!(w[1] >= w[0] - 1e-15);
                } else {
                    assert!(w[1] <= w[0] + 1e-15);
                }
            }
        }
    }

    #[test]
    fn bounds_are_validated() {
        assert!(VoOrderProfile::sine(0.2, 1.0, 1.0, 100).is_err());
        assert!(VoOrderProfile::sine(-0.1, 0.5, 1.0, 100).is_err());
        assert!(VoOrderProfile::custom(|t| 0.3 + 0.8 * t, 1.0, 100).is_err());
        let p = VoOrderProfile::custom(|t| 0.1 + 0.3 * t * t, 1.0, 100).unwrap();
        assert_eq!(p.lower(), 0.1);
        assert!((p.upper() - 0.4).abs() < 1e-15);
    }
}
