//! Common scenario description shared by both simulators.

mod config;
mod landscape;
mod rules;
mod seed;

pub use config::{
    BenchSettings, CompareCase, ConfigFile, DriftAssembly, EnsembleSettings, GridSettings,
    PositionSpec, RunStamp, Scenario, SweepSettings, TypeInitial,
};
pub use landscape::{eval_gradient, SuitabilityLandscape};
pub use rules::{build_rule, InteractionRule};
pub use seed::{SeedPolicy, StreamPurpose};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Closed interval the agents live in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain1D {
    pub lower: f64,
    pub upper: f64,
}

impl Domain1D {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::Config(format!(
                "domain bounds must be finite with lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit() -> Self {
        Self { lower: 0.0, upper: 1.0 }
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }

    /// Fold a point back into the interval by repeated reflection at the walls.
    ///
    /// The map is the distance-preserving triangle wave of period `2 L`, so a
    /// single overshoot `upper + e` lands on `upper - e` and arbitrarily large
    /// excursions stay inside.
    pub fn reflect(&self, x: f64) -> f64 {
        let l = self.length();
        let y = (x - self.lower).rem_euclid(2.0 * l);
        self.lower + if y <= l { y } else { 2.0 * l - y }
    }
}

/// Everything the dynamics of one scenario needs besides the landscape and
/// the initial condition.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub n_types: usize,
    pub n_agents: usize,
    /// Noise intensity of the position diffusion.
    pub sigma: f64,
    /// Interaction (contact) radius.
    pub d_int: f64,
    pub rules: Vec<InteractionRule>,
    pub t_end: f64,
    pub dt: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_types == 0 {
            return Err(Error::Config("need at least one agent type".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.d_int > 0.0 && self.d_int.is_finite()) {
            return Err(Error::Config(format!("d_int must be positive, got {}", self.d_int)));
        }
        if !(self.dt > 0.0 && self.t_end > 0.0) {
            return Err(Error::Config(format!(
                "dt and t_end must be positive, got dt={} t_end={}",
                self.dt, self.t_end
            )));
        }
        for rule in &self.rules {
            rule.validate(self.n_types)?;
        }
        self.n_steps()?;
        Ok(())
    }

    /// Number of time steps; `t_end` must be an integer multiple of `dt` to
    /// within 1e-9 relative so both models land exactly on the final time.
    pub fn n_steps(&self) -> Result<usize> {
        let k = (self.t_end / self.dt).round();
        if ((k * self.dt - self.t_end) / self.t_end).abs() > 1e-9 || k < 1.0 {
            return Err(Error::Config(format!(
                "t_end={} is not an integer multiple of dt={}",
                self.t_end, self.dt
            )));
        }
        Ok(k as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_rejects_bad_bounds() {
        assert!(Domain1D::new(1.0, 0.0).is_err());
        assert!(Domain1D::new(0.0, 0.0).is_err());
        assert!(Domain1D::new(0.0, f64::INFINITY).is_err());
        assert!(Domain1D::new(-2.0, 3.0).is_ok());
    }

    #[test]
    fn reflection_folds_back_into_interval() {
        let d = Domain1D::unit();
        // frozen folding cases: single overshoot on each side, and a multi-fold
        assert!((d.reflect(2.05) - 0.05).abs() < 1e-12);
        assert!((d.reflect(-0.03) - 0.03).abs() < 1e-12);
        assert!((d.reflect(3.3) - 0.7).abs() < 1e-12);
        assert_eq!(d.reflect(0.42), 0.42);
        assert_eq!(d.reflect(0.0), 0.0);
        assert_eq!(d.reflect(1.0), 1.0);
    }

    #[test]
    fn reflection_respects_shifted_domains() {
        let d = Domain1D::new(-1.0, 3.0).unwrap();
        assert!((d.reflect(3.5) - 2.5).abs() < 1e-12);
        assert!((d.reflect(-1.25) - -0.75).abs() < 1e-12);
        for k in -20..20 {
            let x = 0.37 * k as f64;
            let y = d.reflect(x);
            assert!(d.contains(y), "reflect({x}) = {y} escaped");
        }
    }

    #[test]
    fn step_count_requires_commensurate_times() {
        let mut p = ModelParams {
            n_types: 2,
            n_agents: 10,
            sigma: 0.15,
            d_int: 0.002,
            rules: vec![],
            t_end: 5.5,
            dt: 0.01,
        };
        assert_eq!(p.n_steps().unwrap(), 550);
        p.dt = 0.013;
        assert!(p.n_steps().is_err());
        p.dt = 0.01;
        p.t_end = 0.005;
        assert!(p.n_steps().is_err());
    }

    #[test]
    fn params_validation_catches_nonsense() {
        let good = ModelParams {
            n_types: 2,
            n_agents: 10,
            sigma: 0.15,
            d_int: 0.002,
            rules: vec![build_rule(0, 1, 1, 0.1, 2).unwrap()],
            t_end: 1.0,
            dt: 0.01,
        };
        assert!(good.validate().is_ok());
        let mut bad = good.clone();
        bad.sigma = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.d_int = -1.0;
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.n_types = 1; // rule references type 1
        assert!(bad.validate().is_err());
    }
}
