//! Static environment potential with analytic derivatives.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::Domain1D;

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A potential `V` together with its analytic gradient and, when available,
/// its second derivative (needed only by the divergence-form drift assembly).
///
/// Agents drift down the gradient; low potential marks favourable ground.
#[derive(Clone)]
pub struct SuitabilityLandscape {
    potential: EvalFn,
    gradient: EvalFn,
    second_derivative: Option<EvalFn>,
}

impl std::fmt::Debug for SuitabilityLandscape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SuitabilityLandscape")
            .field("second_derivative", &self.second_derivative.is_some())
            .finish_non_exhaustive()
    }
}

impl SuitabilityLandscape {
    pub fn from_fns(
        potential: impl Fn(f64) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second_derivative: Option<EvalFn>,
    ) -> Self {
        Self {
            potential: Arc::new(potential),
            gradient: Arc::new(gradient),
            second_derivative,
        }
    }

    /// `V = 0` everywhere; positions perform plain reflected Brownian motion.
    pub fn flat() -> Self {
        Self::from_fns(|_| 0.0, |_| 0.0, Some(Arc::new(|_| 0.0)))
    }

    /// `V(x) = scale * (stiffness * (x - center)^2 - depth)^2`.
    ///
    /// For positive parameters this is a double well with minima at
    /// `center ± sqrt(depth / stiffness)`.
    pub fn double_well(scale: f64, stiffness: f64, depth: f64, center: f64) -> Self {
        let value = move |x: f64| {
            let q = stiffness * (x - center).powi(2) - depth;
            scale * q * q
        };
        let grad = move |x: f64| {
            4.0 * scale * stiffness * (x - center) * (stiffness * (x - center).powi(2) - depth)
        };
        let second = move |x: f64| {
            4.0 * scale * stiffness * (3.0 * stiffness * (x - center).powi(2) - depth)
        };
        Self::from_fns(value, grad, Some(Arc::new(second)))
    }

    /// `V(x) = sum_k coeffs[k] x^k`.
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        fn horner(c: &[f64], x: f64) -> f64 {
            c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
        }
        fn derive(c: &[f64]) -> Vec<f64> {
            c.iter()
                .enumerate()
                .skip(1)
                .map(|(k, &ck)| k as f64 * ck)
                .collect()
        }
        let d1 = derive(&coeffs);
        let d2 = derive(&d1);
        let c0 = coeffs;
        let c1 = d1;
        let c2 = d2;
        Self::from_fns(
            move |x| horner(&c0, x),
            move |x| horner(&c1, x),
            Some(Arc::new(move |x| horner(&c2, x))),
        )
    }

    pub fn potential(&self, x: f64) -> f64 {
        (self.potential)(x)
    }

    pub fn gradient(&self, x: f64) -> f64 {
        (self.gradient)(x)
    }

    pub fn second_derivative(&self, x: f64) -> Option<f64> {
        self.second_derivative.as_ref().map(|f| f(x))
    }

    pub fn has_second_derivative(&self) -> bool {
        self.second_derivative.is_some()
    }

    /// Cross-check the stored gradient against centered finite differences of
    /// the potential at interior sample points. Tolerance is relative for
    /// large gradients and absolute (`tol`) near zeros of the gradient.
    pub fn check_gradient(&self, domain: &Domain1D, samples: usize, tol: f64) -> Result<()> {
        let l = domain.length();
        let h = 1e-5 * l;
        for i in 0..samples {
            let x = domain.lower + (i as f64 + 0.5) / samples as f64 * l;
            let fd = (self.potential(x + h) - self.potential(x - h)) / (2.0 * h);
            let g = self.gradient(x);
            if (fd - g).abs() > tol * g.abs().max(1.0) {
                return Err(Error::Config(format!(
                    "landscape gradient inconsistent with potential at x={x}: \
                     finite difference {fd}, gradient {g}"
                )));
            }
        }
        Ok(())
    }
}

/// Evaluate the drift field `∇V` at a position, rejecting points outside the
/// domain.
pub fn eval_gradient(
    landscape: &SuitabilityLandscape,
    domain: &Domain1D,
    x: f64,
) -> Result<f64> {
    if !domain.contains(x) {
        return Err(Error::OutsideDomain { x, lower: domain.lower, upper: domain.upper });
    }
    Ok(landscape.gradient(x))
}
