//! Uniform 1-D mesh with piecewise-linear (hat) basis functions.
//!
//! Nodal coefficients represent a function `f(x) = Σ_j β_j φ_j(x)` where
//! `φ_j` is the hat centered on node `j`. Everything downstream (assembly,
//! density projection, observables) goes through this type.

use crate::error::{Error, Result};
use crate::model::Domain1D;

#[derive(Debug, Clone)]
pub struct FemMesh {
    pub domain: Domain1D,
    pub n_cells: usize,
    pub h: f64,
    nodes: Vec<f64>,
}

impl FemMesh {
    pub fn new(domain: Domain1D, n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::Config("mesh needs at least one cell".into()));
        }
        let h = domain.length() / n_cells as f64;
        let nodes = (0..=n_cells)
            .map(|i| {
                if i == n_cells {
                    domain.upper
                } else {
                    domain.lower + i as f64 * h
                }
            })
            .collect();
        Ok(Self { domain, n_cells, h, nodes })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Index of the cell containing `x`, clamped to the valid range so
    /// boundary points (and rounding noise) land in an end cell.
    pub fn cell_of(&self, x: f64) -> usize {
        let raw = ((x - self.domain.lower) / self.h).floor();
        (raw.max(0.0) as usize).min(self.n_cells - 1)
    }

    /// Value of hat function `i` at `x`.
    pub fn hat(&self, i: usize, x: f64) -> f64 {
        debug_assert!(i < self.n_nodes());
        let t = (x - self.nodes[i]).abs() / self.h;
        (1.0 - t).max(0.0)
    }

    /// Integrals `∫ φ_j dx`: h on interior nodes, h/2 at the two ends.
    /// Doubles as the lumped mass matrix diagonal.
    pub fn hat_weights(&self) -> Vec<f64> {
        let mut w = vec![self.h; self.n_nodes()];
        w[0] = 0.5 * self.h;
        w[self.n_cells] = 0.5 * self.h;
        w
    }

    /// Piecewise-linear interpolation of nodal values at `x`.
    pub fn eval(&self, beta: &[f64], x: f64) -> f64 {
        debug_assert_eq!(beta.len(), self.n_nodes());
        let k = self.cell_of(x);
        let t = ((x - self.nodes[k]) / self.h).clamp(0.0, 1.0);
        beta[k] * (1.0 - t) + beta[k + 1] * t
    }

    /// `∫_D Σ β_j φ_j dx`, exact for the piecewise-linear interpolant.
    pub fn integral(&self, beta: &[f64]) -> f64 {
        debug_assert_eq!(beta.len(), self.n_nodes());
        let mut s = 0.5 * (beta[0] + beta[self.n_cells]);
        for b in &beta[1..self.n_cells] {
            s += b;
        }
        s * self.h
    }

    /// Exact integral of the piecewise-linear function over `[lo, hi] ∩ D`.
    pub fn window_integral(&self, beta: &[f64], lo: f64, hi: f64) -> f64 {
        debug_assert_eq!(beta.len(), self.n_nodes());
        let lo = lo.max(self.domain.lower);
        let hi = hi.min(self.domain.upper);
        if hi <= lo {
            return 0.0;
        }
        let k_lo = self.cell_of(lo);
        let k_hi = self.cell_of(hi);
        let mut total = 0.0;
        for k in k_lo..=k_hi {
            let t0 = if k == k_lo { (lo - self.nodes[k]) / self.h } else { 0.0 };
            let t1 = if k == k_hi {
                ((hi - self.nodes[k]) / self.h).min(1.0)
            } else {
                1.0
            };
            if t1 <= t0 {
                continue;
            }
            // ∫ β_k (1-t) + β_{k+1} t over [t0, t1], scaled by h
            let p0 = (t1 - t0) - 0.5 * (t1 * t1 - t0 * t0);
            let p1 = 0.5 * (t1 * t1 - t0 * t0);
            total += self.h * (beta[k] * p0 + beta[k + 1] * p1);
        }
        total
    }

    /// Project the empirical measure of `positions` (unit mass per point)
    /// onto nodal density values via mass lumping. The interpolant then
    /// integrates to exactly the number of points.
    pub fn deposit(&self, positions: &[f64]) -> Vec<f64> {
        let mut counts = vec![0.0; self.n_nodes()];
        for &x in positions {
            let k = self.cell_of(x);
            let t = ((x - self.nodes[k]) / self.h).clamp(0.0, 1.0);
            counts[k] += 1.0 - t;
            counts[k + 1] += t;
        }
        for (c, w) in counts.iter_mut().zip(self.hat_weights()) {
            *c /= w;
        }
        counts
    }
}

/// Three-point Gauss–Legendre rule on the reference cell `[0, 1]`,
/// exact for polynomials up to degree five. `left`/`right` cache the two
/// hat functions restricted to a cell.
#[derive(Debug, Clone)]
pub struct CellQuadrature {
    pub t: [f64; 3],
    pub w: [f64; 3],
    pub left: [f64; 3],
    pub right: [f64; 3],
}

impl CellQuadrature {
    pub fn new() -> Self {
        let s = (0.6f64).sqrt();
        let t = [0.5 * (1.0 - s), 0.5, 0.5 * (1.0 + s)];
        let w = [5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0];
        Self {
            t,
            w,
            left: [1.0 - t[0], 1.0 - t[1], 1.0 - t[2]],
            right: t,
        }
    }

    /// `∫_D f dx` over the whole mesh.
    pub fn integrate(&self, mesh: &FemMesh, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut total = 0.0;
        for k in 0..mesh.n_cells {
            let x0 = mesh.nodes()[k];
            let mut cell = 0.0;
            for q in 0..3 {
                cell += self.w[q] * f(x0 + self.t[q] * mesh.h);
            }
            total += cell * mesh.h;
        }
        total
    }
}

impl Default for CellQuadrature {
    fn default() -> Self {
        Self::new()
    }
}
