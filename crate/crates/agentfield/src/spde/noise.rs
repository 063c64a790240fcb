//! Truncated spectral basis for the space-time noise.
//!
//! Mode `m` (0-based) is `χ_m(x) = sqrt(2/L) sin(π (m+1) (x - lo) / L)`,
//! an L²-orthonormal family on the domain that vanishes at the walls.

use crate::model::Domain1D;

#[derive(Debug, Clone)]
pub struct NoiseBasis {
    pub domain: Domain1D,
    pub n_modes: usize,
    scale: f64,
    freq: f64,
}

impl NoiseBasis {
    pub fn new(domain: Domain1D, n_modes: usize) -> Self {
        let length = domain.length();
        Self {
            domain,
            n_modes,
            scale: (2.0 / length).sqrt(),
            freq: std::f64::consts::PI / length,
        }
    }

    pub fn eval(&self, mode: usize, x: f64) -> f64 {
        debug_assert!(mode < self.n_modes);
        let k = (mode + 1) as f64;
        self.scale * (self.freq * k * (x - self.domain.lower)).sin()
    }

    /// Precompute all mode values at fixed points (row per point). The hot
    /// loop then reduces to dot products instead of sin calls.
    pub fn table(&self, points: &[f64]) -> ChiTable {
        let mut values = Vec::with_capacity(points.len() * self.n_modes);
        for &x in points {
            for m in 0..self.n_modes {
                values.push(self.eval(m, x));
            }
        }
        ChiTable { n_modes: self.n_modes, values }
    }
}

/// Mode values tabulated at a fixed set of points, row-major.
#[derive(Debug, Clone)]
pub struct ChiTable {
    pub n_modes: usize,
    values: Vec<f64>,
}

impl ChiTable {
    pub fn n_points(&self) -> usize {
        self.values.len() / self.n_modes
    }

    /// `out[p] = Σ_m table[p][m] coeffs[m]` (the noise field collapsed onto
    /// the tabulated points).
    pub fn collapse_into(&self, coeffs: &[f64], out: &mut [f64]) {
        debug_assert_eq!(coeffs.len(), self.n_modes);
        debug_assert_eq!(out.len(), self.n_points());
        for (o, row) in out.iter_mut().zip(self.values.chunks_exact(self.n_modes)) {
            let mut acc = 0.0;
            for (v, c) in row.iter().zip(coeffs) {
                acc += v * c;
            }
            *o = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spde::mesh::{CellQuadrature, FemMesh};

    #[test]
    fn orthonormal_on_unit_domain() {
        let domain = Domain1D::new(0.0, 1.0).unwrap();
        let basis = NoiseBasis::new(domain, 8);
        let mesh = FemMesh::new(domain, 512).unwrap();
        let quad = CellQuadrature::new();
        let ip = |a: usize, b: usize| quad.integrate(&mesh, |x| basis.eval(a, x) * basis.eval(b, x));
        assert!((ip(2, 2) - 1.0).abs() < 1e-10);
        assert!(ip(2, 4).abs() < 1e-10);
        assert!((ip(7, 7) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn frozen_values_and_wall_zeros() {
        let domain = Domain1D::new(0.0, 1.0).unwrap();
        let basis = NoiseBasis::new(domain, 4);
        // first mode peaks at the midpoint with value sqrt(2)
        assert!((basis.eval(0, 0.5) - 2.0f64.sqrt()).abs() < 1e-15);
        assert!(basis.eval(2, 0.0).abs() < 1e-15);
        assert!(basis.eval(2, 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_on_shifted_domain() {
        let domain = Domain1D::new(-2.0, 3.0).unwrap();
        let basis = NoiseBasis::new(domain, 6);
        let mesh = FemMesh::new(domain, 600).unwrap();
        let quad = CellQuadrature::new();
        let same = quad.integrate(&mesh, |x| basis.eval(5, x) * basis.eval(5, x));
        let cross = quad.integrate(&mesh, |x| basis.eval(0, x) * basis.eval(5, x));
        assert!((same - 1.0).abs() < 1e-9, "{same}");
        assert!(cross.abs() < 1e-9);
    }

    #[test]
    fn table_collapse_matches_direct_sum() {
        let domain = Domain1D::new(0.0, 1.0).unwrap();
        let basis = NoiseBasis::new(domain, 5);
        let points = [0.13, 0.5, 0.92];
        let coeffs = [0.4, -1.2, 0.0, 2.5, 0.7];
        let table = basis.table(&points);
        let mut out = [0.0; 3];
        table.collapse_into(&coeffs, &mut out);
        for (p, &x) in points.iter().enumerate() {
            let direct: f64 = (0..5).map(|m| basis.eval(m, x) * coeffs[m]).sum();
            assert!((out[p] - direct).abs() < 1e-15);
        }
    }
}
