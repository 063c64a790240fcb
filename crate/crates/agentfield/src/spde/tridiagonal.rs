//! Minimal tridiagonal matrix type and Thomas-algorithm solver.

use crate::error::{Error, Result};

/// Tridiagonal matrix of dimension `dim`: `lower` and `upper` hold the
/// off-diagonals (length `dim - 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub dim: usize,
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            dim,
            lower: vec![0.0; dim - 1],
            diag: vec![0.0; dim],
            upper: vec![0.0; dim - 1],
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for i in 0..self.dim {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < self.dim {
                v += self.upper[i] * x[i + 1];
            }
            y[i] = v;
        }
    }

    /// `self + factor * other`, entrywise.
    pub fn add_scaled(&self, other: &Tridiagonal, factor: f64) -> Tridiagonal {
        assert_eq!(self.dim, other.dim);
        let comb = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(&x, &y)| x + factor * y).collect()
        };
        Tridiagonal {
            dim: self.dim,
            lower: comb(&self.lower, &other.lower),
            diag: comb(&self.diag, &other.diag),
            upper: comb(&self.upper, &other.upper),
        }
    }

    /// Sum over each column j: `Σ_i M_ij` (what a left-multiplication by the
    /// all-ones row produces). Zero column sums mean mass conservation.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = self.diag.clone();
        for j in 1..self.dim {
            sums[j] += self.upper[j - 1];
        }
        for j in 0..self.dim - 1 {
            sums[j] += self.lower[j];
        }
        sums
    }
}

/// LU factorization of a tridiagonal matrix (Thomas algorithm, no pivoting;
/// fine for the diagonally dominant systems assembled here).
#[derive(Debug, Clone)]
pub struct TridiagonalSolver {
    dim: usize,
    mult: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl TridiagonalSolver {
    pub fn new(m: &Tridiagonal) -> Result<Self> {
        let mut diag = m.diag.clone();
        let mut mult = vec![0.0; m.dim.saturating_sub(1)];
        for i in 1..m.dim {
            let pivot = diag[i - 1];
            if pivot.abs() < 1e-300 || !pivot.is_finite() {
                return Err(Error::Numerical(format!(
                    "tridiagonal factorization hit pivot {pivot} at row {}",
                    i - 1
                )));
            }
            let w = m.lower[i - 1] / pivot;
            mult[i - 1] = w;
            diag[i] -= w * m.upper[i - 1];
        }
        if diag[m.dim - 1].abs() < 1e-300 || !diag[m.dim - 1].is_finite() {
            return Err(Error::Numerical("tridiagonal system is singular".into()));
        }
        Ok(Self { dim: m.dim, mult, diag, upper: m.upper.clone() })
    }

    /// Solve in place: `rhs` enters as b and leaves as x.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        debug_assert_eq!(rhs.len(), self.dim);
        for i in 1..self.dim {
            rhs[i] -= self.mult[i - 1] * rhs[i - 1];
        }
        rhs[self.dim - 1] /= self.diag[self.dim - 1];
        for i in (0..self.dim - 1).rev() {
            rhs[i] = (rhs[i] - self.upper[i] * rhs[i + 1]) / self.diag[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense Gaussian elimination with partial pivoting as an independent
    /// reference.
    fn dense_solve(a: &Tridiagonal, b: &[f64]) -> Vec<f64> {
        let n = a.dim;
        let mut m = vec![vec![0.0; n + 1]; n];
        for i in 0..n {
            m[i][i] = a.diag[i];
            if i > 0 {
                m[i][i - 1] = a.lower[i - 1];
            }
            if i + 1 < n {
                m[i][i + 1] = a.upper[i];
            }
            m[i][n] = b[i];
        }
        for col in 0..n {
            let piv = (col..n).max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs())).unwrap();
            m.swap(col, piv);
            for row in col + 1..n {
                let f = m[row][col] / m[col][col];
                for k in col..=n {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = m[i][n];
            for k in i + 1..n {
                v -= m[i][k] * x[k];
            }
            x[i] = v / m[i][i];
        }
        x
    }

    fn random_dominant(dim: usize, rng: &mut ChaCha8Rng) -> Tridiagonal {
        let mut t = Tridiagonal::zeros(dim);
        for v in t.lower.iter_mut().chain(t.upper.iter_mut()) {
            *v = rng.random::<f64>() - 0.5;
        }
        for i in 0..dim {
            t.diag[i] = 2.5 + rng.random::<f64>();
        }
        t
    }

    #[test]
    fn solver_matches_dense_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for dim in [1usize, 2, 3, 7, 129] {
            let t = random_dominant(dim, &mut rng);
            let b: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let mut x = b.clone();
            TridiagonalSolver::new(&t).unwrap().solve_in_place(&mut x);
            let reference = dense_solve(&t, &b);
            for (xi, ri) in x.iter().zip(&reference) {
                assert!((xi - ri).abs() < 1e-10, "{xi} vs {ri}");
            }
            // residual check
            let mut ax = vec![0.0; dim];
            t.matvec(&x, &mut ax);
            for (a, bb) in ax.iter().zip(&b) {
                assert!((a - bb).abs() < 1e-12, "residual {}", (a - bb).abs());
            }
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut t = Tridiagonal::zeros(3);
        t.diag = vec![1.0, 0.0, 1.0];
        t.lower = vec![0.0, 0.0];
        t.upper = vec![0.0, 0.0];
        assert!(TridiagonalSolver::new(&t).is_err());
    }

    #[test]
    fn column_sums_and_matvec() {
        let mut t = Tridiagonal::zeros(3);
        t.diag = vec![1.0, 2.0, 3.0];
        t.lower = vec![4.0, 5.0];
        t.upper = vec![6.0, 7.0];
        // matrix rows: [1 6 0; 4 2 7; 0 5 3]
        assert_eq!(t.column_sums(), vec![5.0, 13.0, 10.0]);
        let mut y = vec![0.0; 3];
        t.matvec(&[1.0, 1.0, 1.0], &mut y);
        assert_eq!(y, vec![7.0, 13.0, 8.0]);
        let s = t.add_scaled(&t, 1.0);
        assert_eq!(s.diag, vec![2.0, 4.0, 6.0]);
    }
}
