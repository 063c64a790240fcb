//! Finite-element assembly for the density equations.
//!
//! All operators live on the hat basis of [`FemMesh`]. The evolution matrix
//! is `A = (σ²/2) S + B` with `S` the stiffness matrix and `B` the drift
//! matrix, so that the semi-discrete system reads `C dβ/dt = -A β + loads`.
//!
//! `B` can be assembled two ways. The weak (integrated-by-parts) form
//! `B_ij = <V' φ_j, φ_i'>` encodes the zero-flux wall condition naturally
//! and has exactly zero column sums. The strong form quadratures
//! `-<(V' φ_j)', φ_i>` instead and must re-impose the wall flux through the
//! two corner entries; with that correction both forms agree (exactly so
//! for polynomial potentials, where the cell quadrature is exact).

use crate::error::{Error, Result};
use crate::model::{DriftAssembly, SuitabilityLandscape};
use crate::spde::mesh::{CellQuadrature, FemMesh};
use crate::spde::tridiagonal::Tridiagonal;

/// Mass matrix `C_ij = <φ_j, φ_i>`: tridiagonal with interior diagonal
/// `2h/3`, end diagonal `h/3`, off-diagonals `h/6`.
pub fn assemble_mass(mesh: &FemMesh) -> Tridiagonal {
    let n = mesh.n_nodes();
    let h = mesh.h;
    let mut c = Tridiagonal::zeros(n);
    for k in 0..mesh.n_cells {
        c.diag[k] += h / 3.0;
        c.diag[k + 1] += h / 3.0;
        c.lower[k] += h / 6.0;
        c.upper[k] += h / 6.0;
    }
    c
}

/// Stiffness matrix `S_ij = <φ_j', φ_i'>`: interior diagonal `2/h`, end
/// diagonal `1/h`, off-diagonals `-1/h`.
pub fn assemble_stiffness(mesh: &FemMesh) -> Tridiagonal {
    let n = mesh.n_nodes();
    let h = mesh.h;
    let mut s = Tridiagonal::zeros(n);
    for k in 0..mesh.n_cells {
        s.diag[k] += 1.0 / h;
        s.diag[k + 1] += 1.0 / h;
        s.lower[k] -= 1.0 / h;
        s.upper[k] -= 1.0 / h;
    }
    s
}

/// Drift matrix `B` in the requested form (see module docs).
pub fn assemble_drift(
    mesh: &FemMesh,
    landscape: &SuitabilityLandscape,
    mode: DriftAssembly,
) -> Result<Tridiagonal> {
    let quad = CellQuadrature::new();
    let n = mesh.n_nodes();
    let h = mesh.h;
    let mut b = Tridiagonal::zeros(n);
    match mode {
        DriftAssembly::IntegratedByParts => {
            for k in 0..mesh.n_cells {
                let x0 = mesh.nodes()[k];
                let mut s_left = 0.0;
                let mut s_right = 0.0;
                for q in 0..3 {
                    let g = quad.w[q] * landscape.gradient(x0 + quad.t[q] * h);
                    s_left += g * quad.left[q];
                    s_right += g * quad.right[q];
                }
                // h * φ' = -1 on the left node, +1 on the right node
                b.diag[k] -= s_left;
                b.upper[k] -= s_right;
                b.lower[k] += s_left;
                b.diag[k + 1] += s_right;
            }
        }
        DriftAssembly::Direct => {
            if !landscape.has_second_derivative() {
                return Err(Error::Config(
                    "direct drift assembly needs the potential's second derivative".into(),
                ));
            }
            for k in 0..mesh.n_cells {
                let x0 = mesh.nodes()[k];
                for q in 0..3 {
                    let x = x0 + quad.t[q] * h;
                    let c2 = quad.w[q] * h * landscape.second_derivative(x).unwrap();
                    let c1 = quad.w[q] * landscape.gradient(x);
                    let (l, r) = (quad.left[q], quad.right[q]);
                    // -<V'' φ_j, φ_i>
                    b.diag[k] -= c2 * l * l;
                    b.upper[k] -= c2 * r * l;
                    b.lower[k] -= c2 * l * r;
                    b.diag[k + 1] -= c2 * r * r;
                    // -<V' φ_j', φ_i>, with h φ_j' = ∓1
                    b.diag[k] += c1 * l;
                    b.upper[k] -= c1 * l;
                    b.lower[k] += c1 * r;
                    b.diag[k + 1] -= c1 * r;
                }
            }
            // re-impose the reflecting walls: the strong form leaves the
            // advective boundary flux behind, the corner entries absorb it
            b.diag[0] -= landscape.gradient(mesh.domain.lower);
            b.diag[n - 1] += landscape.gradient(mesh.domain.upper);
        }
    }
    Ok(b)
}

/// Full evolution matrix `A = (σ²/2) S + B`.
pub fn assemble_evolution(
    mesh: &FemMesh,
    landscape: &SuitabilityLandscape,
    sigma: f64,
    mode: DriftAssembly,
) -> Result<Tridiagonal> {
    let stiffness = assemble_stiffness(mesh);
    let drift = assemble_drift(mesh, landscape, mode)?;
    Ok(drift.add_scaled(&stiffness, 0.5 * sigma * sigma))
}

/// Where an initial density comes from.
pub enum DensitySource<'a> {
    /// Nonnegative shape function, L²-projected onto the hat basis and
    /// rescaled so the result carries `mass`.
    Shape {
        shape: &'a dyn Fn(f64) -> f64,
        mass: f64,
    },
    /// Point positions, one unit of mass each.
    Positions(&'a [f64]),
}

/// Nodal density values for the given source. Negative coefficients (the
/// L² projection can undershoot near steep features) are clipped before the
/// final rescaling, so the returned field is nonnegative with exact mass.
pub fn project_density(mesh: &FemMesh, source: DensitySource<'_>) -> Result<Vec<f64>> {
    let (mut beta, mass) = match source {
        DensitySource::Shape { shape, mass } => {
            let quad = CellQuadrature::new();
            let mut load = vec![0.0; mesh.n_nodes()];
            for k in 0..mesh.n_cells {
                let x0 = mesh.nodes()[k];
                for q in 0..3 {
                    let v = shape(x0 + quad.t[q] * mesh.h);
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(Error::Input(
                            "density shape must be finite and nonnegative on the domain".into(),
                        ));
                    }
                    let v = quad.w[q] * mesh.h * v;
                    load[k] += v * quad.left[q];
                    load[k + 1] += v * quad.right[q];
                }
            }
            let solver = crate::spde::tridiagonal::TridiagonalSolver::new(&assemble_mass(mesh))?;
            solver.solve_in_place(&mut load);
            (load, mass)
        }
        DensitySource::Positions(points) => {
            if points.is_empty() {
                return Ok(vec![0.0; mesh.n_nodes()]);
            }
            for &x in points {
                if !mesh.domain.contains(x) {
                    return Err(Error::OutsideDomain {
                        x,
                        lower: mesh.domain.lower,
                        upper: mesh.domain.upper,
                    });
                }
            }
            (mesh.deposit(points), points.len() as f64)
        }
    };
    for v in &mut beta {
        *v = v.max(0.0);
    }
    let total = mesh.integral(&beta);
    if !(total > 0.0) {
        return Err(Error::Input("projected density integrates to zero".into()));
    }
    let scale = mass / total;
    for v in &mut beta {
        *v *= scale;
    }
    Ok(beta)
}

/// Pairwise interaction intensity at `x`:
/// `a(x) = rate · ρ_subject(x) · ∫_{[x-d, x+d] ∩ D} ρ_catalyst(y) dy`.
pub fn interaction_rate_at(
    mesh: &FemMesh,
    beta_subject: &[f64],
    beta_catalyst: &[f64],
    rate: f64,
    d_int: f64,
    x: f64,
) -> f64 {
    let local = mesh.eval(beta_subject, x);
    let reach = mesh.window_integral(beta_catalyst, x - d_int, x + d_int);
    rate * local * reach
}

/// Evaluate `a` at every quadrature point of the mesh (row-major,
/// three values per cell, matching [`CellQuadrature`] order).
pub fn fill_interaction_rates(
    mesh: &FemMesh,
    quad: &CellQuadrature,
    beta_subject: &[f64],
    beta_catalyst: &[f64],
    rate: f64,
    d_int: f64,
    out: &mut [f64],
) {
    debug_assert_eq!(out.len(), 3 * mesh.n_cells);
    for k in 0..mesh.n_cells {
        let x0 = mesh.nodes()[k];
        for q in 0..3 {
            out[3 * k + q] =
                interaction_rate_at(mesh, beta_subject, beta_catalyst, rate, d_int, x0 + quad.t[q] * mesh.h);
        }
    }
}

/// Add the load vector `<f, φ_i>` of a function tabulated at quadrature
/// points, scaled by `factor`: `out[i] += factor · Σ_cells h Σ_q w_q f_q φ_i`.
pub fn add_load_vector(
    mesh: &FemMesh,
    quad: &CellQuadrature,
    values: &[f64],
    factor: f64,
    out: &mut [f64],
) {
    debug_assert_eq!(values.len(), 3 * mesh.n_cells);
    debug_assert_eq!(out.len(), mesh.n_nodes());
    let h = mesh.h;
    for k in 0..mesh.n_cells {
        let mut acc_l = 0.0;
        let mut acc_r = 0.0;
        for q in 0..3 {
            let v = quad.w[q] * values[3 * k + q];
            acc_l += v * quad.left[q];
            acc_r += v * quad.right[q];
        }
        out[k] += factor * h * acc_l;
        out[k + 1] += factor * h * acc_r;
    }
}

/// Add the conservative-noise contribution
/// `out[i] += -σ ∫ sqrt(ρ(x)) z(x) φ_i'(x) dx`
/// with `ρ` given by nodal values and `z` the collapsed noise field at the
/// quadrature points. Column sums vanish identically, so this term moves
/// mass around without creating any.
pub fn add_conservative_noise(
    mesh: &FemMesh,
    quad: &CellQuadrature,
    beta: &[f64],
    z: &[f64],
    sigma: f64,
    out: &mut [f64],
) {
    debug_assert_eq!(z.len(), 3 * mesh.n_cells);
    debug_assert_eq!(out.len(), mesh.n_nodes());
    for k in 0..mesh.n_cells {
        let (b0, b1) = (beta[k], beta[k + 1]);
        let mut acc = 0.0;
        for q in 0..3 {
            let rho = b0 * quad.left[q] + b1 * quad.right[q];
            debug_assert!(rho >= 0.0, "density went negative before sqrt");
            acc += quad.w[q] * rho.max(0.0).sqrt() * z[3 * k + q];
        }
        // h φ_i' = ∓1 and the leading minus sign flips it back
        out[k] += sigma * acc;
        out[k + 1] -= sigma * acc;
    }
}

/// Add the reaction-noise contribution
/// `out[i] += factor ∫ sqrt(a(x)) z(x) φ_i(x) dx`
/// with `a` and `z` tabulated at the quadrature points.
pub fn add_reaction_noise(
    mesh: &FemMesh,
    quad: &CellQuadrature,
    a: &[f64],
    z: &[f64],
    factor: f64,
    out: &mut [f64],
) {
    debug_assert_eq!(a.len(), 3 * mesh.n_cells);
    debug_assert_eq!(z.len(), 3 * mesh.n_cells);
    debug_assert_eq!(out.len(), mesh.n_nodes());
    let h = mesh.h;
    for k in 0..mesh.n_cells {
        let mut acc_l = 0.0;
        let mut acc_r = 0.0;
        for q in 0..3 {
            let aq = a[3 * k + q];
            debug_assert!(aq >= 0.0, "interaction rate went negative before sqrt");
            let v = quad.w[q] * aq.max(0.0).sqrt() * z[3 * k + q];
            acc_l += v * quad.left[q];
            acc_r += v * quad.right[q];
        }
        out[k] += factor * h * acc_l;
        out[k + 1] += factor * h * acc_r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Domain1D;
    use crate::spde::noise::NoiseBasis;

    fn unit_mesh(n: usize) -> FemMesh {
        FemMesh::new(Domain1D::new(0.0, 1.0).unwrap(), n).unwrap()
    }

    fn quartic() -> SuitabilityLandscape {
        SuitabilityLandscape::double_well(0.01, 3.6, 0.1, 0.5)
    }

    #[test]
    fn mass_matrix_frozen_stencil() {
        // h = 1/4: interior diag 1/6, off-diag 1/24, corners 1/12
        let c = assemble_mass(&unit_mesh(4));
        assert!((c.diag[2] - 1.0 / 6.0).abs() < 1e-16);
        assert!((c.upper[1] - 1.0 / 24.0).abs() < 1e-16);
        assert!((c.lower[3] - 1.0 / 24.0).abs() < 1e-16);
        assert!((c.diag[0] - 1.0 / 12.0).abs() < 1e-16);
        assert!((c.diag[4] - 1.0 / 12.0).abs() < 1e-16);
        // single-cell mesh: both nodes are corners
        let c1 = assemble_mass(&unit_mesh(1));
        assert!((c1.diag[0] - 1.0 / 3.0).abs() < 1e-16);
        assert!((c1.upper[0] - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn stiffness_matrix_frozen_stencil() {
        // h = 1/4: interior diag 8, off-diag -4, corners 4
        let s = assemble_stiffness(&unit_mesh(4));
        assert!((s.diag[1] - 8.0).abs() < 1e-12);
        assert!((s.lower[0] + 4.0).abs() < 1e-12);
        assert!((s.diag[0] - 4.0).abs() < 1e-12);
        assert!(s.column_sums().iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn mass_matrix_matches_quadrature_of_hat_products() {
        // generic high-resolution quadrature of <φ_j, φ_i> as an
        // implementation-independent reference
        for n in [1usize, 4, 128] {
            let mesh = unit_mesh(n);
            let fine = unit_mesh(n * 8);
            let quad = CellQuadrature::new();
            let c = assemble_mass(&mesh);
            for i in 0..mesh.n_nodes() {
                for j in i..(i + 2).min(mesh.n_nodes()) {
                    let reference = quad.integrate(&fine, |x| mesh.hat(i, x) * mesh.hat(j, x));
                    let got = if i == j { c.diag[i] } else { c.upper[i] };
                    assert!((got - reference).abs() < 1e-12, "n={n} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn drift_modes_agree_for_polynomial_potential() {
        // both quadratures are exact for a quartic potential, so after the
        // wall-flux correction the two assemblies must coincide
        let mesh = unit_mesh(32);
        let ibp = assemble_drift(&mesh, &quartic(), DriftAssembly::IntegratedByParts).unwrap();
        let dir = assemble_drift(&mesh, &quartic(), DriftAssembly::Direct).unwrap();
        for (a, b) in ibp.diag.iter().zip(&dir.diag) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        for (a, b) in ibp.lower.iter().zip(&dir.lower) {
            assert!((a - b).abs() < 1e-8);
        }
        for (a, b) in ibp.upper.iter().zip(&dir.upper) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn drift_weak_form_has_zero_column_sums() {
        let mesh = unit_mesh(19);
        let b = assemble_drift(&mesh, &quartic(), DriftAssembly::IntegratedByParts).unwrap();
        assert!(b.column_sums().iter().all(|v| v.abs() < 1e-15));
        let a = assemble_evolution(&mesh, &quartic(), 0.15, DriftAssembly::IntegratedByParts).unwrap();
        assert!(a.column_sums().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn drift_entry_against_hand_quadrature() {
        // B_21 = <V' φ_1, φ_2'> on n = 4 via an independent fine integral
        let mesh = unit_mesh(4);
        let fine = unit_mesh(4096);
        let quad = CellQuadrature::new();
        let land = quartic();
        let reference = quad.integrate(&fine, |x| {
            // φ_2' is +4 on (0.25, 0.5), -4 on (0.5, 0.75), 0 elsewhere
            let slope = if x > 0.25 && x < 0.5 {
                4.0
            } else if x > 0.5 && x < 0.75 {
                -4.0
            } else {
                0.0
            };
            land.gradient(x) * mesh.hat(1, x) * slope
        });
        let b = assemble_drift(&mesh, &land, DriftAssembly::IntegratedByParts).unwrap();
        assert!((b.lower[1] - reference).abs() < 1e-10, "{} vs {reference}", b.lower[1]);
    }

    #[test]
    fn direct_mode_requires_curvature() {
        let mesh = unit_mesh(8);
        let land = SuitabilityLandscape::from_fns(|_| 0.0, |_| 0.0, None);
        assert!(assemble_drift(&mesh, &land, DriftAssembly::Direct).is_err());
        assert!(assemble_drift(&mesh, &land, DriftAssembly::IntegratedByParts).is_ok());
    }

    #[test]
    fn shape_projection_hits_requested_mass() {
        let mesh = unit_mesh(64);
        let shape = |x: f64| (-(x - 0.5f64).powi(2) / 0.08).exp();
        let beta = project_density(&mesh, DensitySource::Shape { shape: &shape, mass: 800.0 }).unwrap();
        assert!((mesh.integral(&beta) - 800.0).abs() < 1e-9);
        assert!(beta.iter().all(|v| *v >= 0.0));
        // flat shape reproduces the uniform density exactly
        let flat = project_density(&mesh, DensitySource::Shape { shape: &|_| 1.0, mass: 3.0 }).unwrap();
        assert!(flat.iter().all(|v| (*v - 3.0).abs() < 1e-12));
    }

    #[test]
    fn position_projection_counts_mass() {
        let mesh = unit_mesh(16);
        let pts = [0.1, 0.2, 0.30001, 0.99];
        let beta = project_density(&mesh, DensitySource::Positions(&pts)).unwrap();
        assert!((mesh.integral(&beta) - 4.0).abs() < 1e-12);
        assert!(project_density(&mesh, DensitySource::Positions(&[1.5])).is_err());
    }

    #[test]
    fn interaction_rate_constant_densities() {
        // rate 0.1, ρ_s ≡ 3, ρ_c ≡ 5, d = 0.002 at an interior point:
        // a = 0.1 * 3 * 5 * 0.004 = 0.006
        let mesh = unit_mesh(128);
        let s = vec![3.0; mesh.n_nodes()];
        let c = vec![5.0; mesh.n_nodes()];
        let a = interaction_rate_at(&mesh, &s, &c, 0.1, 0.002, 0.5);
        assert!((a - 0.006).abs() < 1e-15, "{a}");
        // at the wall the window is clipped to half width
        let a_wall = interaction_rate_at(&mesh, &s, &c, 0.1, 0.002, 0.0);
        assert!((a_wall - 0.003).abs() < 1e-15);
    }

    #[test]
    fn load_vector_of_constant_sums_to_integral() {
        let mesh = unit_mesh(10);
        let quad = CellQuadrature::new();
        let values = vec![2.0; 30];
        let mut out = vec![0.0; 11];
        add_load_vector(&mesh, &quad, &values, 1.5, &mut out);
        // Σ_i <2, φ_i> * 1.5 = 1.5 * 2 * |D| = 3
        let total: f64 = out.iter().sum();
        assert!((total - 3.0).abs() < 1e-12);
        // interior entries are 2 h * 1.5, ends half that
        assert!((out[3] - 3.0 * mesh.h).abs() < 1e-12);
        assert!((out[0] - 1.5 * mesh.h).abs() < 1e-12);
    }

    #[test]
    fn conservative_noise_is_mass_free_to_rounding() {
        let mesh = unit_mesh(64);
        let quad = CellQuadrature::new();
        let basis = NoiseBasis::new(mesh.domain, 16);
        let beta: Vec<f64> = mesh.nodes().iter().map(|x| 1.0 + x * x).collect();
        let mut z = vec![0.0; 3 * mesh.n_cells];
        for k in 0..mesh.n_cells {
            for q in 0..3 {
                let x = mesh.nodes()[k] + quad.t[q] * mesh.h;
                z[3 * k + q] = (0..16).map(|m| basis.eval(m, x) * ((m as f64) - 7.3)).sum();
            }
        }
        let mut out = vec![0.0; mesh.n_nodes()];
        add_conservative_noise(&mesh, &quad, &beta, &z, 0.15, &mut out);
        // each cell pushes +c onto its left node and -c onto its right node,
        // so the total telescopes to zero up to reordering of the node sums
        let total: f64 = out.iter().sum();
        let magnitude: f64 = out.iter().map(|v| v.abs()).sum();
        assert!(total.abs() <= 1e-13 * magnitude.max(1.0), "total {total}");
        assert!(out.iter().any(|v| v.abs() > 1e-6), "noise should not be trivial");
    }

    #[test]
    fn reaction_noise_reduces_to_load_vector_for_unit_field() {
        // with z ≡ 1 and a ≡ 4 the reaction noise is <2, φ_i> * factor
        let mesh = unit_mesh(12);
        let quad = CellQuadrature::new();
        let a = vec![4.0; 36];
        let z = vec![1.0; 36];
        let mut out = vec![0.0; 13];
        add_reaction_noise(&mesh, &quad, &a, &z, -1.0, &mut out);
        let mut reference = vec![0.0; 13];
        add_load_vector(&mesh, &quad, &vec![2.0; 36], -1.0, &mut reference);
        for (a, b) in out.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
