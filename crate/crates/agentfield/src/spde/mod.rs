//! Field model: coupled stochastic PDEs for the per-type density fields.
//!
//! Each type `s` carries a density `ρ_s` evolving under diffusion, drift
//! down the potential gradient, conservative fluctuation noise scaled by
//! `sqrt(ρ_s)`, and reaction terms from the pairwise interaction rules with
//! their own `sqrt(a)` noise. Space is discretized with linear finite
//! elements, noise with a truncated sine basis, time with semi-implicit
//! Euler: the stiff transport part is treated implicitly, reactions and
//! noise explicitly,
//!
//! `(C + Δt A) β⁺ = C β + Δt Σ_r ν^r <a^r, φ> + noise loads`
//!
//! followed by rescaling total mass back to the agent count (finite elements
//! conserve mass only up to the discretization of the loads). Negative parts
//! of the fields are clipped where the density enters a square root or an
//! interaction rate, while the evolving coefficients themselves are left
//! unclipped so the rescaling never transfers mass between types. Per step
//! and type the noise increments are the mode coefficients `ΔB_m ~ N(0, Δt)`;
//! draw order is fixed (types ascending, then rules ascending) so runs are
//! reproducible for a given seed policy.

pub mod assembly;
pub mod em;
pub mod mesh;
pub mod noise;
pub mod tridiagonal;

pub use assembly::{
    add_conservative_noise, add_load_vector, add_reaction_noise, assemble_drift,
    assemble_evolution, assemble_mass, assemble_stiffness, fill_interaction_rates,
    interaction_rate_at, project_density, DensitySource,
};
pub use em::{gbm_strong_order, ou_strong_order, StrongOrder};
pub use mesh::{CellQuadrature, FemMesh};
pub use noise::{ChiTable, NoiseBasis};
pub use tridiagonal::{Tridiagonal, TridiagonalSolver};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{PositionSpec, Scenario, StreamPurpose};

/// Nodal density values, one field per type.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    pub fields: Vec<Vec<f64>>,
}

impl DensityState {
    pub fn n_types(&self) -> usize {
        self.fields.len()
    }

    pub fn mass_of(&self, mesh: &FemMesh, s: usize) -> f64 {
        mesh.integral(&self.fields[s])
    }

    pub fn total_mass(&self, mesh: &FemMesh) -> f64 {
        self.fields.iter().map(|f| mesh.integral(f)).sum()
    }

    /// Share of total mass carried by type `s`.
    pub fn fraction_of(&self, mesh: &FemMesh, s: usize) -> f64 {
        self.mass_of(mesh, s) / self.total_mass(mesh)
    }
}

/// Initial density of one type from its position spec (unnormalized shape;
/// projection rescales to the type's mass).
fn initial_shape(spec: PositionSpec) -> impl Fn(f64) -> f64 {
    move |x| match spec {
        PositionSpec::Normal { mean, std } => (-0.5 * ((x - mean) / std).powi(2)).exp(),
        PositionSpec::Uniform => 1.0,
    }
}

/// Nodal initial densities for every type of a scenario.
pub fn initial_density_state(scenario: &Scenario, mesh: &FemMesh) -> Result<DensityState> {
    let mut fields = Vec::with_capacity(scenario.initial.len());
    for init in &scenario.initial {
        let shape = initial_shape(init.position);
        let beta = project_density(
            mesh,
            DensitySource::Shape { shape: &shape, mass: init.count as f64 },
        )?;
        fields.push(beta);
    }
    Ok(DensityState { fields })
}

/// One realization of the field model.
pub struct SpdeSim {
    scenario: Scenario,
    mesh: FemMesh,
    quad: CellQuadrature,
    mass: Tridiagonal,
    solver: TridiagonalSolver,
    chi: Option<ChiTable>,
    state: DensityState,
    step_idx: usize,
    rng: ChaCha8Rng,
    expected_mass: f64,
    // scratch buffers, allocated once
    gauss: Vec<f64>,
    z_diff: Vec<Vec<f64>>,
    z_reac: Vec<Vec<f64>>,
    a_fields: Vec<Vec<f64>>,
    rule_loads: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    clipped: Vec<Vec<f64>>,
}

impl SpdeSim {
    pub fn new(scenario: &Scenario, realization: u64) -> Result<Self> {
        let mesh = FemMesh::new(scenario.domain, scenario.grid.cells)?;
        let p = &scenario.params;
        let evolution = assemble_evolution(
            &mesh,
            &scenario.landscape,
            p.sigma,
            scenario.grid.drift_assembly,
        )?;
        let mass = assemble_mass(&mesh);
        let system = mass.add_scaled(&evolution, p.dt);
        let solver = TridiagonalSolver::new(&system)?;
        let quad = CellQuadrature::new();
        let state = initial_density_state(scenario, &mesh)?;

        let chi = if scenario.grid.deterministic {
            None
        } else {
            let basis = NoiseBasis::new(scenario.domain, scenario.grid.noise_modes);
            let mut points = Vec::with_capacity(3 * mesh.n_cells);
            for k in 0..mesh.n_cells {
                for q in 0..3 {
                    points.push(mesh.nodes()[k] + quad.t[q] * mesh.h);
                }
            }
            Some(basis.table(&points))
        };

        let n_quad = 3 * mesh.n_cells;
        let n_nodes = mesh.n_nodes();
        let n_rules = p.rules.len();
        Ok(Self {
            rng: scenario.seeds.stream(realization, StreamPurpose::FieldNoise),
            expected_mass: p.n_agents as f64,
            gauss: vec![0.0; scenario.grid.noise_modes],
            z_diff: vec![vec![0.0; n_quad]; p.n_types],
            z_reac: vec![vec![0.0; n_quad]; n_rules],
            a_fields: vec![vec![0.0; n_quad]; n_rules],
            rule_loads: vec![vec![0.0; n_nodes]; n_rules],
            rhs: vec![0.0; n_nodes],
            clipped: vec![vec![0.0; n_nodes]; p.n_types],
            scenario: scenario.clone(),
            mesh,
            quad,
            mass,
            solver,
            chi,
            state,
            step_idx: 0,
        })
    }

    pub fn mesh(&self) -> &FemMesh {
        &self.mesh
    }

    pub fn state(&self) -> &DensityState {
        &self.state
    }

    pub fn step_index(&self) -> usize {
        self.step_idx
    }

    pub fn time(&self) -> f64 {
        self.step_idx as f64 * self.scenario.params.dt
    }

    fn draw_noise_field(&mut self, dt: f64, target: usize, reaction: bool) {
        let chi = self.chi.as_ref().expect("noise fields need a mode table");
        let scale = dt.sqrt();
        for g in &mut self.gauss {
            *g = scale * self.rng.sample::<f64, _>(StandardNormal);
        }
        let out = if reaction {
            &mut self.z_reac[target]
        } else {
            &mut self.z_diff[target]
        };
        chi.collapse_into(&self.gauss, out);
    }

    /// Advance one time step.
    pub fn step(&mut self) -> Result<()> {
        let p = self.scenario.params.clone();
        let dt = p.dt;
        let stochastic = self.chi.is_some();

        // noise increments in fixed order: type fields, then rule fields
        if stochastic {
            for s in 0..p.n_types {
                self.draw_noise_field(dt, s, false);
            }
            for r in 0..p.rules.len() {
                self.draw_noise_field(dt, r, true);
            }
        }

        // Negative-part clipping applies only where densities enter an
        // expression (square roots, interaction rates); the evolving nodal
        // coefficients themselves stay unclipped. Clipping the state instead
        // would add mass preferentially to the noisier field each step and,
        // combined with the shared renormalization below, drive the type
        // masses toward each other — a spurious equalizing flux.
        for (view, field) in self.clipped.iter_mut().zip(&self.state.fields) {
            for (dst, src) in view.iter_mut().zip(field) {
                *dst = src.max(0.0);
            }
        }

        // interaction intensities from the current densities
        for (r, rule) in p.rules.iter().enumerate() {
            fill_interaction_rates(
                &self.mesh,
                &self.quad,
                &self.clipped[rule.subject],
                &self.clipped[rule.catalyst],
                rule.rate,
                p.d_int,
                &mut self.a_fields[r],
            );
            let load = &mut self.rule_loads[r];
            load.iter_mut().for_each(|v| *v = 0.0);
            add_load_vector(&self.mesh, &self.quad, &self.a_fields[r], dt, load);
            if stochastic {
                add_reaction_noise(
                    &self.mesh,
                    &self.quad,
                    &self.a_fields[r],
                    &self.z_reac[r],
                    1.0,
                    load,
                );
            }
        }

        // per-type right-hand side, solve
        for s in 0..p.n_types {
            self.mass.matvec(&self.state.fields[s], &mut self.rhs);
            if stochastic {
                add_conservative_noise(
                    &self.mesh,
                    &self.quad,
                    &self.clipped[s],
                    &self.z_diff[s],
                    p.sigma,
                    &mut self.rhs,
                );
            }
            for (r, rule) in p.rules.iter().enumerate() {
                let nu = rule.nu[s];
                if nu != 0 {
                    let w = f64::from(nu);
                    for (dst, src) in self.rhs.iter_mut().zip(&self.rule_loads[r]) {
                        *dst += w * src;
                    }
                }
            }
            self.solver.solve_in_place(&mut self.rhs);
            self.state.fields[s].copy_from_slice(&self.rhs);
        }

        // pull total mass back to the agent count
        let total = self.state.total_mass(&self.mesh);
        if !(total > f64::MIN_POSITIVE) || !total.is_finite() {
            return Err(Error::Numerical(format!(
                "total mass degenerated to {total} at step {}",
                self.step_idx + 1
            )));
        }
        let factor = self.expected_mass / total;
        for field in &mut self.state.fields {
            for v in field {
                *v *= factor;
            }
        }

        self.step_idx += 1;
        Ok(())
    }
}

/// Run one field-model realization. The observer sees the initial state as
/// step 0 and every step after it; returning `false` stops the run early.
/// Returns the state at the last observed step.
pub fn simulate_spde(
    scenario: &Scenario,
    realization: u64,
    mut observe: impl FnMut(usize, f64, &DensityState) -> bool,
) -> Result<DensityState> {
    let mut sim = SpdeSim::new(scenario, realization)?;
    let n_steps = scenario.params.n_steps()?;
    if observe(0, 0.0, sim.state()) {
        for _ in 1..=n_steps {
            sim.step()?;
            if !observe(sim.step_index(), sim.time(), sim.state()) {
                break;
            }
        }
    }
    Ok(sim.state().clone())
}
