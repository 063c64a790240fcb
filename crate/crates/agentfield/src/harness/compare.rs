//! Model comparison study: first-passage statistics per model and relative
//! ensemble-error measures between the models' density fields.
//!
//! For each agent count the study runs two passes per model. Pass one
//! records the first time the observed type's share reaches the threshold
//! (stopping each realization at its crossing). The comparison time is the
//! mean crossing time of the agent model; pass two reruns every realization
//! (same streams, hence identical trajectories) up to the recorded step
//! nearest that time and accumulates per-type density statistics there.

use crate::abm::simulate_abm;
use crate::error::{Error, Result};
use crate::harness::ensemble::run_ensemble;
use crate::harness::ModelKind;
use crate::model::{CompareCase, Scenario};
use crate::observables::{
    empirical_density, ensemble_mean_std, tau_statistics, EnsembleStats, TauStats,
};
use crate::spde::{simulate_spde, DensityState, FemMesh};

#[derive(Debug, Clone, Copy)]
pub struct CompareSettings {
    pub realizations: usize,
    /// Adopter share that defines first passage.
    pub threshold: f64,
    /// Type whose share is watched.
    pub observed_type: usize,
    pub workers: usize,
}

/// Outcome of one agent-count case.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub n_agents: usize,
    pub tau_abm: TauStats,
    pub tau_spde: TauStats,
    /// Comparison time actually used for the density snapshots.
    pub snapshot_time: f64,
    /// Per-type relative l2 error between the models' ensemble means.
    pub e_mean: Vec<f64>,
    /// Per-type relative l2 error between the models' ensemble stds.
    pub e_std: Vec<f64>,
    /// Nodal ensemble statistics at the snapshot time, one entry per type,
    /// for the per-node report files.
    pub density_abm: Vec<EnsembleStats>,
    pub density_spde: Vec<EnsembleStats>,
    /// Set when the threshold was missed in more than half of the agent
    /// model's realizations; error columns are then left empty.
    pub flagged: bool,
}

/// First-passage times of the observed share for one model over the whole
/// ensemble (`None` where the threshold is never reached before `t_end`).
pub fn adoption_taus(
    scenario: &Scenario,
    model: ModelKind,
    settings: &CompareSettings,
) -> Result<Vec<Option<f64>>> {
    let threshold = settings.threshold;
    let observed = settings.observed_type;
    match model {
        ModelKind::Abm => run_ensemble(settings.realizations, settings.workers, |i| {
            let mut tau = None;
            simulate_abm(scenario, i, |_, t, state| {
                if state.fraction_of(observed) >= threshold {
                    tau = Some(t);
                    return false;
                }
                true
            })?;
            Ok(tau)
        }),
        ModelKind::Spde => run_ensemble(settings.realizations, settings.workers, |i| {
            let mut tau = None;
            let mesh = FemMesh::new(scenario.domain, scenario.grid.cells)?;
            simulate_spde(scenario, i, |_, t, state| {
                if state.fraction_of(&mesh, observed) >= threshold {
                    tau = Some(t);
                    return false;
                }
                true
            })?;
            Ok(tau)
        }),
    }
}

/// Per-type density fields of every realization at one recorded step.
pub fn densities_at_step(
    scenario: &Scenario,
    model: ModelKind,
    step_target: usize,
    realizations: usize,
    workers: usize,
) -> Result<Vec<DensityState>> {
    let n_types = scenario.params.n_types;
    match model {
        ModelKind::Abm => run_ensemble(realizations, workers, |i| {
            let mesh = FemMesh::new(scenario.domain, scenario.grid.cells)?;
            let mut snapshot = None;
            simulate_abm(scenario, i, |step, _, state| {
                if step == step_target {
                    snapshot = Some(state.clone());
                    return false;
                }
                true
            })?;
            let state = snapshot
                .ok_or_else(|| Error::Input(format!("run ended before step {step_target}")))?;
            empirical_density(&state, n_types, &mesh)
        }),
        ModelKind::Spde => run_ensemble(realizations, workers, |i| {
            let mut snapshot = None;
            simulate_spde(scenario, i, |step, _, state| {
                if step == step_target {
                    snapshot = Some(state.clone());
                    return false;
                }
                true
            })?;
            snapshot.ok_or_else(|| Error::Input(format!("run ended before step {step_target}")))
        }),
    }
}

/// Run the full comparison for one case.
pub fn compare_case(scenario: &Scenario, settings: &CompareSettings) -> Result<CompareRow> {
    let n_agents = scenario.params.n_agents;
    let tau_abm = tau_statistics(&adoption_taus(scenario, ModelKind::Abm, settings)?);
    let tau_spde = tau_statistics(&adoption_taus(scenario, ModelKind::Spde, settings)?);

    // censoring rule: with the threshold missed in over half of the agent
    // runs the comparison time is not meaningful
    if 2 * tau_abm.n_reached <= tau_abm.n_total {
        return Ok(CompareRow {
            n_agents,
            tau_abm,
            tau_spde,
            snapshot_time: f64::NAN,
            e_mean: Vec::new(),
            e_std: Vec::new(),
            density_abm: Vec::new(),
            density_spde: Vec::new(),
            flagged: true,
        });
    }

    let dt = scenario.params.dt;
    let n_steps = scenario.params.n_steps()?;
    let step_target = ((tau_abm.mean / dt).round() as usize).min(n_steps);
    let snapshot_time = step_target as f64 * dt;

    let n_types = scenario.params.n_types;
    let mut e_mean = Vec::with_capacity(n_types);
    let mut e_std = Vec::with_capacity(n_types);
    let mut density_abm = Vec::with_capacity(n_types);
    let mut density_spde = Vec::with_capacity(n_types);
    let abm_fields = densities_at_step(
        scenario,
        ModelKind::Abm,
        step_target,
        settings.realizations,
        settings.workers,
    )?;
    let spde_fields = densities_at_step(
        scenario,
        ModelKind::Spde,
        step_target,
        settings.realizations,
        settings.workers,
    )?;
    for s in 0..n_types {
        let collect = |states: &[DensityState]| -> Vec<Vec<f64>> {
            states.iter().map(|d| d.fields[s].clone()).collect()
        };
        let abm_stats = ensemble_mean_std(&collect(&abm_fields))?;
        let spde_stats = ensemble_mean_std(&collect(&spde_fields))?;
        e_mean.push(crate::observables::relative_l2_error(&spde_stats.mean, &abm_stats.mean)?);
        e_std.push(crate::observables::relative_l2_error(&spde_stats.std, &abm_stats.std)?);
        density_abm.push(abm_stats);
        density_spde.push(spde_stats);
    }

    Ok(CompareRow {
        n_agents,
        tau_abm,
        tau_spde,
        snapshot_time,
        e_mean,
        e_std,
        density_abm,
        density_spde,
        flagged: false,
    })
}

/// Comparison over a list of agent counts; each case rescales the base
/// scenario's per-type counts proportionally and adopts the case horizon.
pub fn compare_models(
    base: &Scenario,
    cases: &[CompareCase],
    settings: &CompareSettings,
) -> Result<Vec<CompareRow>> {
    if settings.observed_type >= base.params.n_types {
        return Err(Error::Input(format!(
            "observed type {} out of range",
            settings.observed_type
        )));
    }
    cases
        .iter()
        .map(|case| {
            let scenario = base.with_n_agents(case.n_agents).with_t_end(case.t_end);
            scenario.validate()?;
            compare_case(&scenario, settings)
        })
        .collect()
}
