//! Discretization consistency sweep and the noise-scaling study.

use crate::error::{Error, Result};
use crate::harness::ensemble::run_ensemble;
use crate::model::{Scenario, SweepSettings};
use crate::observables::{ensemble_mean_std, relative_l2_error, StatsAccumulator};
use crate::spde::{simulate_spde, FemMesh};

#[derive(Debug, Clone)]
pub struct SweepRow {
    /// Which parameter this level varies: "dt", "cells" or "modes".
    pub axis: &'static str,
    pub level: String,
    pub nodes: Vec<f64>,
    /// Ensemble mean of the total density at the measurement time.
    pub mean: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepDiff {
    pub axis: &'static str,
    pub coarse: String,
    pub fine: String,
    /// Relative l2 difference between successive refinement levels,
    /// evaluated on the coarser level's nodes against the finer level.
    pub rel_l2: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub diffs: Vec<SweepDiff>,
    pub t_measure: f64,
    pub realizations: usize,
}

/// Ensemble mean of the total density at `t_measure` for one scenario.
fn mean_total_density(
    scenario: &Scenario,
    realizations: usize,
    workers: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mesh = FemMesh::new(scenario.domain, scenario.grid.cells)?;
    let samples = run_ensemble(realizations, workers, |i| {
        let state = simulate_spde(scenario, i, |_, _, _| true)?;
        let mut total = state.fields[0].clone();
        for field in &state.fields[1..] {
            for (t, v) in total.iter_mut().zip(field) {
                *t += v;
            }
        }
        Ok(total)
    })?;
    let stats = ensemble_mean_std(&samples)?;
    Ok((mesh.nodes().to_vec(), stats.mean))
}

fn diff_between(coarse: &SweepRow, fine: &SweepRow) -> Result<f64> {
    // restrict the finer field to the coarser node set; with nested uniform
    // meshes the values coincide at shared nodes, otherwise this is plain
    // interpolation of the finer solution
    if coarse.nodes.len() == fine.nodes.len() {
        return relative_l2_error(&coarse.mean, &fine.mean);
    }
    let domain = crate::model::Domain1D::new(
        *fine.nodes.first().unwrap(),
        *fine.nodes.last().unwrap(),
    )?;
    let fine_mesh = FemMesh::new(domain, fine.nodes.len() - 1)?;
    let restricted: Vec<f64> = coarse
        .nodes
        .iter()
        .map(|&x| fine_mesh.eval(&fine.mean, x))
        .collect();
    relative_l2_error(&coarse.mean, &restricted)
}

/// Vary dt, mesh resolution and noise truncation one at a time (all other
/// knobs at the base scenario's values), measuring the ensemble-mean total
/// density at `settings.t_measure`, and report relative differences between
/// successive levels of each axis.
pub fn consistency_sweep(
    base: &Scenario,
    settings: &SweepSettings,
    workers: usize,
) -> Result<SweepOutcome> {
    if settings.dt.is_empty() || settings.cells.is_empty() || settings.noise_modes.is_empty() {
        return Err(Error::Input("sweep needs at least one level per axis".into()));
    }
    let measured = base.with_t_end(settings.t_measure);
    let mut rows: Vec<SweepRow> = Vec::new();
    let mut diffs = Vec::new();

    let mut run_axis = |axis: &'static str,
                        scenarios: Vec<(String, Scenario)>|
     -> Result<()> {
        let first = rows.len();
        for (level, scenario) in scenarios {
            scenario.validate()?;
            let (nodes, mean) = mean_total_density(&scenario, settings.realizations, workers)?;
            rows.push(SweepRow { axis, level, nodes, mean });
        }
        for i in first + 1..rows.len() {
            let rel_l2 = diff_between(&rows[i - 1], &rows[i])?;
            diffs.push(SweepDiff {
                axis,
                coarse: rows[i - 1].level.clone(),
                fine: rows[i].level.clone(),
                rel_l2,
            });
        }
        Ok(())
    };

    run_axis(
        "dt",
        settings
            .dt
            .iter()
            .map(|&dt| (format!("{dt}"), measured.with_dt(dt)))
            .collect(),
    )?;
    run_axis(
        "cells",
        settings
            .cells
            .iter()
            .map(|&c| {
                let mut grid = measured.grid;
                grid.cells = c;
                (format!("{c}"), measured.with_grid(grid))
            })
            .collect(),
    )?;
    run_axis(
        "modes",
        settings
            .noise_modes
            .iter()
            .map(|&m| {
                let mut grid = measured.grid;
                grid.noise_modes = m;
                (format!("{m}"), measured.with_grid(grid))
            })
            .collect(),
    )?;

    Ok(SweepOutcome {
        rows,
        diffs,
        t_measure: settings.t_measure,
        realizations: settings.realizations,
    })
}

#[derive(Debug, Clone)]
pub struct NoiseScalingOutcome {
    /// (agent count, spatially averaged ensemble std of the normalized
    /// total density) per studied count.
    pub avg_std: Vec<(usize, f64)>,
    /// avg std at the smaller count over avg std at the larger count.
    pub ratio: f64,
    pub t_measure: f64,
}

/// Fluctuation amplitude of the field model against the agent count: the
/// ensemble std of the density per agent shrinks like 1/sqrt(N), so the
/// ratio between counts N1 < N2 targets sqrt(N2/N1).
pub fn noise_scaling(
    base: &Scenario,
    n_small: usize,
    n_large: usize,
    t_measure: f64,
    realizations: usize,
    workers: usize,
) -> Result<NoiseScalingOutcome> {
    if n_small >= n_large {
        return Err(Error::Input(format!(
            "noise scaling expects n_small < n_large, got {n_small} and {n_large}"
        )));
    }
    let mut avg_std = Vec::new();
    for n in [n_small, n_large] {
        let scenario = base.with_n_agents(n).with_t_end(t_measure);
        scenario.validate()?;
        let norm = 1.0 / n as f64;
        let samples = run_ensemble(realizations, workers, |i| {
            let state = simulate_spde(&scenario, i, |_, _, _| true)?;
            let mut total = vec![0.0; state.fields[0].len()];
            for field in &state.fields {
                for (t, v) in total.iter_mut().zip(field) {
                    *t += v * norm;
                }
            }
            Ok(total)
        })?;
        let mut acc = StatsAccumulator::new(samples[0].len());
        for s in &samples {
            acc.push(s);
        }
        avg_std.push((n, acc.finish()?.mean_std()));
    }
    let ratio = avg_std[0].1 / avg_std[1].1;
    Ok(NoiseScalingOutcome { avg_std, ratio, t_measure })
}
