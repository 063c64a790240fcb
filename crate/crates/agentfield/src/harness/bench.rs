//! Per-step wall-time benchmark of both simulators across agent counts.

use std::time::Instant;

use crate::abm::AbmSim;
use crate::error::Result;
use crate::harness::ModelKind;
use crate::model::{BenchSettings, Scenario};
use crate::spde::SpdeSim;

#[derive(Debug, Clone, Copy)]
pub struct BenchRow {
    pub model: ModelKind,
    pub n_agents: usize,
    pub seconds_per_step: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median wall time of one step after a warmup, timing each step alone.
fn time_steps(mut step: impl FnMut() -> Result<()>, warmup: usize, timed: usize) -> Result<f64> {
    for _ in 0..warmup {
        step()?;
    }
    let mut samples = Vec::with_capacity(timed);
    for _ in 0..timed {
        let t0 = Instant::now();
        step()?;
        samples.push(t0.elapsed().as_secs_f64());
    }
    Ok(median(samples))
}

/// Median per-step times for both models at every requested agent count.
/// The scenario horizon is irrelevant; stepping is driven directly.
pub fn cost_benchmark(base: &Scenario, settings: &BenchSettings) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in &settings.n_agents {
        let scenario = base.with_n_agents(n);
        scenario.validate()?;

        let mut abm = AbmSim::new(&scenario, 0)?;
        let abm_time = time_steps(|| abm.step(), settings.warmup_steps, settings.timed_steps)?;
        rows.push(BenchRow { model: ModelKind::Abm, n_agents: n, seconds_per_step: abm_time });

        let mut spde = SpdeSim::new(&scenario, 0)?;
        let spde_time = time_steps(|| spde.step(), settings.warmup_steps, settings.timed_steps)?;
        rows.push(BenchRow { model: ModelKind::Spde, n_agents: n, seconds_per_step: spde_time });
    }
    Ok(rows)
}
