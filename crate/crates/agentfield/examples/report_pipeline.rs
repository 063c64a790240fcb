//! File-based reporting: stamped CSV tables and SVG figures.
//!
//! Every output file starts with a header line naming the config hash and
//! master seed, so any artifact can be traced back to the exact inputs that
//! produced it. The renderer picks up whichever report tables exist in a
//! directory and draws the matching figures; here a small ensemble produces
//! an adoption-fraction series for both models and the resulting curve plot.
//!
//!     cargo run --release --example report_pipeline

use agentfield::abm::simulate_abm;
use agentfield::harness::{fmt_f64, render_reports, run_ensemble, ReportWriter};
use agentfield::model::ConfigFile;
use agentfield::spde::{simulate_spde, FemMesh};
use agentfield::Result;

const PRESET: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../presets/innovation.toml");
const OUT_DIR: &str = "out/report_pipeline";
const REALIZATIONS: usize = 8;

fn main() -> Result<()> {
    let cfg = ConfigFile::load(PRESET)?;
    let scenario = cfg.scenario()?.with_t_end(5.0);
    let adopter = cfg.ensemble.observed_type;
    let stride = cfg.ensemble.snapshot_stride;
    let n_steps = scenario.params.n_steps()?;

    // ensemble-mean adoption fraction over time, one series per model
    let abm_series = run_ensemble(REALIZATIONS, 1, |i| {
        let mut series = Vec::with_capacity(n_steps / stride + 1);
        simulate_abm(&scenario, i, |step, t, state| {
            if step % stride == 0 {
                series.push((t, state.fraction_of(adopter)));
            }
            true
        })?;
        Ok(series)
    })?;
    let mesh = FemMesh::new(scenario.domain, scenario.grid.cells)?;
    let spde_series = run_ensemble(REALIZATIONS, 1, |i| {
        let mut series = Vec::with_capacity(n_steps / stride + 1);
        simulate_spde(&scenario, i, |step, t, state| {
            if step % stride == 0 {
                series.push((t, state.fraction_of(&mesh, adopter)));
            }
            true
        })?;
        Ok(series)
    })?;

    let average = |ensemble: &[Vec<(f64, f64)>]| -> Vec<(f64, f64)> {
        let n = ensemble.len() as f64;
        (0..ensemble[0].len())
            .map(|k| {
                let t = ensemble[0][k].0;
                let mean = ensemble.iter().map(|series| series[k].1).sum::<f64>() / n;
                (t, mean)
            })
            .collect()
    };

    let writer = ReportWriter::new(OUT_DIR, cfg.stamp())?;
    let mut rows = Vec::new();
    for (model, series) in [("abm", average(&abm_series)), ("spde", average(&spde_series))] {
        for (t, fraction) in series {
            rows.push(vec![fmt_f64(t), model.to_string(), fmt_f64(fraction)]);
        }
    }
    let csv = writer.write_csv("adoption_series.csv", &["time", "model", "fraction"], rows)?;
    println!("wrote {}", csv.display());

    for figure in render_reports(OUT_DIR)? {
        println!("wrote {}", figure.display());
    }
    Ok(())
}
