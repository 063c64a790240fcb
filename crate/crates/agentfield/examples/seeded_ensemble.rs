//! Reproducible ensembles: every realization derives its randomness from
//! (master seed, realization index, purpose), never from thread identity or
//! scheduling, so results are bitwise identical for any worker count and
//! any realization can be replayed alone.
//!
//!     cargo run --release --example seeded_ensemble

use agentfield::harness::run_ensemble;
use agentfield::model::ConfigFile;
use agentfield::observables::ensemble_mean_std;
use agentfield::spde::{simulate_spde, FemMesh};
use agentfield::Result;

const PRESET: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../presets/innovation.toml");
const REALIZATIONS: usize = 16;

fn main() -> Result<()> {
    let cfg = ConfigFile::load(PRESET)?;
    let scenario = cfg.scenario()?.with_t_end(1.5);
    let adopter = cfg.ensemble.observed_type;
    let mesh = FemMesh::new(scenario.domain, scenario.grid.cells)?;

    let job = |i: u64| {
        let state = simulate_spde(&scenario, i, |_, _, _| true)?;
        Ok(state.fields[adopter].clone())
    };
    let serial = run_ensemble(REALIZATIONS, 1, job)?;
    let parallel = run_ensemble(REALIZATIONS, 4, job)?;
    assert_eq!(serial, parallel, "worker count must not change any bit of the results");

    let stats = ensemble_mean_std(&serial)?;
    let peak = stats
        .mean
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty field");
    println!("{REALIZATIONS} field-model realizations, serial and 4-worker runs identical");
    println!(
        "adopter density at t = 1.5: mean peaks at x = {:.3} ({:.1} agents per unit length)",
        mesh.nodes()[peak.0],
        peak.1
    );
    println!("spatially averaged ensemble std: {:.3}", stats.mean_std());

    // replay a single realization out of the ensemble
    let replay = job(7)?;
    assert_eq!(replay, serial[7], "replaying one realization reproduces it exactly");
    println!("realization 7 replayed alone matches the ensemble entry");
    Ok(())
}
