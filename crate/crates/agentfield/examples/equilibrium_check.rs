//! Check both models against the analytic equilibrium of the landscape.
//!
//! With interactions switched off, a single drifted-diffusing population
//! relaxes to the Boltzmann density p(x) ∝ exp(−2 V(x)/σ²). The agent model
//! is compared through a position histogram accumulated over late-time
//! snapshots (L1 distance to the binned reference); the deterministic field
//! model is compared node by node (relative l2 error).
//!
//!     cargo run --release --example equilibrium_check

use agentfield::abm::simulate_abm;
use agentfield::model::ConfigFile;
use agentfield::observables::{
    bin_probabilities, boltzmann_density, l1_distance, relative_l2_error, PositionHistogram,
};
use agentfield::spde::{simulate_spde, FemMesh};
use agentfield::Result;

const PRESET: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../presets/equilibrium.toml");

const N_BINS: usize = 64;
const REALIZATIONS: u64 = 8;
/// Snapshots before this time are discarded as burn-in.
const BURN_IN: f64 = 30.0;
/// Spacing between recorded snapshots, in time units.
const RECORD_EVERY: f64 = 0.5;

fn main() -> Result<()> {
    let cfg = ConfigFile::load(PRESET)?;
    let scenario = cfg.scenario()?;
    let sigma = scenario.params.sigma;

    // agent model: histogram over late-time snapshots of a few realizations
    let stride = (RECORD_EVERY / scenario.params.dt).round() as usize;
    let mut hist = PositionHistogram::new(scenario.domain, N_BINS);
    for realization in 0..REALIZATIONS {
        simulate_abm(&scenario, realization, |step, t, state| {
            if t >= BURN_IN && step % stride == 0 {
                hist.record(&state.positions);
            }
            true
        })?;
    }
    let shape = |x: f64| (-2.0 / (sigma * sigma) * scenario.landscape.potential(x)).exp();
    let reference_bins = bin_probabilities(shape, scenario.domain, N_BINS);
    let l1 = l1_distance(&hist.probabilities(), &reference_bins);
    println!(
        "agent model: {} positions over {} realizations, window t in [{BURN_IN}, {}]",
        hist.total(),
        REALIZATIONS,
        scenario.params.t_end,
    );
    println!("  L1 distance to the equilibrium histogram: {l1:.4}");

    // field model: deterministic relaxation to the nodal Boltzmann profile
    let deterministic = scenario.with_deterministic(true);
    let mesh = FemMesh::new(deterministic.domain, deterministic.grid.cells)?;
    let state = simulate_spde(&deterministic, 0, |_, _, _| true)?;
    let mut reference = boltzmann_density(&deterministic.landscape, sigma, &mesh);
    let mass = deterministic.params.n_agents as f64;
    for v in &mut reference {
        *v *= mass;
    }
    let rel_l2 = relative_l2_error(&state.fields[0], &reference)?;
    println!("field model (deterministic, {} cells):", deterministic.grid.cells);
    println!("  relative l2 error at t = {}: {rel_l2:.5}", deterministic.params.t_end);
    Ok(())
}
