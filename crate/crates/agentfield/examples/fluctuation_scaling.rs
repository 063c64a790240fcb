//! Fluctuation amplitude of the field model against the population size.
//!
//! The noise terms carry square roots of the densities, so the ensemble
//! standard deviation of the density *per agent* shrinks like 1/sqrt(N):
//! quadrupling the population halves the relative fluctuations. The study
//! measures the spatially averaged ensemble std of the normalized total
//! density at a fixed early time and reports the small-over-large ratio,
//! whose theoretical value here is sqrt(1000/250) = 2.
//!
//!     cargo run --release --example fluctuation_scaling

use agentfield::harness::noise_scaling;
use agentfield::model::ConfigFile;
use agentfield::Result;

const PRESET: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../presets/innovation.toml");
const REALIZATIONS: usize = 48;

fn main() -> Result<()> {
    let cfg = ConfigFile::load(PRESET)?;
    let scenario = cfg.scenario()?;
    let outcome = noise_scaling(&scenario, 250, 1000, cfg.sweep.t_measure, REALIZATIONS, 1)?;

    println!(
        "spatially averaged ensemble std of the per-agent density at t = {} ({} realizations)\n",
        outcome.t_measure, REALIZATIONS
    );
    for (n, std) in &outcome.avg_std {
        println!("  N = {n:>5}: {std:.6}");
    }
    println!("\nratio (small over large): {:.3}   target sqrt(4) = 2", outcome.ratio);
    Ok(())
}
