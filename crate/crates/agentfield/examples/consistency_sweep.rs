//! Discretization-consistency sweep for the field model.
//!
//! Refines the time step, the mesh and the noise truncation one at a time
//! and reports how much the ensemble-mean total density at the measurement
//! time moves between successive levels. Small relative differences mean the
//! base discretization already resolves the statistics it is used for.
//!
//!     cargo run --release --example consistency_sweep

use agentfield::harness::consistency_sweep;
use agentfield::model::{ConfigFile, SweepSettings};
use agentfield::Result;

const PRESET: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../presets/innovation.toml");

fn main() -> Result<()> {
    let cfg = ConfigFile::load(PRESET)?;
    let scenario = cfg.scenario()?;
    // desk-scale: the preset's levels with a reduced realization count
    let settings = SweepSettings { realizations: 32, ..cfg.sweep.clone() };

    let outcome = consistency_sweep(&scenario, &settings, 1)?;
    println!(
        "ensemble-mean total density at t = {} over {} realizations\n",
        outcome.t_measure, outcome.realizations
    );
    println!("{:>6} {:>12} {:>12} {:>12}", "axis", "coarse", "fine", "rel l2 diff");
    for d in &outcome.diffs {
        println!("{:>6} {:>12} {:>12} {:>12.4}", d.axis, d.coarse, d.fine, d.rel_l2);
    }
    Ok(())
}
