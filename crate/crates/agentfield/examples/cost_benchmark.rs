//! Per-step wall-time of both models across agent counts.
//!
//! The agent model's step cost grows with the population (position updates,
//! neighbor search, rate draws), while the field model's cost is set by the
//! mesh and noise resolution alone — the agent count only enters through the
//! initial masses. The crossover between the two is the practical argument
//! for the field description at large N.
//!
//!     cargo run --release --example cost_benchmark

use agentfield::harness::cost_benchmark;
use agentfield::model::ConfigFile;
use agentfield::Result;

const PRESET: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../presets/innovation.toml");

fn main() -> Result<()> {
    let cfg = ConfigFile::load(PRESET)?;
    let scenario = cfg.scenario()?;
    let rows = cost_benchmark(&scenario, &cfg.bench)?;

    println!(
        "median per-step wall time ({} warmup + {} timed steps per case)\n",
        cfg.bench.warmup_steps, cfg.bench.timed_steps
    );
    println!("{:>6} {:>12} {:>12} {:>8}", "N", "agents", "fields", "ratio");
    for pair in rows.chunks(2) {
        let (abm, spde) = (&pair[0], &pair[1]);
        println!(
            "{:>6} {:>10.1}µs {:>10.1}µs {:>8.2}",
            abm.n_agents,
            abm.seconds_per_step * 1e6,
            spde.seconds_per_step * 1e6,
            abm.seconds_per_step / spde.seconds_per_step,
        );
    }
    println!("\n(ratio > 1 means the field model steps faster at that count)");
    Ok(())
}
