//! Run one realization of each model from the innovation-adoption preset and
//! print how the adopter share grows over time.
//!
//! The agent model tracks individual positions and types; the field model
//! tracks one density per type. Both are driven by the same scenario and
//! report the share of mass carried by the adopter type.
//!
//!     cargo run --release --example single_realization

use agentfield::abm::simulate_abm;
use agentfield::model::ConfigFile;
use agentfield::spde::{simulate_spde, FemMesh};
use agentfield::Result;

const PRESET: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../presets/innovation.toml");

fn main() -> Result<()> {
    let cfg = ConfigFile::load(PRESET)?;
    let scenario = cfg.scenario()?;
    let adopter = cfg.ensemble.observed_type;
    let print_every = (1.0 / scenario.params.dt).round() as usize;

    println!("scenario: {} agents, horizon t = {}", scenario.params.n_agents, scenario.params.t_end);
    println!("\nagent model (realization 0):");
    println!("{:>8} {:>10} {:>12}", "time", "adopters", "share");
    let final_agents = simulate_abm(&scenario, 0, |step, t, state| {
        if step % print_every == 0 {
            let counts = state.type_counts(scenario.params.n_types);
            println!("{t:>8.2} {:>10} {:>12.3}", counts[adopter], state.fraction_of(adopter));
        }
        true
    })?;

    let mesh = FemMesh::new(scenario.domain, scenario.grid.cells)?;
    println!("\nfield model (realization 0):");
    println!("{:>8} {:>10} {:>12}", "time", "mass", "share");
    let final_fields = simulate_spde(&scenario, 0, |step, t, state| {
        if step % print_every == 0 {
            let mass = state.mass_of(&mesh, adopter);
            println!("{t:>8.2} {mass:>10.1} {:>12.3}", state.fraction_of(&mesh, adopter));
        }
        true
    })?;

    println!(
        "\nfinal adopter share: {:.3} (agents) vs {:.3} (fields)",
        final_agents.fraction_of(adopter),
        final_fields.fraction_of(&mesh, adopter),
    );
    Ok(())
}
