//! Strong convergence order of the Euler–Maruyama stepping.
//!
//! The time discretization used by the field model is strong order 1/2 in
//! general and order 1 when the noise is additive. Both regimes are measured
//! on scalar test equations with known pathwise solutions: linear
//! multiplicative noise (slope ≈ 0.5) and a mean-reverting equation with
//! constant noise (slope ≈ 1), each over the same grid of time steps.
//!
//!     cargo run --release --example strong_order

use agentfield::spde::{gbm_strong_order, ou_strong_order};
use agentfield::Result;

const DTS: [f64; 3] = [1e-2, 2.5e-3, 6.25e-4];
const PATHS: usize = 2000;
const SEED: u64 = 97;

fn main() -> Result<()> {
    let multiplicative = gbm_strong_order(1.0, 1.2, 1.0, 1.0, &DTS, PATHS, SEED)?;
    let additive = ou_strong_order(1.0, 0.8, 1.0, 1.0, &DTS, PATHS, SEED)?;

    println!("strong endpoint errors over {PATHS} paths\n");
    println!("{:>10} {:>16} {:>16}", "dt", "multiplicative", "additive");
    for i in 0..DTS.len() {
        println!(
            "{:>10} {:>16.3e} {:>16.3e}",
            DTS[i], multiplicative.rms_errors[i], additive.rms_errors[i]
        );
    }
    println!(
        "\nfitted slopes: {:.3} (multiplicative, expect ≈ 0.5), {:.3} (additive, expect ≈ 1)",
        multiplicative.slope, additive.slope
    );
    Ok(())
}
