//! Rotation error measured by the fine-amplitude sequence as leakage grows,
//! under restless and standard execution.
//!
//!     cargo run --release --example fine_amplitude

use restless_sim::experiments::{run_fine_amplitude, FineAmplitudeConfig};
use restless_sim::restless::ExecutionMode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>9} {:>6} {:>9} {:>10}", "τ (ns)", "leakage", "ε", "restless", "standard");
    for tau_ns in [3.0, 3.5, 4.0, 4.5, 5.0, 6.0, 8.0, 10.0, 20.0] {
        for epsilon in [0.0, 0.01, 0.05] {
            let run = |mode| {
                let config = FineAmplitudeConfig { duration: tau_ns * 1e-9, rotation_error: epsilon, mode, seed: 11, ..Default::default() };
                run_fine_amplitude(&config)
            };
            let (r, s) = (run(ExecutionMode::Restless)?, run(ExecutionMode::Standard)?);
            println!(
                "{tau_ns:>6.1} {:>9.2e} {:>5.0}% {:>8.2}% {:>9.2}%",
                r.pulse.leakage,
                100.0 * epsilon,
                100.0 * r.fit.delta_theta_fraction,
                100.0 * s.fit.delta_theta_fraction
            );
        }
    }
    Ok(())
}
