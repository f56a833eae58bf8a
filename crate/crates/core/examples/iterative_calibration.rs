//! Closed-loop amplitude calibration: measure δθ, scale the amplitude by
//! θ_t/(θ_t + δθ), repeat. Prints E_norm = (E − E_opt)/E_opt per iteration.
//!
//!     cargo run --release --example iterative_calibration

use restless_sim::experiments::{iterative_calibration, FineAmplitudeConfig};
use restless_sim::restless::ExecutionMode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for tau_ns in [3.0, 3.5, 4.5, 10.0] {
        for epsilon in [0.0, 0.01, 0.05] {
            for mode in [ExecutionMode::Standard, ExecutionMode::Restless] {
                let config = FineAmplitudeConfig { duration: tau_ns * 1e-9, rotation_error: epsilon, mode, seed: 3, ..Default::default() };
                let report = iterative_calibration(&config, 10)?;
                let e: Vec<String> = report.records.iter().map(|r| format!("{:.1e}", r.e_norm)).collect();
                println!("τ = {tau_ns:>4} ns  ε = {:>2.0}%  {mode:<8}  E_norm: {}", 100.0 * epsilon, e.join(" "));
            }
        }
    }
    Ok(())
}
