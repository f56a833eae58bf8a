//! ORBIT cost function over 30 DRAG prefactors in [−2, 2] for both execution
//! modes, compose-to-identity at m = 120 and compose-to-X at m = 10.
//!
//!     cargo run --release --example orbit_scan [-- TAU_NS]

use restless_sim::clifford::ComposeTarget;
use restless_sim::experiments::{run_orbit, OrbitConfig};
use restless_sim::restless::ExecutionMode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tau_ns: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3.0);
    for (compose_to, depth) in [(ComposeTarget::Identity, 120), (ComposeTarget::X, 10)] {
        println!("τ = {tau_ns} ns, compose to {compose_to}, m = {depth}");
        println!("{:>8} {:>9} {:>9} {:>9} {:>9}", "prefac", "leakage", "r_c", "standard", "restless");
        let run = |mode| run_orbit(&OrbitConfig { duration: tau_ns * 1e-9, depth, compose_to, mode, seed: 5, ..Default::default() });
        let (s, r) = (run(ExecutionMode::Standard)?, run(ExecutionMode::Restless)?);
        for (a, b) in s.points.iter().zip(&r.points) {
            println!("{:>8.3} {:>9.2e} {:>9.4} {:>9.4} {:>9.4}", a.beta_prefactor, a.mean_leakage, a.r_c, a.f_seq, b.f_seq);
        }
        println!();
    }
    Ok(())
}
