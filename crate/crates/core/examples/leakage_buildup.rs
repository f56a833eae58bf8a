//! |2⟩ population build-up under restless execution of the fine-amplitude
//! sequence, with and without amplitude damping.
//!
//!     cargo run --release --example leakage_buildup [-- OUT_DIR]
//!
//! With OUT_DIR the traces are also written there as CSV and SVG.

use restless_sim::cli::output::{leakage_trace_csv, leakage_trace_svg};
use restless_sim::experiments::{leakage_buildup_experiment, LeakageBuildupConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(std::path::PathBuf::from);
    if let Some(dir) = &out {
        std::fs::create_dir_all(dir)?;
    }
    for (tau_ns, damping) in [(5.0, false), (10.0, false), (10.0, true), (20.0, true)] {
        let config = LeakageBuildupConfig { duration: tau_ns * 1e-9, damping, seed: 1, ..Default::default() };
        let report = leakage_buildup_experiment(&config)?;
        println!(
            "τ = {tau_ns:>4} ns  damping = {damping:<5}  gate leakage = {:.2e}  final-quartile ⟨p₂⟩ = {:.3}  max = {:.3}",
            report.gate_leakage,
            report.trace.final_quartile_mean(),
            report.trace.max()
        );
        if let Some(dir) = &out {
            let stem = format!("leakage_{tau_ns}ns{}", if damping { "_damped" } else { "" });
            std::fs::write(dir.join(format!("{stem}.csv")), leakage_trace_csv(&report.trace)?)?;
            std::fs::write(dir.join(format!("{stem}.svg")), leakage_trace_svg(&report.trace, &stem))?;
        }
    }
    Ok(())
}
