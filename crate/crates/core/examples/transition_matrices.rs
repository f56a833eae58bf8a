//! Transition matrices T₁ and T₁₆ of the fine-amplitude sequence for 5 ns and
//! 10 ns pulses, and their exact basis-state marginals under restless execution.
//!
//!     cargo run --release --example transition_matrices

use restless_sim::experiments::fine_amplitude_transition_matrices;
use restless_sim::pulse::{calibrate_pulse, gate_unitary, Axis, CalibrationOptions, TransmonModel};
use restless_sim::restless::{exact_marginals, restless_identity_matrix, CircuitStep, DEFAULT_MARGINAL_BOUND};
use std::f64::consts::PI;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = TransmonModel::default();
    for tau_ns in [5.0, 10.0] {
        let pulse = calibrate_pulse(&model, tau_ns * 1e-9, PI, Axis::X, 0.0, &CalibrationOptions::default())?;
        let gate = gate_unitary(&model, &pulse.pulse, &pulse.unitary);
        let t = fine_amplitude_transition_matrices(&gate, tau_ns * 1e-9, 17, None)?;
        for k in [1, 16] {
            println!("τ = {tau_ns} ns, T_{k} (column ν → row μ):");
            for row in t[k].matrix().row_iter() {
                println!("   {:>10.3e} {:>10.3e} {:>10.3e}", row[0], row[1], row[2]);
            }
        }
        let steps: Vec<CircuitStep> = t.into_iter().map(|t| CircuitStep::new(t, restless_identity_matrix())).collect();
        let marginals = exact_marginals(&steps, 100, DEFAULT_MARGINAL_BOUND)?;
        let last = marginals.last().expect("non-empty");
        println!("   P(|2⟩) after {} executions: {:.4}\n", marginals.len(), last[2]);
    }
    Ok(())
}
