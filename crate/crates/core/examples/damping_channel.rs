//! Sequential amplitude damping |2⟩ → |1⟩ → |0⟩ after a leaky gate, as a Kraus
//! channel on the qutrit density matrix.
//!
//!     cargo run --release --example damping_channel

use restless_sim::channels::{amplitude_damping, basis_projector, compose, unitary_channel, DampingParams};
use restless_sim::pulse::{calibrate_pulse, gate_unitary, Axis, CalibrationOptions, TransmonModel};
use std::f64::consts::PI;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = DampingParams::default();
    for tau in [5e-9, 1e-6, 10e-6, 100e-6] {
        let (g01, g12) = params.rates(tau);
        let rho = amplitude_damping(tau, &params)?.apply(&basis_projector(2))?;
        println!(
            "τ = {:>8.1e} s  Γ01 = {g01:.2e}  Γ12 = {g12:.2e}  |2⟩ → populations ({:.4}, {:.4}, {:.4})",
            tau,
            rho[(0, 0)].re,
            rho[(1, 1)].re,
            rho[(2, 2)].re
        );
    }

    let model = TransmonModel::default();
    let pulse = calibrate_pulse(&model, 5e-9, PI, Axis::X, 0.0, &CalibrationOptions::default())?;
    let gate = compose(&unitary_channel(&gate_unitary(&model, &pulse.pulse, &pulse.unitary)), &amplitude_damping(5e-9, &params)?);
    let rho = gate.apply(&basis_projector(0))?;
    println!(
        "5 ns X gate + damping on |0⟩: ({:.4}, {:.4}, {:.2e}); Kraus operators: {}, min Choi eigenvalue {:.1e}",
        rho[(0, 0)].re,
        rho[(1, 1)].re,
        rho[(2, 2)].re,
        gate.kraus().len(),
        gate.min_choi_eigenvalue()
    );
    Ok(())
}
