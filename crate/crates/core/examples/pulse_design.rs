//! Calibrated DRAG π pulses from 3 ns to 20 ns: amplitude, β, infidelity and leakage.
//!
//!     cargo run --release --example pulse_design

use restless_sim::pulse::{calibrate_pulse, Axis, CalibrationOptions, TransmonModel};
use std::f64::consts::PI;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = TransmonModel::default();
    let options = CalibrationOptions::default();
    println!("{:>6} {:>10} {:>9} {:>11} {:>11}", "τ (ns)", "amplitude", "β (ns)", "1 − Φ", "leakage");
    for tau_ns in (6..=40).map(|h| h as f64 / 2.0) {
        let p = calibrate_pulse(&model, tau_ns * 1e-9, PI, Axis::X, 0.0, &options)?;
        println!("{tau_ns:>6.1} {:>10.4} {:>9.4} {:>11.3e} {:>11.3e}", p.pulse.amplitude, p.pulse.beta * 1e9, p.infidelity, p.leakage);
    }
    Ok(())
}
