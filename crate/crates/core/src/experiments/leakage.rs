use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{check_count, check_positive, derive_seed, fine_amplitude_transition_matrices, ExperimentError, TAG_RUN};
use crate::channels::DampingParams;
use crate::postprocess::{leakage_trace, LeakageTrace};
use crate::pulse::{calibrate_pulse, gate_unitary, Axis, CalibrationOptions, QutritUnitary, TransmonModel};
use crate::restless::{default_assignment, restless_identity_matrix, run_realizations, CircuitStep};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LeakageBuildupConfig {
    pub duration: f64,
    pub damping: bool,
    pub damping_params: DampingParams,
    pub circuits: usize,
    pub shots: usize,
    pub realizations: u64,
    pub window: usize,
    pub seed: u64,
    pub model: TransmonModel,
    pub calibration: CalibrationOptions,
}

impl Default for LeakageBuildupConfig {
    fn default() -> Self {
        Self {
            duration: 10e-9,
            damping: false,
            damping_params: DampingParams::default(),
            circuits: 17,
            shots: 1000,
            realizations: 512,
            window: 16,
            seed: 0,
            model: TransmonModel::default(),
            calibration: CalibrationOptions::default(),
        }
    }
}

impl LeakageBuildupConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        check_positive("duration", self.duration)?;
        check_count("circuits", self.circuits as u64)?;
        check_count("shots", self.shots as u64)?;
        check_count("realizations", self.realizations)?;
        check_count("window", self.window as u64)?;
        self.model.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LeakageBuildupReport {
    pub config: LeakageBuildupConfig,
    /// |⟨2|U|0⟩|² of the single X pulse.
    pub gate_leakage: f64,
    pub trace: LeakageTrace,
    pub run_seed: u64,
}

/// Restless fine-amplitude suite with qutrit-resolved records, using the calibrated X pulse.
pub fn leakage_buildup_experiment(config: &LeakageBuildupConfig) -> Result<LeakageBuildupReport, ExperimentError> {
    config.validate()?;
    let pulse = calibrate_pulse(&config.model, config.duration, PI, Axis::X, 0.0, &config.calibration)?;
    let gate = gate_unitary(&config.model, &pulse.pulse, &pulse.unitary);
    leakage_buildup_with_gate(config, &gate)
}

/// Same experiment with an arbitrary X gate.
pub fn leakage_buildup_with_gate(config: &LeakageBuildupConfig, x_gate: &QutritUnitary) -> Result<LeakageBuildupReport, ExperimentError> {
    config.validate()?;
    let damping = config.damping.then_some(&config.damping_params);
    let steps: Vec<CircuitStep> = fine_amplitude_transition_matrices(x_gate, config.duration, config.circuits, damping)?
        .into_iter()
        .map(|t| CircuitStep::new(t, restless_identity_matrix()))
        .collect();
    let run_seed = derive_seed(config.seed, TAG_RUN, 0);
    let streams = run_realizations(&steps, config.shots, &default_assignment(), run_seed, config.realizations, true)?;
    let trace = leakage_trace(&streams, config.window)?;
    Ok(LeakageBuildupReport { config: config.clone(), gate_leakage: crate::pulse::leakage_of(x_gate), trace, run_seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{embed, pauli_x};

    #[test]
    fn leak_free_gates_never_populate_level_two() {
        let x = QutritUnitary::new(embed(&pauli_x())).unwrap();
        let cfg = LeakageBuildupConfig { realizations: 8, shots: 50, ..Default::default() };
        let r = leakage_buildup_with_gate(&cfg, &x).unwrap();
        assert!(r.trace.p2.iter().all(|&p| p == 0.0));
    }
}
