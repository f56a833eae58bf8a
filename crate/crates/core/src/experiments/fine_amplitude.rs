use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use super::{check_count, check_positive, derive_seed, gate_channel, ExperimentError, TAG_RUN};
use crate::channels::{unitary_channel, ChannelSequence, DampingParams};
use crate::linalg::{embed, pauli_rotation, pauli_x};
use crate::postprocess::{
    fit_fine_amplitude_with, ground_state_probability, xor_state_change, ContrastModel, FineAmplitudeFit, ProbabilitySeries,
};
use crate::pulse::{calibrate_pulse, gate_unitary, Axis, CalibratedPulse, CalibrationOptions, QutritUnitary, TransmonModel};
use crate::restless::{default_assignment, run_realizations, CircuitStep, ExecutionMode, TransitionMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FineAmplitudeConfig {
    /// Pulse duration τ (s).
    pub duration: f64,
    /// Intentional fractional rotation error ε of the X pulse.
    pub rotation_error: f64,
    pub mode: ExecutionMode,
    pub damping: bool,
    pub damping_params: DampingParams,
    /// Number of circuits K; circuit k holds k leaky X gates.
    pub circuits: usize,
    pub shots: usize,
    pub realizations: u64,
    pub seed: u64,
    pub contrast: ContrastModel,
    pub model: TransmonModel,
    pub calibration: CalibrationOptions,
}

impl Default for FineAmplitudeConfig {
    fn default() -> Self {
        Self {
            duration: 10e-9,
            rotation_error: 0.0,
            mode: ExecutionMode::Restless,
            damping: false,
            damping_params: DampingParams::default(),
            circuits: 17,
            shots: 1000,
            realizations: 1,
            seed: 0,
            contrast: ContrastModel::Tied,
            model: TransmonModel::default(),
            calibration: CalibrationOptions::default(),
        }
    }
}

impl FineAmplitudeConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        check_positive("duration", self.duration)?;
        check_count("circuits", self.circuits as u64)?;
        check_count("shots", self.shots as u64)?;
        check_count("realizations", self.realizations)?;
        if !self.rotation_error.is_finite() {
            return Err(ExperimentError::InvalidConfig("rotation error must be finite".into()));
        }
        self.model.validate()?;
        Ok(())
    }

    pub(crate) fn damping(&self) -> Option<&DampingParams> {
        self.damping.then_some(&self.damping_params)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FineAmplitudeReport {
    pub config: FineAmplitudeConfig,
    pub pulse: CalibratedPulse,
    /// State-change probability (restless) or excited-state probability (standard) per circuit.
    pub series: ProbabilitySeries,
    pub fit: FineAmplitudeFit,
    pub run_seed: u64,
}

/// Circuit k: an ideal √X followed by k copies of the leaky X gate, each
/// followed by amplitude damping when enabled.
pub fn fine_amplitude_circuits(
    x_gate: &QutritUnitary,
    duration: f64,
    circuits: usize,
    damping: Option<&DampingParams>,
) -> Result<Vec<ChannelSequence>, ExperimentError> {
    let sqrt_x = QutritUnitary::new(embed(&pauli_rotation(&pauli_x(), FRAC_PI_2)))?;
    let x = gate_channel(x_gate, duration, damping)?;
    Ok((0..circuits)
        .map(|k| {
            let mut seq = ChannelSequence::new(vec![unitary_channel(&sqrt_x)]);
            for _ in 0..k {
                seq.push(x.clone());
            }
            seq
        })
        .collect())
}

pub fn fine_amplitude_transition_matrices(
    x_gate: &QutritUnitary,
    duration: f64,
    circuits: usize,
    damping: Option<&DampingParams>,
) -> Result<Vec<TransitionMatrix>, ExperimentError> {
    Ok(fine_amplitude_circuits(x_gate, duration, circuits, damping)?
        .iter()
        .map(|c| TransitionMatrix::from_gate_sequence(&c.gates))
        .collect())
}

/// Samples the fine-amplitude sequence built from `pulse` and fits its rotation error.
pub fn measure_rotation_error(
    config: &FineAmplitudeConfig,
    pulse: &CalibratedPulse,
    run_seed: u64,
) -> Result<(ProbabilitySeries, FineAmplitudeFit), ExperimentError> {
    let gate = gate_unitary(&config.model, &pulse.pulse, &pulse.unitary);
    let post = config.mode.post_measurement();
    let steps: Vec<CircuitStep> = fine_amplitude_transition_matrices(&gate, config.duration, config.circuits, config.damping())?
        .into_iter()
        .map(|t| CircuitStep::new(t, post))
        .collect();
    let streams = run_realizations(&steps, config.shots, &default_assignment(), run_seed, config.realizations, false)?;
    let series = match config.mode {
        ExecutionMode::Restless => xor_state_change(&streams)?,
        ExecutionMode::Standard => ground_state_probability(&streams)?.complement(),
    };
    let fit = fit_fine_amplitude_with(&series, PI, config.contrast)?;
    Ok((series, fit))
}

pub fn run_fine_amplitude(config: &FineAmplitudeConfig) -> Result<FineAmplitudeReport, ExperimentError> {
    config.validate()?;
    let pulse = calibrate_pulse(&config.model, config.duration, PI, Axis::X, config.rotation_error, &config.calibration)?;
    let run_seed = derive_seed(config.seed, TAG_RUN, 0);
    let (series, fit) = measure_rotation_error(config, &pulse, run_seed)?;
    Ok(FineAmplitudeReport { config: config.clone(), pulse, series, fit, run_seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeroth_circuit_is_a_hadamard_like_split() {
        let t = fine_amplitude_transition_matrices(&QutritUnitary::identity(), 10e-9, 1, None).unwrap();
        assert!((t[0].matrix()[(0, 0)] - 0.5).abs() < 1e-14);
        assert!((t[0].matrix()[(1, 0)] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn twenty_ns_without_error_reads_zero() {
        for mode in [ExecutionMode::Restless, ExecutionMode::Standard] {
            let cfg = FineAmplitudeConfig { duration: 20e-9, mode, seed: 3, ..Default::default() };
            let r = run_fine_amplitude(&cfg).unwrap();
            assert!(r.fit.delta_theta_fraction.abs() < 0.005, "{mode}: {}", r.fit.delta_theta_fraction);
        }
    }

    #[test]
    fn rejects_zero_shots() {
        let cfg = FineAmplitudeConfig { shots: 0, ..Default::default() };
        assert!(matches!(run_fine_amplitude(&cfg), Err(ExperimentError::InvalidConfig(_))));
    }
}
