use serde::Serialize;
use std::f64::consts::PI;

use super::{check_count, derive_seed, measure_rotation_error, ExperimentError, FineAmplitudeConfig, TAG_ITERATION};
use crate::pulse::{calibrate_pulse, leakage_of, process_fidelity, propagate, target_rotation, Axis, CalibratedPulse};

#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub amplitude: f64,
    /// E = 1 − Φ against the error-free target R_x(π).
    pub infidelity: f64,
    /// (E − E_opt)/E_opt.
    pub e_norm: f64,
    /// Rotation error measured with the pulse of this iteration.
    pub delta_theta: f64,
    pub delta_theta_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterativeReport {
    pub config: FineAmplitudeConfig,
    pub iterations: usize,
    /// Infidelity of the ε = 0 optimum.
    pub e_opt: f64,
    pub records: Vec<IterationRecord>,
    /// E_norm exceeded ten times its starting magnitude (at least 1) for three consecutive iterations.
    pub diverged: bool,
    /// First iteration whose measured |δθ/θ_t| is below 0.005.
    pub converged_at: Option<usize>,
}

pub const CONVERGENCE_THRESHOLD: f64 = 0.005;

/// Fine-amplitude calibration loop: measure δθ, multiply the amplitude by
/// θ_t/(θ_t + δθ), re-propagate, repeat. Record 0 is the starting pulse.
pub fn iterative_calibration(config: &FineAmplitudeConfig, iterations: usize) -> Result<IterativeReport, ExperimentError> {
    config.validate()?;
    check_count("iterations", iterations as u64)?;
    let optimum = calibrate_pulse(&config.model, config.duration, PI, Axis::X, 0.0, &config.calibration)?;
    let target = target_rotation(Axis::X, PI);
    let e_opt = 1.0 - process_fidelity(&optimum.unitary, &target);
    let mut current = if config.rotation_error == 0.0 {
        optimum.clone()
    } else {
        calibrate_pulse(&config.model, config.duration, PI, Axis::X, config.rotation_error, &config.calibration)?
    };
    let mut records = Vec::with_capacity(iterations + 1);
    for iteration in 0..=iterations {
        let e = 1.0 - process_fidelity(&current.unitary, &target);
        let (_, fit) = measure_rotation_error(config, &current, derive_seed(config.seed, TAG_ITERATION, iteration as u64))?;
        records.push(IterationRecord {
            iteration,
            amplitude: current.pulse.amplitude,
            infidelity: e,
            e_norm: (e - e_opt) / e_opt,
            delta_theta: fit.delta_theta,
            delta_theta_fraction: fit.delta_theta_fraction,
        });
        if iteration == iterations {
            break;
        }
        let mut pulse = current.pulse;
        pulse.amplitude *= PI / (PI + fit.delta_theta);
        let unitary = propagate(&config.model, &pulse, &config.calibration.propagator)?;
        current = CalibratedPulse { pulse, infidelity: 1.0 - process_fidelity(&unitary, &target), leakage: leakage_of(&unitary), unitary };
    }
    let limit = 10.0 * records[0].e_norm.abs().max(1.0);
    let diverged = records.windows(3).any(|w| w.iter().all(|r| r.e_norm > limit));
    let converged_at = records.iter().position(|r| r.delta_theta_fraction.abs() < CONVERGENCE_THRESHOLD);
    Ok(IterativeReport { config: config.clone(), iterations, e_opt, records, diverged, converged_at })
}
