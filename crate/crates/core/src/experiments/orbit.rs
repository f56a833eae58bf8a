use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_count, check_positive, derive_seed, gate_channel, ExperimentError, TAG_RUN, TAG_SEQUENCES};
use crate::channels::{ChannelSequence, DampingParams, QutritChannel};
use crate::clifford::{random_clifford_sequence, sequence_generators, CliffordGroup, ComposeTarget, Generator};
use crate::postprocess::{compose_to_x_sequence_fidelity, ground_state_probability, restless_sequence_fidelity, ProbabilitySeries};
use crate::pulse::{
    build_rotation_set, gate_unitary, leakage_of, process_fidelity, propagate, target_rotation, CalibratedPulse, CalibrationOptions,
    RotationSet, TransmonModel,
};
use crate::restless::{default_assignment, run, CircuitStep, ExecutionMode, TransitionMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OrbitConfig {
    pub duration: f64,
    /// Number m of random Clifford elements before the recovery element.
    pub depth: usize,
    pub sequences: usize,
    pub mode: ExecutionMode,
    pub compose_to: ComposeTarget,
    /// Prefactors applied to the calibrated β of all four rotations.
    pub beta_prefactors: Vec<f64>,
    pub damping: bool,
    pub damping_params: DampingParams,
    pub shots: usize,
    pub seed: u64,
    pub model: TransmonModel,
    pub calibration: CalibrationOptions,
}

/// 30 prefactors equidistant in [−2, 2].
pub fn default_beta_grid() -> Vec<f64> {
    (0..30).map(|i| -2.0 + 4.0 * i as f64 / 29.0).collect()
}

impl Default for OrbitConfig {
    fn default() -> Self {
        Self {
            duration: 10e-9,
            depth: 120,
            sequences: 100,
            mode: ExecutionMode::Restless,
            compose_to: ComposeTarget::Identity,
            beta_prefactors: default_beta_grid(),
            damping: false,
            damping_params: DampingParams::default(),
            shots: 1000,
            seed: 0,
            model: TransmonModel::default(),
            calibration: CalibrationOptions::default(),
        }
    }
}

impl OrbitConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        check_positive("duration", self.duration)?;
        check_count("sequences", self.sequences as u64)?;
        check_count("shots", self.shots as u64)?;
        if self.beta_prefactors.is_empty() || self.beta_prefactors.iter().any(|f| !f.is_finite()) {
            return Err(ExperimentError::InvalidConfig("beta prefactors must be a non-empty list of finite values".into()));
        }
        self.model.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OrbitPoint {
    pub beta_prefactor: f64,
    /// Φ averaged over the four rotations.
    pub mean_process_fidelity: f64,
    pub mean_leakage: f64,
    pub r_c: f64,
    pub f_seq: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub config: OrbitConfig,
    /// Mean generator count per Clifford used for r_c.
    pub n_c: f64,
    pub rotation_set: RotationSet,
    pub points: Vec<OrbitPoint>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DepthPoint {
    pub depth: usize,
    pub f_seq: f64,
    pub stderr: f64,
}

/// r_c = 1 − [(2Φ + 1)/3]^{N_c}.
pub fn error_per_clifford(mean_fidelity: f64, n_c: f64) -> f64 {
    1.0 - ((2.0 * mean_fidelity + 1.0) / 3.0).powf(n_c)
}

/// dF_seq/dr_c = −2Am(1 − 2r_c)^{m−1}.
pub fn orbit_sensitivity(a: f64, r_c: f64, m: f64) -> f64 {
    -2.0 * a * m * (1.0 - 2.0 * r_c).powf(m - 1.0)
}

/// Depth m* = −1/ln(1 − 2r_c) maximizing the magnitude of the sensitivity.
/// Undefined outside 0 < r_c < 1/2.
pub fn optimal_depth(r_c: f64) -> Option<f64> {
    (r_c > 0.0 && r_c < 0.5).then(|| -1.0 / (1.0 - 2.0 * r_c).ln())
}

/// Small-r_c value of the sensitivity at m*, −A/(e·r_c).
pub fn max_sensitivity_approx(a: f64, r_c: f64) -> f64 {
    -a / (std::f64::consts::E * r_c)
}

struct ScaledGates {
    channels: [QutritChannel; 4],
    mean_fidelity: f64,
    mean_leakage: f64,
}

fn scaled_gates(config: &OrbitConfig, set: &RotationSet, prefactor: f64) -> Result<ScaledGates, ExperimentError> {
    let damping = config.damping.then_some(&config.damping_params);
    let mut fidelity = 0.0;
    let mut leakage = 0.0;
    let mut build = |cal: &CalibratedPulse| -> Result<QutritChannel, ExperimentError> {
        let pulse = cal.pulse.scale_beta(prefactor);
        let u = propagate(&config.model, &pulse, &config.calibration.propagator)?;
        fidelity += process_fidelity(&u, &target_rotation(pulse.axis, pulse.target_angle)) / 4.0;
        leakage += leakage_of(&u) / 4.0;
        gate_channel(&gate_unitary(&config.model, &pulse, &u), pulse.duration, damping)
    };
    // Same order as Generator::ALL.
    let channels = [build(&set.x_plus)?, build(&set.x_minus)?, build(&set.y_plus)?, build(&set.y_minus)?];
    Ok(ScaledGates { channels, mean_fidelity: fidelity, mean_leakage: leakage })
}

fn sequences_for(config: &OrbitConfig, depth: usize) -> Vec<Vec<Generator>> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, TAG_SEQUENCES, depth as u64));
    (0..config.sequences).map(|_| sequence_generators(&random_clifford_sequence(depth, config.compose_to, &mut rng))).collect()
}

fn sequence_fidelity(
    config: &OrbitConfig,
    gates: &ScaledGates,
    sequences: &[Vec<Generator>],
    run_seed: u64,
) -> Result<(f64, f64), ExperimentError> {
    let post = config.mode.post_measurement();
    let steps: Vec<CircuitStep> = sequences
        .iter()
        .map(|word| {
            let seq = ChannelSequence::new(word.iter().map(|g| gates.channels[g.index()].clone()).collect());
            CircuitStep::new(TransitionMatrix::from_gate_sequence(&seq.gates), post)
        })
        .collect();
    let stream = run(&steps, config.shots, &default_assignment(), run_seed, 0, false)?;
    let streams = std::slice::from_ref(&stream);
    let restless = config.mode == ExecutionMode::Restless;
    let series: ProbabilitySeries = match config.compose_to {
        ComposeTarget::Identity if restless => restless_sequence_fidelity(streams)?,
        ComposeTarget::Identity => ground_state_probability(streams)?,
        ComposeTarget::X => compose_to_x_sequence_fidelity(streams, restless)?,
    };
    let k = series.points.len() as f64;
    let stderr = series.points.iter().map(|p| p.stderr * p.stderr).sum::<f64>().sqrt() / k;
    Ok((series.mean(), stderr))
}

/// One ORBIT experiment per β prefactor at fixed depth.
pub fn run_orbit(config: &OrbitConfig) -> Result<OrbitReport, ExperimentError> {
    config.validate()?;
    let set = build_rotation_set(&config.model, config.duration, &config.calibration)?;
    let n_c = CliffordGroup::get().mean_word_length();
    let sequences = sequences_for(config, config.depth);
    let points = config
        .beta_prefactors
        .par_iter()
        .enumerate()
        .map(|(i, &prefactor)| {
            let gates = scaled_gates(config, &set, prefactor)?;
            let (f_seq, stderr) = sequence_fidelity(config, &gates, &sequences, derive_seed(config.seed, TAG_RUN, i as u64))?;
            Ok(OrbitPoint {
                beta_prefactor: prefactor,
                mean_process_fidelity: gates.mean_fidelity,
                mean_leakage: gates.mean_leakage,
                r_c: error_per_clifford(gates.mean_fidelity, n_c),
                f_seq,
                stderr,
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(OrbitReport { config: config.clone(), n_c, rotation_set: set, points })
}

/// F_seq(m) over several depths for one β prefactor.
pub fn orbit_depth_curve(config: &OrbitConfig, depths: &[usize], prefactor: f64) -> Result<Vec<DepthPoint>, ExperimentError> {
    config.validate()?;
    let set = build_rotation_set(&config.model, config.duration, &config.calibration)?;
    let gates = scaled_gates(config, &set, prefactor)?;
    depths
        .par_iter()
        .map(|&depth| {
            let sequences = sequences_for(config, depth);
            let (f_seq, stderr) = sequence_fidelity(config, &gates, &sequences, derive_seed(config.seed, TAG_RUN, depth as u64))?;
            Ok(DepthPoint { depth, f_seq, stderr })
        })
        .collect()
}
