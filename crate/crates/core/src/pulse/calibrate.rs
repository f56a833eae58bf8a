use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use super::envelope::{Axis, DragPulse};
use super::model::TransmonModel;
use super::propagate::{leakage_of, process_fidelity, propagate, PropagatorConfig, QutritUnitary};
use super::PulseError;
use crate::linalg::{pauli_rotation, pauli_x, pauli_y, Mat2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct CalibrationOptions {
    pub propagator: PropagatorConfig,
    /// Simplex stops once the spread of its infidelities falls below this value.
    pub tolerance: f64,
    pub max_iterations: u64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self { propagator: PropagatorConfig::default(), tolerance: 1e-13, max_iterations: 600 }
    }
}

/// A pulse together with the figures of merit it achieved.
#[derive(Debug, Clone, Serialize)]
pub struct CalibratedPulse {
    pub pulse: DragPulse,
    /// 1 − Φ against R_axis(θ_t(1 + ε)).
    pub infidelity: f64,
    pub leakage: f64,
    #[serde(skip)]
    pub unitary: QutritUnitary,
}

/// Target rotation exp(-iθ/2 σ_axis).
pub fn target_rotation(axis: Axis, angle: f64) -> Mat2 {
    match axis {
        Axis::X => pauli_rotation(&pauli_x(), angle),
        Axis::Y => pauli_rotation(&pauli_y(), angle),
    }
}

struct Objective<'a> {
    model: &'a TransmonModel,
    template: DragPulse,
    target: Mat2,
    scale: (f64, f64),
    propagator: PropagatorConfig,
}

impl Objective<'_> {
    fn pulse_at(&self, x: &[f64]) -> DragPulse {
        DragPulse { amplitude: x[0] * self.scale.0, beta: x[1] * self.scale.1, ..self.template }
    }
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> Result<f64, argmin::core::Error> {
        let u = propagate(self.model, &self.pulse_at(x), &self.propagator)?;
        Ok(1.0 - process_fidelity(&u, &self.target))
    }
}

/// Maximizes Φ over (amplitude, β) for a pulse of duration `duration`
/// targeting R_axis(θ_t(1 + ε)).
pub fn calibrate_pulse(
    model: &TransmonModel,
    duration: f64,
    target_angle: f64,
    axis: Axis,
    rotation_error: f64,
    options: &CalibrationOptions,
) -> Result<CalibratedPulse, PulseError> {
    model.validate()?;
    let seed = DragPulse::new(duration, 0.0, 0.0, axis, target_angle)?.with_rotation_error(rotation_error);
    let angle = seed.designed_angle();
    // Rabi area estimate for the amplitude; first-order DRAG value for β.
    let a0 = angle / (model.coupling * seed.unit_area());
    let b0 = -1.0 / model.anharmonicity;
    let objective = Objective {
        model,
        template: seed,
        target: target_rotation(axis, angle),
        scale: (if a0 == 0.0 { 1.0 } else { a0 }, b0),
        propagator: options.propagator.unchecked(),
    };
    let start = vec![1.0, 1.0];
    let initial_cost = objective.cost(&start).map_err(|e| PulseError::InvalidPulse(e.to_string()))?;
    let simplex = vec![start.clone(), vec![1.05, 1.0], vec![1.0, 0.5]];
    let solver = NelderMead::new(simplex).with_sd_tolerance(options.tolerance).map_err(|e| PulseError::InvalidPulse(e.to_string()))?;
    let result = Executor::new(objective, solver).configure(|s| s.max_iters(options.max_iterations)).run();
    let (best_x, reason) = match result {
        Ok(res) => (res.state().get_best_param().cloned().unwrap_or(start.clone()), None),
        Err(e) => (start.clone(), Some(e.to_string())),
    };
    let objective = Objective {
        model,
        template: seed,
        target: target_rotation(axis, angle),
        scale: (if a0 == 0.0 { 1.0 } else { a0 }, b0),
        propagator: options.propagator,
    };
    let pulse = objective.pulse_at(&best_x);
    let unitary = propagate(model, &pulse, &options.propagator)?;
    let infidelity = 1.0 - process_fidelity(&unitary, &objective.target);
    let calibrated = CalibratedPulse { pulse, infidelity, leakage: leakage_of(&unitary), unitary };
    let reason = reason
        .or_else(|| (infidelity >= initial_cost && initial_cost > 0.0).then(|| "no improvement over the initial simplex".to_string()));
    match reason {
        Some(reason) => Err(PulseError::Calibration { reason, best: Box::new(calibrated) }),
        None => Ok(calibrated),
    }
}

/// The generators R_x(±π/2), R_y(±π/2) of the Clifford suite, each calibrated at ε = 0.
#[derive(Debug, Clone, Serialize)]
pub struct RotationSet {
    pub x_plus: CalibratedPulse,
    pub x_minus: CalibratedPulse,
    pub y_plus: CalibratedPulse,
    pub y_minus: CalibratedPulse,
}

impl RotationSet {
    pub fn pulses(&self) -> [&CalibratedPulse; 4] {
        [&self.x_plus, &self.x_minus, &self.y_plus, &self.y_minus]
    }

    pub fn average_fidelity(&self) -> f64 {
        self.pulses().iter().map(|p| 1.0 - p.infidelity).sum::<f64>() / 4.0
    }
}

pub fn build_rotation_set(model: &TransmonModel, duration: f64, options: &CalibrationOptions) -> Result<RotationSet, PulseError> {
    let specs = [(Axis::X, FRAC_PI_2), (Axis::X, -FRAC_PI_2), (Axis::Y, FRAC_PI_2), (Axis::Y, -FRAC_PI_2)];
    let mut pulses = specs
        .par_iter()
        .map(|&(axis, angle)| calibrate_pulse(model, duration, angle, axis, 0.0, options))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter();
    let mut next = || pulses.next().expect("four pulses");
    Ok(RotationSet { x_plus: next(), x_minus: next(), y_plus: next(), y_minus: next() })
}
