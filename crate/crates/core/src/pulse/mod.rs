//! DRAG pulse design on a three-level transmon.

mod calibrate;
mod envelope;
mod model;
mod propagate;

pub use calibrate::{build_rotation_set, calibrate_pulse, target_rotation, CalibratedPulse, CalibrationOptions, RotationSet};
pub use envelope::{drag_envelope, Axis, DragPulse, DURATION_OVER_SIGMA};
pub use model::{SlotPhase, TransmonModel};
pub use propagate::{gate_unitary, leakage_of, process_fidelity, propagate, PropagatorConfig, QutritUnitary, UNITARITY_TOLERANCE};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PulseError {
    #[error("invalid transmon model: {0}")]
    InvalidModel(String),
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),
    #[error("time {t} s is outside the pulse window [0, {duration}] s")]
    Domain { t: f64, duration: f64 },
    #[error("propagator did not converge: {steps} and {} steps disagree by {disagreement:e}", 2 * steps)]
    Integration { steps: usize, disagreement: f64 },
    #[error("propagator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("calibration made no progress: {reason}; best infidelity {:e}", best.infidelity)]
    Calibration { reason: String, best: Box<CalibratedPulse> },
}
