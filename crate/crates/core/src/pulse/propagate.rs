use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::envelope::{envelope_unchecked, DragPulse};
use super::model::{SlotPhase, TransmonModel};
use super::PulseError;
use crate::linalg::{c, lowering, qubit_block, unitarity_error, Mat2, Mat3, I};

/// Numerical settings for the time-ordered propagator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConfig {
    /// Magnus steps across the pulse.
    pub steps: usize,
    /// Drop the counter-rotating drive terms oscillating at 2ω.
    pub rotating_wave: bool,
    /// Re-run with twice the steps and compare entry-wise.
    pub check_convergence: bool,
    /// Maximum entry-wise disagreement accepted by the step-halving check.
    pub tolerance: f64,
    /// Minimum steps per period of the 2ω counter-rotating term.
    pub steps_per_carrier_period: usize,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self { steps: 1000, rotating_wave: true, check_convergence: true, tolerance: 1e-8, steps_per_carrier_period: 32 }
    }
}

impl PropagatorConfig {
    /// Same settings without the step-halving check, for optimizer inner loops.
    pub fn unchecked(self) -> Self {
        Self { check_convergence: false, ..self }
    }

    fn effective_steps(&self, model: &TransmonModel, duration: f64) -> usize {
        if self.rotating_wave {
            self.steps.max(1)
        } else {
            let periods = 2.0 * model.qubit_frequency * duration / (2.0 * PI);
            self.steps.max((periods * self.steps_per_carrier_period as f64).ceil() as usize)
        }
    }
}

/// A 3×3 unitary on the transmon levels {|0⟩, |1⟩, |2⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritUnitary(Mat3);

pub const UNITARITY_TOLERANCE: f64 = 1e-10;

impl QutritUnitary {
    pub fn new(matrix: Mat3) -> Result<Self, PulseError> {
        let err = unitarity_error(&matrix);
        if err > UNITARITY_TOLERANCE {
            return Err(PulseError::NotUnitary(err));
        }
        Ok(Self(matrix))
    }

    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn qubit_block(&self) -> Mat2 {
        qubit_block(&self.0)
    }

    /// Product `self · first`, i.e. `first` is applied before `self`.
    pub fn after(&self, first: &QutritUnitary) -> QutritUnitary {
        QutritUnitary(self.0 * first.0)
    }

    /// Same operator with the global phase chosen so that the ⟨0|U|1⟩ entry is real and positive.
    pub fn phase_normalized(&self) -> QutritUnitary {
        let entry = self.0[(0, 1)];
        if entry.norm() == 0.0 {
            return *self;
        }
        QutritUnitary(self.0 * (entry.conj() / entry.norm()))
    }
}

impl From<QutritUnitary> for Mat3 {
    fn from(u: QutritUnitary) -> Self {
        u.0
    }
}

/// Population transferred from |0⟩ to |2⟩, |⟨2|U|0⟩|².
pub fn leakage_of(u: &QutritUnitary) -> f64 {
    u.0[(2, 0)].norm_sqr()
}

/// Φ = ¼ |Tr{ℙU†ℙ† U_target}|² with ℙ the projector onto {|0⟩, |1⟩}.
pub fn process_fidelity(u: &QutritUnitary, target: &Mat2) -> f64 {
    let overlap = (qubit_block(&u.0).adjoint() * target).trace();
    0.25 * overlap.norm_sqr()
}

struct Drive {
    drift_level2: f64,
    coupling: f64,
    frequency: f64,
    rotating_wave: bool,
    lower: Mat3,
    raise: Mat3,
}

impl Drive {
    fn new(model: &TransmonModel, rotating_wave: bool) -> Self {
        let lower = lowering();
        Self {
            drift_level2: model.anharmonicity,
            coupling: model.coupling,
            frequency: model.qubit_frequency,
            rotating_wave,
            raise: lower.adjoint(),
            lower,
        }
    }

    /// Rotating-frame Hamiltonian. The lab drive is λ Re[Ω e^{-iωt}](a + a†);
    /// in the frame rotating at ω the RWA keeps λ/2 (Ω a† + Ω* a).
    fn hamiltonian(&self, pulse: &DragPulse, t: f64) -> Mat3 {
        let omega = envelope_unchecked(pulse, t);
        let mut h = if self.rotating_wave {
            let w = omega * (0.5 * self.coupling);
            self.raise * w + self.lower * w.conj()
        } else {
            let carrier = C64::from_polar(1.0, self.frequency * t);
            let signal = (omega * carrier.conj()).re;
            let w = c(self.coupling * signal);
            self.raise * (w * carrier) + self.lower * (w * carrier.conj())
        };
        h[(2, 2)] += c(self.drift_level2);
        h
    }
}

fn evolve(model: &TransmonModel, pulse: &DragPulse, steps: usize, rotating_wave: bool) -> Mat3 {
    let drive = Drive::new(model, rotating_wave);
    let h = pulse.duration / steps as f64;
    // Two-point Gauss–Legendre nodes of the fourth-order Magnus expansion.
    let offset = 3f64.sqrt() / 6.0;
    let (n1, n2) = (0.5 - offset, 0.5 + offset);
    let commutator_weight = c(3f64.sqrt() / 12.0 * h * h);
    let mut u = Matrix3::identity();
    for k in 0..steps {
        let t0 = k as f64 * h;
        let h1 = drive.hamiltonian(pulse, t0 + n1 * h);
        let h2 = drive.hamiltonian(pulse, t0 + n2 * h);
        let comm = h2 * h1 - h1 * h2;
        let generator = -(h1 + h2) * (I * (0.5 * h)) - comm * commutator_weight;
        u = generator.exp() * u;
    }
    u
}

/// Rotating-frame propagator U_τ of the transmon under `pulse`.
pub fn propagate(model: &TransmonModel, pulse: &DragPulse, config: &PropagatorConfig) -> Result<QutritUnitary, PulseError> {
    model.validate()?;
    pulse.validate()?;
    let steps = config.effective_steps(model, pulse.duration);
    let u = evolve(model, pulse, steps, config.rotating_wave);
    if config.check_convergence {
        let fine = evolve(model, pulse, 2 * steps, config.rotating_wave);
        let disagreement = crate::linalg::max_abs_diff(&u, &fine);
        if disagreement > config.tolerance {
            return Err(PulseError::Integration { steps, disagreement });
        }
    }
    QutritUnitary::new(u)
}

/// Unitary of the pulse as a circuit element, with the slot phase of |2⟩ applied.
pub fn gate_unitary(model: &TransmonModel, pulse: &DragPulse, propagator: &QutritUnitary) -> QutritUnitary {
    match model.slot_phase {
        SlotPhase::Bare => *propagator,
        SlotPhase::FreeEvolution { padding } => {
            let phase = C64::from_polar(1.0, -model.anharmonicity * (pulse.duration + padding));
            let mut m = propagator.0;
            for col in 0..3 {
                m[(2, col)] *= phase;
            }
            QutritUnitary(m)
        }
    }
}
