use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::PulseError;

/// Phase convention for the |2⟩ level of a gate used inside a circuit.
///
/// `propagate` returns the bare rotating-frame propagator over the pulse.
/// When gates are chained into circuits the phase that |2⟩ picks up
/// relative to the computational levels decides how leakage amplitudes
/// from consecutive gates interfere. `FreeEvolution` multiplies the |2⟩ row
/// by the free anharmonic phase e^{-iΔ(τ + padding)} of the gate slot, which
/// reproduces the reference transition matrices of the fine-amplitude
/// sequence. `Bare` chains the propagators unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SlotPhase {
    Bare,
    FreeEvolution {
        /// Extra free-evolution time added to the pulse duration (s).
        padding: f64,
    },
}

impl Default for SlotPhase {
    fn default() -> Self {
        SlotPhase::FreeEvolution { padding: 0.2e-9 }
    }
}

/// Three-level fixed-frequency transmon
/// H = ω a†a + Δ/2 a†a†aa + λ Ω(t)(a† + a).
///
/// All rates are angular frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonModel {
    /// 0↔1 transition frequency. Only enters when counter-rotating terms are kept.
    pub qubit_frequency: f64,
    /// Anharmonicity Δ, strictly negative for a transmon.
    pub anharmonicity: f64,
    /// Control-line coupling rate λ.
    pub coupling: f64,
    #[serde(default)]
    pub slot_phase: SlotPhase,
}

impl Default for TransmonModel {
    fn default() -> Self {
        Self {
            qubit_frequency: 2.0 * PI * 5.0e9,
            anharmonicity: 2.0 * PI * -300.0e6,
            coupling: 2.0 * PI * 100.0e6,
            slot_phase: SlotPhase::default(),
        }
    }
}

impl TransmonModel {
    pub fn new(qubit_frequency: f64, anharmonicity: f64, coupling: f64) -> Result<Self, PulseError> {
        let model = Self { qubit_frequency, anharmonicity, coupling, slot_phase: SlotPhase::default() };
        model.validate()?;
        Ok(model)
    }

    /// Builds a model from frequencies given in MHz (converted to rad/s).
    pub fn from_mhz(anharmonicity_mhz: f64, coupling_mhz: f64) -> Result<Self, PulseError> {
        let base = Self::default();
        Self::new(base.qubit_frequency, 2.0 * PI * anharmonicity_mhz * 1e6, 2.0 * PI * coupling_mhz * 1e6)
    }

    pub fn with_slot_phase(mut self, slot_phase: SlotPhase) -> Self {
        self.slot_phase = slot_phase;
        self
    }

    pub fn validate(&self) -> Result<(), PulseError> {
        if !self.anharmonicity.is_finite() || self.anharmonicity >= 0.0 {
            return Err(PulseError::InvalidModel(format!("anharmonicity must be strictly negative, got {}", self.anharmonicity)));
        }
        if !self.coupling.is_finite() || self.coupling <= 0.0 {
            return Err(PulseError::InvalidModel(format!("coupling rate must be strictly positive, got {}", self.coupling)));
        }
        if !self.qubit_frequency.is_finite() || self.qubit_frequency <= 0.0 {
            return Err(PulseError::InvalidModel("qubit frequency must be positive".into()));
        }
        if let SlotPhase::FreeEvolution { padding } = self.slot_phase {
            if !padding.is_finite() || padding < 0.0 {
                return Err(PulseError::InvalidModel("slot padding must be non-negative".into()));
            }
        }
        Ok(())
    }

    /// The duration 10/|Δ| below which DRAG pulses are expected to leak strongly.
    pub fn leakage_threshold_duration(&self) -> f64 {
        10.0 / self.anharmonicity.abs()
    }
}
