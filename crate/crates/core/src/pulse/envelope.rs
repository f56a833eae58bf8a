use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::fmt;

use super::PulseError;

/// Rotation axis of a single-qubit pulse in the qubit frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => f.write_str("x"),
            Axis::Y => f.write_str("y"),
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            other => Err(format!("unknown axis '{other}', expected x or y")),
        }
    }
}

/// Gaussian DRAG envelope with τ/σ fixed at 4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DragPulse {
    /// Pulse duration τ in seconds.
    pub duration: f64,
    /// Dimensionless peak amplitude of the in-phase quadrature (signed).
    pub amplitude: f64,
    /// DRAG coefficient β in seconds.
    pub beta: f64,
    pub axis: Axis,
    /// Rotation angle θ_t the pulse is meant to implement (rad).
    pub target_angle: f64,
    /// Intentional fractional rotation error ε; the pulse is designed for θ_t(1 + ε).
    pub rotation_error: f64,
}

pub const DURATION_OVER_SIGMA: f64 = 4.0;

impl DragPulse {
    pub fn new(duration: f64, amplitude: f64, beta: f64, axis: Axis, target_angle: f64) -> Result<Self, PulseError> {
        let pulse = Self { duration, amplitude, beta, axis, target_angle, rotation_error: 0.0 };
        pulse.validate()?;
        Ok(pulse)
    }

    pub fn with_rotation_error(mut self, epsilon: f64) -> Self {
        self.rotation_error = epsilon;
        self
    }

    pub fn sigma(&self) -> f64 {
        self.duration / DURATION_OVER_SIGMA
    }

    /// θ_t(1 + ε), the angle the pulse was calibrated against.
    pub fn designed_angle(&self) -> f64 {
        self.target_angle * (1.0 + self.rotation_error)
    }

    pub fn validate(&self) -> Result<(), PulseError> {
        if !self.duration.is_finite() || self.duration <= 0.0 {
            return Err(PulseError::InvalidPulse(format!("duration must be positive, got {}", self.duration)));
        }
        if !self.amplitude.is_finite() || !self.beta.is_finite() || !self.target_angle.is_finite() {
            return Err(PulseError::InvalidPulse("pulse parameters must be finite".into()));
        }
        Ok(())
    }

    /// Replaces β by `prefactor · β`, leaving every other parameter untouched.
    pub fn scale_beta(&self, prefactor: f64) -> Self {
        Self { beta: self.beta * prefactor, ..*self }
    }

    /// Unit-amplitude lifted Gaussian g(t) and its DRAG quadrature shape
    /// q(t) = −(t − τ/2)/σ² · g(t). Both vanish at t = 0 and t = τ.
    pub(crate) fn shape(&self, t: f64) -> (f64, f64) {
        let sigma = self.sigma();
        let center = 0.5 * self.duration;
        let edge = (-0.5 * (center / sigma).powi(2)).exp();
        let x = t - center;
        let gauss = (-0.5 * (x / sigma).powi(2)).exp();
        let lifted = (gauss - edge) / (1.0 - edge);
        (lifted, -x / (sigma * sigma) * lifted)
    }

    /// ∫₀^τ g(t) dt for the unit-amplitude lifted Gaussian.
    pub fn unit_area(&self) -> f64 {
        let sigma = self.sigma();
        let half = 0.5 * self.duration;
        let edge = (-0.5 * (half / sigma).powi(2)).exp();
        let gauss_area = sigma * (2.0 * std::f64::consts::PI).sqrt() * erf(half / (sigma * std::f64::consts::SQRT_2));
        (gauss_area - self.duration * edge) / (1.0 - edge)
    }
}

/// Complex drive value Ω(t).
///
/// For an x rotation the real part is the lifted Gaussian scaled by the
/// amplitude and the imaginary part is β times the Gaussian derivative
/// shape −(t − τ/2)/σ² · Ω_x(t). A y rotation multiplies the whole envelope by
/// i: the real part becomes −β·(derivative shape) and the imaginary part the
/// Gaussian.
pub fn drag_envelope(pulse: &DragPulse, t: f64) -> Result<C64, PulseError> {
    if !(0.0..=pulse.duration).contains(&t) {
        return Err(PulseError::Domain { t, duration: pulse.duration });
    }
    Ok(envelope_unchecked(pulse, t))
}

pub(crate) fn envelope_unchecked(pulse: &DragPulse, t: f64) -> C64 {
    let (g, q) = pulse.shape(t);
    let x = C64::new(pulse.amplitude * g, pulse.amplitude * pulse.beta * q);
    match pulse.axis {
        Axis::X => x,
        Axis::Y => x * C64::new(0.0, 1.0),
    }
}

// Maclaurin series; only evaluated at |x| = √2 for τ/σ = 4.
fn erf(x: f64) -> f64 {
    let mut sum = x;
    let mut term = x;
    let x2 = x * x;
    let mut n = 0.0;
    while term.abs() > 1e-17 * sum.abs() {
        n += 1.0;
        term *= -x2 / n;
        sum += term / (2.0 * n + 1.0);
        if n > 200.0 {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}
