//! Completely positive trace-preserving maps on qutrit density matrices.

use nalgebra::SMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{c, max_abs_diff, Mat3};
use crate::pulse::QutritUnitary;

pub const TRACE_TOLERANCE: f64 = 1e-10;

/// 9×9 matrix acting on column-stacked 3×3 density matrices.
pub type Superoperator = SMatrix<C64, 9, 9>;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("Kraus operators are not trace preserving (‖ΣK†K − I‖ = {0:e})")]
    NotTracePreserving(f64),
    #[error("channel has no Kraus operators")]
    Empty,
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid damping parameter: {0}")]
    InvalidParameter(String),
}

/// Qutrit channel Λ(ρ) = Σ_i K_i ρ K_i† stored in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct QutritChannel {
    kraus: Vec<Mat3>,
}

impl QutritChannel {
    pub fn new(kraus: Vec<Mat3>) -> Result<Self, ChannelError> {
        if kraus.is_empty() {
            return Err(ChannelError::Empty);
        }
        let channel = Self { kraus };
        let err = channel.trace_preservation_error();
        if err > TRACE_TOLERANCE {
            return Err(ChannelError::NotTracePreserving(err));
        }
        Ok(channel)
    }

    pub fn identity() -> Self {
        Self { kraus: vec![Mat3::identity()] }
    }

    pub fn kraus(&self) -> &[Mat3] {
        &self.kraus
    }

    pub fn trace_preservation_error(&self) -> f64 {
        let sum: Mat3 = self.kraus.iter().map(|k| k.adjoint() * k).sum();
        max_abs_diff(&sum, &Mat3::identity())
    }

    /// Λ(ρ) after checking that ρ is a density matrix.
    pub fn apply(&self, rho: &Mat3) -> Result<Mat3, ChannelError> {
        validate_density(rho)?;
        Ok(self.apply_unchecked(rho))
    }

    pub fn apply_unchecked(&self, rho: &Mat3) -> Mat3 {
        self.kraus.iter().map(|k| k * rho * k.adjoint()).sum()
    }

    /// Column-stacking representation: vec(KρK†) = (K̄ ⊗ K) vec(ρ).
    pub fn superoperator(&self) -> Superoperator {
        self.kraus.iter().map(|k| k.conjugate().kronecker(k)).fold(Superoperator::zeros(), |acc, s| acc + s)
    }

    /// Choi matrix Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|).
    pub fn choi(&self) -> Superoperator {
        let mut out = Superoperator::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let mut e = Mat3::zeros();
                e[(i, j)] = c(1.0);
                let image = self.apply_unchecked(&e);
                out.fixed_view_mut::<3, 3>(3 * i, 3 * j).copy_from(&image);
            }
        }
        out
    }

    /// Smallest eigenvalue of the Choi matrix; non-negative for a CP map.
    pub fn min_choi_eigenvalue(&self) -> f64 {
        self.choi().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Single-Kraus channel {U}.
pub fn unitary_channel(u: &QutritUnitary) -> QutritChannel {
    QutritChannel { kraus: vec![*u.matrix()] }
}

/// The channel `second ∘ first`, with Kraus set {K⁽²⁾_j K⁽¹⁾_i}.
pub fn compose(first: &QutritChannel, second: &QutritChannel) -> QutritChannel {
    let kraus = second.kraus.iter().flat_map(|b| first.kraus.iter().map(move |a| b * a)).collect();
    QutritChannel { kraus }
}

/// Gates applied in order. Kept as a list so that deep circuits never
/// multiply out their Kraus sets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelSequence {
    pub gates: Vec<QutritChannel>,
}

impl ChannelSequence {
    pub fn new(gates: Vec<QutritChannel>) -> Self {
        Self { gates }
    }

    pub fn push(&mut self, gate: QutritChannel) {
        self.gates.push(gate);
    }

    pub fn apply_unchecked(&self, rho: &Mat3) -> Mat3 {
        self.gates.iter().fold(*rho, |r, g| g.apply_unchecked(&r))
    }

    /// Single channel equivalent to the whole sequence.
    pub fn collapse(&self) -> QutritChannel {
        self.gates.iter().fold(QutritChannel::identity(), |acc, g| compose(&acc, g))
    }
}

/// Energy-relaxation times of the sequential |2⟩ → |1⟩ → |0⟩ decay. There is no direct 2 → 0 decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingParams {
    /// 1 → 0 relaxation time (s).
    pub t01: f64,
    /// 2 → 1 relaxation time (s).
    pub t12: f64,
}

impl Default for DampingParams {
    fn default() -> Self {
        Self { t01: 100e-6, t12: 73e-6 }
    }
}

impl DampingParams {
    /// Variant with the shorter 71 µs 2 → 1 relaxation time.
    pub fn short_t12() -> Self {
        Self { t12: 71e-6, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        for (name, v) in [("T01", self.t01), ("T12", self.t12)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(ChannelError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// (Γ01, Γ12) for a gate of duration τ, Γ = 1 − e^{−τ/T}.
    pub fn rates(&self, duration: f64) -> (f64, f64) {
        (-(-duration / self.t01).exp_m1(), -(-duration / self.t12).exp_m1())
    }
}

/// Amplitude damping accumulated over one gate of duration τ.
pub fn amplitude_damping(duration: f64, params: &DampingParams) -> Result<QutritChannel, ChannelError> {
    params.validate()?;
    if !duration.is_finite() || duration < 0.0 {
        return Err(ChannelError::InvalidParameter(format!("gate duration must be non-negative, got {duration}")));
    }
    let (g01, g12) = params.rates(duration);
    let g02 = 0.0;
    for g in [g01, g12] {
        if !(0.0..=1.0).contains(&g) {
            return Err(ChannelError::InvalidParameter(format!("decay probability {g} outside [0, 1]")));
        }
    }
    let mut k0 = Mat3::zeros();
    k0[(0, 0)] = c(1.0);
    k0[(1, 1)] = c((1.0 - g01).sqrt());
    k0[(2, 2)] = c((1.0 - g12 - g02).sqrt());
    let mut k1 = Mat3::zeros();
    k1[(0, 1)] = c(g01.sqrt());
    let mut k2 = Mat3::zeros();
    k2[(1, 2)] = c(g12.sqrt());
    let mut k3 = Mat3::zeros();
    k3[(0, 2)] = c(g02.sqrt());
    QutritChannel::new(vec![k0, k1, k2, k3])
}

/// Checks Hermiticity, unit trace and positivity within 1e-10.
pub fn validate_density(rho: &Mat3) -> Result<(), ChannelError> {
    let herm = max_abs_diff(rho, &rho.adjoint());
    if herm > TRACE_TOLERANCE {
        return Err(ChannelError::InvalidDensity(format!("not Hermitian (deviation {herm:e})")));
    }
    let tr = rho.trace();
    if (tr - c(1.0)).norm() > TRACE_TOLERANCE {
        return Err(ChannelError::InvalidDensity(format!("trace {tr} is not 1")));
    }
    let min_eig = rho.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < -TRACE_TOLERANCE {
        return Err(ChannelError::InvalidDensity(format!("negative eigenvalue {min_eig:e}")));
    }
    Ok(())
}

/// |ν⟩⟨ν|.
pub fn basis_projector(nu: usize) -> Mat3 {
    let mut p = Mat3::zeros();
    p[(nu, nu)] = c(1.0);
    p
}
