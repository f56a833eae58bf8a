//! Small fixed-size complex matrix helpers for qubit and qutrit operators.

use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64 as C64;

/// 3×3 complex matrix acting on the qutrit basis {|0⟩, |1⟩, |2⟩}.
pub type Mat3 = Matrix3<C64>;
/// 2×2 complex matrix acting on the computational subspace.
pub type Mat2 = Matrix2<C64>;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Annihilation operator truncated to three levels.
pub fn lowering() -> Mat3 {
    let mut a = Mat3::zeros();
    a[(0, 1)] = c(1.0);
    a[(1, 2)] = c(2f64.sqrt());
    a
}

/// Embeds a qubit operator into the qutrit space, acting trivially on |2⟩.
pub fn embed(u: &Mat2) -> Mat3 {
    let mut out = Mat3::zeros();
    out.fixed_view_mut::<2, 2>(0, 0).copy_from(u);
    out[(2, 2)] = c(1.0);
    out
}

/// The computational-subspace block ℙUℙ†.
pub fn qubit_block(u: &Mat3) -> Mat2 {
    u.fixed_view::<2, 2>(0, 0).into_owned()
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(c(0.0), c(1.0), c(1.0), c(0.0))
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(c(0.0), -I, I, c(0.0))
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(c(1.0), c(0.0), c(0.0), c(-1.0))
}

/// exp(-i θ/2 σ) for a Pauli matrix σ.
pub fn pauli_rotation(sigma: &Mat2, theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    Mat2::identity() * c(co) - sigma * (I * s)
}

/// Largest entry-wise modulus of `a - b`.
pub fn max_abs_diff<const N: usize>(a: &nalgebra::SMatrix<C64, N, N>, b: &nalgebra::SMatrix<C64, N, N>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// ‖U†U − I‖ measured as the largest entry modulus.
pub fn unitarity_error<const N: usize>(u: &nalgebra::SMatrix<C64, N, N>) -> f64 {
    let id = nalgebra::SMatrix::<C64, N, N>::identity();
    max_abs_diff(&(u.adjoint() * u), &id)
}

/// Distance between two operators after removing the global phase that best aligns them.
pub fn phase_insensitive_distance<const N: usize>(a: &nalgebra::SMatrix<C64, N, N>, b: &nalgebra::SMatrix<C64, N, N>) -> f64 {
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0) };
    max_abs_diff(&(a * phase), b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rotation_by_pi_is_pauli_up_to_phase() {
        let rx = pauli_rotation(&pauli_x(), PI);
        assert!(phase_insensitive_distance(&rx, &pauli_x()) < 1e-12);
        let ry = pauli_rotation(&pauli_y(), PI);
        assert!(phase_insensitive_distance(&ry, &pauli_y()) < 1e-12);
    }

    #[test]
    fn embed_keeps_level_two() {
        let u = embed(&pauli_x());
        assert_eq!(u[(2, 2)], c(1.0));
        assert_eq!(u[(1, 0)], c(1.0));
        assert!(unitarity_error(&u) < 1e-15);
    }

    #[test]
    fn lowering_matrix_elements() {
        let a = lowering();
        let n = a.adjoint() * a;
        for k in 0..3 {
            assert!((n[(k, k)].re - k as f64).abs() < 1e-15);
        }
    }
}
