//! Restless single-qubit calibration on a simulated three-level transmon.
//!
//! Gates are DRAG pulses propagated under a qutrit Hamiltonian, optionally
//! followed by amplitude damping. Circuits collapse to 3×3 transition
//! matrices, and a Markov chain samples binary outcomes with or without
//! reset between shots. The postprocessing turns those streams into
//! state-change probabilities, leakage traces and fitted rotation errors.

pub mod channels;
pub mod cli;
pub mod clifford;
pub mod experiments;
pub mod linalg;
pub mod postprocess;
pub mod pulse;
pub mod restless;
