//! The restless Markov-chain sampler on a hand-built two-circuit experiment,
//! compared with its exact per-execution marginals.
//!
//!     cargo run --release --example markov_sampler

use nalgebra::Matrix3;
use restless_sim::postprocess::xor_state_change;
use restless_sim::restless::{
    default_assignment, exact_marginals, run_realizations, CircuitStep, ExecutionMode, TransitionMatrix, DEFAULT_MARGINAL_BOUND,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // An X gate that leaks 5% from |0⟩ and |1⟩, and an identity.
    let x = TransitionMatrix::new(Matrix3::new(0.0, 0.95, 0.0, 0.95, 0.0, 0.02, 0.05, 0.05, 0.98))?;
    let circuits = |mode: ExecutionMode| {
        vec![CircuitStep::new(x, mode.post_measurement()), CircuitStep::new(TransitionMatrix::identity(), mode.post_measurement())]
    };
    for mode in [ExecutionMode::Restless, ExecutionMode::Standard] {
        let steps = circuits(mode);
        let shots = 200;
        let streams = run_realizations(&steps, shots, &default_assignment(), 42, 512, true)?;
        let exact = exact_marginals(&steps, shots, DEFAULT_MARGINAL_BOUND)?;
        let zeta = 2 * shots - 1;
        let empirical =
            streams.iter().filter(|s| s.basis_states.as_ref().expect("recorded")[zeta] == 2).count() as f64 / streams.len() as f64;
        println!("{mode}: P(|2⟩) at ζ = {zeta}: sampled {empirical:.3}, exact {:.3}", exact[zeta][2]);
        let xor = xor_state_change(&streams)?;
        println!("   state-change probability per circuit: {:?}", xor.values().iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
    }
    Ok(())
}
