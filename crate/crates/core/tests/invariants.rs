mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use restless_sim::channels::{amplitude_damping, basis_projector, compose, unitary_channel, DampingParams, TRACE_TOLERANCE};
use restless_sim::linalg::unitarity_error;
use restless_sim::pulse::{gate_unitary, propagate, Axis, DragPulse, PropagatorConfig, TransmonModel, UNITARITY_TOLERANCE};
use restless_sim::restless::{TransitionMatrix, STOCHASTIC_TOLERANCE};

fn pulse() -> impl Strategy<Value = DragPulse> {
    (2e-9f64..25e-9, 0.0f64..2.0, -2e-9f64..2e-9, any::<bool>(), 0.1f64..PI).prop_map(|(tau, a, beta, x, angle)| {
        let axis = if x { Axis::X } else { Axis::Y };
        DragPulse::new(tau, a * 10e-9 / tau, beta, axis, angle).unwrap()
    })
}

fn damping() -> impl Strategy<Value = (f64, DampingParams)> {
    (1e-9f64..100e-6, 1e-6f64..200e-6, 1e-6f64..200e-6).prop_map(|(tau, t01, t12)| (tau, DampingParams { t01, t12 }))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn propagators_are_unitary(p in pulse()) {
        let model = TransmonModel::default();
        let u = propagate(&model, &p, &PropagatorConfig::default()).unwrap();
        prop_assert!(unitarity_error(u.matrix()) < UNITARITY_TOLERANCE);
        prop_assert!(unitarity_error(gate_unitary(&model, &p, &u).matrix()) < UNITARITY_TOLERANCE);
    }

    #[test]
    fn damped_gates_are_cptp(p in pulse(), (tau, params) in damping()) {
        let model = TransmonModel::default();
        let u = gate_unitary(&model, &p, &propagate(&model, &p, &PropagatorConfig::default()).unwrap());
        let ch = compose(&unitary_channel(&u), &amplitude_damping(tau, &params).unwrap());
        prop_assert!(ch.trace_preservation_error() < TRACE_TOLERANCE);
        prop_assert!(ch.min_choi_eigenvalue() > -1e-10);
        for nu in 0..3 {
            let rho = ch.apply(&basis_projector(nu)).unwrap();
            prop_assert!((rho.trace().re - 1.0).abs() < TRACE_TOLERANCE);
        }
    }

    #[test]
    fn transition_matrices_are_column_stochastic(p in pulse(), (tau, params) in damping(), reps in 1usize..25) {
        let model = TransmonModel::default();
        let u = gate_unitary(&model, &p, &propagate(&model, &p, &PropagatorConfig::default()).unwrap());
        let ch = compose(&unitary_channel(&u), &amplitude_damping(tau, &params).unwrap());
        let t = TransitionMatrix::from_gate_sequence(&vec![ch; reps]);
        for col in t.matrix().column_iter() {
            prop_assert!((col.sum() - 1.0).abs() < STOCHASTIC_TOLERANCE);
            prop_assert!(col.min() > -STOCHASTIC_TOLERANCE);
        }
    }
}

#[test]
fn seeded_invariant_suite() {
    let inv = common::invariant_suite(100, 2);
    assert!(inv.pass(), "{inv:?}");
}
