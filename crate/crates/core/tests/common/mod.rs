#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use restless_sim::channels::{amplitude_damping, compose, unitary_channel, DampingParams, QutritChannel, TRACE_TOLERANCE};
use restless_sim::clifford::{random_clifford_sequence, sequence_generators, ComposeTarget};
use restless_sim::experiments::fine_amplitude_transition_matrices;
use restless_sim::linalg::unitarity_error;
use restless_sim::pulse::{
    build_rotation_set, calibrate_pulse, gate_unitary, propagate, Axis, CalibrationOptions, DragPulse, PropagatorConfig, QutritUnitary,
    TransmonModel, UNITARITY_TOLERANCE,
};
use restless_sim::restless::{
    default_assignment, exact_marginals, run_realizations, CircuitStep, ExecutionMode, TransitionMatrix, DEFAULT_MARGINAL_BOUND,
    STOCHASTIC_TOLERANCE,
};

/// Two-sided tail probability of a normal deviate beyond 4σ.
pub const FOUR_SIGMA_TAIL: f64 = 6.334e-5;

/// Per-ζ comparison of sampled basis-state frequencies with the exact marginals.
#[derive(Debug, Clone, Copy)]
pub struct OracleCheck {
    pub checks: usize,
    /// Largest |f − p|/σ with σ = √(p(1 − p)/R).
    pub worst_z: f64,
    /// Entries whose exact binomial two-sided tail is below the 4σ tail.
    pub violations: usize,
}

impl OracleCheck {
    /// Exceedances a correct sampler stays at or below with probability 0.999.
    pub fn allowed(&self) -> usize {
        binomial_quantile(self.checks, FOUR_SIGMA_TAIL, 0.999)
    }

    pub fn pass(&self) -> bool {
        self.violations <= self.allowed()
    }
}

fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let ln_choose = |k: usize| -> f64 { (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum() };
    (0..=n)
        .map(|k| {
            if p == 0.0 || p == 1.0 {
                return if (k as f64 - n as f64 * p).abs() < 0.5 { 1.0 } else { 0.0 };
            }
            (ln_choose(k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
        })
        .collect()
}

/// Two-sided exact tail of observing k successes in n trials: 2·min(P(X ≤ k), P(X ≥ k)), capped at 1.
pub fn binomial_two_sided(k: usize, n: usize, p: f64) -> f64 {
    let pmf = binomial_pmf(n, p);
    let lower: f64 = pmf[..=k].iter().sum();
    let upper: f64 = pmf[k..].iter().sum();
    (2.0 * lower.min(upper)).min(1.0)
}

/// Smallest k with P(X ≤ k) ≥ level for X ~ Binomial(n, p).
pub fn binomial_quantile(n: usize, p: f64, level: f64) -> usize {
    let mut term = (1.0 - p).powi(n as i32);
    let mut acc = term;
    let mut k = 0;
    while acc < level && k < n {
        term *= (n - k) as f64 / (k + 1) as f64 * p / (1.0 - p);
        k += 1;
        acc += term;
    }
    k
}

pub fn oracle_check(steps: &[CircuitStep], shots: usize, seed: u64, realizations: u64) -> OracleCheck {
    let exact = exact_marginals(steps, shots, DEFAULT_MARGINAL_BOUND).expect("small experiment");
    let streams = run_realizations(steps, shots, &default_assignment(), seed, realizations, true).expect("valid circuits");
    let r = realizations as usize;
    let mut counts = vec![[0usize; 3]; exact.len()];
    for s in &streams {
        for (zeta, &phi) in s.basis_states.as_ref().expect("recorded").iter().enumerate() {
            counts[zeta][phi as usize] += 1;
        }
    }
    let mut out = OracleCheck { checks: 0, worst_z: 0.0, violations: 0 };
    for (c, p) in counts.iter().zip(&exact) {
        for nu in 0..3 {
            let p = p[nu].clamp(0.0, 1.0);
            let f = c[nu] as f64 / r as f64;
            let sigma = (p * (1.0 - p) / r as f64).sqrt();
            let z = if sigma > 0.0 {
                (f - p).abs() / sigma
            } else if (f - p).abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            };
            out.checks += 1;
            out.worst_z = out.worst_z.max(z);
            if z > 4.0 && binomial_two_sided(c[nu], r, p) < FOUR_SIGMA_TAIL {
                out.violations += 1;
            }
        }
    }
    out
}

pub fn x_gate(tau: f64) -> QutritUnitary {
    let model = TransmonModel::default();
    let p = calibrate_pulse(&model, tau, PI, Axis::X, 0.0, &CalibrationOptions::default()).expect("calibrates");
    gate_unitary(&model, &p.pulse, &p.unitary)
}

pub fn fine_amplitude_steps(tau: f64, mode: ExecutionMode, damping: bool) -> Vec<CircuitStep> {
    let params = DampingParams::default();
    fine_amplitude_transition_matrices(&x_gate(tau), tau, 17, damping.then_some(&params))
        .expect("circuits")
        .into_iter()
        .map(|t| CircuitStep::new(t, mode.post_measurement()))
        .collect()
}

/// Random compose-to-identity Clifford sequences of β-scaled rotations.
pub fn orbit_steps(tau: f64, prefactor: f64, depth: usize, sequences: usize, mode: ExecutionMode, seed: u64) -> Vec<CircuitStep> {
    let model = TransmonModel::default();
    let set = build_rotation_set(&model, tau, &CalibrationOptions::default()).expect("rotation set");
    let gates: Vec<QutritChannel> = set
        .pulses()
        .iter()
        .map(|cal| {
            let pulse = cal.pulse.scale_beta(prefactor);
            let u = propagate(&model, &pulse, &PropagatorConfig::default()).expect("propagates");
            unitary_channel(&gate_unitary(&model, &pulse, &u))
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..sequences)
        .map(|_| {
            let word = sequence_generators(&random_clifford_sequence(depth, ComposeTarget::Identity, &mut rng));
            let channels: Vec<QutritChannel> = word.iter().map(|g| gates[g.index()].clone()).collect();
            CircuitStep::new(TransitionMatrix::from_gate_sequence(&channels), mode.post_measurement())
        })
        .collect()
}

/// Worst deviations found by the invariant suites.
#[derive(Debug, Clone, Copy, Default)]
pub struct Invariants {
    pub unitarity: f64,
    pub trace_preservation: f64,
    pub min_choi_eigenvalue: f64,
    pub column_sum: f64,
    pub min_entry: f64,
}

impl Invariants {
    pub fn pass(&self) -> bool {
        self.unitarity < UNITARITY_TOLERANCE
            && self.trace_preservation < TRACE_TOLERANCE
            && self.min_choi_eigenvalue > -1e-10
            && self.column_sum < STOCHASTIC_TOLERANCE
            && self.min_entry > -STOCHASTIC_TOLERANCE
    }
}

pub fn random_pulse(rng: &mut impl Rng) -> DragPulse {
    let axis = if rng.random_bool(0.5) { Axis::X } else { Axis::Y };
    let tau = rng.random_range(2e-9..25e-9);
    DragPulse::new(tau, rng.random_range(0.0..2.0) * 10e-9 / tau, rng.random_range(-2e-9..2e-9), axis, PI).expect("valid pulse")
}

pub fn random_damping(rng: &mut impl Rng) -> DampingParams {
    DampingParams { t01: rng.random_range(1e-6..200e-6), t12: rng.random_range(1e-6..200e-6) }
}

/// Propagates random pulses, builds random damped gate sequences and checks
/// unitarity, CPTP and column stochasticity.
pub fn invariant_suite(samples: usize, seed: u64) -> Invariants {
    let model = TransmonModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inv = Invariants { min_choi_eigenvalue: f64::INFINITY, min_entry: f64::INFINITY, ..Default::default() };
    for _ in 0..samples {
        let pulse = random_pulse(&mut rng);
        let u = propagate(&model, &pulse, &PropagatorConfig::default()).expect("propagates");
        let gate = gate_unitary(&model, &pulse, &u);
        inv.unitarity = inv.unitarity.max(unitarity_error(u.matrix())).max(unitarity_error(gate.matrix()));
        let damped =
            compose(&unitary_channel(&gate), &amplitude_damping(rng.random_range(1e-9..50e-6), &random_damping(&mut rng)).expect("valid"));
        inv.trace_preservation = inv.trace_preservation.max(damped.trace_preservation_error());
        inv.min_choi_eigenvalue = inv.min_choi_eigenvalue.min(damped.min_choi_eigenvalue());
        let seq = vec![damped.clone(); rng.random_range(1..20)];
        let t: Matrix3<f64> = *TransitionMatrix::from_gate_sequence(&seq).matrix();
        for col in t.column_iter() {
            inv.column_sum = inv.column_sum.max((col.sum() - 1.0).abs());
            inv.min_entry = inv.min_entry.min(col.min());
        }
    }
    inv
}
