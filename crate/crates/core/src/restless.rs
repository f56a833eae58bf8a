//! Transition matrices and the restless Markov-chain sampler.
//!
//! Execution ζ = jK + k runs circuit k for shot j. The input state of each
//! execution is the projected post-measurement state of the previous one;
//! the very first input is |0⟩.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::{basis_projector, QutritChannel};

pub const STOCHASTIC_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MARGINAL_BOUND: usize = 100_000;

#[derive(Debug, Error, PartialEq)]
pub enum RestlessError {
    #[error("{what} is not column-stochastic: {detail}")]
    NotStochastic { what: &'static str, detail: String },
    #[error("at least one circuit and one shot are required")]
    Empty,
    #[error("K·N = {size} exceeds the exact-marginal bound {bound}")]
    TooLarge { size: usize, bound: usize },
}

fn check_columns(what: &'static str, columns: impl Iterator<Item = Vec<f64>>) -> Result<(), RestlessError> {
    for (nu, col) in columns.enumerate() {
        if let Some(v) = col.iter().find(|v| !(-STOCHASTIC_TOLERANCE..=1.0 + STOCHASTIC_TOLERANCE).contains(*v)) {
            return Err(RestlessError::NotStochastic { what, detail: format!("entry {v} in column {nu}") });
        }
        let sum: f64 = col.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
            return Err(RestlessError::NotStochastic { what, detail: format!("column {nu} sums to {sum}") });
        }
    }
    Ok(())
}

fn columns3(m: &Matrix3<f64>) -> impl Iterator<Item = Vec<f64>> + '_ {
    m.column_iter().map(|c| c.iter().copied().collect())
}

/// [T]_{μν} = Pr[measure |μ⟩ | circuit input |ν⟩].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix(Matrix3<f64>);

impl TransitionMatrix {
    pub fn new(m: Matrix3<f64>) -> Result<Self, RestlessError> {
        check_columns("transition matrix", columns3(&m))?;
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// [T]_{μν} = ⟨μ|C(|ν⟩⟨ν|)|μ⟩ for a single circuit channel.
    pub fn from_channel(circuit: &QutritChannel) -> Self {
        Self::from_gate_sequence(std::slice::from_ref(circuit))
    }

    /// Transition matrix of the gates applied in order, found by pushing each
    /// basis state through the sequence instead of composing Kraus sets.
    pub fn from_gate_sequence(gates: &[QutritChannel]) -> Self {
        let mut m = Matrix3::zeros();
        for nu in 0..3 {
            let rho = gates.iter().fold(basis_projector(nu), |rho, g| g.apply_unchecked(&rho));
            for mu in 0..3 {
                m[(mu, nu)] = rho[(mu, mu)].re.max(0.0);
            }
            let sum: f64 = m.column(nu).sum();
            m.column_mut(nu).scale_mut(1.0 / sum);
        }
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }
}

/// Classification probabilities of each basis state, one row per outcome label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentMatrix {
    rows: Vec<[f64; 3]>,
}

impl AssignmentMatrix {
    pub fn new(rows: Vec<[f64; 3]>) -> Result<Self, RestlessError> {
        if rows.is_empty() || rows.len() > 3 {
            return Err(RestlessError::NotStochastic { what: "assignment matrix", detail: "needs 1 to 3 outcome labels".into() });
        }
        check_columns("assignment matrix", (0..3).map(|nu| rows.iter().map(|r| r[nu]).collect()))?;
        Ok(Self { rows })
    }

    pub fn labels(&self) -> usize {
        self.rows.len()
    }

    /// Column ν as an outcome distribution.
    pub fn column(&self, nu: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (m, row) in self.rows.iter().enumerate() {
            out[m] = row[nu];
        }
        out
    }

    pub fn apply(&self, v: &[f64; 3]) -> Vec<f64> {
        self.rows.iter().map(|r| r[0] * v[0] + r[1] * v[1] + r[2] * v[2]).collect()
    }

    pub fn is_binary(&self) -> bool {
        self.rows.len() == 2
    }
}

/// Two-outcome readout that classifies |2⟩ as '1'.
pub fn default_assignment() -> AssignmentMatrix {
    AssignmentMatrix { rows: vec![[1.0, 0.0, 0.0], [0.0, 1.0, 1.0]] }
}

/// Perfect three-outcome readout.
pub fn qutrit_assignment() -> AssignmentMatrix {
    AssignmentMatrix { rows: vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] }
}

/// Maps the projected state of one execution to the input of the next.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostMeasurementMatrix(Matrix3<f64>);

impl PostMeasurementMatrix {
    pub fn new(m: Matrix3<f64>) -> Result<Self, RestlessError> {
        check_columns("post-measurement matrix", columns3(&m))?;
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }
}

/// Ideal active reset: every state goes to |0⟩.
pub fn standard_reset_matrix() -> PostMeasurementMatrix {
    PostMeasurementMatrix(Matrix3::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))
}

/// No reset: the measured state is the next input.
pub fn restless_identity_matrix() -> PostMeasurementMatrix {
    PostMeasurementMatrix(Matrix3::identity())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecutionMode {
    Restless,
    Standard,
}

impl ExecutionMode {
    pub fn post_measurement(self) -> PostMeasurementMatrix {
        match self {
            ExecutionMode::Restless => restless_identity_matrix(),
            ExecutionMode::Standard => standard_reset_matrix(),
        }
    }
}

impl std::fmt::Display for ExecutionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExecutionMode::Restless => "restless",
            ExecutionMode::Standard => "standard",
        })
    }
}

impl std::str::FromStr for ExecutionMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "restless" => Ok(ExecutionMode::Restless),
            "standard" => Ok(ExecutionMode::Standard),
            other => Err(format!("unknown mode '{other}', expected restless or standard")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitStep {
    pub transition: TransitionMatrix,
    pub post: PostMeasurementMatrix,
}

impl CircuitStep {
    pub fn new(transition: TransitionMatrix, post: PostMeasurementMatrix) -> Self {
        Self { transition, post }
    }
}

/// Time-ordered outcomes of one realization, indexed by ζ = jK + k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotStream {
    pub circuits: usize,
    pub shots: usize,
    pub outcomes: Vec<u8>,
    /// Projected basis state φ of each execution, when recorded.
    pub basis_states: Option<Vec<u8>>,
    pub seed: u64,
    pub realization: u64,
}

impl ShotStream {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn zeta(&self, k: usize, j: usize) -> usize {
        j * self.circuits + k
    }

    pub fn outcome(&self, k: usize, j: usize) -> u8 {
        self.outcomes[self.zeta(k, j)]
    }

    /// Outcomes of circuit k in shot order.
    pub fn circuit_outcomes(&self, k: usize) -> impl Iterator<Item = u8> + '_ {
        (0..self.shots).map(move |j| self.outcome(k, j))
    }
}

/// Random stream of one realization. Each execution consumes exactly three
/// uniform draws, so execution ζ starts at word 6ζ of the ChaCha stream.
pub fn realization_rng(seed: u64, realization: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization);
    rng
}

/// Inverse-CDF draw from a probability vector.
fn sample(p: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &pi) in p.iter().enumerate() {
        if pi <= 0.0 {
            continue;
        }
        acc += pi;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

fn validate_circuits(circuits: &[CircuitStep], shots: usize) -> Result<(), RestlessError> {
    if circuits.is_empty() || shots == 0 {
        return Err(RestlessError::Empty);
    }
    for c in circuits {
        check_columns("transition matrix", columns3(c.transition.matrix()))?;
        check_columns("post-measurement matrix", columns3(c.post.matrix()))?;
    }
    Ok(())
}

/// One realization of the restless simulation of K circuits with N shots each.
pub fn run(
    circuits: &[CircuitStep],
    shots: usize,
    assignment: &AssignmentMatrix,
    seed: u64,
    realization: u64,
    record_basis: bool,
) -> Result<ShotStream, RestlessError> {
    validate_circuits(circuits, shots)?;
    let k_count = circuits.len();
    let total = k_count * shots;
    let mut rng = realization_rng(seed, realization);
    let mut outcomes = Vec::with_capacity(total);
    let mut basis = record_basis.then(|| Vec::with_capacity(total));
    let mut input = 0usize;
    for zeta in 0..total {
        let step = &circuits[zeta % k_count];
        let (u_phi, u_m, u_post): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
        let o = step.transition.matrix().column(input);
        let phi = sample(o.as_slice(), u_phi);
        let m = sample(&assignment.column(phi)[..assignment.labels()], u_m);
        input = sample(step.post.matrix().column(phi).as_slice(), u_post);
        outcomes.push(m as u8);
        if let Some(b) = basis.as_mut() {
            b.push(phi as u8);
        }
    }
    Ok(ShotStream { circuits: k_count, shots, outcomes, basis_states: basis, seed, realization })
}

/// Realizations 0..R in parallel; realization r uses stream r of `seed`.
pub fn run_realizations(
    circuits: &[CircuitStep],
    shots: usize,
    assignment: &AssignmentMatrix,
    seed: u64,
    realizations: u64,
    record_basis: bool,
) -> Result<Vec<ShotStream>, RestlessError> {
    validate_circuits(circuits, shots)?;
    (0..realizations).into_par_iter().map(|r| run(circuits, shots, assignment, seed, r, record_basis)).collect()
}

/// Exact per-ζ distribution of the projected state φ_ζ.
pub fn exact_marginals(circuits: &[CircuitStep], shots: usize, bound: usize) -> Result<Vec<[f64; 3]>, RestlessError> {
    validate_circuits(circuits, shots)?;
    let size = circuits.len() * shots;
    if size > bound {
        return Err(RestlessError::TooLarge { size, bound });
    }
    let mut d = Vector3::new(1.0, 0.0, 0.0);
    let mut out = Vec::with_capacity(size);
    for zeta in 0..size {
        let step = &circuits[zeta % circuits.len()];
        let o = step.transition.matrix() * d;
        out.push([o[0], o[1], o[2]]);
        d = step.post.matrix() * o;
    }
    Ok(out)
}
