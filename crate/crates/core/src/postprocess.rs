//! Observables and curve fits computed from shot streams.
//!
//! Every estimator pools all realizations passed to it.

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt, TerminationReason};
use nalgebra::storage::Owned;
use nalgebra::{DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::restless::ShotStream;

#[derive(Debug, Error, PartialEq)]
pub enum ProcessingError {
    #[error("outcome {value} at zeta {zeta} is not binary")]
    NonBinary { zeta: usize, value: u8 },
    #[error("stream has no basis-state record")]
    MissingBasisStates,
    #[error("no streams to process")]
    Empty,
    #[error("streams differ in shape")]
    ShapeMismatch,
}

#[derive(Debug, Error, Clone, PartialEq, Serialize)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("parameters are not identifiable: {0}")]
    Unidentifiable(String),
    #[error("fit did not converge: {0}")]
    NotConverged(String),
}

/// One estimated probability per circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityPoint {
    pub circuit_index: usize,
    pub p: f64,
    /// √(p(1−p)/shots).
    pub stderr: f64,
    pub shots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ProbabilitySeries {
    pub points: Vec<ProbabilityPoint>,
}

impl ProbabilitySeries {
    fn from_counts(hits: &[usize], shots: usize) -> Self {
        let points = hits
            .iter()
            .enumerate()
            .map(|(k, &h)| {
                let p = h as f64 / shots as f64;
                ProbabilityPoint { circuit_index: k, p, stderr: (p * (1.0 - p) / shots as f64).sqrt(), shots }
            })
            .collect();
        Self { points }
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.p).collect()
    }

    /// 1 − p per circuit; standard errors are unchanged.
    pub fn complement(&self) -> Self {
        let points = self.points.iter().map(|pt| ProbabilityPoint { p: 1.0 - pt.p, ..pt.clone() }).collect();
        Self { points }
    }

    pub fn mean(&self) -> f64 {
        self.points.iter().map(|p| p.p).sum::<f64>() / self.points.len().max(1) as f64
    }
}

/// What the outcome at ζ = 0 is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XorReference {
    /// The known '0' of the ground-state preparation.
    #[default]
    GroundState,
    /// Drop the ζ = 0 execution from the statistics.
    Skip,
}

fn check_streams(streams: &[ShotStream]) -> Result<(usize, usize), ProcessingError> {
    let first = streams.first().ok_or(ProcessingError::Empty)?;
    if streams.iter().any(|s| s.circuits != first.circuits || s.shots != first.shots || s.outcomes.len() != first.circuits * first.shots) {
        return Err(ProcessingError::ShapeMismatch);
    }
    Ok((first.circuits, first.shots))
}

fn check_binary(s: &ShotStream) -> Result<(), ProcessingError> {
    match s.outcomes.iter().position(|&m| m > 1) {
        Some(zeta) => Err(ProcessingError::NonBinary { zeta, value: s.outcomes[zeta] }),
        None => Ok(()),
    }
}

/// Per-circuit fraction of executions whose outcome differs from the
/// previous outcome in time order. Shot M_{K−1,j} precedes M_{0,j+1}.
pub fn xor_state_change_with(streams: &[ShotStream], reference: XorReference) -> Result<ProbabilitySeries, ProcessingError> {
    let (k_count, _) = check_streams(streams)?;
    let mut hits = vec![0usize; k_count];
    let mut counts = vec![0usize; k_count];
    for s in streams {
        check_binary(s)?;
        for (zeta, &m) in s.outcomes.iter().enumerate() {
            let prev = match (zeta, reference) {
                (0, XorReference::GroundState) => 0,
                (0, XorReference::Skip) => continue,
                _ => s.outcomes[zeta - 1],
            };
            let k = zeta % k_count;
            counts[k] += 1;
            hits[k] += usize::from(m != prev);
        }
    }
    let points = (0..k_count)
        .map(|k| {
            let n = counts[k].max(1);
            let p = hits[k] as f64 / n as f64;
            ProbabilityPoint { circuit_index: k, p, stderr: (p * (1.0 - p) / n as f64).sqrt(), shots: counts[k] }
        })
        .collect();
    Ok(ProbabilitySeries { points })
}

pub fn xor_state_change(streams: &[ShotStream]) -> Result<ProbabilitySeries, ProcessingError> {
    xor_state_change_with(streams, XorReference::default())
}

/// Bit-wise state-change flags of two consecutive outcome registers.
pub fn changed_bits(previous: &[u8], current: &[u8]) -> Vec<usize> {
    previous.iter().zip(current).enumerate().filter(|(_, (a, b))| a != b).map(|(i, _)| i).collect()
}

/// Pr[M_kj = M_{k−1,j}] per circuit.
pub fn restless_sequence_fidelity(streams: &[ShotStream]) -> Result<ProbabilitySeries, ProcessingError> {
    Ok(xor_state_change(streams)?.complement())
}

fn label_frequency(streams: &[ShotStream], label: u8) -> Result<ProbabilitySeries, ProcessingError> {
    let (k_count, shots) = check_streams(streams)?;
    let mut hits = vec![0usize; k_count];
    for s in streams {
        for (zeta, &m) in s.outcomes.iter().enumerate() {
            hits[zeta % k_count] += usize::from(m == label);
        }
    }
    Ok(ProbabilitySeries::from_counts(&hits, shots * streams.len()))
}

/// Fraction of '0' outcomes per circuit.
pub fn ground_state_probability(streams: &[ShotStream]) -> Result<ProbabilitySeries, ProcessingError> {
    label_frequency(streams, 0)
}

/// Sequence fidelity of circuits that compose to X: the state-change
/// probability for restless records and Pr['1'] for standard ones.
pub fn compose_to_x_sequence_fidelity(streams: &[ShotStream], restless: bool) -> Result<ProbabilitySeries, ProcessingError> {
    if restless {
        xor_state_change(streams)
    } else {
        for s in streams {
            check_binary(s)?;
        }
        label_frequency(streams, 1)
    }
}

/// Windowed |2⟩ population per execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageTrace {
    pub window: usize,
    pub realizations: usize,
    /// Mean over realizations of the trailing moving average of n₂.
    pub p2: Vec<f64>,
    /// Standard deviation of that mean across realizations.
    pub sem: Vec<f64>,
}

impl LeakageTrace {
    /// Mean of the trace over its last quarter.
    pub fn final_quartile_mean(&self) -> f64 {
        let start = self.p2.len() * 3 / 4;
        let tail = &self.p2[start..];
        tail.iter().sum::<f64>() / tail.len().max(1) as f64
    }

    pub fn max(&self) -> f64 {
        self.p2.iter().copied().fold(0.0, f64::max)
    }
}

/// Trailing moving average of `values` over `window` points; the first
/// window − 1 points average over what is available.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let w = window.max(1);
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for (i, &v) in values.iter().enumerate() {
        sum += v;
        if i >= w {
            sum -= values[i - w];
        }
        out.push(sum / (i + 1).min(w) as f64);
    }
    out
}

pub fn leakage_trace(streams: &[ShotStream], window: usize) -> Result<LeakageTrace, ProcessingError> {
    let (k_count, shots) = check_streams(streams)?;
    let len = k_count * shots;
    let mut sum = vec![0.0; len];
    let mut sum_sq = vec![0.0; len];
    for s in streams {
        let basis = s.basis_states.as_ref().ok_or(ProcessingError::MissingBasisStates)?;
        let indicator: Vec<f64> = basis.iter().map(|&b| f64::from(u8::from(b == 2))).collect();
        for (i, v) in moving_average(&indicator, window).into_iter().enumerate() {
            sum[i] += v;
            sum_sq[i] += v * v;
        }
    }
    let r = streams.len() as f64;
    let p2: Vec<f64> = sum.iter().map(|s| s / r).collect();
    let sem = if streams.len() > 1 {
        p2.iter().zip(&sum_sq).map(|(m, sq)| ((sq / r - m * m).max(0.0) * r / (r - 1.0) / r).sqrt()).collect()
    } else {
        vec![0.0; len]
    };
    Ok(LeakageTrace { window, realizations: streams.len(), p2, sem })
}

/// Parameter estimates with standard errors from the final Jacobian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub names: Vec<&'static str>,
    pub values: Vec<f64>,
    /// None when the fit has no residual degrees of freedom.
    pub stderr: Vec<Option<f64>>,
    /// Row-major, in the order of `names`.
    pub covariance: Option<Vec<Vec<f64>>>,
    pub residual_norm: f64,
    pub converged: bool,
}

impl FitResult {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| *n == name).map(|i| self.values[i])
    }

    pub fn stderr_of(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| *n == name).and_then(|i| self.stderr[i])
    }
}

type ModelFn = fn(&[f64], f64, &mut [f64]) -> f64;

struct CurveProblem<'a> {
    x: &'a [f64],
    y: &'a [f64],
    params: DVector<f64>,
    model: ModelFn,
}

impl LeastSquaresProblem<f64, Dyn, Dyn> for CurveProblem<'_> {
    type ParameterStorage = Owned<f64, Dyn>;
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;

    fn set_params(&mut self, p: &DVector<f64>) {
        self.params.copy_from(p);
    }

    fn params(&self) -> DVector<f64> {
        self.params.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let mut grad = vec![0.0; self.params.len()];
        Some(DVector::from_iterator(
            self.x.len(),
            self.x.iter().zip(self.y).map(|(&x, &y)| (self.model)(self.params.as_slice(), x, &mut grad) - y),
        ))
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        let n = self.params.len();
        let mut j = DMatrix::zeros(self.x.len(), n);
        let mut grad = vec![0.0; n];
        for (i, &x) in self.x.iter().enumerate() {
            (self.model)(self.params.as_slice(), x, &mut grad);
            for (c, g) in grad.iter().enumerate() {
                j[(i, c)] = *g;
            }
        }
        Some(j)
    }
}

/// (JᵀJ)⁻¹ scaled by the residual variance, with the matching standard errors.
fn parameter_covariance(jacobian: &DMatrix<f64>, rss: f64, dof: usize) -> (Option<Vec<Vec<f64>>>, Vec<Option<f64>>) {
    let n = jacobian.ncols();
    match (jacobian.transpose() * jacobian).try_inverse() {
        Some(inv) if dof > 0 => {
            let cov = inv * (rss / dof as f64);
            let stderr = (0..n).map(|i| Some(cov[(i, i)].max(0.0).sqrt())).collect();
            let rows = (0..n).map(|i| (0..n).map(|j| cov[(i, j)]).collect()).collect();
            (Some(rows), stderr)
        }
        _ => (None, vec![None; n]),
    }
}

fn least_squares(x: &[f64], y: &[f64], start: Vec<f64>, model: ModelFn, names: Vec<&'static str>) -> Result<FitResult, FitError> {
    let problem = CurveProblem { x, y, params: DVector::from_vec(start), model };
    let (problem, report) =
        LevenbergMarquardt::new().with_ftol(1e-15).with_xtol(1e-15).with_gtol(1e-15).with_patience(400).minimize(problem);
    let converged = report.termination.was_successful() || matches!(report.termination, TerminationReason::NoImprovementPossible(_));
    // Running out of evaluations still leaves the best point found; report it unconverged.
    if !converged && !matches!(report.termination, TerminationReason::LostPatience) {
        return Err(FitError::NotConverged(format!("{:?}", report.termination)));
    }
    let values: Vec<f64> = problem.params.iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(FitError::NotConverged("non-finite parameters".into()));
    }
    let residuals = problem.residuals().expect("residuals");
    let rss = residuals.norm_squared();
    let (covariance, stderr) = parameter_covariance(&problem.jacobian().expect("jacobian"), rss, x.len().saturating_sub(values.len()));
    Ok(FitResult { names, values, stderr, covariance, residual_norm: rss.sqrt(), converged })
}

/// Rotation error extracted from a fine-amplitude sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FineAmplitudeFit {
    pub delta_theta: f64,
    pub delta_theta_stderr: Option<f64>,
    /// δθ/θ_t, comparable with the rotation error ε.
    pub delta_theta_fraction: f64,
    pub a: f64,
    pub b: f64,
    pub fit: FitResult,
}

pub const FINE_AMPLITUDE_GRID: usize = 601;
pub const FINE_AMPLITUDE_RANGE: f64 = 0.3;

/// How the contrast a of the fine-amplitude model is constrained.
///
/// With ideal readout the signal swings between 0 and 1 − p (restless, leaked
/// shots never change) or p and 1 (standard, leaked shots read '1'), so
/// a = min(b, 1 − b). Seventeen circuits resolve little more than a·δθ when
/// δθ is small, and leaving a free costs roughly an order of magnitude in
/// the spread of δθ.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContrastModel {
    /// a = min(b, 1 − b).
    #[default]
    Tied,
    /// min(b, 1 − b)/2 ≤ a ≤ min(b, 1 − b). The floor stops small-a fits of
    /// shot noise at large δθ, the ceiling stops a → ∞ along a·δθ = const.
    Free,
}

impl std::str::FromStr for ContrastModel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tied" => Ok(ContrastModel::Tied),
            "free" => Ok(ContrastModel::Free),
            other => Err(format!("unknown contrast model '{other}', expected tied or free")),
        }
    }
}

/// Best (a, b, rss) at phase per gate φ.
/// cos(φn − π/2) = sin(φn), so the model is linear in a and b.
fn fine_amplitude_profile(x: &[f64], y: &[f64], phi: f64, contrast: ContrastModel) -> (f64, f64, f64) {
    let s: Vec<f64> = x.iter().map(|&n| (phi * n).sin()).collect();
    let len = x.len() as f64;
    let (ms, my) = (s.iter().sum::<f64>() / len, y.iter().sum::<f64>() / len);
    // b = ȳ − a·s̄ turns a ≤ b and a ≤ 1 − b into bounds on a alone.
    let upper = (my / (1.0 + ms)).min((1.0 - my) / (1.0 - ms)).max(0.0);
    let a = match contrast {
        ContrastModel::Tied => upper,
        ContrastModel::Free => {
            let lower = (0.5 * my.min(1.0 - my)).clamp(0.0, upper);
            let sss: f64 = s.iter().map(|v| (v - ms).powi(2)).sum();
            let ssy: f64 = s.iter().zip(y).map(|(v, w)| (v - ms) * (w - my)).sum();
            if sss > 1e-24 {
                (ssy / sss).clamp(lower, upper)
            } else {
                lower
            }
        }
    };
    let b = my - a * ms;
    let rss = s.iter().zip(y).map(|(v, w)| (a * v + b - w).powi(2)).sum();
    (a, b, rss)
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            (hi, d, fd) = (d, c, fc);
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            (lo, c, fc) = (c, d, fd);
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    (lo + hi) / 2.0
}

/// Fits a·cos[(θ_t + δθ)n − π/2] + b to the series, with n the circuit index.
///
/// a and b are solved for each candidate δθ under the tied contrast model;
/// δθ comes from a grid scan over ±FINE_AMPLITUDE_RANGE rad refined by
/// golden-section search.
pub fn fit_fine_amplitude(series: &ProbabilitySeries, target_angle: f64) -> Result<FineAmplitudeFit, FitError> {
    fit_fine_amplitude_with(series, target_angle, ContrastModel::Tied)
}

pub fn fit_fine_amplitude_with(
    series: &ProbabilitySeries,
    target_angle: f64,
    contrast: ContrastModel,
) -> Result<FineAmplitudeFit, FitError> {
    let x: Vec<f64> = series.points.iter().map(|p| p.circuit_index as f64).collect();
    let y = series.values();
    if x.len() < 4 {
        return Err(FitError::TooFewPoints { needed: 4, got: x.len() });
    }
    let rss_at = |delta: f64| fine_amplitude_profile(&x, &y, target_angle + delta, contrast).2;
    let step = 2.0 * FINE_AMPLITUDE_RANGE / (FINE_AMPLITUDE_GRID - 1) as f64;
    // δθ = 0 goes first and wins ties, e.g. flat data; rounding in sin(πn)
    // must not count as an improvement.
    const TIE: f64 = 1e-20;
    let mut best = (0.0, rss_at(0.0));
    for i in 0..FINE_AMPLITUDE_GRID {
        let delta = -FINE_AMPLITUDE_RANGE + step * i as f64;
        let r = rss_at(delta);
        if r < best.1 - TIE {
            best = (delta, r);
        }
    }
    let refined = golden_section(rss_at, best.0 - step, best.0 + step, 1e-13);
    let delta_theta = if rss_at(refined) < best.1 - TIE { refined } else { best.0 };
    if !delta_theta.is_finite() {
        return Err(FitError::NotConverged("non-finite rotation error".into()));
    }
    let phi = target_angle + delta_theta;
    let (a, b, rss) = fine_amplitude_profile(&x, &y, phi, contrast);
    let jacobian = DMatrix::from_fn(x.len(), 3, |i, c| match c {
        0 => (phi * x[i]).sin(),
        1 => a * x[i] * (phi * x[i]).cos(),
        _ => 1.0,
    });
    let values = vec![a, delta_theta, b];
    let (covariance, stderr) = parameter_covariance(&jacobian, rss, x.len().saturating_sub(values.len()));
    let fit = FitResult { names: vec!["a", "delta_theta", "b"], values, stderr, covariance, residual_norm: rss.sqrt(), converged: true };
    Ok(FineAmplitudeFit { delta_theta, delta_theta_stderr: fit.stderr[1], delta_theta_fraction: delta_theta / target_angle, a, b, fit })
}

fn rb_model(p: &[f64], m: f64, grad: &mut [f64]) -> f64 {
    let am = p[1].powf(m);
    grad[0] = am;
    grad[1] = if m == 0.0 { 0.0 } else { p[0] * m * p[1].powf(m - 1.0) };
    grad[2] = 1.0;
    p[0] * am + p[2]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RbFit {
    pub a: f64,
    pub alpha: f64,
    pub b: f64,
    pub fit: FitResult,
}

/// Fits F_seq(m) = Aα^m + B.
pub fn fit_rb_decay(depths: &[f64], values: &[f64]) -> Result<RbFit, FitError> {
    if depths.len() < 3 || depths.len() != values.len() {
        return Err(FitError::TooFewPoints { needed: 3, got: depths.len().min(values.len()) });
    }
    let spread = values.iter().copied().fold(f64::NEG_INFINITY, f64::max) - values.iter().copied().fold(f64::INFINITY, f64::min);
    if spread < 1e-12 {
        return Err(FitError::Unidentifiable("constant data cannot separate A from B".into()));
    }
    let mut order: Vec<usize> = (0..depths.len()).collect();
    order.sort_by(|&i, &j| depths[i].total_cmp(&depths[j]));
    let (first, last) = (values[order[0]], values[*order.last().unwrap()]);
    let b0 = last;
    let a0 = if (first - last).abs() > 1e-9 { first - last } else { spread };
    // Log-linear estimate of α from points that have not reached B₀.
    let pts: Vec<(f64, f64)> =
        order.iter().filter(|&&i| ((values[i] - b0) / a0) > 1e-3).map(|&i| (depths[i], ((values[i] - b0) / a0).ln())).collect();
    let alpha0 = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx > 0.0 {
            (sxy / sxx).exp()
        } else {
            0.9
        }
    } else {
        0.9
    };
    let alpha0 = alpha0.clamp(1e-3, 0.9999);
    let fit = least_squares(depths, values, vec![a0, alpha0, b0], rb_model, vec!["A", "alpha", "B"])?;
    let alpha = fit.values[1];
    if !(alpha > 0.0 && alpha <= 1.0 + 1e-9) {
        return Err(FitError::NotConverged(format!("alpha = {alpha} outside (0, 1]")));
    }
    Ok(RbFit { a: fit.values[0], alpha, b: fit.values[2], fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn stream(outcomes: Vec<u8>, circuits: usize) -> ShotStream {
        let shots = outcomes.len() / circuits;
        ShotStream { circuits, shots, outcomes, basis_states: None, seed: 0, realization: 0 }
    }

    #[test]
    fn alternating_stream_always_changes() {
        let s = stream(vec![1, 0, 1, 0, 1, 0], 1);
        assert_eq!(xor_state_change(&[s]).unwrap().points[0].p, 1.0);
    }

    #[test]
    fn constant_stream_never_changes() {
        let s = stream(vec![0; 8], 1);
        assert_eq!(xor_state_change(&[s]).unwrap().points[0].p, 0.0);
    }

    #[test]
    fn register_change_flags() {
        assert_eq!(changed_bits(&[0, 1, 0, 1], &[1, 1, 0, 0]), vec![0, 3]);
    }

    #[test]
    fn wrap_rule_links_last_circuit_to_next_shot() {
        // K = 2: ζ order is (k0,j0)=1, (k1,j0)=1, (k0,j1)=0, (k1,j1)=0.
        let s = stream(vec![1, 1, 0, 0], 2);
        let x = xor_state_change(std::slice::from_ref(&s)).unwrap();
        assert_eq!(x.points[0].p, 1.0);
        assert_eq!(x.points[1].p, 0.0);
        let skipped = xor_state_change_with(&[s], XorReference::Skip).unwrap();
        assert_eq!(skipped.points[0].shots, 1);
    }

    #[test]
    fn complementarity_is_exact() {
        let s = stream(vec![0, 1, 1, 0, 1, 1, 1, 0, 0], 3);
        let x = xor_state_change(std::slice::from_ref(&s)).unwrap();
        let f = restless_sequence_fidelity(&[s]).unwrap();
        for (a, b) in x.points.iter().zip(&f.points) {
            assert_eq!(a.p + b.p, 1.0);
        }
    }

    #[test]
    fn non_binary_outcomes_are_rejected() {
        let s = stream(vec![0, 2, 1], 1);
        assert!(matches!(xor_state_change(&[s]), Err(ProcessingError::NonBinary { zeta: 1, value: 2 })));
    }

    #[test]
    fn leakage_trace_requires_basis_record() {
        let s = stream(vec![0, 1], 1);
        assert_eq!(leakage_trace(&[s], 16), Err(ProcessingError::MissingBasisStates));
    }

    #[test]
    fn moving_average_of_constant() {
        let v = moving_average(&[0.25; 40], 16);
        assert!(v.iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn fine_amplitude_round_trip() {
        for delta in [0.05 * PI, 0.0, -0.1] {
            let points = (0..17)
                .map(|n| ProbabilityPoint {
                    circuit_index: n,
                    p: 0.5 * ((PI + delta) * n as f64 - FRAC_PI_2).cos() + 0.5,
                    stderr: 0.0,
                    shots: 1,
                })
                .collect();
            let series = ProbabilitySeries { points };
            for model in [ContrastModel::Tied, ContrastModel::Free] {
                let fit = fit_fine_amplitude_with(&series, PI, model).unwrap();
                assert!((fit.delta_theta - delta).abs() < 1e-6, "{model:?} {delta} -> {}", fit.delta_theta);
                assert!((fit.b - 0.5).abs() < 1e-6);
                // At δθ = 0 the data are flat and a is not identified.
                if delta != 0.0 {
                    assert!((fit.a - 0.5).abs() < 1e-6, "{model:?} {delta}: a={}", fit.a);
                }
            }
        }
    }

    #[test]
    fn small_rotation_error_with_reduced_contrast() {
        let delta = 0.01 * PI;
        let points = (0..17)
            .map(|n| ProbabilityPoint { circuit_index: n, p: 0.35 * ((PI + delta) * n as f64).sin() + 0.4, stderr: 0.0, shots: 1 })
            .collect();
        let fit = fit_fine_amplitude_with(&ProbabilitySeries { points }, PI, ContrastModel::Free).unwrap();
        assert!((fit.delta_theta_fraction - 0.01).abs() < 1e-9);
        assert!((fit.a - 0.35).abs() < 1e-9);
    }

    #[test]
    fn tied_contrast_follows_the_offset() {
        // Restless-like signal with a third of the shots leaked: a = b = 1/3.
        let delta = 0.02;
        let points = (0..17)
            .map(|n| ProbabilityPoint { circuit_index: n, p: (((PI + delta) * n as f64).sin() + 1.0) / 3.0, stderr: 0.0, shots: 1 })
            .collect();
        let fit = fit_fine_amplitude(&ProbabilitySeries { points }, PI).unwrap();
        assert!((fit.delta_theta - delta).abs() < 1e-9);
        assert!((fit.a - 1.0 / 3.0).abs() < 1e-9 && (fit.b - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn contrast_is_bounded() {
        // Linear growth in n would otherwise drive a → ∞ and δθ → 0.
        let points = (0..17)
            .map(|n| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                ProbabilityPoint { circuit_index: n, p: 0.5 + sign * 0.03 * n as f64, stderr: 0.0, shots: 1 }
            })
            .collect();
        let fit = fit_fine_amplitude_with(&ProbabilitySeries { points }, PI, ContrastModel::Free).unwrap();
        assert!(fit.a <= 0.5);
        assert!(fit.delta_theta > 0.05, "{}", fit.delta_theta);
    }

    #[test]
    fn rb_round_trip() {
        let m: Vec<f64> = (0..12).map(|i| 10.0 * i as f64).collect();
        let y: Vec<f64> = m.iter().map(|&m| 2.0 / 3.0 * 0.99f64.powf(m) + 1.0 / 3.0).collect();
        let fit = fit_rb_decay(&m, &y).unwrap();
        assert!((fit.a - 2.0 / 3.0).abs() < 1e-6);
        assert!((fit.alpha - 0.99).abs() < 1e-6);
        assert!((fit.b - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn rb_constant_data_is_unidentifiable() {
        let r = fit_rb_decay(&[1.0, 2.0, 3.0], &[0.5, 0.5, 0.5]);
        assert!(matches!(r, Err(FitError::Unidentifiable(_))));
    }
}
