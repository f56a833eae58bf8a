//! Run records, CSV tables and plots written by the command-line front end.

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::svg::{Item, Plot};
use crate::clifford::ComposeTarget;
use crate::experiments::OrbitReport;
use crate::postprocess::LeakageTrace;
use crate::restless::ExecutionMode;

pub const SCHEMA_VERSION: u32 = 1;

pub const LEAKAGE_TRACE_HEADER: [&str; 3] = ["zeta", "p2_mean", "p2_sem"];
pub const ORBIT_HEADER: [&str; 5] = ["beta_prefactor", "r_c", "f_seq", "stderr", "mode"];

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub started_unix_s: f64,
    pub elapsed_s: f64,
}

/// Everything needed to reproduce one command invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord<C: Serialize, R: Serialize> {
    pub schema_version: u32,
    pub command: String,
    pub config: C,
    pub seed: u64,
    /// Git-style blob hash (SHA-256) of the command, config and seed.
    pub input_hash: String,
    pub result: R,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

/// SHA-256 over `blob <len>\0<json>` of the inputs, as git hashes objects.
pub fn input_hash<C: Serialize>(command: &str, config: &C, seed: u64) -> String {
    #[derive(Serialize)]
    struct Inputs<'a, C> {
        command: &'a str,
        config: &'a C,
        seed: u64,
    }
    let body = serde_json::to_vec(&Inputs { command, config, seed }).expect("config serializes");
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", body.len()));
    h.update(&body);
    hex::encode(h.finalize())
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

pub fn leakage_trace_csv(trace: &LeakageTrace) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv_writer();
    w.write_record(LEAKAGE_TRACE_HEADER)?;
    for (zeta, (p, s)) in trace.p2.iter().zip(&trace.sem).enumerate() {
        w.write_record([zeta.to_string(), p.to_string(), s.to_string()])?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

pub fn orbit_csv(report: &OrbitReport) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv_writer();
    w.write_record(ORBIT_HEADER)?;
    let mode = report.config.mode.to_string();
    for p in &report.points {
        w.write_record([p.beta_prefactor.to_string(), p.r_c.to_string(), p.f_seq.to_string(), p.stderr.to_string(), mode.clone()])?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// At most this many points of a trace go into its SVG.
const MAX_PLOT_POINTS: usize = 2000;

pub fn leakage_trace_svg(trace: &LeakageTrace, title: &str) -> String {
    let stride = trace.p2.len().div_ceil(MAX_PLOT_POINTS).max(1);
    let idx: Vec<usize> = (0..trace.p2.len()).step_by(stride).collect();
    let x: Vec<f64> = idx.iter().map(|&i| i as f64).collect();
    let mean: Vec<f64> = idx.iter().map(|&i| trace.p2[i]).collect();
    Plot {
        title: title.into(),
        x_label: "execution ζ".into(),
        y_label: "|2⟩ population".into(),
        y_range: Some((0.0, (trace.max() * 1.15).max(0.05))),
        items: vec![
            Item::Band {
                x: x.clone(),
                lower: idx.iter().map(|&i| trace.p2[i] - trace.sem[i]).collect(),
                upper: idx.iter().map(|&i| trace.p2[i] + trace.sem[i]).collect(),
                color: "#1f77b4".into(),
            },
            Item::Line { points: x.into_iter().zip(mean).collect(), color: "#1f77b4".into(), label: "mean ± SEM".into() },
            Item::HLine { y: 1.0 / 3.0, color: "#7f7f7f".into(), label: "1/3".into() },
        ],
        ..Default::default()
    }
    .render()
}

/// Settling values of 𝓕_seq for fully depolarized, saturated leakage.
pub fn settling_values(target: ComposeTarget) -> [(f64, &'static str); 2] {
    match target {
        ComposeTarget::Identity => [(1.0 / 3.0, "1/3 standard"), (5.0 / 9.0, "5/9 restless")],
        ComposeTarget::X => [(2.0 / 3.0, "2/3 standard"), (4.0 / 9.0, "4/9 restless")],
    }
}

pub fn orbit_svg(report: &OrbitReport, title: &str) -> String {
    let color = match report.config.mode {
        ExecutionMode::Restless => "#d62728",
        ExecutionMode::Standard => "#1f77b4",
    };
    let mut items = vec![Item::Scatter {
        points: report.points.iter().map(|p| (p.r_c, p.f_seq)).collect(),
        color: color.into(),
        label: report.config.mode.to_string(),
    }];
    items.extend(settling_values(report.config.compose_to).into_iter().map(|(y, label)| Item::HLine {
        y,
        color: "#7f7f7f".into(),
        label: label.into(),
    }));
    Plot {
        title: title.into(),
        x_label: "error per Clifford r_c".into(),
        y_label: "F_seq".into(),
        y_range: Some((0.0, 1.05)),
        items,
        ..Default::default()
    }
    .render()
}
