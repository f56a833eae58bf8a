//! Command-line front end.
//!
//! Values come from flags, then an optional TOML file given with `--config`,
//! then built-in defaults. The seed falls back to `RESTLESS_SEED` when neither
//! the flags nor the file set it. Durations are given in ns, relaxation times
//! in µs and frequencies in MHz.
//!
//! Exit codes: 0 success, 1 runtime or fit failure, 2 usage or validation error.

pub mod output;
pub mod svg;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use crate::channels::{ChannelError, DampingParams};
use crate::clifford::ComposeTarget;
use crate::experiments::{
    default_beta_grid, iterative_calibration, leakage_buildup_experiment, run_fine_amplitude, run_orbit, ExperimentError,
    FineAmplitudeConfig, LeakageBuildupConfig, OrbitConfig,
};
use crate::postprocess::ContrastModel;
use crate::pulse::{calibrate_pulse, Axis, CalibrationOptions, PulseError, TransmonModel};
use crate::restless::ExecutionMode;
use output::{RunRecord, Timing};

pub const SEED_ENV: &str = "RESTLESS_SEED";

#[derive(Debug, Parser)]
#[command(name = "restless", version, about = "Restless calibration experiments on a simulated three-level transmon")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML file with default values for any flag (keys use underscores).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Master seed; falls back to RESTLESS_SEED, then 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for the run record and any CSV/SVG output. Without it the
    /// run record is printed to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Leave timing out of the run record so repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,
    /// Anharmonicity Δ/2π in MHz.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub anharmonicity_mhz: Option<f64>,
    /// Drive coupling λ/2π in MHz.
    #[arg(long, global = true)]
    pub drive_mhz: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design a DRAG pulse and report its parameters, fidelity and leakage.
    Calibrate(CalibrateArgs),
    /// |2⟩ population build-up under restless execution (CSV + SVG).
    LeakageTrace(LeakageArgs),
    /// Measure the rotation error of an X pulse with the fine-amplitude sequence.
    FineAmp(FineAmpArgs),
    /// Repeat fine-amplitude measurements and amplitude updates.
    Iterate(IterateArgs),
    /// ORBIT cost function over a grid of DRAG prefactors (CSV + SVG).
    Orbit(OrbitArgs),
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub tau_ns: Option<f64>,
    /// Intentional fractional rotation error ε.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub axis: Option<Axis>,
    /// Target rotation angle in degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub angle_deg: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DampingArgs {
    /// Follow every leaky gate with amplitude damping.
    #[arg(long, overrides_with = "no_damping")]
    pub damping: bool,
    #[arg(long)]
    pub no_damping: bool,
    #[arg(long)]
    pub t01_us: Option<f64>,
    #[arg(long)]
    pub t12_us: Option<f64>,
}

impl DampingArgs {
    fn flag(&self) -> Option<bool> {
        match (self.damping, self.no_damping) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        }
    }
}

#[derive(Debug, Args)]
pub struct LeakageArgs {
    #[arg(long)]
    pub tau_ns: Option<f64>,
    #[arg(long)]
    pub realizations: Option<u64>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub circuits: Option<usize>,
    #[arg(long)]
    pub shots: Option<usize>,
    #[command(flatten)]
    pub damping: DampingArgs,
}

#[derive(Debug, Args)]
pub struct FineAmpArgs {
    #[arg(long)]
    pub tau_ns: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub mode: Option<ExecutionMode>,
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long)]
    pub realizations: Option<u64>,
    #[arg(long)]
    pub circuits: Option<usize>,
    /// Contrast model of the fit: tied (a = min(b, 1 − b)) or free.
    #[arg(long)]
    pub contrast: Option<ContrastModel>,
    #[command(flatten)]
    pub damping: DampingArgs,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[command(flatten)]
    pub fine: FineAmpArgs,
    #[arg(long)]
    pub iterations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[arg(long)]
    pub tau_ns: Option<f64>,
    /// Random Cliffords per sequence before the recovery element.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub sequences: Option<usize>,
    #[arg(long)]
    pub mode: Option<ExecutionMode>,
    #[arg(long)]
    pub compose_to: Option<ComposeTarget>,
    /// DRAG prefactors as start:stop:count or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub beta_grid: Option<String>,
    #[arg(long)]
    pub shots: Option<usize>,
    #[command(flatten)]
    pub damping: DampingArgs,
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub anharmonicity_mhz: Option<f64>,
    pub drive_mhz: Option<f64>,
    pub tau_ns: Option<f64>,
    pub epsilon: Option<f64>,
    pub axis: Option<Axis>,
    pub angle_deg: Option<f64>,
    pub realizations: Option<u64>,
    pub window: Option<usize>,
    pub circuits: Option<usize>,
    pub shots: Option<usize>,
    pub damping: Option<bool>,
    pub t01_us: Option<f64>,
    pub t12_us: Option<f64>,
    pub mode: Option<ExecutionMode>,
    pub contrast: Option<ContrastModel>,
    pub iterations: Option<usize>,
    pub depth: Option<usize>,
    pub sequences: Option<usize>,
    pub compose_to: Option<ComposeTarget>,
    pub beta_grid: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Experiment(e) if is_validation(e) => 2,
            _ => 1,
        }
    }
}

fn is_validation(e: &ExperimentError) -> bool {
    matches!(
        e,
        ExperimentError::InvalidConfig(_)
            | ExperimentError::Pulse(PulseError::InvalidModel(_) | PulseError::InvalidPulse(_))
            | ExperimentError::Channel(ChannelError::InvalidParameter(_))
    )
}

impl From<PulseError> for CliError {
    fn from(e: PulseError) -> Self {
        CliError::Experiment(e.into())
    }
}

/// Parses "start:stop:count" or "a,b,c".
pub fn parse_beta_grid(s: &str) -> Result<Vec<f64>, String> {
    let bad = |_| format!("cannot parse beta grid '{s}'");
    let parts: Vec<&str> = s.split(':').collect();
    let grid = if parts.len() == 3 {
        let (a, b) = (parts[0].trim().parse::<f64>().map_err(bad)?, parts[1].trim().parse::<f64>().map_err(bad)?);
        let n: usize = parts[2].trim().parse().map_err(|_| format!("cannot parse beta grid '{s}'"))?;
        match n {
            0 => vec![],
            1 => vec![a],
            _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
        }
    } else {
        s.split(',').map(|v| v.trim().parse::<f64>().map_err(bad)).collect::<Result<_, _>>()?
    };
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(format!("beta grid '{s}' must hold at least one finite value"));
    }
    Ok(grid)
}

struct Resolved<'a> {
    global: &'a GlobalArgs,
    file: FileConfig,
}

impl Resolved<'_> {
    fn seed(&self) -> Result<u64, CliError> {
        if let Some(s) = self.global.seed.or(self.file.seed) {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
            Err(_) => Ok(0),
        }
    }

    fn model(&self) -> Result<TransmonModel, CliError> {
        let base = TransmonModel::default();
        let delta = self.global.anharmonicity_mhz.or(self.file.anharmonicity_mhz).unwrap_or(base.anharmonicity / (2e6 * PI));
        let drive = self.global.drive_mhz.or(self.file.drive_mhz).unwrap_or(base.coupling / (2e6 * PI));
        TransmonModel::from_mhz(delta, drive).map_err(|e| CliError::Usage(e.to_string()))
    }

    fn duration(&self, tau_ns: Option<f64>) -> Result<f64, CliError> {
        let tau = tau_ns.or(self.file.tau_ns).unwrap_or(10.0);
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(CliError::Usage(format!("--tau-ns must be positive, got {tau}")));
        }
        Ok(tau / 1e9)
    }

    fn damping(&self, args: &DampingArgs) -> Result<(bool, DampingParams), CliError> {
        let on = args.flag().or(self.file.damping).unwrap_or(false);
        let base = DampingParams::default();
        let params = DampingParams {
            t01: args.t01_us.or(self.file.t01_us).map_or(base.t01, |t| t / 1e6),
            t12: args.t12_us.or(self.file.t12_us).map_or(base.t12, |t| t / 1e6),
        };
        params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok((on, params))
    }

    fn fine_amplitude(&self, a: &FineAmpArgs) -> Result<FineAmplitudeConfig, CliError> {
        let d = FineAmplitudeConfig::default();
        let (damping, damping_params) = self.damping(&a.damping)?;
        let cfg = FineAmplitudeConfig {
            duration: self.duration(a.tau_ns)?,
            rotation_error: a.epsilon.or(self.file.epsilon).unwrap_or(d.rotation_error),
            mode: a.mode.or(self.file.mode).unwrap_or(d.mode),
            damping,
            damping_params,
            circuits: a.circuits.or(self.file.circuits).unwrap_or(d.circuits),
            shots: a.shots.or(self.file.shots).unwrap_or(d.shots),
            realizations: a.realizations.or(self.file.realizations).unwrap_or(d.realizations),
            seed: self.seed()?,
            contrast: a.contrast.or(self.file.contrast).unwrap_or(d.contrast),
            model: self.model()?,
            calibration: CalibrationOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Serialize)]
struct CalibrateConfig {
    duration: f64,
    rotation_error: f64,
    axis: Axis,
    target_angle: f64,
    model: TransmonModel,
    calibration: CalibrationOptions,
}

#[derive(Debug, Serialize)]
struct CalibrateResult {
    amplitude: f64,
    beta: f64,
    beta_ns: f64,
    duration_ns: f64,
    process_fidelity: f64,
    infidelity: f64,
    leakage: f64,
}

#[derive(Debug, Serialize)]
struct LeakageResult {
    gate_leakage: f64,
    final_quartile_mean: f64,
    max: f64,
    executions: usize,
    run_seed: u64,
}

/// Writes one command's artifacts, either into `--out` or to stdout.
struct Sink<'a> {
    dir: Option<&'a Path>,
    command: &'static str,
    timing: Option<(f64, Instant)>,
}

impl Sink<'_> {
    fn file(&self, ext: &str, bytes: &[u8]) -> Result<(), CliError> {
        if let Some(dir) = self.dir {
            let path = dir.join(format!("{}.{ext}", self.command));
            std::fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }

    fn record<C: Serialize, R: Serialize>(&self, config: &C, seed: u64, result: R, stdout: &mut dyn Write) -> Result<(), CliError> {
        let record = RunRecord {
            schema_version: output::SCHEMA_VERSION,
            command: self.command.into(),
            input_hash: output::input_hash(self.command, config, seed),
            config,
            seed,
            result,
            timing: self.timing.map(|(started, t)| Timing { started_unix_s: started, elapsed_s: t.elapsed().as_secs_f64() }),
        };
        let mut json = serde_json::to_vec_pretty(&record).map_err(|e| CliError::Io(e.to_string()))?;
        json.push(b'\n');
        match self.dir {
            Some(_) => self.file("json", &json),
            None => stdout.write_all(&json).map_err(|e| CliError::Io(e.to_string())),
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Calibrate(_) => "calibrate",
        Command::LeakageTrace(_) => "leakage-trace",
        Command::FineAmp(_) => "fine-amp",
        Command::Iterate(_) => "iterate",
        Command::Orbit(_) => "orbit",
    }
}

fn dispatch(cli: &Cli, r: &Resolved, sink: &Sink, stdout: &mut Vec<u8>) -> Result<(), CliError> {
    let f = &r.file;
    match &cli.command {
        Command::Calibrate(a) => {
            let config = CalibrateConfig {
                duration: r.duration(a.tau_ns)?,
                rotation_error: a.epsilon.or(f.epsilon).unwrap_or(0.0),
                axis: a.axis.or(f.axis).unwrap_or(Axis::X),
                target_angle: a.angle_deg.or(f.angle_deg).unwrap_or(180.0).to_radians(),
                model: r.model()?,
                calibration: CalibrationOptions::default(),
            };
            let seed = r.seed()?;
            let p = calibrate_pulse(
                &config.model,
                config.duration,
                config.target_angle,
                config.axis,
                config.rotation_error,
                &config.calibration,
            )?;
            let result = CalibrateResult {
                amplitude: p.pulse.amplitude,
                beta: p.pulse.beta,
                beta_ns: p.pulse.beta * 1e9,
                duration_ns: p.pulse.duration * 1e9,
                process_fidelity: 1.0 - p.infidelity,
                infidelity: p.infidelity,
                leakage: p.leakage,
            };
            sink.record(&config, seed, result, stdout)
        }
        Command::LeakageTrace(a) => {
            let d = LeakageBuildupConfig::default();
            let (damping, damping_params) = r.damping(&a.damping)?;
            let config = LeakageBuildupConfig {
                duration: r.duration(a.tau_ns)?,
                damping,
                damping_params,
                circuits: a.circuits.or(f.circuits).unwrap_or(d.circuits),
                shots: a.shots.or(f.shots).unwrap_or(d.shots),
                realizations: a.realizations.or(f.realizations).unwrap_or(d.realizations),
                window: a.window.or(f.window).unwrap_or(d.window),
                seed: r.seed()?,
                model: r.model()?,
                calibration: CalibrationOptions::default(),
            };
            config.validate()?;
            let report = leakage_buildup_experiment(&config)?;
            let csv = output::leakage_trace_csv(&report.trace).map_err(|e| CliError::Io(e.to_string()))?;
            sink.file("csv", &csv)?;
            let title = format!("Leakage build-up, τ = {} ns{}", config.duration * 1e9, if damping { ", damping" } else { "" });
            sink.file("svg", output::leakage_trace_svg(&report.trace, &title).as_bytes())?;
            let result = LeakageResult {
                gate_leakage: report.gate_leakage,
                final_quartile_mean: report.trace.final_quartile_mean(),
                max: report.trace.max(),
                executions: report.trace.p2.len(),
                run_seed: report.run_seed,
            };
            sink.record(&config, config.seed, result, stdout)
        }
        Command::FineAmp(a) => {
            let config = r.fine_amplitude(a)?;
            let report = run_fine_amplitude(&config)?;
            #[derive(Serialize)]
            struct FineAmpResult<'a> {
                pulse: &'a crate::pulse::CalibratedPulse,
                fit: &'a crate::postprocess::FineAmplitudeFit,
                series: &'a crate::postprocess::ProbabilitySeries,
                run_seed: u64,
            }
            let result = FineAmpResult { pulse: &report.pulse, fit: &report.fit, series: &report.series, run_seed: report.run_seed };
            sink.record(&config, config.seed, result, stdout)
        }
        Command::Iterate(a) => {
            let config = r.fine_amplitude(&a.fine)?;
            let iterations = a.iterations.or(f.iterations).unwrap_or(10);
            let report = iterative_calibration(&config, iterations)?;
            #[derive(Serialize)]
            struct IterateConfig<'a> {
                #[serde(flatten)]
                fine_amplitude: &'a FineAmplitudeConfig,
                iterations: usize,
            }
            #[derive(Serialize)]
            struct IterateResult<'a> {
                e_opt: f64,
                e_norm: Vec<f64>,
                records: &'a [crate::experiments::IterationRecord],
                converged_at: Option<usize>,
                diverged: bool,
            }
            let result = IterateResult {
                e_opt: report.e_opt,
                e_norm: report.records.iter().map(|x| x.e_norm).collect(),
                records: &report.records,
                converged_at: report.converged_at,
                diverged: report.diverged,
            };
            sink.record(&IterateConfig { fine_amplitude: &config, iterations }, config.seed, result, stdout)
        }
        Command::Orbit(a) => {
            let d = OrbitConfig::default();
            let (damping, damping_params) = r.damping(&a.damping)?;
            let beta_prefactors = match a.beta_grid.as_ref().or(f.beta_grid.as_ref()) {
                Some(s) => parse_beta_grid(s).map_err(CliError::Usage)?,
                None => default_beta_grid(),
            };
            let config = OrbitConfig {
                duration: r.duration(a.tau_ns)?,
                depth: a.depth.or(f.depth).unwrap_or(d.depth),
                sequences: a.sequences.or(f.sequences).unwrap_or(d.sequences),
                mode: a.mode.or(f.mode).unwrap_or(d.mode),
                compose_to: a.compose_to.or(f.compose_to).unwrap_or(d.compose_to),
                beta_prefactors,
                damping,
                damping_params,
                shots: a.shots.or(f.shots).unwrap_or(d.shots),
                seed: r.seed()?,
                model: r.model()?,
                calibration: CalibrationOptions::default(),
            };
            config.validate()?;
            let report = run_orbit(&config)?;
            let csv = output::orbit_csv(&report).map_err(|e| CliError::Io(e.to_string()))?;
            sink.file("csv", &csv)?;
            let title =
                format!("ORBIT, τ = {} ns, m = {}, {}, compose to {}", config.duration * 1e9, config.depth, config.mode, config.compose_to);
            sink.file("svg", output::orbit_svg(&report, &title).as_bytes())?;
            #[derive(Serialize)]
            struct OrbitResult<'a> {
                n_c: f64,
                points: &'a [crate::experiments::OrbitPoint],
            }
            sink.record(&config, config.seed, OrbitResult { n_c: report.n_c, points: &report.points }, stdout)
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.global.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let resolved = Resolved { global: &cli.global, file };
    let jobs = cli.global.jobs.or(resolved.file.jobs);
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    if let Some(dir) = &cli.global.out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let sink = Sink {
        dir: cli.global.out.as_deref(),
        command: command_name(&cli.command),
        timing: (!cli.global.no_timing).then(|| (started, Instant::now())),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build().map_err(|e| CliError::Io(e.to_string()))?;
    let mut buffer = Vec::new();
    pool.install(|| dispatch(cli, &resolved, &sink, &mut buffer))?;
    stdout.write_all(&buffer).map_err(|e| CliError::Io(e.to_string()))
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
