//! Command-line front end for the `spinphase` binary.
//!
//! Subcommands: `rates`, `evolve`, `wigner`, `compare`, `unravel`,
//! `positivity`, `tensor-table`.  Every run is configured the same way: an
//! optional JSON document passed with `--config`, overlaid by command-line
//! flags (flags win), with documented defaults filling the rest.  Every
//! command is deterministic given the configuration and seed, writes its
//! artifacts into `--output-dir` (default `.`), and prints a summary — small
//! tables and reports are echoed to stdout in full.
//!
//! Conventions:
//!
//! * the spin is an exact string, an integer (`"2"`) or explicit halves
//!   (`"3/2"`); floats are rejected so a config can never round a spin label;
//! * `gamma` defaults to `1/J` unless given explicitly (`gamma_rule` can
//!   demand one behavior or the other);
//! * the initial state is `coherent:θ,φ` (default: north pole), `cat`
//!   (`(|J⟩+|−J⟩)/√2`), `basis:m`, or `file:path` pointing at a state
//!   snapshot this tool emitted;
//! * `sigma` accepts a number or the aliases `husimi`/`q` (−1), `wigner`/`w`
//!   (0), `glauber`/`p` (+1);
//! * in CSV output from measurement-channel runs the `t` column holds the
//!   iteration count;
//! * `SPINPHASE_THREADS` caps the worker-thread count; outputs do not depend
//!   on it.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array1;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::channels::{
    decay_rates, lindblad_propagate_analytic, povm_iterate, ratio_statistic, ChannelError,
    LindbladParams, RatioStatistic,
};
use crate::coherent::coherent_state;
use crate::export::{
    read_snapshot_json, write_ensemble_comparison_csv, write_grid_csv, write_moments_csv,
    write_ppm, write_rates_csv, write_snapshot_json, write_spectral_json, write_tensor_table_json,
    ExportError,
};
use crate::halfint::HalfInt;
use crate::harmonics::PhasePoint;
use crate::linalg::C64;
use crate::phasespace::{
    damped_kernel_condition, display_grid, evaluate_grid, first_positive_time,
    heat_propagate_spectral, positivity_iterations, positivity_scan, positivity_time,
    povm_sigma_shift, quasidistribution, PhaseSpaceError, PositivityKind, QuasiDist, SigmaIndex,
};
use crate::su2::{expand, reconstruct, DensityMatrix, MomentVector, Su2Error, TensorBasis};
use crate::unravel::{run_ensemble, KickConfig, UnravelError};

/// Errors carrying the process exit code: configuration problems exit 2,
/// I/O failures exit 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ExportError> for CliError {
    fn from(e: ExportError) -> Self {
        match e {
            ExportError::Io(inner) => CliError::Io(inner.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

macro_rules! config_errors {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Config(e.to_string())
            }
        }
    )*};
}
config_errors!(ChannelError, PhaseSpaceError, Su2Error, UnravelError);

/// Which dynamics a run uses.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Continuous isotropic Lindblad flow.
    Lindblad,
    /// Iterated coherent-state measurement channel.
    Povm,
    /// Monte Carlo unitary-kick ensemble.
    Unravel,
}

/// How the damping rate is chosen when not given explicitly.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum GammaRule {
    /// Use the explicitly configured `gamma`.
    #[serde(rename = "fixed")]
    Fixed,
    /// `γ = 1/J` (the figure-friendly normalization).
    #[serde(rename = "one_over_J")]
    OneOverJ,
}

/// Initial-state description, before a spin value is attached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateSpec {
    /// Coherent state pointing along `(theta, phi)`.
    Coherent { theta: f64, phi: f64 },
    /// `(|J⟩ + |−J⟩)/√2`.
    Cat,
    /// Basis state `|J, m⟩`; `m` is an exact half-integer string.
    Basis { m: String },
    /// State snapshot JSON emitted by this tool.
    File { path: PathBuf },
}

impl FromStr for InitialStateSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |msg: &str| CliError::Config(format!("bad state {s:?}: {msg}"));
        if s == "cat" {
            return Ok(InitialStateSpec::Cat);
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected coherent:θ,φ | cat | basis:m | file:path"))?;
        match kind {
            "coherent" => {
                let (t, p) = rest
                    .split_once(',')
                    .ok_or_else(|| bad("coherent needs θ,φ"))?;
                let theta: f64 =
                    t.trim().parse().map_err(|_| bad("θ is not a number"))?;
                let phi: f64 = p.trim().parse().map_err(|_| bad("φ is not a number"))?;
                if !theta.is_finite() || !phi.is_finite() {
                    return Err(bad("angles must be finite"));
                }
                Ok(InitialStateSpec::Coherent { theta, phi })
            }
            "basis" => Ok(InitialStateSpec::Basis { m: rest.trim().to_string() }),
            "file" => Ok(InitialStateSpec::File { path: PathBuf::from(rest) }),
            _ => Err(bad("unknown kind")),
        }
    }
}

/// One JSON configuration document.  Every field is optional; command-line
/// flags override file values and defaults fill whatever remains.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "J")]
    pub j: Option<String>,
    pub model: Option<ModelKind>,
    pub gamma: Option<f64>,
    pub gamma_rule: Option<GammaRule>,
    pub initial_state: Option<InitialStateSpec>,
    pub sigma: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub iterations: Option<Vec<u32>>,
    /// `[n_theta, n_phi]` scan grid.
    pub grid: Option<(usize, usize)>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Kick time step for ensemble runs.
    pub dt: Option<f64>,
    /// Trajectory count for ensemble runs.
    pub n_traj: Option<usize>,
    /// Also write per-time state snapshots from `evolve`.
    pub snapshots: Option<bool>,
}

impl RunConfig {
    fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
    }
}

/// Parses `σ`: a number, or `husimi`/`q` (−1), `wigner`/`w` (0),
/// `glauber`/`p` (+1).
pub fn parse_sigma(s: &str) -> Result<f64, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "husimi" | "q" => Ok(-1.0),
        "wigner" | "w" => Ok(0.0),
        "glauber" | "p" => Ok(1.0),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CliError::Config(format!("bad sigma {s:?}"))),
    }
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| CliError::Config(format!("bad {what} entry {tok:?}")))
        })
        .collect()
}

fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("bad grid {s:?}: expected n_theta x n_phi"));
    let (a, b) = s.split_once(['x', ',']).ok_or_else(bad)?;
    let n_theta: usize = a.trim().parse().map_err(|_| bad())?;
    let n_phi: usize = b.trim().parse().map_err(|_| bad())?;
    Ok((n_theta, n_phi))
}

/// Flags shared by every subcommand; each one overrides the matching
/// configuration-file field.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// JSON configuration file; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Spin, an exact integer or half-integer string: "2", "3/2"
    #[arg(long = "J")]
    pub j: Option<String>,
    /// Dynamics: lindblad, povm, or unravel
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// Damping rate (default: 1/J)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// How gamma is chosen when not given: fixed or one-over-j
    #[arg(long)]
    pub gamma_rule: Option<GammaRule>,
    /// Initial state: "coherent:θ,φ", "cat", "basis:m", or "file:path"
    #[arg(long)]
    pub state: Option<String>,
    /// Distribution family index: a number or husimi/q, wigner/w, glauber/p
    #[arg(long)]
    pub sigma: Option<String>,
    /// Comma-separated times, e.g. "0,0.5,1"
    #[arg(long)]
    pub times: Option<String>,
    /// Comma-separated iteration counts, e.g. "0,1,2"
    #[arg(long)]
    pub iterations: Option<String>,
    /// Scan grid "n_theta x n_phi", e.g. "33x64"
    #[arg(long)]
    pub grid: Option<String>,
    /// Directory for output files (default ".")
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Random seed for trajectory ensembles
    #[arg(long)]
    pub seed: Option<u64>,
    /// Kick time step for ensemble runs
    #[arg(long)]
    pub dt: Option<f64>,
    /// Trajectory count for ensemble runs
    #[arg(long)]
    pub n_traj: Option<usize>,
    /// Also write per-time state snapshots (evolve)
    #[arg(long)]
    pub snapshots: bool,
}

impl CommonArgs {
    /// Loads `--config` (if any) and overlays these flags on top.
    pub fn merged(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(j) = &self.j {
            cfg.j = Some(j.clone());
        }
        if let Some(m) = self.model {
            cfg.model = Some(m);
        }
        if let Some(g) = self.gamma {
            cfg.gamma = Some(g);
        }
        if let Some(r) = self.gamma_rule {
            cfg.gamma_rule = Some(r);
        }
        if let Some(s) = &self.state {
            cfg.initial_state = Some(s.parse()?);
        }
        if let Some(s) = &self.sigma {
            cfg.sigma = Some(parse_sigma(s)?);
        }
        if let Some(t) = &self.times {
            cfg.times = Some(parse_list(t, "times")?);
        }
        if let Some(i) = &self.iterations {
            cfg.iterations = Some(parse_list(i, "iterations")?);
        }
        if let Some(g) = &self.grid {
            cfg.grid = Some(parse_grid(g)?);
        }
        if let Some(d) = &self.output_dir {
            cfg.output_dir = Some(d.clone());
        }
        if let Some(s) = self.seed {
            cfg.seed = Some(s);
        }
        if let Some(d) = self.dt {
            cfg.dt = Some(d);
        }
        if let Some(n) = self.n_traj {
            cfg.n_traj = Some(n);
        }
        if self.snapshots {
            cfg.snapshots = Some(true);
        }
        Ok(cfg)
    }
}

/// A fully validated run: every field resolved, the initial state built.
pub struct Resolved {
    pub j: HalfInt,
    pub model: ModelKind,
    pub gamma: f64,
    pub rho0: DensityMatrix,
    pub sigma: SigmaIndex,
    pub times: Vec<f64>,
    pub iterations: Vec<u32>,
    pub grid: (usize, usize),
    pub output_dir: PathBuf,
    pub seed: u64,
    pub dt: f64,
    pub n_traj: usize,
    pub snapshots: bool,
}

fn build_state(spec: &InitialStateSpec, j: HalfInt) -> Result<DensityMatrix, CliError> {
    match spec {
        InitialStateSpec::Coherent { theta, phi } => {
            Ok(coherent_state(j, PhasePoint::new(*theta, *phi)).density())
        }
        InitialStateSpec::Cat => {
            let d = j.dim();
            let mut psi = Array1::<C64>::zeros(d);
            let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            psi[0] = amp;
            psi[d - 1] += amp; // J = 0 collapses both legs onto one entry
            Ok(DensityMatrix::pure(j, &psi)?)
        }
        InitialStateSpec::Basis { m } => {
            let m: HalfInt = m
                .parse()
                .map_err(|_| CliError::Config(format!("bad basis label m = {m:?}")))?;
            if (m.doubled() - j.doubled()) % 2 != 0 || m.doubled().abs() > j.doubled() {
                return Err(CliError::Config(format!(
                    "m = {m} is not a projection of J = {j}"
                )));
            }
            let idx = ((j.doubled() - m.doubled()) / 2) as usize;
            let mut psi = Array1::<C64>::zeros(j.dim());
            psi[idx] = C64::new(1.0, 0.0);
            Ok(DensityMatrix::pure(j, &psi)?)
        }
        InitialStateSpec::File { path } => {
            let mut file = File::open(path)
                .map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
            let rho = read_snapshot_json(&mut file)?;
            if rho.j() != j {
                return Err(CliError::Config(format!(
                    "snapshot {} holds J = {}, config says J = {j}",
                    path.display(),
                    rho.j()
                )));
            }
            Ok(rho)
        }
    }
}

/// Validates a merged configuration and fills defaults.
pub fn resolve(cfg: &RunConfig, default_model: ModelKind) -> Result<Resolved, CliError> {
    // the spin may come from the config or from a snapshot file
    let j = match (&cfg.j, &cfg.initial_state) {
        (Some(s), _) => s
            .parse::<HalfInt>()
            .map_err(|e| CliError::Config(e.to_string()))?,
        (None, Some(InitialStateSpec::File { path })) => {
            let mut file = File::open(path)
                .map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
            read_snapshot_json(&mut file)?.j()
        }
        (None, _) => return Err(CliError::Config("no spin given; pass --J".into())),
    };
    if j.doubled() < 0 {
        return Err(CliError::Config(format!("J = {j} is negative")));
    }

    let gamma = match cfg.gamma {
        Some(g) => {
            if !g.is_finite() || g < 0.0 {
                return Err(CliError::Config(format!("gamma = {g} must be finite and ≥ 0")));
            }
            g
        }
        None => match cfg.gamma_rule {
            Some(GammaRule::Fixed) => {
                return Err(CliError::Config(
                    "gamma_rule \"fixed\" needs an explicit gamma".into(),
                ))
            }
            // default rule: γ = 1/J, falling back to 1 for J = 0
            _ => {
                if j.doubled() > 0 {
                    1.0 / j.value()
                } else {
                    1.0
                }
            }
        },
    };

    let sigma = cfg.sigma.unwrap_or(0.0);
    if !sigma.is_finite() {
        return Err(CliError::Config(format!("sigma = {sigma} must be finite")));
    }

    let times = cfg
        .times
        .clone()
        .unwrap_or_else(|| vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    if times.is_empty()
        || times.iter().any(|t| !t.is_finite() || *t < 0.0)
        || times.windows(2).any(|w| w[0] > w[1])
    {
        return Err(CliError::Config(
            "times must be non-empty, non-negative, and sorted".into(),
        ));
    }
    let iterations = cfg.iterations.clone().unwrap_or_else(|| vec![0, 1, 2, 3]);
    if iterations.is_empty() || iterations.windows(2).any(|w| w[0] > w[1]) {
        return Err(CliError::Config(
            "iterations must be non-empty and sorted".into(),
        ));
    }

    let grid = cfg.grid.unwrap_or((33, 64));
    if grid.0 < 2 || grid.1 < 1 {
        return Err(CliError::Config(format!(
            "grid {}x{} is too small (need at least 2x1)",
            grid.0, grid.1
        )));
    }

    let dt = cfg.dt.unwrap_or(1e-3);
    let n_traj = cfg.n_traj.unwrap_or(1000);

    let spec = cfg
        .initial_state
        .clone()
        .unwrap_or(InitialStateSpec::Coherent { theta: 0.0, phi: 0.0 });
    let rho0 = build_state(&spec, j)?;

    Ok(Resolved {
        j,
        model: cfg.model.unwrap_or(default_model),
        gamma,
        rho0,
        sigma: SigmaIndex::new(sigma).map_err(CliError::from)?,
        times,
        iterations,
        grid,
        output_dir: cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from(".")),
        seed: cfg.seed.unwrap_or(0),
        dt,
        n_traj,
        snapshots: cfg.snapshots.unwrap_or(false),
    })
}

fn create_output(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    let file = File::create(&path)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok((path, BufWriter::new(file)))
}

fn moments_of(rho: &DensityMatrix, basis: &TensorBasis) -> Result<MomentVector, CliError> {
    Ok(expand(rho, basis)?)
}

fn state_of(m: &MomentVector, basis: &TensorBasis) -> Result<DensityMatrix, CliError> {
    let rec = reconstruct(m, basis)?;
    Ok(DensityMatrix::from_matrix_unchecked(m.j(), rec.matrix))
}

// ---------------------------------------------------------------------------
// commands

fn cmd_rates(r: &Resolved, out: &mut dyn Write) -> Result<(), CliError> {
    let table = decay_rates(r.j, r.gamma)?;
    let mut buf = Vec::new();
    write_rates_csv(&table, &mut buf)?;
    let (path, mut file) = create_output(&r.output_dir, "rates.csv")?;
    file.write_all(&buf)?;
    out.write_all(&buf)?;
    writeln!(out, "# J = {}, gamma = {}; wrote {}", r.j, r.gamma, path.display())?;
    Ok(())
}

fn cmd_evolve(r: &Resolved, out: &mut dyn Write) -> Result<(), CliError> {
    let basis = TensorBasis::build(r.j);
    let m0 = moments_of(&r.rho0, &basis)?;
    let series: Vec<(f64, MomentVector)> = match r.model {
        ModelKind::Lindblad => {
            let params = LindbladParams::new(r.gamma, r.j)?;
            r.times
                .iter()
                .map(|&t| Ok((t, lindblad_propagate_analytic(&m0, t, &params)?)))
                .collect::<Result<_, CliError>>()?
        }
        ModelKind::Povm => r
            .iterations
            .iter()
            .map(|&n| (f64::from(n), povm_iterate(&m0, n)))
            .collect(),
        ModelKind::Unravel => {
            return Err(CliError::Config(
                "evolve handles lindblad and povm; use the unravel subcommand for ensembles"
                    .into(),
            ))
        }
    };
    let (path, mut file) = create_output(&r.output_dir, "moments.csv")?;
    write_moments_csv(&series, &mut file)?;
    let label = match r.model {
        ModelKind::Povm => "iterations",
        _ => "times",
    };
    writeln!(
        out,
        "wrote {} ({} {label} × {} moments)",
        path.display(),
        series.len(),
        (basis.lmax() + 1).pow(2)
    )?;
    if r.snapshots {
        for (i, (t, m)) in series.iter().enumerate() {
            let rho = state_of(m, &basis)?;
            let (path, mut file) = create_output(&r.output_dir, &format!("snapshot_{i}.json"))?;
            write_snapshot_json(&rho, &mut file)?;
            writeln!(out, "wrote {} ({label} entry {t})", path.display())?;
        }
    }
    Ok(())
}

fn cmd_wigner(r: &Resolved, out: &mut dyn Write) -> Result<(), CliError> {
    let (n_theta, n_phi) = r.grid;
    let min_rows = r.j.doubled() as usize + 2; // resolve structure up to degree 2J
    if n_theta < min_rows {
        eprintln!(
            "warning: n_theta = {n_theta} under-resolves J = {} (want ≥ {min_rows})",
            r.j
        );
    }
    let basis = TensorBasis::build(r.j);
    let m0 = moments_of(&r.rho0, &basis)?;
    let f0 = quasidistribution(&r.rho0, r.sigma, None)?;

    // flow panels at each requested time, channel panels at each iteration
    let mut panels: Vec<(String, f64, QuasiDist)> = Vec::new();
    for (i, &t) in r.times.iter().enumerate() {
        let ft = if t == 0.0 {
            f0.clone()
        } else {
            heat_propagate_spectral(&f0, t, r.gamma)?
        };
        panels.push((format!("wigner_lindblad_{i}"), t, ft));
    }
    let mut shift_gap = 0.0f64;
    for &n in &r.iterations {
        let direct = quasidistribution(&state_of(&povm_iterate(&m0, n), &basis)?, r.sigma, None)?;
        // independent route: reindex the family instead of moving the state
        let shifted = povm_sigma_shift(&f0, n);
        for p in display_grid(n_theta, n_phi) {
            shift_gap = shift_gap.max((direct.evaluate(p) - shifted.evaluate(p)).abs());
        }
        panels.push((format!("wigner_povm_{n}"), f64::from(n), direct));
    }

    let grids: Vec<_> = panels
        .iter()
        .map(|(name, t, f)| (name, *t, f, evaluate_grid(f, n_theta, n_phi)))
        .collect();
    let vmax = grids
        .iter()
        .flat_map(|(_, _, _, g)| g.iter())
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let points = display_grid(n_theta, n_phi);
    for (name, t, f, grid) in &grids {
        let values: Vec<f64> = grid.iter().copied().collect();
        let (csv_path, mut csv) = create_output(&r.output_dir, &format!("{name}.csv"))?;
        write_grid_csv(&points, &values, &mut csv)?;
        let (_, mut spec_file) = create_output(&r.output_dir, &format!("{name}.json"))?;
        write_spectral_json(f, *t, &mut spec_file)?;
        let (ppm_path, mut ppm) = create_output(&r.output_dir, &format!("{name}.ppm"))?;
        write_ppm(grid, Some(vmax), &mut ppm)?;
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        writeln!(
            out,
            "{name}: label {t}, min {min:.6}, max {max:.6} → {}, {}",
            csv_path.display(),
            ppm_path.display()
        )?;
    }
    writeln!(
        out,
        "sigma-shift cross-check: max |direct − shifted| = {shift_gap:.3e}{}",
        if shift_gap > 1e-10 { "  (EXCEEDS 1e-10)" } else { "" }
    )?;
    writeln!(out, "color anchor: 0 → white, saturation at |value| = {vmax:.6}")?;
    Ok(())
}

fn ratio_json(stat: &Result<RatioStatistic, ChannelError>, expected: Option<f64>) -> serde_json::Value {
    match stat {
        Ok(s) => json!({
            "ratio": s.r,
            "expected": expected,
            "per_time": s.per_time,
            "max_deviation": s.max_deviation,
            "time_independent": s.time_independent(1e-8),
        }),
        Err(e) => json!({ "error": e.to_string(), "expected": expected }),
    }
}

fn cmd_compare(r: &Resolved, out: &mut dyn Write) -> Result<(), CliError> {
    let basis = TensorBasis::build(r.j);
    let m0 = moments_of(&r.rho0, &basis)?;
    if r.times.len() < 2 || r.iterations.len() < 2 {
        return Err(CliError::Config(
            "compare needs at least two times and two iterations".into(),
        ));
    }

    // strongest moment of each rank carries the cleanest ratio
    let pick = |l: u32| -> Option<i32> {
        if l > basis.lmax() {
            return None;
        }
        (-(l as i32)..=l as i32).max_by(|&a, &b| {
            m0.get(l, a)
                .norm()
                .partial_cmp(&m0.get(l, b).norm())
                .expect("finite moments")
        })
    };
    let (k1, k2) = (pick(1), pick(2));

    let (lind_json, povm_json) = if let (Some(k1), Some(k2)) = (k1, k2) {
        let params = LindbladParams::new(r.gamma, r.j)?;
        let mut lind1 = Vec::new();
        let mut lind2 = Vec::new();
        for &t in &r.times {
            let m = lindblad_propagate_analytic(&m0, t, &params)?;
            lind1.push((t, m.get(1, k1)));
            lind2.push((t, m.get(2, k2)));
        }
        let mut pov1 = Vec::new();
        let mut pov2 = Vec::new();
        for &n in &r.iterations {
            let m = povm_iterate(&m0, n);
            pov1.push((f64::from(n), m.get(1, k1)));
            pov2.push((f64::from(n), m.get(2, k2)));
        }
        // expected ratios from the rate tables themselves
        let table = decay_rates(r.j, r.gamma)?;
        (
            ratio_json(&ratio_statistic(&lind1, &lind2), Some(table.lindblad(2) / table.lindblad(1))),
            ratio_json(&ratio_statistic(&pov1, &pov2), Some(table.povm(2) / table.povm(1))),
        )
    } else {
        let err = json!({ "error": format!("no rank-2 moments exist for J = {}", r.j) });
        (err.clone(), err)
    };

    // spin-1/2: n channel steps equal the flow for time n·ln3/γ
    let equivalence = if r.j.doubled() == 1 {
        let params = LindbladParams::new(r.gamma, r.j)?;
        let mut max_diff = 0.0f64;
        for n in 1..=5u32 {
            let t = f64::from(n) * 3f64.ln() / r.gamma;
            let a = state_of(&povm_iterate(&m0, n), &basis)?;
            let b = state_of(&lindblad_propagate_analytic(&m0, t, &params)?, &basis)?;
            let diff = (a.matrix() - b.matrix())
                .iter()
                .fold(0.0f64, |acc, v| acc.max(v.norm()));
            max_diff = max_diff.max(diff);
        }
        json!({ "n_checked": 5, "time_per_step": 3f64.ln() / r.gamma, "max_state_diff": max_diff })
    } else {
        serde_json::Value::Null
    };

    let report = json!({
        "J": r.j.to_string(),
        "gamma": r.gamma,
        "moment_picked": { "rank1_k": k1, "rank2_k": k2 },
        "lindblad": lind_json,
        "povm": povm_json,
        "spin_half_equivalence": equivalence,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    let (path, mut file) = create_output(&r.output_dir, "compare.json")?;
    writeln!(file, "{text}")?;
    writeln!(out, "{text}")?;
    writeln!(out, "# wrote {}", path.display())?;
    Ok(())
}

fn cmd_unravel(r: &Resolved, out: &mut dyn Write) -> Result<(), CliError> {
    let t_final = *r.times.last().expect("times validated non-empty");
    if t_final <= 0.0 {
        return Err(CliError::Config("final time must be positive".into()));
    }
    let n_steps = ((t_final / r.dt).round() as usize).max(1);
    let record_every = if r.times.len() >= 2 {
        (n_steps / (r.times.len() - 1)).max(1)
    } else {
        n_steps
    };
    let cfg = KickConfig::new(r.gamma, r.dt, n_steps, r.n_traj, r.seed)?;
    if cfg.strength_warning(r.j) {
        eprintln!(
            "warning: kick strength γ(2J)²dt = {:.3} > 0.1; discretization bias may dominate",
            r.gamma * (r.j.doubled() as f64).powi(2) * r.dt
        );
    }
    let ens = run_ensemble(&r.rho0, &cfg, record_every)?;

    // reference: the exact decay law applied to the ensemble's own t = 0 record
    let m_init = ens.mean_moments(0).clone();
    let refs: Vec<MomentVector> = if r.gamma == 0.0 {
        vec![m_init; ens.n_records()]
    } else {
        let params = LindbladParams::new(r.gamma, r.j)?;
        ens.times()
            .iter()
            .map(|&t| Ok(lindblad_propagate_analytic(&m_init, t, &params)?))
            .collect::<Result<_, CliError>>()?
    };

    let (path, mut file) = create_output(&r.output_dir, "unravel.csv")?;
    write_ensemble_comparison_csv(&ens, &refs, &mut file)?;

    let mut worst = 0.0f64;
    let mut flags = 0usize;
    for rec in 0..ens.n_records() {
        for (l, k, v) in ens.mean_moments(rec).iter() {
            let dev = (v - refs[rec].get(l, k)).norm();
            let se = ens.stderr(rec, l, k);
            let tol = 5.0 * se + crate::export::DEVIATION_FLOOR;
            if dev > tol {
                flags += 1;
            }
            worst = worst.max(dev / tol);
        }
    }
    writeln!(
        out,
        "wrote {} ({} trajectories × {} steps, dt = {}, {} records)",
        path.display(),
        r.n_traj,
        n_steps,
        r.dt,
        ens.n_records()
    )?;
    writeln!(
        out,
        "deviation vs analytic: worst {:.0}% of tolerance (5·stderr + 1e-12); {flags} moment(s) flagged",
        100.0 * worst
    )?;
    Ok(())
}

fn cmd_positivity(r: &Resolved, out: &mut dyn Write) -> Result<(), CliError> {
    if r.gamma <= 0.0 {
        return Err(CliError::Config("positivity analysis needs gamma > 0".into()));
    }
    let f0 = quasidistribution(&r.rho0, r.sigma, None)?;
    let iters = positivity_iterations(r.sigma);
    let pt = positivity_time(r.j, r.sigma, r.gamma);
    let (n_theta, n_phi) = r.grid;

    let scan0 = positivity_scan(&f0, n_theta, n_phi);
    let empirical_time = match first_positive_time(&f0, r.gamma, n_theta, n_phi, 1e-3) {
        Ok(t) => json!(t),
        Err(PhaseSpaceError::NoPositiveTime(t)) => {
            json!({ "error": format!("still negative at t = {t}") })
        }
        Err(e) => return Err(e.into()),
    };
    // first whole iteration count whose scan clears the floor
    let mut empirical_iteration = serde_json::Value::Null;
    for n in 0..=iters + 8 {
        if positivity_scan(&povm_sigma_shift(&f0, n), n_theta, n_phi).min >= -1e-9 {
            empirical_iteration = json!(n);
            break;
        }
    }
    // spin-1/2 pure states admit a closed-form continuous crossing
    let closed_form = if r.j.doubled() == 1 {
        json!(((r.sigma.value() + 1.0) / 2.0).max(0.0) * 3f64.ln() / r.gamma)
    } else {
        serde_json::Value::Null
    };

    let report = json!({
        "J": r.j.to_string(),
        "sigma": r.sigma.value(),
        "gamma": r.gamma,
        "initial_scan_min": scan0.min,
        "iterations_to_positive": iters,
        "t_star": {
            "value": pt.t_star,
            "kind": match pt.kind { PositivityKind::Exact => "exact", PositivityKind::Bound => "bound" },
            "large_spin_asymptote": pt.asymptote,
            "damped_kernel_positive": damped_kernel_condition(r.j, r.sigma, r.gamma, pt.t_star),
        },
        "empirical": {
            "grid": [n_theta, n_phi],
            "first_positive_time": empirical_time,
            "first_positive_iteration": empirical_iteration,
            "floor": -1e-9,
        },
        "spin_half_pure_crossing": closed_form,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    let (path, mut file) = create_output(&r.output_dir, "positivity.json")?;
    writeln!(file, "{text}")?;
    writeln!(out, "{text}")?;
    writeln!(out, "# wrote {}", path.display())?;
    Ok(())
}

fn cmd_tensor_table(r: &Resolved, out: &mut dyn Write) -> Result<(), CliError> {
    let basis = TensorBasis::build(r.j);
    let mut buf = Vec::new();
    write_tensor_table_json(&basis, &mut buf)?;
    let (path, mut file) = create_output(&r.output_dir, "tensor_table.json")?;
    file.write_all(&buf)?;
    out.write_all(&buf)?;
    writeln!(out, "# wrote {}", path.display())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// dispatch

/// `spinphase` — isotropic spin decoherence on the spherical phase space.
#[derive(Parser, Debug)]
#[command(
    name = "spinphase",
    version,
    about = "Isotropic spin decoherence: Lindblad flow, measurement channels, \
             phase-space distributions, and Monte Carlo unraveling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Multipole decay-rate table for both channels
    Rates(CommonArgs),
    /// Moment time series (flow) or iteration series (channel)
    Evolve(CommonArgs),
    /// Phase-space distribution grids and heatmaps for both models
    Wigner(CommonArgs),
    /// Decay-ratio statistics and the spin-1/2 equivalence check
    Compare(CommonArgs),
    /// Monte Carlo kick ensemble vs. the exact decay law
    Unravel(CommonArgs),
    /// Positivity times: formula, scan, and bisection
    Positivity(CommonArgs),
    /// Dump the irreducible tensor-operator basis as JSON
    #[command(name = "tensor-table")]
    TensorTable(CommonArgs),
}

/// Applies `SPINPHASE_THREADS` to the global worker pool.  Results never
/// depend on the thread count; this only caps parallelism.
pub fn init_threads() {
    if let Ok(s) = std::env::var("SPINPHASE_THREADS") {
        match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring invalid SPINPHASE_THREADS={s:?}"),
        }
    }
}

/// Runs one parsed command, writing human output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.cmd {
        Command::Rates(a) => cmd_rates(&resolve(&a.merged()?, ModelKind::Lindblad)?, out),
        Command::Evolve(a) => cmd_evolve(&resolve(&a.merged()?, ModelKind::Lindblad)?, out),
        Command::Wigner(a) => cmd_wigner(&resolve(&a.merged()?, ModelKind::Lindblad)?, out),
        Command::Compare(a) => cmd_compare(&resolve(&a.merged()?, ModelKind::Lindblad)?, out),
        Command::Unravel(a) => cmd_unravel(&resolve(&a.merged()?, ModelKind::Unravel)?, out),
        Command::Positivity(a) => cmd_positivity(&resolve(&a.merged()?, ModelKind::Lindblad)?, out),
        Command::TensorTable(a) => cmd_tensor_table(&resolve(&a.merged()?, ModelKind::Lindblad)?, out),
    }
}

/// Process entry point: parses arguments, applies the thread cap, runs, and
/// maps errors to exit codes (0 success, 2 configuration, 3 I/O).
pub fn main_entry() -> i32 {
    init_threads();
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match run(&cli, &mut out) {
        Ok(()) => {
            let _ = out.flush();
            0
        }
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
