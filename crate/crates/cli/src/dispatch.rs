//! Runs one resolved configuration and renders its JSON report.
//!
//! Report keys appear in a fixed order: `tool`, `version`, `command`,
//! `status`, `exit_code`, `inputs`, `outputs` and, only when requested,
//! `timing_seconds`. Inside `outputs` the order is the declaration order of
//! the structs below. Non-finite numbers are written as `null`.

use crate::config::{Command, RunConfig};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::Path;
use std::time::Instant;
use thiserror::Error;
use tfwd_core::bounds::{
    excess_rhs, lower_bound, s0_residual, tf_energy_direct, tf_energy_shooting, tf_hydrogen_energy, tf_initial_slope,
    BoundReport, ExcessRhs, TfMinimizeOptions,
};
use tfwd_core::certify::{run_certificate, CertificateReport, EVIDENCE, LOCALIZATION_NOTE};
use tfwd_core::model::io::{format_density, parse_density};
use tfwd_core::model::{gamma_tf, mass, nonrel_terms, total_energy, EnergyBreakdown, ModelParams, NonrelTerms, RadialDensity};
use tfwd_core::solver::{excess_charge_estimate, minimize, MassMode, MinimizeOptions, SeedProfile};

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Invalid input: config, flags, files or a precondition of the library.
pub const EXIT_VALIDATION: i32 = 1;
/// A minimization or scan did not converge.
pub const EXIT_CONVERGENCE: i32 = 2;
/// At least one certificate failed.
pub const EXIT_CERTIFICATE: i32 = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Core(#[from] tfwd_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Density { path: String, source: tfwd_core::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Core(tfwd_core::Error::Convergence { .. } | tfwd_core::Error::Solver { .. }) => EXIT_CONVERGENCE,
            _ => EXIT_VALIDATION,
        }
    }
}

/// A finished run.
#[derive(Debug, Clone)]
pub struct Dispatched {
    pub exit_code: i32,
    /// The JSON report, newline-terminated.
    pub report: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    ConvergenceFailure,
    CertificateFailure,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::ConvergenceFailure => "convergence_failure",
            Status::CertificateFailure => "certificate_failure",
        }
    }

    fn exit_code(self) -> i32 {
        match self {
            Status::Ok => EXIT_OK,
            Status::ConvergenceFailure => EXIT_CONVERGENCE,
            Status::CertificateFailure => EXIT_CERTIFICATE,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn read_density(path: &str) -> Result<RadialDensity, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.into(),
        source,
    })?;
    parse_density(&text).map_err(|source| RunError::Density {
        path: path.into(),
        source,
    })
}

#[derive(Serialize)]
struct ParamsEcho {
    #[serde(rename = "Z")]
    z: f64,
    c: f64,
    lambda: f64,
    kappa: f64,
}

impl From<ModelParams> for ParamsEcho {
    fn from(p: ModelParams) -> Self {
        Self {
            z: p.z,
            c: p.c,
            lambda: p.lambda,
            kappa: p.kappa(),
        }
    }
}

/// Runs `cfg` and renders the report.
pub fn dispatch(cfg: &RunConfig) -> Result<Dispatched, RunError> {
    let start = Instant::now();
    let (status, outputs) = match cfg.command {
        Command::Evaluate => evaluate(cfg)?,
        Command::Bound => bound(cfg)?,
        Command::Minimize => run_minimize(cfg)?,
        Command::Excess => excess(cfg)?,
        Command::Certify => certify(cfg)?,
        Command::Tfhydrogen => tfhydrogen()?,
    };
    let mut report = json!({
        "tool": "tfwd",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command,
        "status": status.name(),
        "exit_code": status.exit_code(),
        "inputs": to_value(cfg),
        "outputs": outputs,
    });
    if cfg.timing {
        report["timing_seconds"] = json!(start.elapsed().as_secs_f64());
    }
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    Ok(Dispatched {
        exit_code: status.exit_code(),
        report: text,
    })
}

#[derive(Serialize)]
struct EvaluateOut {
    params: ParamsEcho,
    nodes: usize,
    r_min: f64,
    r_max: f64,
    breakdown: EnergyBreakdown,
    /// `W + TF - X + external + hartree`, summed again here.
    sum_of_parts: f64,
    decomposition_residual: f64,
    nonrelativistic: NonrelTerms,
    lower_bound: BoundReport,
    above_lower_bound: bool,
}

fn evaluate(cfg: &RunConfig) -> Result<(Status, Value), RunError> {
    let path = cfg.density.as_deref().expect("validated");
    let rho = read_density(path)?;
    let params = cfg.params();
    let breakdown = total_energy(&rho, &params)?;
    let b = &breakdown;
    let sum_of_parts = b.weizsacker + b.thomas_fermi - b.exchange + b.external + b.hartree;
    let bound = lower_bound(&params, mass(&rho), cfg.exchange_weight, cfg.z_factor)?;
    let out = EvaluateOut {
        params: params.into(),
        nodes: rho.grid().len(),
        r_min: rho.grid().r_min(),
        r_max: rho.grid().r_max(),
        sum_of_parts,
        decomposition_residual: (b.total - sum_of_parts).abs(),
        nonrelativistic: nonrel_terms(&rho, &params),
        above_lower_bound: b.total >= bound.bound_value,
        lower_bound: bound,
        breakdown,
    };
    Ok((Status::Ok, to_value(&out)))
}

#[derive(Serialize)]
struct BoundOut {
    params: ParamsEcho,
    report: BoundReport,
    /// The s0 equation re-evaluated at the reported root.
    residual_recomputed: f64,
}

fn bound(cfg: &RunConfig) -> Result<(Status, Value), RunError> {
    let params = cfg.params();
    let report = lower_bound(&params, cfg.n, cfg.exchange_weight, cfg.z_factor)?;
    let residual_recomputed = s0_residual(report.s0, params.kappa(), cfg.z_factor);
    let out = BoundOut {
        params: params.into(),
        report,
        residual_recomputed,
    };
    Ok((Status::Ok, to_value(&out)))
}

fn solver_options(cfg: &RunConfig) -> Result<MinimizeOptions, RunError> {
    let o = &cfg.options;
    let seed_profile = match o.seed_profile.as_str() {
        "thomas_fermi" => SeedProfile::ThomasFermi,
        "custom" => SeedProfile::Custom(read_density(o.seed_density.as_deref().expect("validated"))?),
        _ => SeedProfile::Hydrogenic,
    };
    Ok(MinimizeOptions {
        max_iters: o.max_iters,
        step_init: o.step_init,
        tol_energy: o.tol_energy,
        tol_grad: o.tol_grad,
        seed_profile,
        mass_mode: if o.mass_mode == "at_most" {
            MassMode::AtMost
        } else {
            MassMode::Equality
        },
        grid_size: o.grid_size,
    })
}

#[derive(Serialize)]
struct MinimizeOut {
    params: ParamsEcho,
    converged: bool,
    stop_reason: String,
    iterations: usize,
    final_decrement: f64,
    energy: f64,
    seed_energy: f64,
    achieved_mass: f64,
    lower_bound: f64,
    within_bounds: bool,
    breakdown: EnergyBreakdown,
    excess_rhs: Option<ExcessRhs>,
    energy_history: Vec<f64>,
}

fn run_minimize(cfg: &RunConfig) -> Result<(Status, Value), RunError> {
    let params = cfg.params();
    let opts = solver_options(cfg)?;
    let result = minimize(&params, cfg.n, &opts)?;
    let bound = lower_bound(&params, cfg.n, cfg.exchange_weight, cfg.z_factor)?.bound_value;
    let rhs = if result.achieved_mass > 0.0 {
        Some(excess_rhs(&result.density, &params)?)
    } else {
        None
    };
    if let Some(path) = &cfg.dump_density {
        let header = format!(
            "minimizer: Z = {}, c = {}, lambda = {}, N = {}\nenergy {:e}, converged {}",
            params.z,
            params.c,
            params.lambda,
            cfg.n,
            result.energy(),
            result.converged
        );
        std::fs::write(Path::new(path), format_density(&result.density, &header)).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
    }
    let status = if result.converged {
        Status::Ok
    } else {
        Status::ConvergenceFailure
    };
    let out = MinimizeOut {
        params: params.into(),
        converged: result.converged,
        iterations: result.iterations,
        final_decrement: result.final_decrement,
        energy: result.energy(),
        seed_energy: result.seed_energy(),
        achieved_mass: result.achieved_mass,
        lower_bound: bound,
        within_bounds: bound <= result.energy() && result.energy() <= result.seed_energy(),
        excess_rhs: rhs,
        stop_reason: result.stop_reason,
        breakdown: result.breakdown,
        energy_history: result.energy_history,
    };
    Ok((status, to_value(&out)))
}

#[derive(Serialize)]
struct CurveRow {
    #[serde(rename = "N")]
    n: f64,
    energy: f64,
    achieved_mass: f64,
    converged: bool,
    iterations: usize,
}

#[derive(Serialize)]
struct ExcessOut {
    params: ParamsEcho,
    delta: f64,
    flat_tol: f64,
    n_c: f64,
    bound_mass: f64,
    rhs: ExcessRhs,
    n_c_within_rhs: bool,
    all_converged: bool,
    curve: Vec<CurveRow>,
}

fn excess(cfg: &RunConfig) -> Result<(Status, Value), RunError> {
    let params = cfg.params();
    let opts = solver_options(cfg)?;
    let est = excess_charge_estimate(&params, &opts, cfg.flat_tol)?;
    let curve: Vec<CurveRow> = est
        .curve
        .iter()
        .map(|p| CurveRow {
            n: p.n,
            energy: p.result.energy(),
            achieved_mass: p.result.achieved_mass,
            converged: p.result.converged,
            iterations: p.result.iterations,
        })
        .collect();
    let all_converged = curve.iter().all(|r| r.converged);
    let out = ExcessOut {
        params: params.into(),
        delta: est.delta,
        flat_tol: est.flat_tol,
        n_c: est.n_c,
        bound_mass: est.bound_mass,
        n_c_within_rhs: est.bound_mass <= est.rhs.rhs,
        rhs: est.rhs,
        all_converged,
        curve,
    };
    let status = if all_converged {
        Status::Ok
    } else {
        Status::ConvergenceFailure
    };
    Ok((status, to_value(&out)))
}

#[derive(Serialize)]
struct CertifyOut {
    resolution: usize,
    seed: u64,
    evidence: &'static str,
    localization_note: &'static str,
    all_passed: bool,
    passed: usize,
    total: usize,
    reports: Vec<CertificateReport>,
}

fn certify(cfg: &RunConfig) -> Result<(Status, Value), RunError> {
    let reports = cfg
        .certificates
        .iter()
        .map(|name| run_certificate(name, cfg.resolution, cfg.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().filter(|r| r.passed).count();
    let out = CertifyOut {
        resolution: cfg.resolution,
        seed: cfg.seed,
        evidence: EVIDENCE,
        localization_note: LOCALIZATION_NOTE,
        all_passed: passed == reports.len(),
        passed,
        total: reports.len(),
        reports,
    };
    let status = if out.all_passed {
        Status::Ok
    } else {
        Status::CertificateFailure
    };
    Ok((status, to_value(&out)))
}

#[derive(Serialize)]
struct ScalingRow {
    #[serde(rename = "Z")]
    z: f64,
    energy: f64,
    mass: f64,
    /// `-energy / Z^{7/3}`
    scaled: f64,
}

#[derive(Serialize)]
struct TfHydrogenOut {
    e_tf: f64,
    initial_slope: f64,
    shooting_energy: f64,
    direct_energy: f64,
    direct_mass: f64,
    relative_difference: f64,
    z_scaling: Vec<ScalingRow>,
}

fn tfhydrogen() -> Result<(Status, Value), RunError> {
    let gamma = gamma_tf();
    let shooting_energy = tf_energy_shooting(1.0, gamma)?;
    let z_scaling = [1.0, 2.0, 4.0]
        .into_iter()
        .map(|z| {
            let (energy, mass) = tf_energy_direct(z, gamma, TfMinimizeOptions::default())?;
            Ok(ScalingRow {
                z,
                energy,
                mass,
                scaled: -energy / z.powf(7.0 / 3.0),
            })
        })
        .collect::<Result<Vec<_>, tfwd_core::Error>>()?;
    let (direct_energy, direct_mass) = (z_scaling[0].energy, z_scaling[0].mass);
    let out = TfHydrogenOut {
        e_tf: tf_hydrogen_energy()?,
        initial_slope: tf_initial_slope()?,
        shooting_energy,
        direct_energy,
        direct_mass,
        relative_difference: (direct_energy - shooting_energy).abs() / shooting_energy.abs(),
        z_scaling,
    };
    Ok((Status::Ok, to_value(&out)))
}
