use clap::{Parser, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use tfwd_cli::dispatch::EXIT_VALIDATION;
use tfwd_cli::{dispatch, Command, ConfigFile, RunError};

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    Evaluate,
    Bound,
    Minimize,
    Excess,
    Certify,
    Tfhydrogen,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Evaluate => Command::Evaluate,
            Cmd::Bound => Command::Bound,
            Cmd::Minimize => Command::Minimize,
            Cmd::Excess => Command::Excess,
            Cmd::Certify => Command::Certify,
            Cmd::Tfhydrogen => Command::Tfhydrogen,
        }
    }
}

/// Relativistic Thomas-Fermi-Weizsäcker-Dirac atoms: energies, lower
/// bounds, minimizers, excess charge and numerical certificates.
///
/// Flags override values from --config. The JSON report goes to --out or
/// standard output. Exit status: 0 ok, 1 invalid input, 2 no convergence,
/// 3 certificate failure.
#[derive(Parser)]
#[command(name = "tfwd", version)]
struct Cli {
    /// Command to run; may instead be given as `command` in the config.
    #[arg(value_enum)]
    command: Option<Cmd>,
    /// Config file, `key = value` lines or a JSON object.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report path (default: standard output).
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "grid-size")]
    grid_size: Option<usize>,
    /// Nuclear charge.
    #[arg(long = "Z", allow_negative_numbers = true)]
    z: Option<f64>,
    /// Speed of light; excludes --kappa.
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    /// Weizsäcker coefficient.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Particle number (default: Z).
    #[arg(long = "N", allow_negative_numbers = true)]
    n: Option<f64>,
    /// Coupling Z / (c sqrt(lambda)); sets c.
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Density file for `evaluate`, two columns `r rho`.
    #[arg(long)]
    density: Option<String>,
    /// Certificate scan resolution.
    #[arg(long)]
    resolution: Option<usize>,
    /// Run only this certificate; repeatable.
    #[arg(long = "certificate")]
    certificates: Vec<String>,
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    #[arg(long = "tol-energy")]
    tol_energy: Option<f64>,
    #[arg(long = "tol-grad")]
    tol_grad: Option<f64>,
    /// hydrogenic, thomas_fermi or custom (with --seed-density).
    #[arg(long = "seed-profile")]
    seed_profile: Option<String>,
    #[arg(long = "seed-density")]
    seed_density: Option<String>,
    /// equality or at_most.
    #[arg(long = "mass-mode")]
    mass_mode: Option<String>,
    /// Flatness threshold of the excess-charge scan.
    #[arg(long = "flat-tol")]
    flat_tol: Option<f64>,
    /// Write the minimizer of `minimize` to this file.
    #[arg(long = "dump-density")]
    dump_density: Option<String>,
    /// Add wall-clock timing to the report (breaks byte-identical reruns).
    #[arg(long)]
    timing: bool,
}

impl Cli {
    fn overrides(self) -> ConfigFile {
        ConfigFile {
            command: self.command.map(Into::into),
            z: self.z,
            c: self.c,
            kappa: self.kappa,
            lambda: self.lambda,
            n: self.n,
            density: self.density,
            out: self.out,
            seed: self.seed,
            grid_size: self.grid_size,
            max_iters: self.max_iters,
            tol_energy: self.tol_energy,
            tol_grad: self.tol_grad,
            seed_profile: self.seed_profile,
            seed_density: self.seed_density,
            mass_mode: self.mass_mode,
            flat_tol: self.flat_tol,
            resolution: self.resolution,
            certificates: (!self.certificates.is_empty()).then_some(self.certificates),
            dump_density: self.dump_density,
            timing: self.timing.then_some(true),
            ..ConfigFile::default()
        }
    }
}

fn run(cli: Cli) -> Result<i32, (i32, String)> {
    let validation = |e: &dyn std::fmt::Display| (EXIT_VALIDATION, format!("error: {e}"));
    let base = match &cli.config {
        Some(path) => ConfigFile::load(path).map_err(|e| validation(&e))?,
        None => ConfigFile::default(),
    };
    let cfg = base.merge(cli.overrides()).resolve().map_err(|e| validation(&e))?;
    let done = dispatch(&cfg).map_err(|e: RunError| (e.exit_code(), format!("error: {e}")))?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &done.report).map_err(|e| validation(&format!("{path}: {e}")))?,
        None => print!("{}", done.report),
    }
    Ok(done.exit_code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors share the validation status; clap's own is 2,
            // which here means a convergence failure.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_VALIDATION as u8 } else { 0 });
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err((code, msg)) => {
            eprintln!("{msg}");
            code
        }
    };
    ExitCode::from(code as u8)
}
