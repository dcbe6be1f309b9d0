//! Run configuration: file parsing, command-line overrides and validation.
//!
//! A config file is either a JSON object or flat `key = value` lines; the
//! first non-blank character decides (`{` means JSON). Both forms accept
//! the same keys, and the `inputs` object of any report is itself a valid
//! JSON config.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::path::Path;
use thiserror::Error;
use tfwd_core::certify::{certificate_names, DEFAULT_RESOLUTION, MIN_RESOLUTION};
use tfwd_core::model::{ModelParams, DEFAULT_C, DEFAULT_GRID_SIZE, DEFAULT_LAMBDA};
use tfwd_core::solver::MinimizeOptions;

/// Default flatness threshold of the excess-charge scan.
pub const DEFAULT_FLAT_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config line {line}: {detail}")]
    Line { line: usize, detail: String },
    #[error("config field `{field}`: {detail}")]
    Field { field: String, detail: String },
    #[error("config JSON at line {line}, column {column}: {detail}")]
    Json { line: usize, column: usize, detail: String },
    #[error("{0}")]
    Invalid(String),
}

fn field(name: &str, detail: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: name.to_string(),
        detail: detail.into(),
    }
}

/// Subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Evaluate,
    Bound,
    Minimize,
    Excess,
    Certify,
    Tfhydrogen,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Evaluate,
        Command::Bound,
        Command::Minimize,
        Command::Excess,
        Command::Certify,
        Command::Tfhydrogen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Evaluate => "evaluate",
            Command::Bound => "bound",
            Command::Minimize => "minimize",
            Command::Excess => "excess",
            Command::Certify => "certify",
            Command::Tfhydrogen => "tfhydrogen",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Every settable key; all optional. Field names are the config keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<Command>,
    #[serde(rename = "Z")]
    pub z: Option<f64>,
    pub c: Option<f64>,
    pub kappa: Option<f64>,
    pub lambda: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<f64>,
    pub density: Option<String>,
    pub out: Option<String>,
    pub seed: Option<u64>,
    pub grid_size: Option<usize>,
    pub max_iters: Option<usize>,
    pub step_init: Option<f64>,
    pub tol_energy: Option<f64>,
    pub tol_grad: Option<f64>,
    pub seed_profile: Option<String>,
    pub seed_density: Option<String>,
    pub mass_mode: Option<String>,
    pub flat_tol: Option<f64>,
    pub resolution: Option<usize>,
    pub certificates: Option<Vec<String>>,
    pub exchange_weight: Option<f64>,
    pub z_factor: Option<f64>,
    pub dump_density: Option<String>,
    pub timing: Option<bool>,
}

#[derive(Clone, Copy)]
enum Kind {
    Real,
    Count,
    Text,
    List,
    Flag,
}

fn key_kind(key: &str) -> Option<Kind> {
    Some(match key {
        "Z" | "c" | "kappa" | "lambda" | "N" | "step_init" | "tol_energy" | "tol_grad" | "flat_tol" | "exchange_weight"
        | "z_factor" => Kind::Real,
        "seed" | "grid_size" | "max_iters" | "resolution" => Kind::Count,
        "command" | "density" | "out" | "seed_profile" | "seed_density" | "mass_mode" | "dump_density" => Kind::Text,
        "certificates" => Kind::List,
        "timing" => Kind::Flag,
        _ => return None,
    })
}

/// Parses a config file in either format.
pub fn parse_config(text: &str) -> Result<ConfigFile, ConfigError> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_key_value(text)
    }
}

fn parse_json(text: &str) -> Result<ConfigFile, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Json {
        line: e.line(),
        column: e.column(),
        detail: e.to_string(),
    })
}

fn parse_key_value(text: &str) -> Result<ConfigFile, ConfigError> {
    let mut map = Map::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |detail: String| ConfigError::Line { line, detail };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(err(format!("expected `key = value`, got {body:?}")));
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(kind) = key_kind(key) else {
            return Err(err(format!("unknown key `{key}`")));
        };
        if map.contains_key(key) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        let parsed = match kind {
            Kind::Real => value
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map(Value::Number)
                .ok_or_else(|| err(format!("`{key}` expects a finite number, got {value:?}")))?,
            Kind::Count => value
                .parse::<u64>()
                .map(Value::from)
                .map_err(|_| err(format!("`{key}` expects a nonnegative integer, got {value:?}")))?,
            Kind::Text => {
                if value.is_empty() {
                    return Err(err(format!("`{key}` is empty")));
                }
                if key == "command" && Command::parse(value).is_none() {
                    let names: Vec<_> = Command::ALL.iter().map(|c| c.name()).collect();
                    return Err(err(format!("unknown command {value:?}; expected one of {}", names.join(", "))));
                }
                Value::String(value.to_string())
            }
            Kind::List => Value::Array(
                value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| Value::String(s.to_string()))
                    .collect(),
            ),
            Kind::Flag => match value {
                "true" => Value::Bool(true),
                "false" => Value::Bool(false),
                _ => return Err(err(format!("`{key}` expects true or false, got {value:?}"))),
            },
        };
        map.insert(key.to_string(), parsed);
    }
    // Every value was type-checked above, so this cannot fail on user input.
    serde_json::from_value(Value::Object(map)).map_err(|e| ConfigError::Invalid(e.to_string()))
}

impl ConfigFile {
    /// Reads and parses a config file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        parse_config(&text)
    }

    /// Values set in `over` replace those in `self`.
    pub fn merge(self, over: ConfigFile) -> ConfigFile {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigFile { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            command, z, c, kappa, lambda, n, density, out, seed, grid_size, max_iters, step_init, tol_energy, tol_grad,
            seed_profile, seed_density, mass_mode, flat_tol, resolution, certificates, exchange_weight, z_factor,
            dump_density, timing
        )
    }

    /// Fills defaults and checks every field against the library's
    /// preconditions. Referenced input files must exist.
    pub fn resolve(self) -> Result<RunConfig, ConfigError> {
        let command = self
            .command
            .ok_or_else(|| ConfigError::Invalid("no command given (on the command line or as `command` in the config)".into()))?;
        if self.c.is_some() && self.kappa.is_some() {
            return Err(field("kappa", "give either c or kappa, not both"));
        }
        let z = self.z.unwrap_or(1.0);
        let lambda = self.lambda.unwrap_or(DEFAULT_LAMBDA);
        let params = match self.kappa {
            Some(kappa) => ModelParams::from_kappa(z, kappa, lambda),
            None => ModelParams::new(z, self.c.unwrap_or(DEFAULT_C), lambda),
        }
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let n = self.n.unwrap_or(z);
        if !(n.is_finite() && n >= 0.0) {
            return Err(field("N", format!("must be finite and nonnegative, got {n}")));
        }
        if matches!(command, Command::Minimize) && n == 0.0 {
            return Err(field("N", "minimize needs N > 0"));
        }
        let defaults = MinimizeOptions::default();
        let grid_size = self.grid_size.unwrap_or(DEFAULT_GRID_SIZE);
        let options = OptionsEcho {
            max_iters: self.max_iters.unwrap_or(defaults.max_iters),
            step_init: self.step_init.unwrap_or(defaults.step_init),
            tol_energy: self.tol_energy.unwrap_or(defaults.tol_energy),
            tol_grad: self.tol_grad.unwrap_or(defaults.tol_grad),
            seed_profile: self.seed_profile.unwrap_or_else(|| "hydrogenic".into()),
            seed_density: self.seed_density,
            mass_mode: self.mass_mode.unwrap_or_else(|| "equality".into()),
            grid_size,
        };
        match options.seed_profile.as_str() {
            "hydrogenic" | "thomas_fermi" => {
                if options.seed_density.is_some() {
                    return Err(field("seed_density", "only used with seed_profile = custom"));
                }
            }
            "custom" => match &options.seed_density {
                Some(p) => require_file("seed_density", p)?,
                None => return Err(field("seed_density", "seed_profile = custom needs a seed_density file")),
            },
            other => {
                return Err(field(
                    "seed_profile",
                    format!("expected hydrogenic, thomas_fermi or custom, got {other:?}"),
                ))
            }
        }
        if !matches!(options.mass_mode.as_str(), "equality" | "at_most") {
            return Err(field("mass_mode", format!("expected equality or at_most, got {:?}", options.mass_mode)));
        }
        let probe = MinimizeOptions {
            max_iters: options.max_iters,
            step_init: options.step_init,
            tol_energy: options.tol_energy,
            tol_grad: options.tol_grad,
            grid_size,
            ..MinimizeOptions::default()
        };
        probe.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let flat_tol = self.flat_tol.unwrap_or(DEFAULT_FLAT_TOL);
        if !(flat_tol.is_finite() && flat_tol > 0.0) {
            return Err(field("flat_tol", format!("must be positive, got {flat_tol}")));
        }
        let resolution = self.resolution.unwrap_or(DEFAULT_RESOLUTION);
        if resolution < MIN_RESOLUTION {
            return Err(field("resolution", format!("must be at least {MIN_RESOLUTION}, got {resolution}")));
        }
        let known = certificate_names();
        let certificates = match self.certificates {
            Some(list) if list.is_empty() => return Err(field("certificates", "empty list")),
            Some(list) => {
                if let Some(bad) = list.iter().find(|n| !known.contains(&n.as_str())) {
                    return Err(field(
                        "certificates",
                        format!("unknown certificate {bad:?}; known: {}", known.join(", ")),
                    ));
                }
                list
            }
            None => known.iter().map(|s| s.to_string()).collect(),
        };
        let exchange_weight = self.exchange_weight.unwrap_or(1.0);
        let z_factor = self.z_factor.unwrap_or(1.0);
        for (name, v) in [("exchange_weight", exchange_weight), ("z_factor", z_factor)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(field(name, format!("must be positive, got {v}")));
            }
        }
        if matches!(command, Command::Evaluate) {
            match &self.density {
                Some(p) => require_file("density", p)?,
                None => return Err(field("density", "evaluate needs a density file")),
            }
        } else if self.density.is_some() {
            return Err(field("density", format!("not used by {}", command.name())));
        }
        if self.dump_density.is_some() && !matches!(command, Command::Minimize) {
            return Err(field("dump_density", "only used by minimize"));
        }
        Ok(RunConfig {
            command,
            z,
            c: params.c,
            lambda,
            n,
            density: self.density,
            out: self.out,
            seed: self.seed.unwrap_or(0),
            options,
            flat_tol,
            resolution,
            certificates,
            exchange_weight,
            z_factor,
            dump_density: self.dump_density,
            timing: self.timing.unwrap_or(false),
        })
    }
}

fn require_file(name: &str, path: &str) -> Result<(), ConfigError> {
    if Path::new(path).is_file() {
        Ok(())
    } else {
        Err(field(name, format!("no such file: {path}")))
    }
}

/// Solver options as echoed in reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptionsEcho {
    pub max_iters: usize,
    pub step_init: f64,
    pub tol_energy: f64,
    pub tol_grad: f64,
    pub seed_profile: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_density: Option<String>,
    pub mass_mode: String,
    pub grid_size: usize,
}

/// A fully resolved and validated run. Serializes to a JSON config that
/// reproduces the run; `kappa` is not echoed since `c` determines it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(rename = "Z")]
    pub z: f64,
    pub c: f64,
    pub lambda: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    pub seed: u64,
    #[serde(flatten)]
    pub options: OptionsEcho,
    pub flat_tol: f64,
    pub resolution: usize,
    pub certificates: Vec<String>,
    pub exchange_weight: f64,
    pub z_factor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump_density: Option<String>,
    pub timing: bool,
}

impl RunConfig {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            z: self.z,
            c: self.c,
            lambda: self.lambda,
        }
    }
}
