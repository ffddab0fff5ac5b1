//! JSON run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spinmagnus::expm::ExpmBackend;
use spinmagnus::hamiltonian::{SpinSpec, SpinSystem};
use spinmagnus::observables::ObservableSpec;
use spinmagnus::quadrature::QuadratureRule;
use spinmagnus::solvers::{Method, TimeGrid};
use spinmagnus::spinalg::KroneckerTermList;

use crate::error::{BenchError, Result};

pub const MAX_CONFIG_K: u32 = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub spins: Vec<SpinSpec>,
    #[serde(default)]
    pub coupling: Option<KroneckerTermList>,
    pub rho0: KroneckerTermList,
    #[serde(default = "one")]
    pub field_scale: f64,
}

fn one() -> f64 {
    1.0
}

impl SystemConfig {
    /// Assembles the system; checks shapes and Hermiticity of `rho0`/`H_J`.
    pub fn build(&self) -> Result<SpinSystem> {
        let spins = self
            .spins
            .iter()
            .map(|s| s.to_coefficients(self.field_scale))
            .collect::<spinmagnus::Result<Vec<_>>>()?;
        Ok(SpinSystem::new(spins, self.coupling.clone(), self.rho0.clone())?)
    }
}

/// Raw file layout. Names are kept as strings so unknown ones produce a
/// validation error that names the field.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRunConfig {
    t_span: [f64; 2],
    k: u32,
    system: SystemConfig,
    method: String,
    #[serde(default = "default_rule")]
    rule: String,
    #[serde(default = "default_backend")]
    expm_backend: String,
    #[serde(default)]
    krylov_m: Option<usize>,
    #[serde(default)]
    observables: Vec<ObservableSpec>,
    #[serde(default = "default_output")]
    output_path: PathBuf,
}

fn default_rule() -> String {
    "midpoint".into()
}

fn default_backend() -> String {
    "pade".into()
}

fn default_output() -> PathBuf {
    PathBuf::from("trajectory.csv")
}

/// A validated run description.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub t_span: [f64; 2],
    pub k: u32,
    pub system_spec: SystemConfig,
    pub system: SpinSystem,
    pub method: Method,
    pub rule: QuadratureRule,
    pub expm_backend: ExpmBackend,
    pub observables: Vec<ObservableSpec>,
    pub output_path: PathBuf,
}

impl RunConfig {
    pub fn grid(&self) -> Result<TimeGrid> {
        self.grid_at(self.k)
    }

    pub fn grid_at(&self, k: u32) -> Result<TimeGrid> {
        Ok(TimeGrid::new(self.t_span[0], self.t_span[1], k)?)
    }

    /// Same run with the system's field scale replaced.
    pub fn with_field_scale(&self, field_scale: f64) -> Result<Self> {
        let mut spec = self.system_spec.clone();
        spec.field_scale = field_scale;
        let system = spec.build()?;
        Ok(Self {
            system_spec: spec,
            system,
            ..self.clone()
        })
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> BenchError {
    BenchError::Validation(format!("{field}: {msg}"))
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawRunConfig = serde_json::from_str(text).map_err(|e| BenchError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let [t0, tf] = raw.t_span;
    if !(t0.is_finite() && tf.is_finite() && t0 < tf) {
        return Err(invalid("t_span", format!("need finite t0 < tf, got [{t0}, {tf}]")));
    }
    if raw.k > MAX_CONFIG_K {
        return Err(invalid("k", format!("must be in [0, {MAX_CONFIG_K}], got {}", raw.k)));
    }
    if raw.system.spins.is_empty() {
        return Err(invalid("system.spins", "at least one spin is required"));
    }
    let n = raw.system.spins.len();
    if raw.system.rho0.n_spins() != n {
        return Err(invalid(
            "system.rho0",
            format!("has {} factors per term, expected {n}", raw.system.rho0.n_spins()),
        ));
    }
    if let Some(c) = &raw.system.coupling {
        if c.n_spins() != n {
            return Err(invalid(
                "system.coupling",
                format!("has {} factors per term, expected {n}", c.n_spins()),
            ));
        }
    }
    for o in &raw.observables {
        if o.n_spins() != n {
            return Err(invalid(
                "observables",
                format!("{:?} has {} factors, expected {n}", o.label(), o.n_spins()),
            ));
        }
    }
    let method: Method = raw.method.parse().map_err(|e| invalid("method", e))?;
    let rule: QuadratureRule = raw.rule.parse().map_err(|e| invalid("rule", e))?;
    let expm_backend =
        ExpmBackend::from_name(&raw.expm_backend, raw.krylov_m).map_err(|e| invalid("expm_backend", e))?;
    let system = raw.system.build()?;
    Ok(RunConfig {
        t_span: raw.t_span,
        k: raw.k,
        system_spec: raw.system,
        system,
        method,
        rule,
        expm_backend,
        observables: raw.observables,
        output_path: raw.output_path,
    })
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_config(&text)
}
