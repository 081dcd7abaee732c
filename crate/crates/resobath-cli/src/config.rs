//! Scenario configuration: TOML schema, sweep expansion, and validation.
//!
//! A config file holds one or more `[[scenario]]` tables. Each scenario names
//! a model, an atom, a time grid, exactly one environment, and optionally an
//! initial state, a field table (single-mode reference model only), output
//! selection, and a sweep. Sweeps are expanded *before* deserialization by
//! patching the raw TOML tree, so any numeric scenario field is sweepable by
//! its dotted path (for example `environment.length` or `atom.omega0`).

use serde::Deserialize;

use resobath_core::dephasing::ZCouplingScale;
use resobath_core::oracle::{FieldState, JCConfig};
use resobath_core::{
    CavityConfig, ModeSet, SpectralDensity, TimeGrid, TwoLevelParams, TwoLevelState,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    SigmaPm,
    SigmaZ,
    Both,
    JcOracle,
    SingleExcitationOracle,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::SigmaPm => "sigma_pm",
            Model::SigmaZ => "sigma_z",
            Model::Both => "both",
            Model::JcOracle => "jc_oracle",
            Model::SingleExcitationOracle => "single_excitation_oracle",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    omega0: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    x: f64,
    #[serde(default)]
    y_re: f64,
    #[serde(default)]
    y_im: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    t_max: f64,
    n_steps: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawEnvironment {
    ModeSet {
        /// `[omega, g]` pairs.
        modes: Vec<[f64; 2]>,
    },
    Lorentzian {
        center: f64,
        width: f64,
        weight: f64,
    },
    FlatBand {
        omega_min: f64,
        omega_max: f64,
        density: f64,
        coupling: f64,
    },
    Ohmic {
        exponent: f64,
        scale: f64,
        cutoff: f64,
    },
    Cavity {
        length: f64,
        x_atom: f64,
        lambda: f64,
        n_modes: usize,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    state: String,
    n: Option<usize>,
    n_bar: Option<f64>,
    fock_cutoff: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    path: String,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    model: Model,
    atom: RawAtom,
    grid: RawGrid,
    environment: RawEnvironment,
    initial: Option<RawInitial>,
    field: Option<RawField>,
    #[serde(default)]
    outputs: Option<Vec<String>>,
    z_coupling_scale: Option<String>,
    /// Mode count used when the dephasing model needs a continuum
    /// environment discretized.
    n_discretize: Option<usize>,
    // consumed before deserialization; kept so deny_unknown_fields accepts it
    #[allow(dead_code)]
    sweep: Option<RawSweep>,
}

/// Whole-file structural check; the field itself is re-read per scenario so
/// sweeps can patch the raw tree first.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[allow(dead_code)]
    scenario: Vec<RawScenario>,
}

/// The resolved environment, domain-typed.
#[derive(Debug, Clone)]
pub enum Environment {
    Modes(ModeSet),
    Density(SpectralDensity),
    Cavity(CavityConfig),
}

impl Environment {
    /// Canonical one-line description, hashed into the summary digest.
    pub fn describe(&self) -> String {
        match self {
            Environment::Modes(m) => {
                let parts: Vec<String> = m
                    .modes()
                    .iter()
                    .map(|mode| format!("({:.9e},{:.9e})", mode.omega, mode.g))
                    .collect();
                format!("mode_set[{}]", parts.join(","))
            }
            Environment::Density(SpectralDensity::Lorentzian {
                center,
                width,
                weight,
            }) => format!("lorentzian(center={center:.9e},width={width:.9e},weight={weight:.9e})"),
            Environment::Density(SpectralDensity::FlatBand {
                omega_min,
                omega_max,
                density,
                coupling,
            }) => format!(
                "flat_band(omega_min={omega_min:.9e},omega_max={omega_max:.9e},density={density:.9e},coupling={coupling:.9e})"
            ),
            Environment::Density(SpectralDensity::OhmicFamily {
                exponent,
                scale,
                cutoff,
            }) => format!("ohmic(exponent={exponent:.9e},scale={scale:.9e},cutoff={cutoff:.9e})"),
            Environment::Cavity(c) => format!(
                "cavity(length={:.9e},x_atom={:.9e},lambda={:.9e},n_modes={})",
                c.length, c.x_atom, c.lambda, c.n_modes
            ),
        }
    }
}

/// Requested output files.
#[derive(Debug, Clone, Copy)]
pub struct Outputs {
    pub timeseries: bool,
    pub summary: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            timeseries: true,
            summary: true,
        }
    }
}

/// A fully validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub atom: TwoLevelParams,
    pub initial: TwoLevelState,
    pub grid: TimeGrid,
    pub environment: Environment,
    pub field: Option<JCConfig>,
    pub outputs: Outputs,
    pub z_scale: ZCouplingScale,
    pub n_discretize: Option<usize>,
    /// Set for sweep points: (index, swept value).
    pub sweep_point: Option<(usize, f64)>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn resolve(raw: RawScenario, sweep_point: Option<(usize, f64)>) -> Result<Scenario, CliError> {
    let atom = TwoLevelParams::new(raw.atom.omega0)
        .map_err(|e| config_err(format!("scenario `{}`: atom: {e}", raw.name)))?;
    let grid = TimeGrid::new(raw.grid.t_max, raw.grid.n_steps)
        .map_err(|e| config_err(format!("scenario `{}`: grid: {e}", raw.name)))?;
    let initial = match &raw.initial {
        None => TwoLevelState::excited(),
        Some(i) => TwoLevelState::new(i.x, num_complex::Complex64::new(i.y_re, i.y_im))
            .map_err(|e| config_err(format!("scenario `{}`: initial: {e}", raw.name)))?,
    };
    let environment = match &raw.environment {
        RawEnvironment::ModeSet { modes } => Environment::Modes(
            ModeSet::from_pairs(&modes.iter().map(|m| (m[0], m[1])).collect::<Vec<_>>())
                .map_err(|e| config_err(format!("scenario `{}`: environment: {e}", raw.name)))?,
        ),
        RawEnvironment::Lorentzian {
            center,
            width,
            weight,
        } => Environment::Density(
            SpectralDensity::lorentzian(*center, *width, *weight)
                .map_err(|e| config_err(format!("scenario `{}`: environment: {e}", raw.name)))?,
        ),
        RawEnvironment::FlatBand {
            omega_min,
            omega_max,
            density,
            coupling,
        } => Environment::Density(
            SpectralDensity::flat_band(*omega_min, *omega_max, *density, *coupling)
                .map_err(|e| config_err(format!("scenario `{}`: environment: {e}", raw.name)))?,
        ),
        RawEnvironment::Ohmic {
            exponent,
            scale,
            cutoff,
        } => Environment::Density(
            SpectralDensity::ohmic_family(*exponent, *scale, *cutoff)
                .map_err(|e| config_err(format!("scenario `{}`: environment: {e}", raw.name)))?,
        ),
        RawEnvironment::Cavity {
            length,
            x_atom,
            lambda,
            n_modes,
        } => Environment::Cavity(
            CavityConfig::new(*length, *x_atom, *lambda, *n_modes)
                .map_err(|e| config_err(format!("scenario `{}`: environment: {e}", raw.name)))?,
        ),
    };

    let field = match (&raw.field, raw.model) {
        (None, Model::JcOracle) => {
            return Err(config_err(format!(
                "scenario `{}`: model jc_oracle requires a [scenario.field] table",
                raw.name
            )));
        }
        (Some(_), m) if m != Model::JcOracle => {
            return Err(config_err(format!(
                "scenario `{}`: field table is only meaningful for model jc_oracle",
                raw.name
            )));
        }
        (None, _) => None,
        (Some(f), Model::JcOracle) => {
            let mode = match &environment {
                Environment::Modes(m) if m.len() == 1 => m.modes()[0],
                _ => {
                    return Err(config_err(format!(
                        "scenario `{}`: jc_oracle requires a mode_set environment with exactly one mode",
                        raw.name
                    )));
                }
            };
            let state = match f.state.as_str() {
                "fock" => FieldState::Fock(f.n.ok_or_else(|| {
                    config_err(format!("scenario `{}`: field.n required for fock", raw.name))
                })?),
                "coherent" => FieldState::Coherent(f.n_bar.ok_or_else(|| {
                    config_err(format!(
                        "scenario `{}`: field.n_bar required for coherent",
                        raw.name
                    ))
                })?),
                other => {
                    return Err(config_err(format!(
                        "scenario `{}`: unknown field state `{other}` (expected fock|coherent)",
                        raw.name
                    )));
                }
            };
            Some(
                JCConfig::new(mode.g, raw.atom.omega0, mode.omega, state, f.fock_cutoff)
                    .map_err(|e| config_err(format!("scenario `{}`: field: {e}", raw.name)))?,
            )
        }
        _ => None,
    };

    let outputs = match &raw.outputs {
        None => Outputs::default(),
        Some(list) => {
            let mut out = Outputs {
                timeseries: false,
                summary: false,
            };
            for item in list {
                match item.as_str() {
                    "timeseries" => out.timeseries = true,
                    "summary" => out.summary = true,
                    other => {
                        return Err(config_err(format!(
                            "scenario `{}`: unknown output `{other}` (expected timeseries|summary)",
                            raw.name
                        )));
                    }
                }
            }
            out
        }
    };

    let z_scale = match raw.z_coupling_scale.as_deref() {
        None | Some("sigma_z") => ZCouplingScale::SigmaZ,
        Some("spin_half") => ZCouplingScale::SpinHalf,
        Some(other) => {
            return Err(config_err(format!(
                "scenario `{}`: unknown z_coupling_scale `{other}` (expected sigma_z|spin_half)",
                raw.name
            )));
        }
    };

    Ok(Scenario {
        name: raw.name,
        model: raw.model,
        atom,
        initial,
        grid,
        environment,
        field,
        outputs,
        z_scale,
        n_discretize: raw.n_discretize,
        sweep_point,
    })
}

/// Assign `value` at a dotted path inside a TOML table tree. Integer leaves
/// accept only integral sweep values.
fn set_path(root: &mut toml::Value, path: &str, value: f64) -> Result<(), String> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(format!("malformed sweep path `{path}`"));
    }
    let mut cursor = root;
    for (depth, part) in parts.iter().enumerate() {
        let table = cursor
            .as_table_mut()
            .ok_or_else(|| format!("sweep path `{path}`: `{part}` is not inside a table"))?;
        let entry = table
            .get_mut(*part)
            .ok_or_else(|| format!("unknown sweep parameter path `{path}` (no key `{part}`)"))?;
        if depth == parts.len() - 1 {
            match entry {
                toml::Value::Float(f) => *f = value,
                toml::Value::Integer(n) => {
                    if value.fract() != 0.0 {
                        return Err(format!(
                            "sweep path `{path}` targets an integer field but got {value}"
                        ));
                    }
                    *n = value as i64;
                }
                _ => {
                    return Err(format!("sweep path `{path}` does not target a number"));
                }
            }
            return Ok(());
        }
        cursor = entry;
    }
    unreachable!()
}

/// Parse a config file into the expanded, validated scenario list.
///
/// Returns scenarios grouped exactly as they will be summarized: sweeps are
/// expanded in declaration order with `sweep_point` set.
pub fn parse_config(text: &str) -> Result<Vec<Scenario>, CliError> {
    let root: toml::Value = text
        .parse()
        .map_err(|e: toml::de::Error| config_err(format!("config parse error: {e}")))?;
    // Structural validation of the whole file up front (unknown fields, wrong
    // types) so errors carry serde's field context.
    let _: RawConfig = RawConfig::deserialize(root.clone())
        .map_err(|e| config_err(format!("config error: {e}")))?;

    let scenarios_raw = root
        .get("scenario")
        .and_then(|v| v.as_array())
        .ok_or_else(|| config_err("config must contain at least one [[scenario]]"))?;

    let mut out = Vec::new();
    for table in scenarios_raw {
        let sweep: Option<RawSweep> = match table.get("sweep") {
            None => None,
            Some(v) => Some(
                RawSweep::deserialize(v.clone())
                    .map_err(|e| config_err(format!("sweep: {e}")))?,
            ),
        };
        match sweep {
            None => {
                let raw = RawScenario::deserialize(table.clone())
                    .map_err(|e| config_err(format!("scenario: {e}")))?;
                out.push(resolve(raw, None)?);
            }
            Some(sweep) => {
                if sweep.values.is_empty() {
                    return Err(config_err("sweep.values must not be empty"));
                }
                for (index, &value) in sweep.values.iter().enumerate() {
                    let mut patched = table.clone();
                    patched
                        .as_table_mut()
                        .expect("scenario is a table")
                        .remove("sweep");
                    set_path(&mut patched, &sweep.path, value).map_err(config_err)?;
                    let raw = RawScenario::deserialize(patched)
                        .map_err(|e| config_err(format!("scenario (sweep {index}): {e}")))?;
                    out.push(resolve(raw, Some((index, value)))?);
                }
            }
        }
    }
    // duplicate names would make output files overwrite each other
    let mut names: Vec<&str> = out
        .iter()
        .filter(|s| s.sweep_point.map_or(true, |(i, _)| i == 0))
        .map(|s| s.name.as_str())
        .collect();
    names.sort_unstable();
    if let Some(dup) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(config_err(format!(
            "duplicate scenario name `{}`",
            dup[0]
        )));
    }
    Ok(out)
}
