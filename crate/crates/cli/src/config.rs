//! Configuration resolution: preset, then config file, then flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use lyochaos::physics::resolve_field_mut;
use lyochaos::studies::{Method, ModelKind};
use lyochaos::{Conditions, Error, Parameters, Result, StudyConfig};
use serde::{Deserialize, Serialize};

/// Settings for the plain simulation subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSettings {
    /// Simulated span from the initial time (s).
    pub t_end: f64,
    /// Output points including both ends.
    pub points: usize,
    /// Bound-water target for the secondary drying time (wt/wt).
    pub target: f64,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self { t_end: 15.0 * 3600.0, points: 301, target: lyochaos::secondary::DEFAULT_TARGET }
    }
}

/// On-disk configuration document. Every section is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub preset: Option<String>,
    pub params: Option<PathBuf>,
    pub conditions: Option<PathBuf>,
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
    pub study: Option<toml::Table>,
    pub simulation: Option<toml::Table>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: FileConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        // Relative data paths are taken relative to the config file.
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.params, &mut cfg.conditions].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Flag values that override the file.
#[derive(Debug, Default, Clone)]
pub struct FlagOverrides {
    pub preset: Option<String>,
    pub params: Option<PathBuf>,
    pub conditions: Option<PathBuf>,
    pub seed: Option<u64>,
    pub method: Option<Method>,
    pub samples: Option<usize>,
    pub order: Option<usize>,
    pub nodes: Option<usize>,
    pub set: Vec<(String, f64)>,
}

/// Fully resolved run description; echoed into every summary.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub preset: String,
    pub params_file: Option<PathBuf>,
    pub conditions_file: Option<PathBuf>,
    pub overrides: BTreeMap<String, f64>,
    pub parameters: Parameters,
    pub conditions: Conditions,
    pub study: StudyConfig,
    pub simulation: SimulationSettings,
}

pub fn preset(name: &str) -> Result<StudyConfig> {
    match name.to_ascii_lowercase().as_str() {
        "a1" => Ok(StudyConfig::case_a1()),
        "a2" => Ok(StudyConfig::case_a2()),
        "b1" => Ok(StudyConfig::case_b1()),
        "b2" => Ok(StudyConfig::case_b2()),
        other => Err(Error::Config(format!("unknown preset `{other}` (expected a1, a2, b1 or b2)"))),
    }
}

/// Recursively overlays `top` onto `base`.
fn merge(base: &mut toml::Table, top: toml::Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn overlay<T: Clone + Serialize + for<'de> Deserialize<'de>>(base: &T, top: Option<toml::Table>, what: &str) -> Result<T> {
    let Some(top) = top else { return Ok(base.clone()) };
    let mut table = toml::Table::try_from(base).map_err(|e| Error::Config(format!("{what}: {e}")))?;
    merge(&mut table, top);
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::Config(format!("[{what}] {e}")))
}

/// Builds the run configuration: `default_preset` (or the file/flag preset),
/// then the file, then the flags.
pub fn resolve(
    command: &str,
    default_preset: &str,
    file: Option<FileConfig>,
    flags: &FlagOverrides,
    model_hint: Option<ModelKind>,
) -> Result<RunConfig> {
    let file = file.unwrap_or_default();
    let preset_name = flags.preset.clone().or(file.preset.clone()).unwrap_or_else(|| default_preset.to_string());
    let mut study = overlay(&preset(&preset_name)?, file.study, "study")?;
    if let Some(m) = model_hint {
        study.model = m;
    }
    let simulation = overlay(&SimulationSettings::default(), file.simulation, "simulation")?;

    if let Some(seed) = flags.seed {
        study.seed = seed;
    }
    if let Some(order) = flags.order {
        study.order = order;
    }
    if let Some(nodes) = flags.nodes {
        study.space_nodes = nodes;
    }
    if let Some(method) = flags.method {
        study.method = method;
    }
    if let Some(n) = flags.samples {
        if study.method.uses_pce() {
            study.pce_samples = n;
        }
        if study.method.uses_mc() {
            study.mc_samples = n;
        }
    }

    let params_file = flags.params.clone().or(file.params);
    let conditions_file = flags.conditions.clone().or(file.conditions);
    let parameters = match &params_file {
        Some(p) => Parameters::from_file(p).map_err(as_config)?,
        None => Parameters::default_set(),
    };
    let conditions = match &conditions_file {
        Some(p) => Conditions::from_file(p).map_err(as_config)?,
        None => match study.model {
            ModelKind::Primary => Conditions::default_primary(),
            ModelKind::Secondary => Conditions::default_secondary(),
        },
    };
    let mut overrides = file.overrides;
    overrides.extend(flags.set.iter().cloned());
    let (mut parameters, mut conditions) = (parameters, conditions);
    for (name, value) in &overrides {
        *resolve_field_mut(&mut parameters, &mut conditions, name)? = *value;
    }
    lyochaos::physics::validate_parameters(&parameters, &conditions)?;
    study.validate()?;
    if simulation.points < 2 || !(simulation.t_end > 0.0) {
        return Err(Error::Config("simulation needs t_end > 0 and at least 2 points".into()));
    }

    Ok(RunConfig {
        command: command.to_string(),
        preset: preset_name.to_ascii_lowercase(),
        params_file,
        conditions_file,
        overrides,
        parameters,
        conditions,
        study,
        simulation,
    })
}

/// File-loading problems are configuration errors for the exit status.
fn as_config(e: Error) -> Error {
    match e {
        Error::Io(m) => Error::Config(m),
        other => other,
    }
}

impl RunConfig {
    pub fn scenario(&self) -> lyochaos::Scenario {
        lyochaos::Scenario::new(self.parameters, self.conditions)
    }
}
