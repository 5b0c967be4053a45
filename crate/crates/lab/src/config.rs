//! Run configuration: one TOML file, every key optional, unknown keys
//! rejected. Everything a module would check is checked again at load.

use std::path::Path;

use gamow_core::crank_nicolson::Grid1D;
use gamow_core::model::{BoxMode, ShellModel};
use gamow_core::propagation::TimeGrid;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(rename = "truncation_N")]
    pub truncation_n: usize,
    /// Interior `(r, r')` probes for the Green function; the first one is
    /// used wherever a single probe is needed.
    pub probes: Vec<(f64, f64)>,
    pub model: ModelConfig,
    pub initial_state: InitialStateConfig,
    pub time_grid: TimeGridConfig,
    pub oracle: OracleConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub lambda: f64,
    #[serde(rename = "R")]
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialStateConfig {
    pub mode: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeGridConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_decade: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    #[serde(rename = "L")]
    pub length: f64,
    pub h: f64,
    pub dt: f64,
    pub cap_width: f64,
    pub cap_strength: f64,
    /// Validation horizon in lifetimes of the slowest resonance.
    pub horizon_lifetimes: f64,
    /// Samples over the horizon for `oracle-compare`.
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    /// Standard output when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub precision: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            truncation_n: 50,
            probes: vec![(0.3, 0.7), (0.2, 0.5), (0.6, 0.9)],
            model: ModelConfig::default(),
            initial_state: InitialStateConfig::default(),
            time_grid: TimeGridConfig::default(),
            oracle: OracleConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { lambda: 6.0, radius: 1.0 }
    }
}

impl Default for InitialStateConfig {
    fn default() -> Self {
        Self { mode: 1 }
    }
}

impl Default for TimeGridConfig {
    fn default() -> Self {
        Self { t_min: 1e-2, t_max: 1e4, points_per_decade: 16 }
    }
}

impl Default for OracleConfig {
    fn default() -> Self {
        let g = Grid1D::default_for(&ShellModel::default());
        Self {
            length: g.length,
            h: g.h,
            dt: g.dt,
            cap_width: g.cap_width,
            cap_strength: g.cap_strength,
            horizon_lifetimes: 5.0,
            samples: 40,
        }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { format: Format::Csv, path: None, precision: 17 }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(one_line(&e.to_string())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |what: &str, e: gamow_core::Error| ConfigError::Invalid(format!("{what}: {e}"));
        let model = self.model().map_err(|e| invalid("model", e))?;
        BoxMode::new(&model, self.initial_state.mode).map_err(|e| invalid("initial_state", e))?;
        if self.truncation_n == 0 {
            return Err(ConfigError::Invalid("truncation_N must be at least 1".into()));
        }
        self.time_grid().map_err(|e| invalid("time_grid", e))?;
        if self.probes.is_empty() {
            return Err(ConfigError::Invalid("at least one probe is required".into()));
        }
        for &(r, rp) in &self.probes {
            for x in [r, rp] {
                if !(0.0..model.radius()).contains(&x) {
                    return Err(ConfigError::Invalid(format!("probe coordinate {x} outside [0, R)")));
                }
            }
        }
        self.grid().map_err(|e| invalid("oracle", e))?;
        if !(self.oracle.horizon_lifetimes > 0.0) || self.oracle.samples == 0 {
            return Err(ConfigError::Invalid("oracle horizon and sample count must be positive".into()));
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(ConfigError::Invalid("output precision must be between 1 and 17 digits".into()));
        }
        Ok(())
    }

    pub fn model(&self) -> gamow_core::Result<ShellModel> {
        ShellModel::new(self.model.lambda, self.model.radius)
    }

    pub fn initial_state(&self) -> gamow_core::Result<BoxMode> {
        BoxMode::new(&self.model()?, self.initial_state.mode)
    }

    pub fn time_grid(&self) -> gamow_core::Result<TimeGrid> {
        let g = &self.time_grid;
        TimeGrid::log_spaced(g.t_min, g.t_max, g.points_per_decade)
    }

    pub fn grid(&self) -> gamow_core::Result<Grid1D> {
        let o = &self.oracle;
        Grid1D::new(&self.model()?, o.length, o.h, o.dt, o.cap_width, o.cap_strength)
    }

    pub fn probe(&self) -> (f64, f64) {
        self.probes[0]
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
