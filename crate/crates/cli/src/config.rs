use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use xxz_core::experiments::InitialState;
use xxz_core::operators::DEFAULT_MAX_TOTAL_SPINS;
use xxz_core::{Boundary, ChainSpec, Convention, CouplingSpec, Topology};

/// A config problem tied to one field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "invalid config: {}", self.message)
        } else {
            write!(f, "invalid config: {}: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Effective,
    Evolve,
    Sweep,
    Critical,
    Scaling,
    Fullcheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Effective => "effective",
            Command::Evolve => "evolve",
            Command::Sweep => "sweep",
            Command::Critical => "critical",
            Command::Scaling => "scaling",
            Command::Fullcheck => "fullcheck",
        }
    }

    /// Whether the command evaluates the chain at the single field `chain.field`.
    fn needs_field(self) -> bool {
        matches!(self, Command::Spectrum | Command::Effective | Command::Evolve | Command::Fullcheck)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainConfig {
    pub sites: usize,
    pub exchange: f64,
    pub anisotropy: f64,
    pub field: Option<f64>,
    pub boundary: Boundary,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            sites: 2,
            exchange: 1.0,
            anisotropy: 0.25,
            field: None,
            boundary: Boundary::Open,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    AllSites,
    EndSites,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingConfig {
    pub strength: f64,
    pub topology: TopologyKind,
    /// Chain sites of probe a, for the explicit topology.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sites_a: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sites_b: Vec<usize>,
    pub convention: Convention,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            strength: 0.2,
            topology: TopologyKind::AllSites,
            sites_a: Vec::new(),
            sites_b: Vec::new(),
            convention: Convention::PauliDot,
        }
    }
}

/// `values` wins over the start/stop/step range when given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl GridConfig {
    fn range(start: f64, stop: f64, step: f64) -> Self {
        Self {
            start,
            stop,
            step,
            values: None,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        match &self.values {
            Some(v) => v.clone(),
            None => xxz_core::experiments::stepped(self.start, self.stop, self.step),
        }
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if let Some(v) = &self.values {
            if v.is_empty() {
                return Err(ConfigError::new(&format!("{field}.values"), "must not be empty"));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(ConfigError::new(&format!("{field}.values"), "must be finite"));
            }
            return Ok(());
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.stop < self.start {
            return Err(ConfigError::new(field, "needs finite start <= stop"));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(ConfigError::new(&format!("{field}.step"), "must be positive"));
        }
        if (self.stop - self.start) / self.step > 1e7 {
            return Err(ConfigError::new(&format!("{field}.step"), "grid would exceed 10^7 points"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridsConfig {
    pub fields: GridConfig,
    pub times: GridConfig,
}

impl Default for GridsConfig {
    fn default() -> Self {
        Self {
            fields: GridConfig::range(0.0, 4.0, 0.02),
            times: GridConfig::range(0.0, 50.0, 0.05),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriticalConfig {
    pub range: [f64; 2],
    pub grid_step: f64,
    pub bracket_tol: f64,
}

impl Default for CriticalConfig {
    fn default() -> Self {
        Self {
            range: [0.0, 4.0],
            grid_step: 0.01,
            bracket_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    /// Chain sizes for the B_C vs 1/N fit.
    pub sizes: Vec<usize>,
    /// Chain sizes for the period-ratio check; empty skips it.
    pub period_sizes: Vec<usize>,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            sizes: vec![2, 4, 6, 8],
            period_sizes: vec![4, 6],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EffectiveConfig {
    /// Drop chain levels degenerate with the ground state instead of failing.
    pub exclude_degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_initial")]
    pub initial_state: InitialState,
    #[serde(default)]
    pub chain: ChainConfig,
    #[serde(default)]
    pub coupling: CouplingConfig,
    #[serde(default)]
    pub grids: GridsConfig,
    #[serde(default)]
    pub effective: EffectiveConfig,
    #[serde(default)]
    pub critical: CriticalConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("xxz-output")
}

fn default_initial() -> InitialState {
    InitialState::Basis01
}

impl RunConfig {
    /// Parse a config file, or the `[config]` table of a run manifest.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = toml::from_str(text).map_err(|e| ConfigError::new("", e.message()))?;
        let config = if table.contains_key("run") && table.contains_key("config") {
            table["config"]
                .clone()
                .try_into()
                .map_err(|e: toml::de::Error| ConfigError::new("config", e.message()))?
        } else {
            toml::from_str(text).map_err(|e| ConfigError::new("", describe(&e, text)))?
        };
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.chain;
        if c.sites < 2 {
            return Err(ConfigError::new("chain.sites", format!("must be at least 2, got {}", c.sites)));
        }
        let probes = !matches!(self.command, Command::Spectrum | Command::Critical | Command::Scaling);
        if probes && c.sites + 2 > DEFAULT_MAX_TOTAL_SPINS {
            return Err(ConfigError::new(
                "chain.sites",
                format!("chain plus probes must fit in {DEFAULT_MAX_TOTAL_SPINS} spins, got {}", c.sites + 2),
            ));
        }
        if !probes && c.sites > 16 {
            return Err(ConfigError::new("chain.sites", format!("at most 16 sites, got {}", c.sites)));
        }
        if c.exchange == 0.0 || !c.exchange.is_finite() {
            return Err(ConfigError::new("chain.exchange", "must be finite and nonzero"));
        }
        if !c.anisotropy.is_finite() {
            return Err(ConfigError::new("chain.anisotropy", "must be finite"));
        }
        match c.field {
            Some(b) if !b.is_finite() => return Err(ConfigError::new("chain.field", "must be finite")),
            None if self.command.needs_field() => {
                return Err(ConfigError::new(
                    "chain.field",
                    format!("required by the {} command", self.command.name()),
                ))
            }
            _ => {}
        }
        if !self.coupling.strength.is_finite() {
            return Err(ConfigError::new("coupling.strength", "must be finite"));
        }
        if self.coupling.topology == TopologyKind::Explicit {
            for (name, sites) in [("coupling.sites_a", &self.coupling.sites_a), ("coupling.sites_b", &self.coupling.sites_b)] {
                if sites.is_empty() {
                    return Err(ConfigError::new(name, "required for the explicit topology"));
                }
                if let Some(bad) = sites.iter().find(|&&s| s == 0 || s > c.sites) {
                    return Err(ConfigError::new(name, format!("site {bad} outside [1, {}]", c.sites)));
                }
            }
        } else if !self.coupling.sites_a.is_empty() || !self.coupling.sites_b.is_empty() {
            return Err(ConfigError::new("coupling.sites_a", "only allowed with topology = \"explicit\""));
        }
        match self.command {
            Command::Evolve | Command::Fullcheck => self.grids.times.validate("grids.times")?,
            Command::Sweep => {
                self.grids.fields.validate("grids.fields")?;
                self.grids.times.validate("grids.times")?;
            }
            Command::Critical => {
                let k = &self.critical;
                if !(k.range[0].is_finite() && k.range[1].is_finite() && k.range[0] < k.range[1]) {
                    return Err(ConfigError::new("critical.range", "needs finite lo < hi"));
                }
                if !(k.grid_step > 0.0) || !(k.bracket_tol > 0.0) {
                    return Err(ConfigError::new("critical", "grid_step and bracket_tol must be positive"));
                }
            }
            Command::Scaling => {
                if c.exchange != 1.0 {
                    return Err(ConfigError::new("chain.exchange", "scaling runs use J = 1"));
                }
                if self.scaling.sizes.len() < 3 {
                    return Err(ConfigError::new("scaling.sizes", "needs at least 3 chain sizes"));
                }
                if let Some(bad) = self.scaling.sizes.iter().find(|&&n| n < 2 || n > 16) {
                    return Err(ConfigError::new("scaling.sizes", format!("size {bad} outside [2, 16]")));
                }
                if let Some(bad) = self
                    .scaling
                    .period_sizes
                    .iter()
                    .find(|&&n| n % 2 != 0 || n < 2 || n + 2 > DEFAULT_MAX_TOTAL_SPINS)
                {
                    return Err(ConfigError::new(
                        "scaling.period_sizes",
                        format!("size {bad} must be even with N + 2 <= {DEFAULT_MAX_TOTAL_SPINS}"),
                    ));
                }
            }
            Command::Spectrum | Command::Effective => {}
        }
        Ok(())
    }

    /// Chain at `chain.field` (0 when unset).
    pub fn chain_spec(&self) -> ChainSpec {
        let c = &self.chain;
        ChainSpec {
            sites: c.sites,
            exchange: c.exchange,
            anisotropy: c.anisotropy,
            field: c.field.unwrap_or(0.0),
            boundary: c.boundary,
        }
    }

    pub fn coupling_spec(&self) -> CouplingSpec {
        let c = &self.coupling;
        let topology = match c.topology {
            TopologyKind::AllSites => Topology::AllSites,
            TopologyKind::EndSites => Topology::EndSites,
            TopologyKind::Explicit => Topology::Explicit {
                a: c.sites_a.clone(),
                b: c.sites_b.clone(),
            },
        };
        CouplingSpec::new(c.strength, topology, c.convention)
    }
}

/// toml error message with the offending line, without the multi-line snippet.
fn describe(e: &toml::de::Error, text: &str) -> String {
    match e.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("line {line}: {}", e.message())
        }
        None => e.message().to_string(),
    }
}
