//! Experiment configuration. Values merge as defaults, then an optional TOML
//! file, then command-line flags. File keys are the flag names.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use sand_core::discovery::{DEFAULT_DEPTH_LIMIT, DEFAULT_TTL};
use sand_core::{OverlayMode, Scheme, SimTime, TopologyParams};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyChoice {
    Random,
    ScaleFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverlayChoice {
    Literal,
    Enriched,
}

impl From<OverlayChoice> for OverlayMode {
    fn from(o: OverlayChoice) -> Self {
        match o {
            OverlayChoice::Literal => OverlayMode::Literal,
            OverlayChoice::Enriched => OverlayMode::Enriched,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeChoice {
    Sand,
    Broadcast,
    Centralized,
}

impl From<SchemeChoice> for Scheme {
    fn from(s: SchemeChoice) -> Self {
        match s {
            SchemeChoice::Sand => Scheme::Sand,
            SchemeChoice::Broadcast => Scheme::Broadcast,
            SchemeChoice::Centralized => Scheme::Centralized,
        }
    }
}

/// TTL in milliseconds, or `inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(try_from = "TtlRepr")]
pub struct Ttl(pub SimTime);

#[derive(Deserialize)]
#[serde(untagged)]
enum TtlRepr {
    Millis(u64),
    Text(String),
}

impl TryFrom<TtlRepr> for Ttl {
    type Error = String;

    fn try_from(r: TtlRepr) -> Result<Self, String> {
        match r {
            TtlRepr::Millis(ms) => Ok(Ttl(SimTime::from_millis(ms))),
            TtlRepr::Text(s) => s.parse(),
        }
    }
}

impl FromStr for Ttl {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Ttl(SimTime::INFINITE));
        }
        s.parse::<u64>()
            .map(|ms| Ttl(SimTime::from_millis(ms)))
            .map_err(|_| format!("invalid ttl `{s}` (milliseconds or `inf`)"))
    }
}

/// Every experiment setting as an optional value. Doubles as the clap flag
/// set and the config-file schema.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigOverrides {
    #[arg(long, value_enum)]
    pub topology: Option<TopologyChoice>,
    #[arg(long)]
    pub devices: Option<usize>,
    /// Minimum degree (random topology).
    #[arg(long)]
    pub dmin: Option<u32>,
    /// Maximum degree (random topology).
    #[arg(long)]
    pub dmax: Option<u32>,
    /// Links per arriving device (scale-free topology).
    #[arg(long)]
    pub m: Option<u32>,
    /// Size of the feature pool.
    #[arg(long)]
    pub features: Option<u32>,
    #[arg(long)]
    pub features_per_device: Option<u32>,
    #[arg(long)]
    pub requests: Option<usize>,
    /// Milliseconds, or `inf`.
    #[arg(long)]
    pub ttl: Option<Ttl>,
    #[arg(long)]
    pub depth_limit: Option<u32>,
    #[arg(long, value_enum)]
    pub overlay: Option<OverlayChoice>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub schemes: Option<Vec<SchemeChoice>>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ConfigOverrides {
    /// Values set in `other` win.
    pub fn or(self, other: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            topology: other.topology.or(self.topology),
            devices: other.devices.or(self.devices),
            dmin: other.dmin.or(self.dmin),
            dmax: other.dmax.or(self.dmax),
            m: other.m.or(self.m),
            features: other.features.or(self.features),
            features_per_device: other.features_per_device.or(self.features_per_device),
            requests: other.requests.or(self.requests),
            ttl: other.ttl.or(self.ttl),
            depth_limit: other.depth_limit.or(self.depth_limit),
            overlay: other.overlay.or(self.overlay),
            schemes: other.schemes.or(self.schemes),
            seed: other.seed.or(self.seed),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config file {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("missing required --seed")]
    MissingSeed,
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("features ({features}) must be at least features-per-device ({per_device})")]
    FeaturePool { features: u32, per_device: u32 },
    #[error("schemes must not be empty")]
    NoSchemes,
}

pub fn load_config_file(path: &Path) -> Result<ConfigOverrides, ConfigError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: shown.clone(),
        source,
    })?;
    parse_config(&text).map_err(|msg| ConfigError::Parse { path: shown, msg })
}

pub fn parse_config(text: &str) -> Result<ConfigOverrides, String> {
    toml::from_str(text).map_err(|e| e.message().to_owned())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub topology: TopologyChoice,
    pub devices: usize,
    pub dmin: u32,
    pub dmax: u32,
    pub m: u32,
    pub features: u32,
    pub features_per_device: u32,
    pub requests: usize,
    pub ttl: SimTime,
    pub depth_limit: u32,
    pub overlay: OverlayMode,
    pub schemes: Vec<Scheme>,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(seed: u64) -> Self {
        let (dmin, dmax) = match TopologyParams::DEFAULT_RANDOM {
            TopologyParams::Random { dmin, dmax } => (dmin, dmax),
            TopologyParams::ScaleFree { .. } => unreachable!(),
        };
        let m = match TopologyParams::DEFAULT_SCALE_FREE {
            TopologyParams::ScaleFree { m } => m,
            TopologyParams::Random { .. } => unreachable!(),
        };
        ExperimentConfig {
            topology: TopologyChoice::ScaleFree,
            devices: 20_000,
            dmin,
            dmax,
            m,
            features: 2_000,
            features_per_device: 3,
            requests: 15_000,
            ttl: DEFAULT_TTL,
            depth_limit: DEFAULT_DEPTH_LIMIT,
            overlay: OverlayMode::Enriched,
            schemes: Scheme::ALL.to_vec(),
            seed,
        }
    }

    /// Applies overrides on top of the defaults and validates the result.
    pub fn resolve(o: ConfigOverrides) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::new(o.seed.ok_or(ConfigError::MissingSeed)?);
        if let Some(v) = o.topology {
            cfg.topology = v;
        }
        if let Some(v) = o.devices {
            cfg.devices = v;
        }
        if let Some(v) = o.dmin {
            cfg.dmin = v;
        }
        if let Some(v) = o.dmax {
            cfg.dmax = v;
        }
        if let Some(v) = o.m {
            cfg.m = v;
        }
        if let Some(v) = o.features {
            cfg.features = v;
        }
        if let Some(v) = o.features_per_device {
            cfg.features_per_device = v;
        }
        if let Some(v) = o.requests {
            cfg.requests = v;
        }
        if let Some(v) = o.ttl {
            cfg.ttl = v.0;
        }
        if let Some(v) = o.depth_limit {
            cfg.depth_limit = v;
        }
        if let Some(v) = o.overlay {
            cfg.overlay = v.into();
        }
        if let Some(v) = o.schemes {
            let mut schemes: Vec<Scheme> = v.into_iter().map(Scheme::from).collect();
            schemes.sort();
            schemes.dedup();
            cfg.schemes = schemes;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("devices", self.devices as u64),
            ("features", u64::from(self.features)),
            ("features-per-device", u64::from(self.features_per_device)),
            ("requests", self.requests as u64),
            ("ttl", self.ttl.micros()),
            ("depth-limit", u64::from(self.depth_limit)),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(ConfigError::NotPositive(name));
        }
        if self.features < self.features_per_device {
            return Err(ConfigError::FeaturePool {
                features: self.features,
                per_device: self.features_per_device,
            });
        }
        if self.schemes.is_empty() {
            return Err(ConfigError::NoSchemes);
        }
        Ok(())
    }

    pub fn topology_params(&self) -> TopologyParams {
        match self.topology {
            TopologyChoice::Random => TopologyParams::Random {
                dmin: self.dmin,
                dmax: self.dmax,
            },
            TopologyChoice::ScaleFree => TopologyParams::ScaleFree { m: self.m },
        }
    }

    pub fn with_features(&self, features: u32) -> Self {
        ExperimentConfig {
            features,
            ..self.clone()
        }
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let schemes: Vec<&str> = self.schemes.iter().map(|s| s.as_str()).collect();
        let topo = match self.topology_params() {
            TopologyParams::Random { dmin, dmax } => format!("random dmin={dmin} dmax={dmax}"),
            TopologyParams::ScaleFree { m } => format!("scale-free m={m}"),
        };
        write!(
            f,
            "{topo} devices={} features={}x{} requests={} ttl={}ms depth-limit={} overlay={} schemes={} seed={}",
            self.devices,
            self.features,
            self.features_per_device,
            self.requests,
            self.ttl,
            self.depth_limit,
            self.overlay.as_str(),
            schemes.join(","),
            self.seed
        )
    }
}
