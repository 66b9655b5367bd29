//! Runtime configuration with layered precedence: explicit overrides, then
//! `FDO_*` environment variables, then a TOML file, then defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::bundled;
use crate::conformance::ReportFormat;
use crate::pid::is_valid_prefix;
use crate::registry::{DEFAULT_PREFIX, DEFAULT_PROXY};

pub const CONFIG_FILE: &str = "fdo.toml";
pub const DEFAULT_REGISTRY_PATH: &str = ".fdo";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {detail}")]
    Unreadable { path: String, detail: String },
    #[error("invalid config file {path}: {detail}")]
    Invalid { path: String, detail: String },
    #[error("invalid value {value:?} for {key}")]
    InvalidValue { key: &'static str, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub registry_path: PathBuf,
    pub fixtures: Vec<PathBuf>,
    pub pid_prefix: String,
    pub online: bool,
    pub proxy: String,
    pub mirror: Option<PathBuf>,
    pub output_format: ReportFormat,
    pub bind: String,
}

impl Default for Config {
    fn default() -> Self {
        let bundled_dirs = ["energy", "external"].map(bundled::fixture_dir);
        let manifest = bundled::fixture_dir("payloads").join("manifest.json");
        Self {
            registry_path: PathBuf::from(DEFAULT_REGISTRY_PATH),
            fixtures: bundled_dirs.into_iter().filter(|d| d.is_dir()).collect(),
            pid_prefix: DEFAULT_PREFIX.to_owned(),
            online: false,
            proxy: DEFAULT_PROXY.to_owned(),
            mirror: manifest.is_file().then_some(manifest),
            output_format: ReportFormat::Table,
            bind: DEFAULT_BIND.to_owned(),
        }
    }
}

/// One configuration layer; unset fields fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub registry_path: Option<PathBuf>,
    pub fixtures: Option<Vec<PathBuf>>,
    pub pid_prefix: Option<String>,
    pub online: Option<bool>,
    pub proxy: Option<String>,
    pub mirror: Option<PathBuf>,
    pub output_format: Option<ReportFormat>,
    pub bind: Option<String>,
}

impl Layer {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Invalid { path: path.display().to_string(), detail: e.to_string() })
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Unreadable { path: path.display().to_string(), detail: e.to_string() })?;
        Self::from_toml(&text, path)
    }

    /// Reads `FDO_REGISTRY_PATH`, `FDO_PID_PREFIX` and `FDO_ONLINE` through
    /// `lookup`.
    pub fn from_env(lookup: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let online = match lookup("FDO_ONLINE") {
            None => None,
            Some(v) => Some(parse_bool(&v).ok_or(ConfigError::InvalidValue { key: "FDO_ONLINE", value: v })?),
        };
        Ok(Self {
            registry_path: lookup("FDO_REGISTRY_PATH").map(PathBuf::from),
            pid_prefix: lookup("FDO_PID_PREFIX"),
            online,
            ..Self::default()
        })
    }

    fn apply(self, config: &mut Config) {
        if let Some(v) = self.registry_path {
            config.registry_path = v;
        }
        if let Some(v) = self.fixtures {
            config.fixtures = v;
        }
        if let Some(v) = self.pid_prefix {
            config.pid_prefix = v;
        }
        if let Some(v) = self.online {
            config.online = v;
        }
        if let Some(v) = self.proxy {
            config.proxy = v;
        }
        if let Some(v) = self.mirror {
            config.mirror = Some(v);
        }
        if let Some(v) = self.output_format {
            config.output_format = v;
        }
        if let Some(v) = self.bind {
            config.bind = v;
        }
    }
}

fn parse_bool(text: &str) -> Option<bool> {
    match text.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Some(true),
        "0" | "false" | "no" | "off" | "" => Some(false),
        _ => None,
    }
}

impl Config {
    /// Merges layers, highest precedence first, over the defaults.
    pub fn resolve(flags: Layer, env: Layer, file: Layer) -> Result<Self, ConfigError> {
        let mut config = Config::default();
        for layer in [file, env, flags] {
            layer.apply(&mut config);
        }
        if !is_valid_prefix(&config.pid_prefix) {
            return Err(ConfigError::InvalidValue { key: "pid_prefix", value: config.pid_prefix });
        }
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn precedence_flags_env_file_default() {
        let file = Layer::from_toml(
            "pid_prefix = \"11.FILE\"\nregistry_path = \"/file\"\nonline = true\nbind = \"0.0.0.0:1\"\n",
            Path::new("fdo.toml"),
        )
        .unwrap();
        let vars: HashMap<&str, &str> = [("FDO_PID_PREFIX", "22.ENV"), ("FDO_ONLINE", "false")].into();
        let env = Layer::from_env(|k| vars.get(k).map(|v| v.to_string())).unwrap();
        let flags = Layer { pid_prefix: Some("33.FLAG".into()), ..Layer::default() };

        let config = Config::resolve(flags, env.clone(), file.clone()).unwrap();
        assert_eq!(config.pid_prefix, "33.FLAG");
        assert!(!config.online);
        assert_eq!(config.registry_path, PathBuf::from("/file"));
        assert_eq!(config.bind, "0.0.0.0:1");

        let config = Config::resolve(Layer::default(), env, file).unwrap();
        assert_eq!(config.pid_prefix, "22.ENV");
        assert_eq!(Config::resolve(Layer::default(), Layer::default(), Layer::default()).unwrap(), Config::default());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Layer::from_env(|k| (k == "FDO_ONLINE").then(|| "maybe".to_owned())).is_err());
        assert!(Layer::from_toml("colour = 1", Path::new("x")).is_err());
        let flags = Layer { pid_prefix: Some("no spaces".into()), ..Layer::default() };
        assert!(Config::resolve(flags, Layer::default(), Layer::default()).is_err());
    }
}
