//! Run configuration. Every field is resolved from, in decreasing priority,
//! command-line flags, `EPBES_*` environment variables, a TOML file, and the
//! built-in defaults; the result is validated before any work starts.

use std::time::Duration;

use epbes_core::explicit::Bounds;
use serde::Deserialize;
use thiserror::Error;

pub const DEFAULT_SMT_CMD: &str = "z3";
pub const DEFAULT_SMT_TIMEOUT_MS: u64 = 30_000;
pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_BUDGET: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub smt_cmd: String,
    pub smt_timeout: Duration,
    pub max_iter: usize,
    pub bounds: Bounds,
    pub format: Format,
    pub prune: bool,
    pub trace: bool,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            smt_cmd: DEFAULT_SMT_CMD.into(),
            smt_timeout: Duration::from_millis(DEFAULT_SMT_TIMEOUT_MS),
            max_iter: DEFAULT_MAX_ITER,
            bounds: Bounds::default(),
            format: Format::Text,
            prune: false,
            trace: false,
        }
    }
}

/// One layer of settings; unset fields fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Layer {
    pub smt_cmd: Option<String>,
    pub smt_timeout_ms: Option<u64>,
    pub max_iter: Option<usize>,
    pub value_cap: Option<u64>,
    pub witness_cap: Option<u64>,
    pub vertex_cap: Option<usize>,
    pub format: Option<Format>,
    pub prune: Option<bool>,
    pub trace: Option<bool>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("config file: {0}")]
    File(String),
    #[error("environment variable {name}: cannot read `{value}`")]
    Env { name: &'static str, value: String },
    #[error("{0}")]
    Invalid(String),
}

impl Layer {
    pub fn from_toml(text: &str) -> Result<Layer, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::File(e.to_string()))
    }

    /// Reads `EPBES_SMT_CMD`, `EPBES_SMT_TIMEOUT_MS`, `EPBES_MAX_ITER`,
    /// `EPBES_VALUE_CAP`, `EPBES_WITNESS_CAP`, `EPBES_VERTEX_CAP` and
    /// `EPBES_FORMAT` through `var`.
    pub fn from_env(var: impl Fn(&str) -> Option<String>) -> Result<Layer, ConfigError> {
        fn num<T: std::str::FromStr>(
            var: &impl Fn(&str) -> Option<String>,
            name: &'static str,
        ) -> Result<Option<T>, ConfigError> {
            match var(name) {
                None => Ok(None),
                Some(v) => v.trim().parse().map(Some).map_err(|_| ConfigError::Env { name, value: v }),
            }
        }
        let format = match var("EPBES_FORMAT") {
            None => None,
            Some(v) => Some(match v.trim() {
                "text" => Format::Text,
                "json" => Format::Json,
                "dot" => Format::Dot,
                _ => return Err(ConfigError::Env { name: "EPBES_FORMAT", value: v }),
            }),
        };
        Ok(Layer {
            smt_cmd: var("EPBES_SMT_CMD"),
            smt_timeout_ms: num(&var, "EPBES_SMT_TIMEOUT_MS")?,
            max_iter: num(&var, "EPBES_MAX_ITER")?,
            value_cap: num(&var, "EPBES_VALUE_CAP")?,
            witness_cap: num(&var, "EPBES_WITNESS_CAP")?,
            vertex_cap: num(&var, "EPBES_VERTEX_CAP")?,
            format,
            prune: None,
            trace: None,
        })
    }

    /// Fields of `self`, falling back to `lower`.
    pub fn over(self, lower: Layer) -> Layer {
        Layer {
            smt_cmd: self.smt_cmd.or(lower.smt_cmd),
            smt_timeout_ms: self.smt_timeout_ms.or(lower.smt_timeout_ms),
            max_iter: self.max_iter.or(lower.max_iter),
            value_cap: self.value_cap.or(lower.value_cap),
            witness_cap: self.witness_cap.or(lower.witness_cap),
            vertex_cap: self.vertex_cap.or(lower.vertex_cap),
            format: self.format.or(lower.format),
            prune: self.prune.or(lower.prune),
            trace: self.trace.or(lower.trace),
        }
    }
}

impl RunConfig {
    /// `flags` over `env` over `file` over the defaults.
    pub fn resolve(flags: Layer, env: Layer, file: Layer) -> Result<RunConfig, ConfigError> {
        let l = flags.over(env).over(file);
        let d = RunConfig::default();
        let c = RunConfig {
            smt_cmd: l.smt_cmd.unwrap_or(d.smt_cmd),
            smt_timeout: l.smt_timeout_ms.map(Duration::from_millis).unwrap_or(d.smt_timeout),
            max_iter: l.max_iter.unwrap_or(d.max_iter),
            bounds: Bounds {
                value_cap: l.value_cap.unwrap_or(d.bounds.value_cap),
                witness_cap: l.witness_cap.unwrap_or(d.bounds.witness_cap),
                vertex_cap: l.vertex_cap.unwrap_or(d.bounds.vertex_cap),
            },
            format: l.format.unwrap_or(d.format),
            prune: l.prune.unwrap_or(d.prune),
            trace: l.trace.unwrap_or(d.trace),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.smt_cmd.split_whitespace().next().is_none() {
            return Err(ConfigError::Invalid("smt-cmd is empty".into()));
        }
        if self.smt_timeout.is_zero() {
            return Err(ConfigError::Invalid("smt-timeout-ms must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(ConfigError::Invalid("max-iter must be positive".into()));
        }
        let b = self.bounds;
        if b.value_cap == 0 || b.witness_cap == 0 || b.vertex_cap == 0 {
            return Err(ConfigError::Invalid("value-cap, witness-cap and vertex-cap must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, &str)]) -> impl Fn(&str) -> Option<String> {
        let pairs: Vec<(String, String)> = pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        move |k| pairs.iter().find(|(n, _)| n == k).map(|(_, v)| v.clone())
    }

    #[test]
    fn defaults() {
        let c = RunConfig::resolve(Layer::default(), Layer::default(), Layer::default()).unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.bounds, Bounds { value_cap: 256, witness_cap: 64, vertex_cap: 100_000 });
        assert_eq!(c.smt_timeout, Duration::from_millis(30_000));
    }

    #[test]
    fn precedence() {
        let file = Layer::from_toml("smt-cmd = \"file\"\nmax-iter = 7\nvalue-cap = 9\nformat = \"dot\"").unwrap();
        let env = Layer::from_env(env(&[("EPBES_SMT_CMD", "env"), ("EPBES_MAX_ITER", "8")])).unwrap();
        let flags = Layer { smt_cmd: Some("flag".into()), ..Layer::default() };
        let c = RunConfig::resolve(flags, env.clone(), file.clone()).unwrap();
        assert_eq!((c.smt_cmd.as_str(), c.max_iter, c.bounds.value_cap, c.format), ("flag", 8, 9, Format::Dot));
        let c = RunConfig::resolve(Layer::default(), env, file.clone()).unwrap();
        assert_eq!(c.smt_cmd, "env");
        let c = RunConfig::resolve(Layer::default(), Layer::default(), file).unwrap();
        assert_eq!((c.smt_cmd.as_str(), c.max_iter), ("file", 7));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(Layer::from_toml("max-itr = 3"), Err(ConfigError::File(_))));
        assert!(matches!(Layer::from_env(env(&[("EPBES_MAX_ITER", "x")])), Err(ConfigError::Env { .. })));
        let zero = Layer { max_iter: Some(0), ..Layer::default() };
        assert!(matches!(RunConfig::resolve(zero, Layer::default(), Layer::default()), Err(ConfigError::Invalid(_))));
        let blank = Layer { smt_cmd: Some("  ".into()), ..Layer::default() };
        assert!(RunConfig::resolve(blank, Layer::default(), Layer::default()).is_err());
    }
}
