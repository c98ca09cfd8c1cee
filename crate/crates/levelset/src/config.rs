//! Run configuration: TOML-file plus flag-override plumbing for the CLI.
//!
//! A config is fully validated (including parsing the function specs)
//! before any computation starts, so invalid runs produce no output files.

use crate::functions::TestFunction;
use crate::parser::parse_function;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Invalid(String),
    #[error("config file {path}: {message}")]
    File { path: String, message: String },
}

pub const KNOWN_COMMANDS: &[&str] = &[
    "catalog",
    "measure",
    "sweep",
    "weaknorm",
    "verify-heart",
    "envelope",
    "gy",
    "sandwich",
    "corollary",
    "truncation",
    "all",
];

/// Everything a run needs, in the shape it is stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: String,
    /// function spec strings in the catalog grammar
    pub u: Option<String>,
    pub v: Option<String>,
    pub p: f64,
    /// single lambda (measure subcommand)
    pub lambda: Option<f64>,
    /// decreasing lambda list for sweeps and per-lambda checks
    pub lambdas: Option<Vec<f64>>,
    /// enclosing support radius for the envelope check
    pub radius: Option<f64>,
    /// increasing truncation radii
    pub r_schedule: Option<Vec<f64>>,
    pub n_samples: u64,
    pub seed: u64,
    /// relative tolerance for limit comparisons
    pub rel_tol: f64,
    pub json_out: Option<PathBuf>,
    pub csv_out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: String::new(),
            u: None,
            v: None,
            p: 1.0,
            lambda: None,
            lambdas: None,
            radius: None,
            r_schedule: None,
            n_samples: 100_000,
            seed: 42,
            rel_tol: 0.02,
            json_out: None,
            csv_out: None,
        }
    }
}

/// A validated config with its function specs already parsed.
pub struct ValidatedConfig {
    pub config: RunConfig,
    pub u: Option<TestFunction>,
    pub v: Option<TestFunction>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<RunConfig, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::File {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        RunConfig::from_toml_str(&text)
    }

    /// Check every field and parse the function specs; nothing is computed.
    pub fn validate(&self) -> Result<ValidatedConfig, ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !KNOWN_COMMANDS.contains(&self.command.as_str()) {
            return bad(format!("unknown command {:?}", self.command));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return bad(format!("p must be a finite value >= 1, got {}", self.p));
        }
        if self.n_samples == 0 {
            return bad("n_samples must be positive".into());
        }
        if !(self.rel_tol > 0.0) {
            return bad(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("lambda must be positive and finite, got {l}"));
            }
        }
        if let Some(ls) = &self.lambdas {
            if ls.is_empty() {
                return bad("lambdas must be non-empty".into());
            }
            for w in ls.windows(2) {
                if !(w[1] < w[0]) {
                    return bad("lambdas must be strictly decreasing".into());
                }
            }
            if !(*ls.last().unwrap() > 0.0) {
                return bad("lambdas must be positive".into());
            }
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("radius must be positive and finite, got {r}"));
            }
        }
        if let Some(rs) = &self.r_schedule {
            if rs.is_empty() {
                return bad("r_schedule must be non-empty".into());
            }
            for w in rs.windows(2) {
                if !(w[1] > w[0]) {
                    return bad("r_schedule must be strictly increasing".into());
                }
            }
            if !(rs[0] > 0.0) {
                return bad("r_schedule must be positive".into());
            }
        }

        let parse = |label: &str, spec: &Option<String>| -> Result<Option<TestFunction>, ConfigError> {
            match spec {
                None => Ok(None),
                Some(s) => parse_function(s)
                    .map(Some)
                    .map_err(|e| ConfigError::Invalid(format!("{label}: {e}"))),
            }
        };
        let u = parse("u", &self.u)?;
        let v = parse("v", &self.v)?;
        if let (Some(fu), Some(fv)) = (&u, &v) {
            if fu.dimension() != fv.dimension() {
                return bad(format!(
                    "u and v live in different dimensions ({} vs {})",
                    fu.dimension(),
                    fv.dimension()
                ));
            }
        }
        Ok(ValidatedConfig { config: self.clone(), u, v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig {
            command: "sweep".into(),
            u: Some("ball a=1 r=1 n=1".into()),
            v: Some("neg(ball a=1 r=1 n=1)".into()),
            p: 2.0,
            lambdas: Some(vec![1.0, 0.5, 0.25]),
            n_samples: 12_345,
            seed: 9,
            json_out: Some(PathBuf::from("out/report.json")),
            ..RunConfig::default()
        };
        let text = cfg.to_toml_string();
        let back = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation_parses_functions() {
        let cfg = RunConfig {
            command: "measure".into(),
            u: Some("ball a=1 r=1 n=1".into()),
            v: Some("zero n=1".into()),
            lambda: Some(1.0),
            ..RunConfig::default()
        };
        let v = cfg.validate().unwrap();
        assert_eq!(v.u.unwrap().dimension(), 1);
    }

    #[test]
    fn validation_rejects_bad_fields() {
        let base = RunConfig { command: "sweep".into(), ..RunConfig::default() };
        assert!(base.validate().is_ok());
        for broken in [
            RunConfig { command: "frobnicate".into(), ..base.clone() },
            RunConfig { p: 0.5, ..base.clone() },
            RunConfig { n_samples: 0, ..base.clone() },
            RunConfig { lambdas: Some(vec![0.5, 1.0]), ..base.clone() },
            RunConfig { lambda: Some(-1.0), ..base.clone() },
            RunConfig { r_schedule: Some(vec![2.0, 1.0]), ..base.clone() },
            RunConfig { u: Some("ball a=1".into()), ..base.clone() },
            RunConfig {
                u: Some("ball a=1 r=1 n=1".into()),
                v: Some("zero n=2".into()),
                ..base.clone()
            },
        ] {
            assert!(broken.validate().is_err(), "{broken:?}");
        }
    }

    #[test]
    fn unknown_toml_key_is_rejected() {
        assert!(RunConfig::from_toml_str("command='sweep'\nbogus=1\n").is_err());
    }
}
