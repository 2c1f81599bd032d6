//! JSON run configuration.
//!
//! ```json
//! {
//!   "condition": 1,
//!   "components": [{"kind": "brownian", "params": {"mu": 0.0, "sigma2": 1.0}}],
//!   "c0": 1.0, "c": [1.0], "nu0": 0.3, "nus": [0.6],
//!   "seed": 7
//! }
//! ```
//!
//! Condition 2 uses an `h × k` matrix `c` and a single `nu`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;
use serde_json::Value;

use crate::cumulants::{CumulantModel, MeanVector};
use crate::processes::{Condition1Config, Condition2Config, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigErrorKind {
    Malformed,
    UnknownKind,
    InvalidParameter,
    NuOutOfRange,
    NonPositiveCoefficient,
    DimensionMismatch,
}

impl ConfigErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigErrorKind::Malformed => "E001",
            ConfigErrorKind::UnknownKind => "E002",
            ConfigErrorKind::InvalidParameter => "E003",
            ConfigErrorKind::NuOutOfRange => "E004",
            ConfigErrorKind::NonPositiveCoefficient => "E005",
            ConfigErrorKind::DimensionMismatch => "E006",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub kind: ConfigErrorKind,
    pub message: String,
}

impl ConfigError {
    fn new(kind: ConfigErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.code(), self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    kind: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    condition: u8,
    components: Vec<RawComponent>,
    c0: Option<f64>,
    c: Value,
    nu0: Option<f64>,
    nus: Option<Vec<f64>>,
    nu: Option<f64>,
    seed: Option<u64>,
    m_override: Option<Vec<f64>>,
    output: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub m_override: Option<MeanVector>,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// The document as read, echoed into JSON output.
    pub source: Value,
}

impl RunConfig {
    pub fn condition(&self) -> u8 {
        match self.model {
            Model::Cond1(_) => 1,
            Model::Cond2(_) => 2,
        }
    }

    /// The mean vector driving the `m = 0` / `m ≠ 0` branch.
    pub fn mean_vector(&self) -> MeanVector {
        self.m_override.clone().unwrap_or_else(|| self.model.mean_vector())
    }
}

fn malformed(msg: impl Into<String>) -> ConfigError {
    ConfigError::new(ConfigErrorKind::Malformed, msg)
}

fn take(params: &mut BTreeMap<String, f64>, name: &str, default: Option<f64>) -> Result<f64, ConfigError> {
    match params.remove(name).or(default) {
        Some(v) => Ok(v),
        None => Err(ConfigError::new(
            ConfigErrorKind::InvalidParameter,
            format!("missing parameter '{name}'"),
        )),
    }
}

fn component(raw: RawComponent, index: usize) -> Result<CumulantModel, ConfigError> {
    let mut p = raw.params;
    let model = match raw.kind.as_str() {
        "brownian" => CumulantModel::BrownianDrift {
            mu: take(&mut p, "mu", Some(0.0))?,
            sigma2: take(&mut p, "sigma2", Some(1.0))?,
        },
        "poisson" => CumulantModel::Poisson {
            lambda: take(&mut p, "lambda", None)?,
        },
        "compound-poisson-exp" => CumulantModel::CompoundPoissonExp {
            lambda: take(&mut p, "lambda", None)?,
            beta: take(&mut p, "beta", None)?,
        },
        "gamma" => CumulantModel::GammaSubordinator {
            a: take(&mut p, "a", None)?,
            b: take(&mut p, "b", None)?,
        },
        "deterministic" => CumulantModel::Deterministic {
            mu: take(&mut p, "mu", None)?,
        },
        other => {
            return Err(ConfigError::new(
                ConfigErrorKind::UnknownKind,
                format!("unknown component kind '{other}' at position {index}"),
            ))
        }
    };
    if let Some(extra) = p.keys().next() {
        return Err(ConfigError::new(
            ConfigErrorKind::InvalidParameter,
            format!("unexpected parameter '{extra}' for kind '{}'", model.kind_name()),
        ));
    }
    model
        .validate()
        .map_err(|e| ConfigError::new(ConfigErrorKind::InvalidParameter, e.to_string()))?;
    Ok(model)
}

fn check_nu(name: &str, nu: f64) -> Result<(), ConfigError> {
    if nu > 0.0 && nu < 1.0 {
        Ok(())
    } else {
        Err(ConfigError::new(
            ConfigErrorKind::NuOutOfRange,
            format!("nu out of (0,1): {name} = {nu}"),
        ))
    }
}

fn check_coef(name: &str, c: f64) -> Result<(), ConfigError> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(
            ConfigErrorKind::NonPositiveCoefficient,
            format!("coefficients must be positive: {name} = {c}"),
        ))
    }
}

fn dim(msg: String) -> ConfigError {
    ConfigError::new(ConfigErrorKind::DimensionMismatch, format!("dimension mismatch: {msg}"))
}

fn internal(e: crate::Error) -> ConfigError {
    ConfigError::new(ConfigErrorKind::InvalidParameter, e.to_string())
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let source: Value = serde_json::from_str(text).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    let raw: RawConfig = serde_json::from_value(source.clone()).map_err(|e| malformed(e.to_string()))?;
    let components = raw
        .components
        .into_iter()
        .enumerate()
        .map(|(i, c)| component(c, i))
        .collect::<Result<Vec<_>, _>>()?;
    if components.is_empty() {
        return Err(dim("at least one component is required".into()));
    }
    let h = components.len();
    let model = match raw.condition {
        1 => {
            let nu0 = raw.nu0.ok_or_else(|| malformed("condition 1 requires 'nu0'"))?;
            let nus = raw.nus.ok_or_else(|| malformed("condition 1 requires 'nus'"))?;
            let c0 = raw.c0.ok_or_else(|| malformed("condition 1 requires 'c0'"))?;
            let c: Vec<f64> = serde_json::from_value(raw.c).map_err(|_| malformed("condition 1 requires 'c' as a list of numbers"))?;
            check_nu("nu0", nu0)?;
            for (i, &nu) in nus.iter().enumerate() {
                check_nu(&format!("nus[{i}]"), nu)?;
            }
            check_coef("c0", c0)?;
            for (i, &ci) in c.iter().enumerate() {
                check_coef(&format!("c[{i}]"), ci)?;
            }
            if c.len() != h || nus.len() != h {
                return Err(dim(format!("{h} components but {} coefficients and {} entries in nus", c.len(), nus.len())));
            }
            Model::Cond1(Condition1Config::new(components, c0, c, nu0, nus).map_err(internal)?)
        }
        2 => {
            let nu = raw.nu.ok_or_else(|| malformed("condition 2 requires 'nu'"))?;
            let c: Vec<Vec<f64>> = serde_json::from_value(raw.c).map_err(|_| malformed("condition 2 requires 'c' as a matrix"))?;
            check_nu("nu", nu)?;
            for (i, row) in c.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    check_coef(&format!("c[{i}][{j}]"), v)?;
                }
            }
            if c.len() != h {
                return Err(dim(format!("{h} components but {} coefficient rows", c.len())));
            }
            let k = c.first().map_or(0, Vec::len);
            if k == 0 || c.iter().any(|r| r.len() != k) {
                return Err(dim("coefficient rows must share a positive length".into()));
            }
            Model::Cond2(Condition2Config::new(components, c, nu).map_err(internal)?)
        }
        other => return Err(malformed(format!("condition must be 1 or 2, got {other}"))),
    };
    let m_override = match raw.m_override {
        Some(m) if m.len() != h => return Err(dim(format!("m_override has {} entries, expected {h}", m.len()))),
        Some(m) => Some(MeanVector::new(m)),
        None => None,
    };
    let format = match raw.format.as_deref() {
        None | Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(other) => return Err(malformed(format!("format must be csv or json, got '{other}'"))),
    };
    Ok(RunConfig {
        model,
        m_override,
        seed: raw.seed.unwrap_or(0),
        output: raw.output,
        format,
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"condition": 1, "components": [{"kind": "brownian"}], "c0": 1, "c": [1], "nu0": 0.3, "nus": [0.6]}"#;

    fn kind_of(text: &str) -> ConfigErrorKind {
        parse_config(text).unwrap_err().kind
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.condition(), 1);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.format, Format::Csv);
        assert!(cfg.output.is_none());
        assert_eq!(
            cfg.model.components()[0],
            CumulantModel::BrownianDrift { mu: 0.0, sigma2: 1.0 }
        );
        assert!(cfg.mean_vector().is_zero());
    }

    #[test]
    fn nu_at_one_is_rejected() {
        let err = parse_config(&MINIMAL.replace("\"nu0\": 0.3", "\"nu0\": 1.0")).unwrap_err();
        assert_eq!(err.kind, ConfigErrorKind::NuOutOfRange);
        assert!(err.message.contains("nu out of (0,1)"));
    }

    #[test]
    fn zero_coefficient_under_condition_two() {
        let text = r#"{"condition": 2, "components": [{"kind": "poisson", "params": {"lambda": 1}}],
                       "c": [[1, 0]], "nu": 0.5}"#;
        let err = parse_config(text).unwrap_err();
        assert_eq!(err.kind, ConfigErrorKind::NonPositiveCoefficient);
        assert!(err.message.contains("coefficients must be positive"));
    }

    #[test]
    fn each_violation_has_its_own_code() {
        assert_eq!(kind_of("{"), ConfigErrorKind::Malformed);
        assert_eq!(kind_of(&MINIMAL.replace("brownian", "levy-flight")), ConfigErrorKind::UnknownKind);
        assert_eq!(
            kind_of(&MINIMAL.replace(r#"{"kind": "brownian"}"#, r#"{"kind": "poisson", "params": {"lambda": -1}}"#)),
            ConfigErrorKind::InvalidParameter
        );
        assert_eq!(
            kind_of(&MINIMAL.replace(r#"{"kind": "brownian"}"#, r#"{"kind": "brownian", "params": {"rate": 2}}"#)),
            ConfigErrorKind::InvalidParameter
        );
        assert_eq!(kind_of(&MINIMAL.replace("\"c\": [1]", "\"c\": [1, 2]")), ConfigErrorKind::DimensionMismatch);
        assert_eq!(kind_of(&MINIMAL.replace("\"c0\": 1", "\"c0\": -1")), ConfigErrorKind::NonPositiveCoefficient);
        assert_eq!(kind_of(&MINIMAL.replace("\"condition\": 1", "\"condition\": 3")), ConfigErrorKind::Malformed);
        let codes: std::collections::HashSet<_> = [
            ConfigErrorKind::Malformed,
            ConfigErrorKind::UnknownKind,
            ConfigErrorKind::InvalidParameter,
            ConfigErrorKind::NuOutOfRange,
            ConfigErrorKind::NonPositiveCoefficient,
            ConfigErrorKind::DimensionMismatch,
        ]
        .iter()
        .map(|k| k.code())
        .collect();
        assert_eq!(codes.len(), 6);
    }

    #[test]
    fn condition_two_and_overrides() {
        let text = r#"{"condition": 2,
            "components": [{"kind": "gamma", "params": {"a": 2, "b": 5}},
                           {"kind": "compound-poisson-exp", "params": {"lambda": 1, "beta": 2}}],
            "c": [[1, 2, 3], [0.5, 0.5, 0.5]], "nu": 0.4,
            "seed": 11, "m_override": [0, 0], "format": "json", "output": "out.json"}"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.condition(), 2);
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.format, Format::Json);
        assert!(cfg.mean_vector().is_zero());
        assert!(!cfg.model.mean_vector().is_zero());
        match &cfg.model {
            Model::Cond2(c) => assert_eq!((c.h(), c.k()), (2, 3)),
            _ => unreachable!(),
        }
        assert_eq!(
            kind_of(&text.replace("[0.5, 0.5, 0.5]", "[0.5, 0.5]")),
            ConfigErrorKind::DimensionMismatch
        );
    }
}
