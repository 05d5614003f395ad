//! Scenario configuration: defaults, JSON loading and `key=value` overrides.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::error::{invalid, Error, Result};
use crate::landscape::{Pattern, MAX_N};
use crate::organization::{AspirationDelta, NoiseModel, NoisePersistence, Rules};
use crate::strategies::{max_alternatives, SequencePolicy, SpaceUpdateRule, StrategyKind};

/// One simulation scenario. Field defaults are the baseline experiment
/// settings; JSON keys are the camelCase field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub n: usize,
    pub m: usize,
    /// Observation horizon in periods.
    #[serde(rename = "T", alias = "periods")]
    pub periods: u64,
    pub landscapes: usize,
    pub runs_per_landscape: usize,
    pub k_ex: usize,
    pub pattern: Pattern,
    pub strategy: StrategyKind,
    pub sigma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub a0: f64,
    pub s_max0: usize,
    pub master_seed: u64,
    #[serde(alias = "space_update_rule")]
    pub space_update_rule: SpaceUpdateRule,
    #[serde(alias = "aspiration_delta")]
    pub aspiration_delta: AspirationDelta,
    #[serde(alias = "sequence_policy")]
    pub sequence_policy: SequencePolicy,
    #[serde(alias = "noise_model")]
    pub noise_model: NoiseModel,
    #[serde(alias = "noise_persistence")]
    pub noise_persistence: NoisePersistence,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n: 12,
            m: 4,
            periods: 250,
            landscapes: 100,
            runs_per_landscape: 25,
            k_ex: 0,
            pattern: Pattern::Cyclic,
            strategy: StrategyKind::Satisficing,
            sigma: 0.05,
            alpha: 0.5,
            beta: 0.5,
            a0: 0.0,
            s_max0: 2,
            master_seed: 1,
            space_update_rule: SpaceUpdateRule::Text,
            aspiration_delta: AspirationDelta::Realized,
            sequence_policy: SequencePolicy::ClosestFirst,
            noise_model: NoiseModel::Relative,
            noise_persistence: NoisePersistence::Persistent,
        }
    }
}

impl ScenarioConfig {
    pub fn block_size(&self) -> usize {
        self.n / self.m
    }

    pub fn rules(&self) -> Rules {
        Rules {
            space_update_rule: self.space_update_rule,
            aspiration_delta: self.aspiration_delta,
            sequence_policy: self.sequence_policy,
        }
    }

    /// Total number of runs.
    pub fn run_count(&self) -> usize {
        self.landscapes * self.runs_per_landscape
    }

    /// Short label such as `hc6_kex3`.
    pub fn label(&self) -> String {
        format!("{}_kex{}", self.strategy, self.k_ex)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_N {
            return Err(invalid(
                "n",
                format!("must be in 1..={MAX_N}, got {}", self.n),
            ));
        }
        if self.m == 0 {
            return Err(invalid("m", "must be at least 1"));
        }
        if !self.n.is_multiple_of(self.m) {
            return Err(Error::NotDivisible {
                n: self.n,
                m: self.m,
            });
        }
        let size = self.block_size();
        if self.k_ex > self.n - size {
            return Err(invalid(
                "kEx",
                format!(
                    "{} exceeds the {} decisions outside a block",
                    self.k_ex,
                    self.n - size
                ),
            ));
        }
        if self.periods == 0 {
            return Err(invalid("T", "must be at least 1"));
        }
        if self.landscapes == 0 {
            return Err(invalid("landscapes", "must be at least 1"));
        }
        if self.runs_per_landscape == 0 {
            return Err(invalid("runsPerLandscape", "must be at least 1"));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(invalid("sigma", "must be finite and non-negative"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(invalid("alpha", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(invalid("beta", "must lie in [0, 1]"));
        }
        if !self.a0.is_finite() {
            return Err(invalid("a0", "must be finite"));
        }
        let upper = max_alternatives(size);
        if !(1..=upper).contains(&self.s_max0) {
            return Err(invalid(
                "sMax0",
                format!("must lie in [1, {upper}] for blocks of {size}"),
            ));
        }
        self.strategy.strategy().validate(size)
    }
}

/// Failure to obtain a valid configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed configuration: {0}")]
    Json(#[from] serde_json::Error),
    #[error("configuration must be a JSON object")]
    NotAnObject,
    #[error("override `{0}` is not of the form KEY=VALUE")]
    Override(String),
    #[error(transparent)]
    Invalid(#[from] Error),
}

/// Splits `key=value`.
pub fn parse_override(raw: &str) -> std::result::Result<(String, String), ConfigError> {
    match raw.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(ConfigError::Override(raw.to_string())),
    }
}

/// Resolves a configuration from an optional JSON file plus overrides.
/// Overrides are applied in order and win over file values; missing keys
/// take the defaults. Unknown keys are rejected.
pub fn parse_config(
    path: Option<&Path>,
    overrides: &[(String, String)],
) -> std::result::Result<ScenarioConfig, ConfigError> {
    let mut object = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| ConfigError::Io {
                path: p.display().to_string(),
                source,
            })?;
            parse_object(&text)?
        }
        None => Map::new(),
    };
    for (key, raw) in overrides {
        let value =
            serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.clone()));
        object.insert(key.clone(), value);
    }
    let config: ScenarioConfig = serde_json::from_value(Value::Object(object))?;
    config.validate()?;
    Ok(config)
}

fn parse_object(text: &str) -> std::result::Result<Map<String, Value>, ConfigError> {
    if text.trim().is_empty() {
        return Ok(Map::new());
    }
    match serde_json::from_str::<Value>(text)? {
        Value::Object(map) => Ok(map),
        _ => Err(ConfigError::NotAnObject),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn kv(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn empty_file_gives_baseline_defaults() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "").unwrap();
        let c = parse_config(Some(f.path()), &[]).unwrap();
        assert_eq!(c, ScenarioConfig::default());
        assert_eq!((c.n, c.m, c.periods), (12, 4, 250));
        assert_eq!(
            (c.sigma, c.alpha, c.beta, c.a0, c.s_max0),
            (0.05, 0.5, 0.5, 0.0, 2)
        );
        assert_eq!((c.landscapes, c.runs_per_landscape), (100, 25));
    }

    #[test]
    fn overrides_win_over_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"kEx": 3, "strategy": "hc6", "sigma": 0.1}}"#).unwrap();
        let c = parse_config(Some(f.path()), &kv(&[("kEx", "0"), ("strategy", "hc2")])).unwrap();
        assert_eq!(c.k_ex, 0);
        assert_eq!(c.strategy, StrategyKind::Hc2);
        assert_eq!(c.sigma, 0.1);
    }

    #[test]
    fn divisibility_error_names_the_fields() {
        let err = parse_config(None, &kv(&[("m", "5")])).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("n = 12") && msg.contains("m = 5"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(None, &kv(&[("kex", "2")])).unwrap_err();
        assert!(err.to_string().contains("kex"), "{err}");
    }

    #[test]
    fn malformed_file_is_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "{{ not json").unwrap();
        assert!(matches!(
            parse_config(Some(f.path()), &[]),
            Err(ConfigError::Json(_))
        ));
    }

    #[test]
    fn switch_aliases_and_values() {
        let c = parse_config(
            None,
            &kv(&[
                ("space_update_rule", "equation"),
                ("aspirationDelta", "perceived"),
                ("sequence_policy", "random"),
                ("pattern", "random"),
                ("noise_model", "additive"),
                ("noisePersistence", "fresh"),
                ("T", "10"),
            ]),
        )
        .unwrap();
        assert_eq!(c.space_update_rule, SpaceUpdateRule::Equation);
        assert_eq!(c.aspiration_delta, AspirationDelta::Perceived);
        assert_eq!(c.sequence_policy, SequencePolicy::Random);
        assert_eq!(c.pattern, Pattern::Random);
        assert_eq!(c.periods, 10);
        assert_eq!(c.noise_model, NoiseModel::Additive);
        assert_eq!(c.noise_persistence, NoisePersistence::Fresh);
    }

    #[test]
    fn resolved_config_round_trips() {
        let c = parse_config(
            None,
            &kv(&[("kEx", "4"), ("masterSeed", "18446744073709551615")]),
        )
        .unwrap();
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "{}", serde_json::to_string_pretty(&c).unwrap()).unwrap();
        assert_eq!(parse_config(Some(f.path()), &[]).unwrap(), c);
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        for (k, v) in [
            ("kEx", "10"),
            ("sMax0", "8"),
            ("alpha", "1.5"),
            ("T", "0"),
            ("sigma", "-1"),
        ] {
            assert!(parse_config(None, &kv(&[(k, v)])).is_err(), "{k}={v}");
        }
        assert!(parse_override("novalue").is_err());
        assert_eq!(parse_override("a=b=c").unwrap(), ("a".into(), "b=c".into()));
    }
}
