//! Flat experiment configuration.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::mpa::Precision;
use crate::phase::{boundary_to_rates, rates_to_boundary, BoundaryParams, RateParams};

/// Every knob of every experiment; unset fields take per-experiment defaults.
///
/// Parameters are given either as rates (`q, alpha, beta, gamma, delta`) or as
/// `a, b, c, d` together with `q`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    /// Averaging or observation horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burnin: Option<f64>,
    /// Cap on coalescence and hitting times.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Boundary window width `w` for concentration; half-width `L` for drift.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_n: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<String>,
    /// Terminal tolerance of soft verdicts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentConfig {
    /// Parses JSON, or `key = value` / `key: value` lines whose values are JSON
    /// literals or bare strings. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        let value = if trimmed.starts_with('{') {
            serde_json::from_str::<Value>(text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            let mut map = Map::new();
            for (no, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .or_else(|| line.split_once(':'))
                    .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
                let v = v.trim();
                let parsed = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
                map.insert(k.trim().to_string(), parsed);
            }
            Value::Object(map)
        };
        serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))
    }

    fn has_abcd(&self) -> bool {
        self.a.is_some() || self.b.is_some() || self.c.is_some() || self.d.is_some()
    }

    fn has_rates(&self) -> bool {
        self.alpha.is_some() || self.beta.is_some() || self.gamma.is_some() || self.delta.is_some()
    }

    pub fn boundary(&self) -> Result<BoundaryParams> {
        match (self.has_abcd(), self.has_rates()) {
            (true, true) => Err(Error::Config("give either rates or a, b, c, d, not both".into())),
            (true, false) => BoundaryParams::new(
                self.a.unwrap_or(0.0),
                self.b.unwrap_or(0.0),
                self.c.unwrap_or(0.0),
                self.d.unwrap_or(0.0),
                self.q.unwrap_or(0.0),
            ),
            (false, true) => {
                let get = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Config(format!("missing rate {name}")));
                let r = RateParams::new(
                    self.q.unwrap_or(0.0),
                    get(self.alpha, "alpha")?,
                    get(self.beta, "beta")?,
                    self.gamma.unwrap_or(0.0),
                    self.delta.unwrap_or(0.0),
                )?;
                Ok(rates_to_boundary(&r))
            }
            (false, false) => Err(Error::Config("no model parameters given".into())),
        }
    }

    pub fn rates(&self) -> Result<RateParams> {
        Ok(boundary_to_rates(&self.boundary()?))
    }

    pub fn precision(&self) -> Result<Precision> {
        match &self.precision {
            None => Ok(Precision::Double),
            Some(s) => Precision::parse(s).ok_or_else(|| Error::Config(format!("unknown precision {s:?}"))),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Copy with the model parameters in both forms.
    pub(crate) fn with_params(&self, b: &BoundaryParams) -> Self {
        let r = boundary_to_rates(b);
        ExperimentConfig {
            q: Some(b.q),
            a: None,
            b: None,
            c: None,
            d: None,
            alpha: Some(r.alpha),
            beta: Some(r.beta),
            gamma: Some(r.gamma),
            delta: Some(r.delta),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_syntaxes() {
        let a = ExperimentConfig::parse(r#"{"a": 2.0, "q": 0.0, "n_list": [32, 64]}"#).unwrap();
        let b = ExperimentConfig::parse("# comment\na = 2.0\nq: 0\nn_list = [32, 64]\n").unwrap();
        assert_eq!(a, b);
        let c = ExperimentConfig::parse("experiment = drift\nprecision = high").unwrap();
        assert_eq!(c.experiment.as_deref(), Some("drift"));
        assert!(ExperimentConfig::parse("bogus = 1").is_err());
        assert!(ExperimentConfig::parse("a 2").is_err());
    }

    #[test]
    fn parameter_forms() {
        let a = ExperimentConfig::parse("a = 2\nq = 0").unwrap();
        let r = a.rates().unwrap();
        assert!((r.alpha - 1.0).abs() < 1e-14 && (r.beta - 1.0 / 3.0).abs() < 1e-14);
        let both = ExperimentConfig::parse("a = 2\nalpha = 1\nbeta = 1").unwrap();
        assert!(both.boundary().is_err());
        assert!(ExperimentConfig::default().boundary().is_err());
        let back = ExperimentConfig::parse("alpha = 1\nbeta = 1").unwrap().boundary().unwrap();
        assert!(back.a.abs() < 1e-14 && back.c.abs() < 1e-14);
    }
}
