use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Everything that determines a run. Equal configs give byte-identical output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub horizon: usize,
    pub replicas: usize,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(scenario: &str, horizon: usize, replicas: usize, seed: u64) -> Self {
        Self {
            scenario: scenario.to_string(),
            horizon,
            replicas,
            seed,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Parses `k=v`.
    pub fn push_param(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got `{kv}`")))?;
        self.params
            .insert(k.trim().to_string(), v.trim().to_string());
        Ok(())
    }

    pub fn param<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse parameter {key}={v}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be positive".into()));
        }
        if self.replicas == 0 {
            return Err(Error::InvalidParameter(
                "replica count must be positive".into(),
            ));
        }
        Ok(())
    }
}
