//! Run configuration: defaults, an optional `key = value` file, and flags,
//! in increasing precedence.
//!
//! File format: one `key = value` per line, `#` starts a comment, keys are
//! the long flag names without dashes (`lambda = 2`, `sample-size = 30`).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use seedpair_core::seeding::Model;
use seedpair_core::{DiffusionConfig, SampleDesign};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Default)]
pub struct KeyValues {
    values: BTreeMap<String, String>,
    used: std::sync::Mutex<Vec<String>>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", i + 1)))?;
            let key = k.trim().replace('_', "-");
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("config line {}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(KeyValues { values, used: Default::default() })
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }

    /// Flag value if given, else the file value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.used.lock().expect("unpoisoned").push(key.to_string());
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::Config(format!("config key `{key}`: {e}"))),
        }
    }

    /// Rejects keys the command never asked for.
    pub fn finish(&self) -> Result<(), CliError> {
        let used = self.used.lock().expect("unpoisoned");
        match self.values.keys().find(|k| !used.contains(k)) {
            Some(k) => Err(CliError::Config(format!("unknown config key `{k}` for this command"))),
            None => Ok(()),
        }
    }
}

/// Fully resolved settings, embedded in every report. The worker count is
/// left out: it never changes results.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<DiffusionConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleDesign>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub individuals: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub village: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, serde_json::Value>,
}
