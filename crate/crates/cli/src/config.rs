//! Channel tables in TOML. Each channel is a section named by its id:
//!
//! ```toml
//! [Lambda-Lambdabar]
//! decay_mode = "Lambda -> p pi-"
//! alpha_y = 0.755
//! alpha_y_err = 0.003
//! br_dec = 64.0
//! beta_etac = 0.664
//! beta_chic0 = 0.757
//! beta_jpsi = 0.693
//! br_prod = 19.43
//! alpha_psi = 0.475
//! delta_phi = 0.752
//! refs = "BESIII 2017, 2019, 2022"
//! ```

use std::path::Path;

use hyqc_core::channels::ChannelConfig;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {} invalid field(s)\n  {}", .problems.len(), .problems.join("\n  "))]
    Invalid { path: String, problems: Vec<String> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    decay_mode: String,
    alpha_y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha_y_err: Option<f64>,
    br_dec: f64,
    beta_etac: f64,
    beta_chic0: f64,
    beta_jpsi: f64,
    br_prod: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    br_prod_err: Option<f64>,
    alpha_psi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha_psi_err: Option<f64>,
    delta_phi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta_phi_err: Option<f64>,
    #[serde(default)]
    refs: String,
}

impl Entry {
    fn into_config(self, channel_id: String) -> ChannelConfig {
        ChannelConfig {
            channel_id,
            decay_mode: self.decay_mode,
            alpha_y: self.alpha_y,
            alpha_y_err: self.alpha_y_err,
            br_dec: self.br_dec,
            beta_etac: self.beta_etac,
            beta_chic0: self.beta_chic0,
            beta_jpsi: self.beta_jpsi,
            br_prod: self.br_prod,
            br_prod_err: self.br_prod_err,
            alpha_psi: self.alpha_psi,
            alpha_psi_err: self.alpha_psi_err,
            delta_phi: self.delta_phi,
            delta_phi_err: self.delta_phi_err,
            refs: self.refs,
        }
    }

    fn from_config(c: &ChannelConfig) -> Self {
        Entry {
            decay_mode: c.decay_mode.clone(),
            alpha_y: c.alpha_y,
            alpha_y_err: c.alpha_y_err,
            br_dec: c.br_dec,
            beta_etac: c.beta_etac,
            beta_chic0: c.beta_chic0,
            beta_jpsi: c.beta_jpsi,
            br_prod: c.br_prod,
            br_prod_err: c.br_prod_err,
            alpha_psi: c.alpha_psi,
            alpha_psi_err: c.alpha_psi_err,
            delta_phi: c.delta_phi,
            delta_phi_err: c.delta_phi_err,
            refs: c.refs.clone(),
        }
    }
}

/// Parses a table. `origin` names the source in messages. Every invalid
/// field is reported, each with the line it sits on.
pub fn parse_channels(text: &str, origin: &str) -> Result<Vec<ChannelConfig>, ConfigError> {
    let raw: IndexMap<String, Entry> = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    let table: Vec<ChannelConfig> = raw.into_iter().map(|(id, e)| e.into_config(id)).collect();
    let mut problems = Vec::new();
    for c in &table {
        for msg in c.validate() {
            let field = msg
                .strip_prefix(&format!("{}: ", c.channel_id))
                .and_then(|r| r.split(' ').next());
            match field.and_then(|f| locate(text, &c.channel_id, f)) {
                Some(line) => problems.push(format!("line {line}: {msg}")),
                None => problems.push(msg),
            }
        }
    }
    if problems.is_empty() {
        Ok(table)
    } else {
        Err(ConfigError::Invalid {
            path: origin.to_string(),
            problems,
        })
    }
}

pub fn load_channels(path: &Path) -> Result<Vec<ChannelConfig>, ConfigError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: origin.clone(),
        source,
    })?;
    parse_channels(&text, &origin)
}

pub fn serialize_channels(table: &[ChannelConfig]) -> String {
    let map: IndexMap<&str, Entry> = table
        .iter()
        .map(|c| (c.channel_id.as_str(), Entry::from_config(c)))
        .collect();
    toml::to_string(&map).expect("channel tables always serialize")
}

/// 1-based line of `field` inside section `[id]`.
fn locate(text: &str, id: &str, field: &str) -> Option<usize> {
    let mut inside = false;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            let name = t
                .trim_start_matches('[')
                .trim_end_matches(']')
                .trim()
                .trim_matches('"');
            inside = name == id;
        } else if inside && t.split('=').next().map(str::trim) == Some(field) {
            return Some(i + 1);
        }
    }
    None
}
