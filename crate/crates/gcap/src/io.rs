//! Channel and state spec files.
//!
//! A channel spec is a JSON object
//!
//! ```json
//! {"n_modes": 1, "kind": "thermal", "eta": [0.5], "nbar": [1.0], "omega": [1.0]}
//! ```
//!
//! with `kind` one of `identity`, `classical`, `thermal`, `lossy`, `custom`.
//! `X` and `Y` are row-major, either as nested rows or as one flat array.
//! A file holds one spec, an array of specs, or `{"channels": [...]}`.

use std::path::Path;

use gcap_core::{GaussianChannel, GaussianState, CovarianceMatrix, Matrix, Tolerances};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum MatrixField {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl MatrixField {
    fn to_matrix(&self, dim: usize, field: &str) -> Result<Matrix> {
        let data: Vec<f64> = match self {
            MatrixField::Rows(rows) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(CliError::field(field, format!("expected {dim}×{dim} rows")));
                }
                rows.concat()
            }
            MatrixField::Flat(v) => {
                if v.len() != dim * dim {
                    return Err(CliError::field(
                        field,
                        format!("expected {} row-major entries, found {}", dim * dim, v.len()),
                    ));
                }
                v.clone()
            }
        };
        Matrix::from_row_major(dim, dim, data).map_err(|e| CliError::field(field, e))
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub n_modes: usize,
    pub kind: String,
    #[serde(default)]
    pub eta: Option<Vec<f64>>,
    #[serde(default)]
    pub nbar: Option<Vec<f64>>,
    #[serde(default, rename = "X", alias = "x")]
    pub x: Option<MatrixField>,
    #[serde(default, rename = "Y", alias = "y")]
    pub y: Option<MatrixField>,
    #[serde(default)]
    pub omega: Option<Vec<f64>>,
}

/// A validated channel with its display name and mode frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelEntry {
    pub name: String,
    pub channel: GaussianChannel,
    pub omega: Vec<f64>,
}

fn per_mode(values: &Option<Vec<f64>>, n: usize, field: &str) -> Result<Vec<f64>> {
    let v = values
        .as_ref()
        .ok_or_else(|| CliError::field(field, "required for this kind"))?;
    if v.len() != n {
        return Err(CliError::field(field, format!("expected {n} entries, found {}", v.len())));
    }
    Ok(v.clone())
}

fn forbid<T>(value: &Option<T>, field: &str, kind: &str) -> Result<()> {
    if value.is_some() {
        return Err(CliError::field(field, format!("not used by kind `{kind}`")));
    }
    Ok(())
}

impl ChannelSpec {
    /// Validates the spec. Errors name the offending field, prefixed with
    /// `prefix` when the spec sits inside a list.
    pub fn build(&self, prefix: &str, index: usize, tol: &Tolerances) -> Result<ChannelEntry> {
        let f = |name: &str| format!("{prefix}{name}");
        let n = self.n_modes;
        if n == 0 {
            return Err(CliError::field(f("n_modes"), "must be positive"));
        }
        let dim = 2 * n;
        let kind = self.kind.as_str();
        let channel = match kind {
            "identity" => {
                forbid(&self.eta, &f("eta"), kind)?;
                forbid(&self.nbar, &f("nbar"), kind)?;
                forbid(&self.x, &f("X"), kind)?;
                forbid(&self.y, &f("Y"), kind)?;
                GaussianChannel::identity(n)?
            }
            "classical" => {
                forbid(&self.eta, &f("eta"), kind)?;
                forbid(&self.nbar, &f("nbar"), kind)?;
                forbid(&self.x, &f("X"), kind)?;
                let y = self
                    .y
                    .as_ref()
                    .ok_or_else(|| CliError::field(f("Y"), "required for kind `classical`"))?
                    .to_matrix(dim, &f("Y"))?;
                GaussianChannel::classical_noise(y, tol).map_err(|e| CliError::field(f("Y"), e))?
            }
            "thermal" | "lossy" => {
                forbid(&self.x, &f("X"), kind)?;
                forbid(&self.y, &f("Y"), kind)?;
                let eta = per_mode(&self.eta, n, &f("eta"))?;
                if let Some(i) = eta.iter().position(|e| !(0.0..=1.0).contains(e)) {
                    return Err(CliError::field(f("eta"), format!("entry {} outside [0, 1]", i + 1)));
                }
                let nbar = if kind == "thermal" {
                    per_mode(&self.nbar, n, &f("nbar"))?
                } else {
                    forbid(&self.nbar, &f("nbar"), kind)?;
                    vec![0.0; n]
                };
                if let Some(i) = nbar.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
                    return Err(CliError::field(f("nbar"), format!("entry {} must be nonnegative", i + 1)));
                }
                if kind == "thermal" {
                    GaussianChannel::thermal_noise(&eta, &nbar, tol)?
                } else {
                    GaussianChannel::lossy(&eta, tol)?
                }
            }
            "custom" => {
                forbid(&self.eta, &f("eta"), kind)?;
                forbid(&self.nbar, &f("nbar"), kind)?;
                let x = self
                    .x
                    .as_ref()
                    .ok_or_else(|| CliError::field(f("X"), "required for kind `custom`"))?
                    .to_matrix(dim, &f("X"))?;
                let y = self
                    .y
                    .as_ref()
                    .ok_or_else(|| CliError::field(f("Y"), "required for kind `custom`"))?
                    .to_matrix(dim, &f("Y"))?;
                GaussianChannel::new(x, y, tol).map_err(|e| match e {
                    gcap_core::Error::NotCompletelyPositive { .. } => CliError::field(f("X"), e),
                    other => CliError::field(f("Y"), other),
                })?
            }
            other => {
                return Err(CliError::field(
                    f("kind"),
                    format!("unknown kind `{other}` (expected identity, classical, thermal, lossy or custom)"),
                ))
            }
        };
        let omega = match &self.omega {
            Some(w) => {
                if w.len() != n {
                    return Err(CliError::field(f("omega"), format!("expected {n} entries, found {}", w.len())));
                }
                if w.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return Err(CliError::field(f("omega"), "entries must be positive"));
                }
                w.clone()
            }
            None => vec![1.0; n],
        };
        Ok(ChannelEntry {
            name: self.name.clone().unwrap_or_else(|| format!("channel_{}", index + 1)),
            channel,
            omega,
        })
    }
}

/// Parses spec text holding one spec, an array, or `{"channels": [...]}`.
pub fn parse_channels(text: &str, tol: &Tolerances) -> Result<Vec<ChannelEntry>> {
    let value: Value = serde_json::from_str(text)?;
    let (items, list) = match value {
        Value::Array(items) => (items, true),
        Value::Object(mut map) if map.contains_key("channels") => match map.remove("channels") {
            Some(Value::Array(items)) => (items, true),
            _ => return Err(CliError::field("channels", "must be an array")),
        },
        obj @ Value::Object(_) => (vec![obj], false),
        _ => return Err(CliError::field("<root>", "expected an object or an array")),
    };
    if items.is_empty() {
        return Err(CliError::field("channels", "no channels given"));
    }
    items
        .into_iter()
        .enumerate()
        .map(|(i, item)| {
            let prefix = if list { format!("channels[{i}].") } else { String::new() };
            let spec: ChannelSpec = serde_json::from_value(item).map_err(|e| {
                CliError::field(if list { format!("channels[{i}]") } else { "<root>".into() }, e)
            })?;
            spec.build(&prefix, i, tol)
        })
        .collect()
}

pub fn read_channels(path: &Path, tol: &Tolerances) -> Result<Vec<ChannelEntry>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_channels(&text, tol)
}

/// Serialized Gaussian state: `gamma` is row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    pub n: usize,
    pub omega: Vec<f64>,
    pub gamma: Vec<f64>,
    pub m: Vec<f64>,
}

impl StateRecord {
    pub fn from_state(state: &GaussianState) -> Self {
        Self {
            n: state.modes(),
            omega: state.omega().to_vec(),
            gamma: state.gamma().as_slice().to_vec(),
            m: state.displacement().to_vec(),
        }
    }

    /// Record for a covariance alone: zero displacement, unit frequencies.
    pub fn from_covariance(gamma: &Matrix) -> Self {
        let n = gamma.rows() / 2;
        Self {
            n,
            omega: vec![1.0; n],
            gamma: gamma.as_slice().to_vec(),
            m: vec![0.0; 2 * n],
        }
    }

    pub fn to_state(&self, tol: &Tolerances) -> Result<GaussianState> {
        let dim = 2 * self.n;
        if self.gamma.len() != dim * dim {
            return Err(CliError::field(
                "gamma",
                format!("expected {} row-major entries, found {}", dim * dim, self.gamma.len()),
            ));
        }
        let gamma = Matrix::from_row_major(dim, dim, self.gamma.clone()).map_err(|e| CliError::field("gamma", e))?;
        let gamma = CovarianceMatrix::new(gamma, tol).map_err(|e| CliError::field("gamma", e))?;
        if self.m.len() != dim {
            return Err(CliError::field("m", format!("expected {dim} entries, found {}", self.m.len())));
        }
        if self.omega.len() != self.n {
            return Err(CliError::field("omega", format!("expected {} entries, found {}", self.n, self.omega.len())));
        }
        GaussianState::new(gamma, self.m.clone(), self.omega.clone(), tol).map_err(|e| CliError::field("gamma", e))
    }
}
