//! Run configuration: a sectioned TOML file plus `key=value` overrides.
//!
//! ```toml
//! [model]
//! name = "example2"          # or: curve = "curves/example2.toml"
//!
//! [parameters]
//! q = 0.0
//!
//! [sample]
//! seed = 42
//! count = 20
//!
//! [tolerances]
//! residual = 1e-9
//!
//! [outputs]
//! report = "report.json"
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use wdvv_core::egoroff::CurveModel;
use wdvv_core::spectral::SpectralData;
use wdvv_core::NamedModel;

use crate::curve::CurveFile;
use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub name: Option<String>,
    pub curve: Option<PathBuf>,
    /// Base exponents for `extend`, replacing the model's own.
    pub exponents: Option<Vec<f64>>,
    pub d_f: Option<f64>,
}

/// Where correlators come from in `correlators`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    /// Third derivatives of the closed-form prepotential.
    #[default]
    Prepotential,
    /// Inversion of `x(u)` followed by the metric formula.
    Metric,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSection {
    pub seed: u64,
    pub count: usize,
    /// Box for `u`; defaults to `[-1, 1]^n`.
    pub u_min: Option<Vec<f64>>,
    pub u_max: Option<Vec<f64>>,
    /// Box and points per axis for the correlator grid in `x`.
    pub grid_min: Vec<f64>,
    pub grid_max: Vec<f64>,
    pub grid_steps: usize,
    pub source: SourceKind,
}

impl Default for SampleSection {
    fn default() -> Self {
        SampleSection {
            seed: 42,
            count: 20,
            u_min: None,
            u_max: None,
            grid_min: vec![1.0, 1.0],
            grid_max: vec![2.0, 2.0],
            grid_steps: 3,
            source: SourceKind::Prepotential,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub residual: f64,
    pub reality: f64,
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { residual: 1e-9, reality: 1e-10, oracle: 1e-8 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    pub report: Option<PathBuf>,
    pub samples: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelSection,
    pub parameters: BTreeMap<String, f64>,
    pub sample: SampleSection,
    pub tolerances: Tolerances,
    pub outputs: Outputs,
    /// Directory that relative paths in the file are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// The model a run operates on: a registry entry or a curve file.
#[derive(Debug, Clone)]
pub struct ResolvedModel {
    pub label: String,
    pub named: Option<NamedModel>,
    pub data: SpectralData,
    pub euclidean: bool,
}

impl ResolvedModel {
    pub fn curve_model(&self) -> Result<Arc<CurveModel>, CliError> {
        Ok(Arc::new(CurveModel::new(self.data.clone(), self.euclidean)?))
    }

    pub fn dim(&self) -> usize {
        self.data.n()
    }
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Applies `section.key=value`; a bare `key` means `parameters.key`.
fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not of the form key=value")))?;
    let mut path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|s| s.is_empty()) {
        return Err(CliError::Config(format!("bad override key `{key}`")));
    }
    if path.len() == 1 {
        path.insert(0, "parameters");
    }
    let last = path.pop().expect("non-empty path");
    let mut node = table;
    for seg in path {
        let entry = node.entry(seg).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override `{key}`: `{seg}` is not a section")))?;
    }
    node.insert(last.to_string(), parse_value(raw.trim()));
    Ok(())
}

impl RunConfig {
    /// Reads `path` (if any), applies the overrides in order and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|source| CliError::Io { path: p.to_path_buf(), source })?;
                text.parse::<toml::Table>().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for spec in overrides {
            apply_override(&mut table, spec)?;
        }
        let mut cfg: RunConfig =
            RunConfig::deserialize(toml::Value::Table(table)).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.base_dir = path.and_then(Path::parent).map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    /// `--model`: a registry name, otherwise a curve file path.
    pub fn set_model(&mut self, model: &str) {
        if NamedModel::NAMES.contains(&model) {
            self.model.name = Some(model.to_string());
            self.model.curve = None;
        } else {
            self.model.name = None;
            self.model.curve = Some(PathBuf::from(model));
            self.base_dir = PathBuf::new();
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        for (name, v) in [("residual", t.residual), ("reality", t.reality), ("oracle", t.oracle)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Config(format!("tolerance `{name}` must be positive, got {v}")));
            }
        }
        let s = &self.sample;
        if s.grid_min.len() != s.grid_max.len() {
            return Err(CliError::Config("grid_min and grid_max differ in length".into()));
        }
        if let (Some(lo), Some(hi)) = (&s.u_min, &s.u_max) {
            if lo.len() != hi.len() || lo.iter().zip(hi).any(|(a, b)| a > b) {
                return Err(CliError::Config("u_min/u_max do not describe a box".into()));
            }
        }
        if let Some(d) = &self.model.exponents {
            if d.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Config("exponents must be finite".into()));
            }
        }
        Ok(())
    }

    fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_relative() {
            self.base_dir.join(p)
        } else {
            p.to_path_buf()
        }
    }

    pub fn report_path(&self) -> Option<PathBuf> {
        self.outputs.report.as_deref().map(|p| self.resolve_path(p))
    }

    pub fn samples_path(&self) -> Option<PathBuf> {
        self.outputs.samples.as_deref().map(|p| self.resolve_path(p))
    }

    pub fn resolve_model(&self) -> Result<ResolvedModel, CliError> {
        match (&self.model.name, &self.model.curve) {
            (Some(_), Some(_)) => Err(CliError::Config("give either model.name or model.curve, not both".into())),
            (None, None) => Err(CliError::Config(format!("no model given (known: {})", NamedModel::NAMES.join(", ")))),
            (Some(name), None) => {
                if !NamedModel::NAMES.contains(&name.as_str()) {
                    return Err(CliError::Config(format!(
                        "unknown model `{name}` (known: {})",
                        NamedModel::NAMES.join(", ")
                    )));
                }
                let named = NamedModel::from_name(name, &self.parameters)?;
                Ok(ResolvedModel {
                    label: name.clone(),
                    named: Some(named),
                    data: named.spectral_data(),
                    euclidean: true,
                })
            }
            (None, Some(path)) => {
                if !self.parameters.is_empty() {
                    return Err(CliError::Config("parameters do not apply to a curve file".into()));
                }
                let full = self.resolve_path(path);
                if !full.exists() {
                    return Err(CliError::Config(format!(
                        "unknown model `{}`: not a registry name ({}) and no such curve file",
                        path.display(),
                        NamedModel::NAMES.join(", ")
                    )));
                }
                let curve = CurveFile::load(&full)?;
                Ok(ResolvedModel {
                    label: path.display().to_string(),
                    named: None,
                    data: curve.spectral_data(),
                    euclidean: curve.euclidean,
                })
            }
        }
    }

    /// Box for `u` with `n` coordinates.
    pub fn u_box(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>), CliError> {
        let lo = self.sample.u_min.clone().unwrap_or_else(|| vec![-1.0; n]);
        let hi = self.sample.u_max.clone().unwrap_or_else(|| vec![1.0; n]);
        if lo.len() != n || hi.len() != n {
            return Err(CliError::Config(format!("u box must have {n} coordinates")));
        }
        Ok((lo, hi))
    }
}
