//! Curve description files.
//!
//! Complex values are a number or `[re, im]`; points additionally accept
//! `"inf"`.
//!
//! ```toml
//! involution = true
//! reality = true
//!
//! [[components]]
//! id = 1
//! p = [{ index = 0, at = "inf", weight = 1.0 }]
//! q = [{ index = 0, at = 0.0 }]
//!
//! [[components]]
//! id = 2
//! poles = [0.7559289460184544]
//! normalization = [2.0]
//! p = [{ index = 1, at = "inf" }]
//! q = [{ index = 1, at = 0.0 }]
//!
//! [[intersections]]
//! component_a = 1
//! at_a = 1.0
//! component_b = 2
//! at_b = 1.0
//! ```

use std::fs;
use std::path::Path;

use serde::Deserialize;
use wdvv_core::spectral::{CurveComponent, IntersectionPoint, MarkedP, MarkedQ, Point, SpectralData};
use wdvv_core::Complex64;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexValue> for Complex64 {
    fn from(v: ComplexValue) -> Self {
        match v {
            ComplexValue::Real(re) => Complex64::new(re, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PointValue {
    Value(ComplexValue),
    Named(String),
}

impl PointValue {
    fn to_point(&self) -> Result<Point, CliError> {
        match self {
            PointValue::Value(v) => Ok(Point::Finite((*v).into())),
            PointValue::Named(s) if s == "inf" => Ok(Point::Infinity),
            PointValue::Named(s) => {
                Err(CliError::Config(format!("bad point `{s}` (expected a number, [re, im] or \"inf\")")))
            }
        }
    }
}

fn unit_weight() -> ComplexValue {
    ComplexValue::Real(1.0)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PEntry {
    pub index: usize,
    pub at: PointValue,
    #[serde(default = "unit_weight")]
    pub weight: ComplexValue,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QEntry {
    pub index: usize,
    pub at: PointValue,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentEntry {
    pub id: usize,
    #[serde(default)]
    pub poles: Vec<ComplexValue>,
    #[serde(default)]
    pub normalization: Vec<ComplexValue>,
    #[serde(default)]
    pub p: Vec<PEntry>,
    #[serde(default)]
    pub q: Vec<QEntry>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub component_a: usize,
    pub at_a: ComplexValue,
    pub component_b: usize,
    pub at_b: ComplexValue,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    #[serde(default = "yes")]
    pub involution: bool,
    #[serde(default)]
    pub reality: bool,
    #[serde(default = "yes")]
    pub euclidean: bool,
    pub components: Vec<ComponentEntry>,
    #[serde(default)]
    pub intersections: Vec<NodeEntry>,
}

impl CurveFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        let file: CurveFile =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        file.check_points()?;
        Ok(file)
    }

    fn check_points(&self) -> Result<(), CliError> {
        for c in &self.components {
            for at in c.p.iter().map(|p| &p.at).chain(c.q.iter().map(|q| &q.at)) {
                at.to_point()?;
            }
        }
        Ok(())
    }

    pub fn spectral_data(&self) -> SpectralData {
        let point = |v: &PointValue| v.to_point().expect("points checked on load");
        let components = self
            .components
            .iter()
            .map(|c| CurveComponent {
                id: c.id,
                poles: c.poles.iter().map(|&z| z.into()).collect(),
                p_points: c.p.iter().map(|p| MarkedP::new(p.index, point(&p.at), p.weight)).collect(),
                q_points: c.q.iter().map(|q| MarkedQ::new(q.index, point(&q.at))).collect(),
                normalization: c.normalization.iter().map(|&z| z.into()).collect(),
            })
            .collect();
        let intersections = self
            .intersections
            .iter()
            .map(|n| IntersectionPoint::new(n.component_a, n.at_a, n.component_b, n.at_b))
            .collect();
        SpectralData { components, intersections, involution: self.involution, reality: self.reality }
    }
}
