//! Manifold spec files.
//!
//! ```json
//! { "schema": "kyano/1", "kind": "const-curvature", "dim": 3, "params": { "K": 1.0 } }
//! { "kind": "taub-nut", "dim": 4, "params": { "m": 1.0, "normalization": "4m^2" } }
//! { "kind": "custom", "dim": 2, "coordinates": ["r", "theta"],
//!   "metric": [["1", "0"], ["0", "x1^2"]] }
//! ```
//!
//! `schema` is optional on input but must equal `kyano/1` when present.
//! `params.chart` selects `"cartesian"` (default) or `"spherical"` coordinates
//! for the constant-curvature metric.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use super::{CurvatureChart, GeometryError, MetricSpec, TaubNutNormalization};
use crate::expr::{parse_expression, ExprError};
use crate::io::json_error_offset;

#[derive(Debug, Error)]
pub enum SpecFileError {
    #[error("malformed JSON at byte {offset}: {message}")]
    Json { offset: usize, message: String },
    #[error("metric[{row}][{col}]: {source}")]
    Expr {
        row: usize,
        col: usize,
        source: ExprError,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifoldFile {
    schema: Option<String>,
    kind: String,
    dim: usize,
    #[serde(default)]
    params: BTreeMap<String, serde_json::Value>,
    metric: Option<Vec<Vec<String>>>,
    coordinates: Option<Vec<String>>,
}

pub(crate) fn check_schema(schema: Option<&str>) -> Result<(), String> {
    match schema {
        None => Ok(()),
        Some(s) if s == crate::SCHEMA => Ok(()),
        Some(s) => Err(format!(
            "unsupported schema '{s}', expected '{}'",
            crate::SCHEMA
        )),
    }
}

fn param_f64(
    params: &BTreeMap<String, serde_json::Value>,
    key: &str,
) -> Result<f64, SpecFileError> {
    params
        .get(key)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| SpecFileError::Invalid(format!("params.{key} must be a number")))
}

impl MetricSpec {
    pub fn from_json_str(source: &str) -> Result<Self, SpecFileError> {
        let file: ManifoldFile = serde_json::from_str(source).map_err(|e| SpecFileError::Json {
            offset: json_error_offset(source, &e),
            message: e.to_string(),
        })?;
        check_schema(file.schema.as_deref()).map_err(SpecFileError::Invalid)?;
        let expect_dim = |d: usize| {
            if file.dim == d {
                Ok(())
            } else {
                Err(SpecFileError::Invalid(format!(
                    "{} manifolds have dim {d}, file says {}",
                    file.kind, file.dim
                )))
            }
        };
        let spec = match file.kind.as_str() {
            "flat" => {
                if file.dim == 0 {
                    return Err(SpecFileError::Invalid("dim must be positive".into()));
                }
                MetricSpec::flat(file.dim)
            }
            "const-curvature" => {
                expect_dim(3)?;
                let k = param_f64(&file.params, "K")?;
                let chart = match file.params.get("chart").and_then(|v| v.as_str()) {
                    None | Some("cartesian") => CurvatureChart::Cartesian,
                    Some("spherical") => CurvatureChart::Spherical,
                    Some(other) => {
                        return Err(SpecFileError::Invalid(format!("unknown chart '{other}'")))
                    }
                };
                MetricSpec::const_curvature3_in(k, chart)
            }
            "taub-nut" => {
                expect_dim(4)?;
                let m = param_f64(&file.params, "m")?;
                let normalization = match file.params.get("normalization") {
                    None => TaubNutNormalization::default(),
                    Some(v) => v
                        .as_str()
                        .and_then(TaubNutNormalization::from_name)
                        .ok_or_else(|| {
                            SpecFileError::Invalid(
                                "params.normalization must be \"4m^2\" or \"16m^2\"".into(),
                            )
                        })?,
                };
                MetricSpec::taub_nut_with(m, normalization)?
            }
            "custom" => {
                let rows = file.metric.ok_or_else(|| {
                    SpecFileError::Invalid("custom manifolds need \"metric\"".into())
                })?;
                if rows.len() != file.dim {
                    return Err(SpecFileError::Invalid(format!(
                        "metric has {} rows, dim is {}",
                        rows.len(),
                        file.dim
                    )));
                }
                let mut matrix = Vec::with_capacity(rows.len());
                for (row, entries) in rows.iter().enumerate() {
                    let mut parsed = Vec::with_capacity(entries.len());
                    for (col, src) in entries.iter().enumerate() {
                        parsed.push(
                            parse_expression(src, file.dim)
                                .map_err(|source| SpecFileError::Expr { row, col, source })?,
                        );
                    }
                    matrix.push(parsed);
                }
                MetricSpec::custom(matrix, file.coordinates)?
            }
            other => {
                return Err(SpecFileError::Invalid(format!(
                    "unknown manifold kind '{other}'"
                )))
            }
        };
        Ok(spec)
    }

    /// Catalog selector: `flat:N`, `const-curvature:K`, `const-curvature-spherical:K`,
    /// `taub-nut:M` or `taub-nut:M:16m^2`.
    pub fn from_name(name: &str) -> Option<Self> {
        let mut parts = name.split(':');
        let kind = parts.next()?;
        let arg = parts.next();
        let extra = parts.next();
        if parts.next().is_some() {
            return None;
        }
        match (kind, arg, extra) {
            ("flat", Some(n), None) => n.parse().ok().filter(|n| *n > 0).map(MetricSpec::flat),
            ("const-curvature", Some(k), None) => k.parse().ok().map(MetricSpec::const_curvature3),
            ("const-curvature-spherical", Some(k), None) => k
                .parse()
                .ok()
                .map(|k| MetricSpec::const_curvature3_in(k, CurvatureChart::Spherical)),
            ("taub-nut", Some(m), norm) => {
                let m: f64 = m.parse().ok()?;
                let norm = match norm {
                    None => TaubNutNormalization::default(),
                    Some(s) => TaubNutNormalization::from_name(s)?,
                };
                MetricSpec::taub_nut_with(m, norm).ok()
            }
            _ => None,
        }
    }
}
