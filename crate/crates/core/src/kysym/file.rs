//! Killing-Yano field files.
//!
//! ```json
//! { "schema": "kyano/1", "dim": 3, "rank": 2,
//!   "components": { "12": "x3", "13": "-x2", "23": "x1" } }
//! ```
//!
//! Keys list the 1-based indices of one independent component in strictly
//! increasing order. Single digits may be run together (`"12"`); from
//! dimension 10 on, indices are comma separated (`"3,10"`). Missing components
//! are zero. Optional fields: `label` and `role` (`"position"` or `"momentum"`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AntisymField, KyError};
use crate::expr::{parse_expression, ExprError};
use crate::geometry::file::check_schema;
use crate::geometry::ChartRole;
use crate::io::json_error_offset;

#[derive(Debug, Error)]
pub enum FieldFileError {
    #[error("malformed JSON at byte {offset}: {message}")]
    Json { offset: usize, message: String },
    #[error("component \"{key}\": {source}")]
    Expr { key: String, source: ExprError },
    #[error("component key \"{0}\" is not a list of 1-based indices")]
    Key(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] KyError),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    dim: usize,
    rank: usize,
    components: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    role: Option<String>,
}

fn parse_key(key: &str, dim: usize) -> Option<Vec<usize>> {
    let raw: Option<Vec<usize>> = if key.contains(',') {
        key.split(',').map(|s| s.trim().parse().ok()).collect()
    } else if dim <= 9 {
        key.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect()
    } else {
        None
    };
    let idx = raw?;
    if idx.is_empty() || idx.contains(&0) {
        return None;
    }
    Some(idx.into_iter().map(|i| i - 1).collect())
}

fn format_key(key: &[usize], dim: usize) -> String {
    let parts: Vec<String> = key.iter().map(|i| (i + 1).to_string()).collect();
    if dim <= 9 {
        parts.concat()
    } else {
        parts.join(",")
    }
}

impl AntisymField {
    pub fn from_json_str(source: &str) -> Result<Self, FieldFileError> {
        let file: FieldFile = serde_json::from_str(source).map_err(|e| FieldFileError::Json {
            offset: json_error_offset(source, &e),
            message: e.to_string(),
        })?;
        check_schema(file.schema.as_deref()).map_err(FieldFileError::Invalid)?;
        let mut components = BTreeMap::new();
        for (key, src) in &file.components {
            let idx = parse_key(key, file.dim).ok_or_else(|| FieldFileError::Key(key.clone()))?;
            let expr = parse_expression(src, file.dim).map_err(|source| FieldFileError::Expr {
                key: key.clone(),
                source,
            })?;
            if components.insert(idx, expr).is_some() {
                return Err(FieldFileError::Invalid(format!(
                    "duplicate component \"{key}\""
                )));
            }
        }
        let role = match file.role.as_deref() {
            None | Some("position") => ChartRole::Position,
            Some("momentum") => ChartRole::Momentum,
            Some(other) => return Err(FieldFileError::Invalid(format!("unknown role '{other}'"))),
        };
        let field = AntisymField::new(file.dim, file.rank, components)?.with_role(role);
        Ok(match file.label {
            Some(l) => field.with_label(l),
            None => field,
        })
    }

    pub fn to_json_string(&self) -> String {
        let file = FieldFile {
            schema: Some(crate::SCHEMA.to_string()),
            dim: self.dim,
            rank: self.rank,
            components: self
                .components
                .iter()
                .map(|(k, e)| (format_key(k, self.dim), e.unparse()))
                .collect(),
            label: Some(self.label.clone()),
            role: Some(
                match self.role {
                    ChartRole::Position => "position",
                    ChartRole::Momentum => "momentum",
                }
                .to_string(),
            ),
        };
        crate::io::to_json_string(&file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kysym::flat_ky_field;

    #[test]
    fn reads_digit_keys() {
        let f = AntisymField::from_json_str(
            r#"{"dim":3,"rank":2,"components":{"12":"x3","13":"-x2","23":"x1"}}"#,
        )
        .unwrap();
        assert_eq!(
            f.value_at(&[1.0, 2.0, 3.0]).unwrap(),
            flat_ky_field(3, ChartRole::Position)
                .value_at(&[1.0, 2.0, 3.0])
                .unwrap()
        );
        assert_eq!(f.role(), ChartRole::Position);
    }

    #[test]
    fn round_trips_through_json() {
        let f = flat_ky_field(4, ChartRole::Momentum);
        let back = AntisymField::from_json_str(&f.to_json_string()).unwrap();
        assert_eq!(back.role(), ChartRole::Momentum);
        assert_eq!(back.label(), f.label());
        let p = [0.1, -0.4, 0.9, 0.3];
        assert_eq!(back.value_at(&p).unwrap(), f.value_at(&p).unwrap());
    }

    #[test]
    fn comma_keys_in_high_dimension() {
        assert_eq!(parse_key("3,10", 10), Some(vec![2, 9]));
        assert_eq!(parse_key("12", 10), None);
        assert_eq!(format_key(&[2, 9], 10), "3,10");
    }

    #[test]
    fn rejects_bad_files() {
        for src in [
            r#"{"dim":3,"rank":2,"components":{"21":"1"}}"#,
            r#"{"dim":3,"rank":2,"components":{"10":"1"}}"#,
            r#"{"dim":3,"rank":2,"components":{"12":"x4"}}"#,
            r#"{"dim":3,"rank":2,"components":{"12":"foo(x1)"}}"#,
            r#"{"dim":5,"rank":3,"components":{}}"#,
            r#"{"dim":3,"rank":2,"components":{},"role":"spin"}"#,
            r#"{"dim":3,"rank":2,"components":{},"extra":1}"#,
        ] {
            assert!(AntisymField::from_json_str(src).is_err(), "{src}");
        }
        let err = AntisymField::from_json_str(r#"{"dim": 3, "rank": }"#).unwrap_err();
        assert!(
            matches!(err, FieldFileError::Json { offset: 19, .. }),
            "{err}"
        );
    }
}
