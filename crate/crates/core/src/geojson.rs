//! GeoJSON FeatureCollection ingestion and output.
//!
//! Supported subset: `FeatureCollection` of `Feature`s with `Point`,
//! `LineString` or `Polygon` geometry and flat scalar properties. `Multi*`
//! and `GeometryCollection` are rejected.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::model::{AttributeValue, Attributes, Feature, FeatureCollection, Geometry, Point2D};

#[derive(Debug, Error)]
pub enum GeoJsonError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("cannot read {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed GeoJSON at line {line}, column {column}: {message}")]
    MalformedGeoJson {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported geometry type {0}")]
    UnsupportedGeometryType(String),
    #[error("duplicate feature id {0:?}")]
    DuplicateId(String),
}

fn malformed(message: impl Into<String>) -> GeoJsonError {
    // Structural errors found after JSON parsing have no byte position.
    GeoJsonError::MalformedGeoJson {
        line: 0,
        column: 0,
        message: message.into(),
    }
}

/// Reads a GeoJSON file into a collection named `layer_name`.
pub fn load_features(path: impl AsRef<Path>, layer_name: &str) -> Result<FeatureCollection, GeoJsonError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            GeoJsonError::FileNotFound(path.to_path_buf())
        } else {
            GeoJsonError::Io {
                path: path.to_path_buf(),
                source: e,
            }
        }
    })?;
    parse_features(&text, layer_name)
}

pub fn parse_features(text: &str, layer_name: &str) -> Result<FeatureCollection, GeoJsonError> {
    let root: Value = serde_json::from_str(text).map_err(|e| GeoJsonError::MalformedGeoJson {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = root.as_object().ok_or_else(|| malformed("top level is not an object"))?;
    if obj.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(malformed("top level is not a FeatureCollection"));
    }
    let raw = obj
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("FeatureCollection without a features array"))?;

    let mut seen = BTreeSet::new();
    let mut features = Vec::with_capacity(raw.len());
    for (index, value) in raw.iter().enumerate() {
        let feature = parse_feature(value, index)?;
        if !seen.insert(feature.id.clone()) {
            return Err(GeoJsonError::DuplicateId(feature.id));
        }
        features.push(feature);
    }
    Ok(FeatureCollection::new(layer_name, features))
}

fn parse_feature(value: &Value, index: usize) -> Result<Feature, GeoJsonError> {
    let obj = value
        .as_object()
        .filter(|o| o.get("type").and_then(Value::as_str) == Some("Feature"))
        .ok_or_else(|| malformed(format!("features[{index}] is not a Feature")))?;
    let id = match obj.get("id") {
        None | Some(Value::Null) => format!("f_{index:04}"),
        Some(Value::String(s)) if !s.is_empty() => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        Some(_) => return Err(malformed(format!("features[{index}] has an invalid id"))),
    };
    let geometry = obj
        .get("geometry")
        .ok_or_else(|| malformed(format!("feature {id} has no geometry")))?;
    let geometry = parse_geometry(geometry).map_err(|e| match e {
        GeoJsonError::MalformedGeoJson { message, .. } => malformed(format!("feature {id}: {message}")),
        other => other,
    })?;
    let attributes = match obj.get("properties") {
        None | Some(Value::Null) => Attributes::new(),
        Some(Value::Object(props)) => parse_properties(props, &id)?,
        Some(_) => return Err(malformed(format!("feature {id}: properties is not an object"))),
    };
    Ok(Feature {
        id,
        geometry,
        attributes,
    })
}

fn parse_properties(props: &Map<String, Value>, id: &str) -> Result<Attributes, GeoJsonError> {
    let mut attributes = Attributes::new();
    for (key, value) in props {
        let v = match value {
            Value::Null => continue,
            Value::Bool(b) => AttributeValue::Boolean(*b),
            Value::String(s) => AttributeValue::Text(s.clone()),
            Value::Number(n) => match n.as_i64() {
                Some(i) => AttributeValue::Integer(i),
                None => AttributeValue::Number(
                    n.as_f64()
                        .filter(|f| f.is_finite())
                        .ok_or_else(|| malformed(format!("feature {id}: property {key} is not a finite number")))?,
                ),
            },
            Value::Array(_) | Value::Object(_) => {
                return Err(malformed(format!("feature {id}: property {key} is not a scalar")))
            }
        };
        attributes.insert(key.clone(), v);
    }
    Ok(attributes)
}

fn position(value: &Value) -> Result<Point2D, GeoJsonError> {
    let arr = value.as_array().ok_or_else(|| malformed("position is not an array"))?;
    if arr.len() < 2 {
        return Err(malformed("position needs at least 2 numbers"));
    }
    let x = arr[0].as_f64().ok_or_else(|| malformed("non-numeric coordinate"))?;
    let y = arr[1].as_f64().ok_or_else(|| malformed("non-numeric coordinate"))?;
    Ok(Point2D::new(x, y))
}

fn positions(value: &Value) -> Result<Vec<Point2D>, GeoJsonError> {
    value
        .as_array()
        .ok_or_else(|| malformed("coordinates are not an array"))?
        .iter()
        .map(position)
        .collect()
}

fn parse_geometry(value: &Value) -> Result<Geometry, GeoJsonError> {
    let obj = value.as_object().ok_or_else(|| malformed("geometry is not an object"))?;
    let kind = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("geometry without type"))?;
    let coords = || obj.get("coordinates").ok_or_else(|| malformed("geometry without coordinates"));
    let geometry = match kind {
        "Point" => Geometry::point(position(coords()?)?),
        "LineString" => Geometry::polyline(positions(coords()?)?),
        "Polygon" => {
            let rings = coords()?
                .as_array()
                .ok_or_else(|| malformed("polygon coordinates are not an array"))?
                .iter()
                .map(positions)
                .collect::<Result<Vec<_>, _>>()?;
            Geometry::polygon(rings)
        }
        other => return Err(GeoJsonError::UnsupportedGeometryType(other.to_string())),
    };
    geometry.map_err(|e| malformed(e.to_string()))
}

fn point_json(p: &Point2D) -> Value {
    json!([p.x, p.y])
}

fn geometry_json(g: &Geometry) -> Value {
    match g {
        Geometry::Point(p) => json!({"type": "Point", "coordinates": point_json(p)}),
        Geometry::PolyLine(v) => json!({
            "type": "LineString",
            "coordinates": v.iter().map(point_json).collect::<Vec<_>>(),
        }),
        Geometry::Polygon(rings) => json!({
            "type": "Polygon",
            "coordinates": rings
                .iter()
                .map(|r| r.iter().map(point_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }),
    }
}

fn attribute_json(v: &AttributeValue) -> Value {
    match v {
        AttributeValue::Text(s) => Value::String(s.clone()),
        // Finite by invariant; serde_json keeps the fractional marker (450.0).
        AttributeValue::Number(n) => json!(n),
        AttributeValue::Integer(i) => json!(i),
        AttributeValue::Boolean(b) => json!(b),
    }
}

pub fn to_geojson_value(fc: &FeatureCollection) -> Value {
    let features: Vec<Value> = fc
        .features
        .iter()
        .map(|f| {
            let props: Map<String, Value> = f
                .attributes
                .iter()
                .map(|(k, v)| (k.clone(), attribute_json(v)))
                .collect();
            json!({
                "type": "Feature",
                "id": f.id,
                "geometry": geometry_json(&f.geometry),
                "properties": props,
            })
        })
        .collect();
    json!({"type": "FeatureCollection", "features": features})
}

pub fn to_geojson(fc: &FeatureCollection) -> String {
    serde_json::to_string_pretty(&to_geojson_value(fc)).expect("GeoJSON values always serialize")
}
