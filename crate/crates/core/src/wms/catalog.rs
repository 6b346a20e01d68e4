//! Named layers and named styles known to the server, and the JSON config
//! that builds them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use indexmap::IndexMap;
use serde::Deserialize;
use thiserror::Error;
use tracing::info;

use crate::contour::{compute_levels, extract_contours, parse_ascii_grid, ContourSpec};
use crate::geojson::load_features;
use crate::model::FeatureCollection;
use crate::sld::{parse_user_style_file, UserStyle};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("style {style:?} registered twice for layer {layer:?}")]
    DuplicateStyle { layer: String, style: String },
    #[error("layer {0:?} registered twice")]
    DuplicateLayer(String),
    #[error("layer {layer:?} has more than one default style ({first:?}, {second:?})")]
    DuplicateDefault { layer: String, first: String, second: String },
}

/// Catalog contents; immutable once the service starts.
#[derive(Debug, Clone, Default)]
pub struct ServerCatalog {
    layers: IndexMap<String, Arc<FeatureCollection>>,
    named_styles: IndexMap<(String, String), UserStyle>,
    default_styles: BTreeMap<String, String>,
}

impl ServerCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_layer(&mut self, name: impl Into<String>, features: FeatureCollection) -> Result<(), CatalogError> {
        let name = name.into();
        if self.layers.contains_key(&name) {
            return Err(CatalogError::DuplicateLayer(name));
        }
        self.layers.insert(name, Arc::new(features));
        Ok(())
    }

    /// Registers a named style. A layer may have at most one default.
    pub fn add_style(
        &mut self,
        layer: impl Into<String>,
        name: impl Into<String>,
        style: UserStyle,
        is_default: bool,
    ) -> Result<(), CatalogError> {
        let (layer, name) = (layer.into(), name.into());
        let key = (layer.clone(), name.clone());
        if self.named_styles.contains_key(&key) {
            return Err(CatalogError::DuplicateStyle { layer, style: name });
        }
        if is_default {
            if let Some(first) = self.default_styles.get(&layer) {
                return Err(CatalogError::DuplicateDefault {
                    first: first.clone(),
                    layer,
                    second: name,
                });
            }
            self.default_styles.insert(layer, name);
        }
        self.named_styles.insert(key, style);
        Ok(())
    }

    pub fn layer(&self, name: &str) -> Option<&Arc<FeatureCollection>> {
        self.layers.get(name)
    }

    pub fn has_layer(&self, name: &str) -> bool {
        self.layers.contains_key(name)
    }

    pub fn style(&self, layer: &str, name: &str) -> Option<&UserStyle> {
        self.named_styles.get(&(layer.to_string(), name.to_string()))
    }

    pub fn default_style_name(&self, layer: &str) -> Option<&str> {
        self.default_styles.get(layer).map(String::as_str)
    }

    pub fn default_style(&self, layer: &str) -> Option<(&str, &UserStyle)> {
        let name = self.default_style_name(layer)?;
        Some((name, self.style(layer, name)?))
    }

    /// Layer names in registration order.
    pub fn layer_names(&self) -> impl Iterator<Item = &str> {
        self.layers.keys().map(String::as_str)
    }

    /// Style names registered for `layer`, in registration order.
    pub fn style_names<'a>(&'a self, layer: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.named_styles
            .keys()
            .filter(move |(l, _)| l == layer)
            .map(|(_, s)| s.as_str())
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {message}")]
    Json { path: PathBuf, message: String },
    #[error("layer {layer:?}: {message}")]
    Data { layer: String, message: String },
    #[error("style {name:?} of layer {layer:?}: {message}")]
    Style { layer: String, name: String, message: String },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataEntry {
    pub layer: String,
    /// GeoJSON, or an ESRI ASCII grid when `base` and `interval` are given.
    pub path: PathBuf,
    #[serde(default)]
    pub base: Option<f64>,
    #[serde(default)]
    pub interval: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StyleEntry {
    pub layer: String,
    pub name: String,
    pub path: PathBuf,
    #[serde(default)]
    pub default: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerConfig {
    pub port: u16,
    #[serde(default)]
    pub data: Vec<DataEntry>,
    #[serde(default)]
    pub styles: Vec<StyleEntry>,
    /// Static files served next to the WMS endpoints.
    #[serde(default)]
    pub assets: Option<PathBuf>,
    /// Report ServiceExceptions with HTTP 200 instead of 400.
    #[serde(default)]
    pub legacy_status_200: bool,
}

/// A parsed config with its catalog. Relative paths resolve against the
/// config file's directory.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ServerConfig,
    pub base_dir: PathBuf,
    pub catalog: ServerCatalog,
}

impl LoadedConfig {
    pub fn assets_dir(&self) -> Option<PathBuf> {
        self.config.assets.as_ref().map(|p| self.base_dir.join(p))
    }
}

fn load_layer(entry: &DataEntry, base: &Path) -> Result<FeatureCollection, ConfigError> {
    let path = base.join(&entry.path);
    let data_err = |message: String| ConfigError::Data {
        layer: entry.layer.clone(),
        message,
    };
    match (entry.base, entry.interval) {
        (None, None) => load_features(&path, &entry.layer).map_err(|e| data_err(e.to_string())),
        (Some(b), Some(i)) => {
            let dem = parse_ascii_grid(&path).map_err(|e| data_err(e.to_string()))?;
            let spec = ContourSpec::new(b, i).map_err(|e| data_err(e.to_string()))?;
            let levels = match dem.value_range() {
                Some((lo, hi)) => compute_levels(lo, hi, spec),
                None => Vec::new(),
            };
            let mut fc = extract_contours(&dem, &levels);
            fc.layer_name = entry.layer.clone();
            Ok(fc)
        }
        _ => Err(data_err("base and interval must be given together".into())),
    }
}

pub fn parse_config(text: &str, path: &Path) -> Result<ServerConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Json {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Reads the config at `path` and loads every layer and style it names.
pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config = parse_config(&text, path)?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut catalog = ServerCatalog::new();
    for entry in &config.data {
        let fc = load_layer(entry, &base_dir)?;
        info!(layer = %entry.layer, features = fc.len(), "loaded layer");
        catalog.add_layer(entry.layer.clone(), fc)?;
    }
    for entry in &config.styles {
        let style_err = |message: String| ConfigError::Style {
            layer: entry.layer.clone(),
            name: entry.name.clone(),
            message,
        };
        let file = base_dir.join(&entry.path);
        let xml = std::fs::read_to_string(&file).map_err(|e| style_err(format!("{}: {e}", file.display())))?;
        let style = parse_user_style_file(&xml).map_err(|e| style_err(e.to_string()))?;
        catalog.add_style(entry.layer.clone(), entry.name.clone(), style, entry.default)?;
    }
    Ok(LoadedConfig {
        config,
        base_dir,
        catalog,
    })
}
