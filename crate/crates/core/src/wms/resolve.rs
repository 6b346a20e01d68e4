//! Style-library precedence: SLD styles first, then the server's named styles.

use std::sync::Arc;

use tracing::debug;

use crate::model::FeatureCollection;
use crate::render::ResolvedStyledLayer;
use crate::sld::{SldDocument, StyleDef, UserStyle};

use super::catalog::ServerCatalog;
use super::kvp::GetMapRequest;
use super::WmsError;

/// Where a resolved style came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StyleSource {
    /// UserStyle named as requested, under the matching SLD NamedLayer.
    SldNamed,
    /// The SLD's IsDefault UserStyle for the layer.
    SldDefault,
    /// A UserStyle given inline in an SLD-driven request.
    SldInline,
    CatalogNamed,
    CatalogDefault,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StyleResolution {
    pub layer: String,
    /// Style name as requested; empty for the default.
    pub requested_style: String,
    pub source: StyleSource,
}

/// Render-ready layers plus a record of how each style was chosen.
#[derive(Debug, Clone)]
pub struct StyledLayerRequest {
    pub layers: Vec<ResolvedStyledLayer>,
    pub resolutions: Vec<StyleResolution>,
}

/// Supplies features for a layer name.
pub trait FeatureSource {
    fn features(&self, layer: &str) -> Result<Arc<FeatureCollection>, WmsError>;
}

impl FeatureSource for ServerCatalog {
    fn features(&self, layer: &str) -> Result<Arc<FeatureCollection>, WmsError> {
        self.layer(layer)
            .cloned()
            .ok_or_else(|| WmsError::LayerNotDefined(layer.to_string()))
    }
}

/// Picks the style for `(layer, style)`: a non-empty name is looked up in
/// the SLD then the catalog; an empty name takes the SLD default then the
/// catalog default.
pub fn resolve_style(
    layer: &str,
    style: &str,
    catalog: &ServerCatalog,
    sld: Option<&SldDocument>,
) -> Result<(StyleSource, UserStyle), WmsError> {
    let mut sld_styles = sld.into_iter().flat_map(|d| d.user_styles_for(layer));
    let found = if style.is_empty() {
        sld_styles
            .find(|u| u.is_default)
            .map(|u| (StyleSource::SldDefault, u.clone()))
            .or_else(|| {
                catalog
                    .default_style(layer)
                    .map(|(_, u)| (StyleSource::CatalogDefault, u.clone()))
            })
    } else {
        sld_styles
            .find(|u| u.name.as_deref() == Some(style))
            .map(|u| (StyleSource::SldNamed, u.clone()))
            .or_else(|| {
                catalog
                    .style(layer, style)
                    .map(|u| (StyleSource::CatalogNamed, u.clone()))
            })
    };
    found.ok_or_else(|| WmsError::StyleNotDefined {
        layer: layer.to_string(),
        style: style.to_string(),
    })
}

/// The (layer, requested style, style) sequence for a request, without features.
///
/// With LAYERS given, each layer/style pair is resolved in order. Without
/// LAYERS, the SLD's NamedLayers are the request: NamedStyle references go
/// through [`resolve_style`], UserStyles are used as written, and a
/// NamedLayer with no style gets the default.
pub fn resolve_styles(
    req: &GetMapRequest,
    catalog: &ServerCatalog,
    sld: Option<&SldDocument>,
    remote_features: bool,
) -> Result<Vec<(StyleResolution, UserStyle)>, WmsError> {
    let check_layer = |layer: &str| {
        if remote_features || catalog.has_layer(layer) {
            Ok(())
        } else {
            Err(WmsError::LayerNotDefined(layer.to_string()))
        }
    };
    let by_name = |layer: &str, style: &str| -> Result<(StyleResolution, UserStyle), WmsError> {
        check_layer(layer)?;
        let (source, user) = resolve_style(layer, style, catalog, sld)?;
        Ok((
            StyleResolution {
                layer: layer.to_string(),
                requested_style: style.to_string(),
                source,
            },
            user,
        ))
    };
    let mut out = Vec::new();
    if !req.layers.is_empty() {
        for (layer, style) in req.layers.iter().zip(&req.styles) {
            out.push(by_name(layer, style)?);
        }
    } else if let Some(doc) = sld {
        for named in &doc.layers {
            if named.styles.is_empty() {
                out.push(by_name(&named.name, "")?);
            }
            for def in &named.styles {
                match def {
                    StyleDef::NamedStyleRef(s) => out.push(by_name(&named.name, s)?),
                    StyleDef::User(u) => {
                        check_layer(&named.name)?;
                        out.push((
                            StyleResolution {
                                layer: named.name.clone(),
                                requested_style: u.name.clone().unwrap_or_default(),
                                source: StyleSource::SldInline,
                            },
                            u.clone(),
                        ));
                    }
                }
            }
        }
    }
    for (r, _) in &out {
        debug!(layer = %r.layer, style = %r.requested_style, source = ?r.source, "resolved style");
    }
    Ok(out)
}

/// Resolves styles, then attaches features from `source`.
pub fn resolve_styled_layers(
    req: &GetMapRequest,
    catalog: &ServerCatalog,
    sld: Option<&SldDocument>,
    source: &dyn FeatureSource,
    remote_features: bool,
) -> Result<StyledLayerRequest, WmsError> {
    let resolved = resolve_styles(req, catalog, sld, remote_features)?;
    let mut layers = Vec::with_capacity(resolved.len());
    let mut resolutions = Vec::with_capacity(resolved.len());
    for (res, style) in resolved {
        layers.push(ResolvedStyledLayer {
            features: source.features(&res.layer)?,
            style,
        });
        resolutions.push(res);
    }
    Ok(StyledLayerRequest { layers, resolutions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BoundingBox;
    use crate::sld::NamedLayerDef;

    fn named(name: &str, is_default: bool) -> UserStyle {
        UserStyle {
            name: Some(name.into()),
            is_default,
            ..UserStyle::default()
        }
    }

    fn catalog() -> ServerCatalog {
        let mut c = ServerCatalog::new();
        c.add_layer("Roads", FeatureCollection::new("Roads", vec![])).unwrap();
        c.add_style("Roads", "CenterLine", named("cat-centerline", false), true).unwrap();
        c.add_style("Roads", "Casing", named("cat-casing", false), false).unwrap();
        c
    }

    fn request(layers: &[&str], styles: &[&str]) -> GetMapRequest {
        let mut r = GetMapRequest::new(
            layers.iter().map(|s| s.to_string()).collect(),
            BoundingBox::new(0.0, 0.0, 1.0, 1.0).unwrap(),
            10,
            10,
        );
        r.styles = styles.iter().map(|s| s.to_string()).collect();
        r
    }

    fn sld(styles: Vec<StyleDef>) -> SldDocument {
        SldDocument::new(vec![NamedLayerDef {
            name: "Roads".into(),
            styles,
        }])
    }

    #[test]
    fn sld_named_style_wins() {
        let doc = sld(vec![StyleDef::User(named("CenterLine", false))]);
        let (src, u) = resolve_style("Roads", "CenterLine", &catalog(), Some(&doc)).unwrap();
        assert_eq!(src, StyleSource::SldNamed);
        assert_eq!(u.name.as_deref(), Some("CenterLine"));
        let (src, u) = resolve_style("Roads", "Casing", &catalog(), Some(&doc)).unwrap();
        assert_eq!(src, StyleSource::CatalogNamed);
        assert_eq!(u.name.as_deref(), Some("cat-casing"));
    }

    #[test]
    fn empty_style_defaults() {
        let doc = sld(vec![StyleDef::User(named("Mine", true))]);
        assert_eq!(resolve_style("Roads", "", &catalog(), Some(&doc)).unwrap().0, StyleSource::SldDefault);
        assert_eq!(resolve_style("Roads", "", &catalog(), None).unwrap().0, StyleSource::CatalogDefault);
    }

    #[test]
    fn repeated_layer_keeps_order() {
        let r = resolve_styles(&request(&["Roads", "Roads"], &["Casing", "CenterLine"]), &catalog(), None, false)
            .unwrap();
        let names: Vec<_> = r.iter().map(|(_, u)| u.name.clone().unwrap()).collect();
        assert_eq!(names, ["cat-casing", "cat-centerline"]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            resolve_styles(&request(&["Nope"], &[""]), &catalog(), None, false).unwrap_err(),
            WmsError::LayerNotDefined("Nope".into())
        );
        assert!(matches!(
            resolve_styles(&request(&["Roads"], &["Dashed"]), &catalog(), None, false),
            Err(WmsError::StyleNotDefined { .. })
        ));
        // Remote sources lift the layer check but not style resolution.
        assert!(matches!(
            resolve_styles(&request(&["Nope"], &[""]), &catalog(), None, true),
            Err(WmsError::StyleNotDefined { .. })
        ));
    }

    #[test]
    fn sld_driven_sequence() {
        let doc = SldDocument::new(vec![
            NamedLayerDef {
                name: "Roads".into(),
                styles: vec![StyleDef::NamedStyleRef("Casing".into()), StyleDef::User(named("x", false))],
            },
            NamedLayerDef {
                name: "Roads".into(),
                styles: vec![],
            },
        ]);
        let r = resolve_styles(&request(&[], &[]), &catalog(), Some(&doc), false).unwrap();
        let sources: Vec<_> = r.iter().map(|(res, _)| res.source).collect();
        assert_eq!(
            sources,
            [StyleSource::CatalogNamed, StyleSource::SldInline, StyleSource::CatalogDefault]
        );
    }
}
