use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use super::{SldDocument, StyleDef, Symbolizer};

/// Layer name to the attribute names its features carry.
pub type Schema = BTreeMap<String, BTreeSet<String>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    EmptyDocument,
    UnknownLayer { layer: String },
    UnknownFilterProperty { layer: String, rule: Option<String>, property: String },
    UnknownLabelProperty { layer: String, rule: Option<String>, property: String },
    DuplicateRuleName { layer: String, rule: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule_label = |r: &Option<String>| r.clone().unwrap_or_else(|| "<unnamed>".into());
        match self {
            Diagnostic::EmptyDocument => write!(f, "document defines no layers"),
            Diagnostic::UnknownLayer { layer } => write!(f, "layer {layer:?} is not served"),
            Diagnostic::UnknownFilterProperty { layer, rule, property } => write!(
                f,
                "rule {} of layer {layer:?} filters on unknown property {property:?}",
                rule_label(rule)
            ),
            Diagnostic::UnknownLabelProperty { layer, rule, property } => write!(
                f,
                "rule {} of layer {layer:?} labels with unknown property {property:?}",
                rule_label(rule)
            ),
            Diagnostic::DuplicateRuleName { layer, rule } => {
                write!(f, "rule name {rule:?} repeats within a FeatureTypeStyle of {layer:?}")
            }
        }
    }
}

/// Lints layer names and property references against `schema`.
pub fn validate_sld(doc: &SldDocument, schema: &Schema) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if doc.layers.is_empty() {
        out.push(Diagnostic::EmptyDocument);
    }
    for layer in &doc.layers {
        let attrs = schema.get(&layer.name);
        if attrs.is_none() {
            out.push(Diagnostic::UnknownLayer {
                layer: layer.name.clone(),
            });
        }
        for style in &layer.styles {
            let StyleDef::User(user) = style else { continue };
            for fts in &user.feature_type_styles {
                let mut names = HashSet::new();
                for rule in &fts.rules {
                    if let Some(name) = &rule.name {
                        if !names.insert(name.as_str()) {
                            out.push(Diagnostic::DuplicateRuleName {
                                layer: layer.name.clone(),
                                rule: name.clone(),
                            });
                        }
                    }
                    // Properties can only be checked against a known layer.
                    let Some(attrs) = attrs else { continue };
                    if let Some(filter) = &rule.filter {
                        for p in filter.properties() {
                            if !attrs.contains(p) {
                                out.push(Diagnostic::UnknownFilterProperty {
                                    layer: layer.name.clone(),
                                    rule: rule.name.clone(),
                                    property: p.to_string(),
                                });
                            }
                        }
                    }
                    for sym in &rule.symbolizers {
                        if let Symbolizer::Text(t) = sym {
                            if !attrs.contains(&t.label_property) {
                                out.push(Diagnostic::UnknownLabelProperty {
                                    layer: layer.name.clone(),
                                    rule: rule.name.clone(),
                                    property: t.label_property.clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sld::parse_sld;

    const DUP: &str = r#"<StyledLayerDescriptor version="1.0.0"><NamedLayer><Name>roads</Name><UserStyle>
      <FeatureTypeStyle><Rule><Name>a</Name><LineSymbolizer/></Rule><Rule><Name>a</Name><LineSymbolizer/></Rule></FeatureTypeStyle>
      </UserStyle></NamedLayer></StyledLayerDescriptor>"#;

    #[test]
    fn duplicate_rule_names() {
        let schema: Schema = [("roads".to_string(), BTreeSet::new())].into();
        let diags = validate_sld(&parse_sld(DUP).unwrap(), &schema);
        assert_eq!(
            diags,
            vec![Diagnostic::DuplicateRuleName {
                layer: "roads".into(),
                rule: "a".into()
            }]
        );
    }

    #[test]
    fn unknown_layer_and_empty_document() {
        assert_eq!(
            validate_sld(&parse_sld(DUP).unwrap(), &Schema::new())
                .iter()
                .filter(|d| matches!(d, Diagnostic::UnknownLayer { .. }))
                .count(),
            1
        );
        let empty = parse_sld(r#"<StyledLayerDescriptor version="1.0.0"/>"#).unwrap();
        assert_eq!(validate_sld(&empty, &Schema::new()), vec![Diagnostic::EmptyDocument]);
    }
}
