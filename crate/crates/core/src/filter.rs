//! OGC filter expressions over feature attributes.
//!
//! Literals stay strings until evaluation. A comparison is numeric when the
//! attribute is Number/Integer and the literal parses as a number; otherwise
//! it is an exact string comparison. A missing property makes every
//! comparison false.

use std::cmp::Ordering;

use crate::model::{AttributeValue, Feature, FeatureCollection};

#[derive(Debug, Clone, PartialEq)]
pub enum FilterExpr {
    IsEqualTo { property: String, literal: String },
    IsNotEqualTo { property: String, literal: String },
    IsLessThan { property: String, literal: String },
    IsGreaterThan { property: String, literal: String },
    /// Inclusive at both ends.
    IsBetween { property: String, low: String, high: String },
    And(Vec<FilterExpr>),
    Or(Vec<FilterExpr>),
    Not(Box<FilterExpr>),
}

impl FilterExpr {
    pub fn equal_to(property: impl Into<String>, literal: impl Into<String>) -> Self {
        FilterExpr::IsEqualTo {
            property: property.into(),
            literal: literal.into(),
        }
    }

    /// Every property name referenced anywhere in the tree, in tree order.
    pub fn properties(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_properties(&mut out);
        out
    }

    fn collect_properties<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            FilterExpr::IsEqualTo { property, .. }
            | FilterExpr::IsNotEqualTo { property, .. }
            | FilterExpr::IsLessThan { property, .. }
            | FilterExpr::IsGreaterThan { property, .. }
            | FilterExpr::IsBetween { property, .. } => out.push(property),
            FilterExpr::And(children) | FilterExpr::Or(children) => {
                children.iter().for_each(|c| c.collect_properties(out))
            }
            FilterExpr::Not(inner) => inner.collect_properties(out),
        }
    }
}

/// Orders an attribute against a literal. `None` when the two cannot be
/// ordered (string vs number, NaN literal).
fn compare(value: &AttributeValue, literal: &str) -> Option<Ordering> {
    if let Some(n) = value.as_f64() {
        if let Ok(lit) = literal.trim().parse::<f64>() {
            return n.partial_cmp(&lit);
        }
    }
    let text = match value {
        AttributeValue::Text(s) => s.clone(),
        other => other.to_string(),
    };
    Some(text.as_str().cmp(literal))
}

fn compare_property(feature: &Feature, property: &str, literal: &str) -> Option<Ordering> {
    feature.attribute(property).and_then(|v| compare(v, literal))
}

pub fn evaluate(expr: &FilterExpr, feature: &Feature) -> bool {
    match expr {
        FilterExpr::IsEqualTo { property, literal } => {
            compare_property(feature, property, literal) == Some(Ordering::Equal)
        }
        FilterExpr::IsNotEqualTo { property, literal } => {
            matches!(compare_property(feature, property, literal), Some(o) if o != Ordering::Equal)
        }
        FilterExpr::IsLessThan { property, literal } => {
            compare_property(feature, property, literal) == Some(Ordering::Less)
        }
        FilterExpr::IsGreaterThan { property, literal } => {
            compare_property(feature, property, literal) == Some(Ordering::Greater)
        }
        FilterExpr::IsBetween { property, low, high } => {
            let above = compare_property(feature, property, low);
            let below = compare_property(feature, property, high);
            matches!(above, Some(Ordering::Greater | Ordering::Equal))
                && matches!(below, Some(Ordering::Less | Ordering::Equal))
        }
        FilterExpr::And(children) => children.iter().all(|c| evaluate(c, feature)),
        FilterExpr::Or(children) => children.iter().any(|c| evaluate(c, feature)),
        FilterExpr::Not(inner) => !evaluate(inner, feature),
    }
}

/// Matching subset in input order.
pub fn filter_collection(expr: &FilterExpr, fc: &FeatureCollection) -> FeatureCollection {
    FeatureCollection::new(
        fc.layer_name.clone(),
        fc.features.iter().filter(|f| evaluate(expr, f)).cloned().collect(),
    )
}
