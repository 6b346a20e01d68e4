//! XML-encoded GetMap bodies.
//!
//! ```xml
//! <GetMap version="1.1.1">
//!   <StyledLayerDescriptor version="1.0.0">…</StyledLayerDescriptor>
//!   <BoundingBox>
//!     <coord><X>0</X><Y>0</Y></coord>
//!     <coord><X>1</X><Y>1</Y></coord>
//!   </BoundingBox>
//!   <Output>
//!     <Format>image/png</Format>
//!     <Size><Width>400</Width><Height>400</Height></Size>
//!     <BGcolor>#FFFFFF</BGcolor>
//!   </Output>
//! </GetMap>
//! ```
//!
//! `BoundingBox` may instead hold the KVP text form `minx,miny,maxx,maxy`.
//! Format and BGcolor are optional. The embedded SLD's layer sequence
//! drives the request, as with a GET carrying only SLD_BODY.

use roxmltree::{Document, Node};

use crate::model::BoundingBox;
use crate::xml::{nesting_exceeds, MAX_XML_DEPTH};
use crate::sld::{decode_xml_bytes, parse_sld_node, SldDocument};

use super::kvp::{check_format, parse_bgcolor, parse_dimension, GetMapRequest};
use super::WmsError;

fn child<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    node.children().find(|c| c.is_element() && c.tag_name().name() == name)
}

fn required<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Result<Node<'a, 'i>, WmsError> {
    child(node, name).ok_or_else(|| WmsError::MissingParameter(name.to_string()))
}

fn text(node: Node<'_, '_>) -> String {
    node.descendants()
        .filter(Node::is_text)
        .filter_map(|n| n.text())
        .collect::<String>()
        .trim()
        .to_string()
}

fn parse_bbox(node: Node<'_, '_>) -> Result<BoundingBox, WmsError> {
    let coords: Vec<Node> = node
        .children()
        .filter(|c| c.is_element() && c.tag_name().name() == "coord")
        .collect();
    if coords.is_empty() {
        return text(node).parse().map_err(|e: crate::model::BboxError| WmsError::InvalidBbox(e.to_string()));
    }
    let [lo, hi] = coords[..] else {
        return Err(WmsError::InvalidBbox(format!("expected 2 coord elements, got {}", coords.len())));
    };
    let num = |c: Node, axis: &str| -> Result<f64, WmsError> {
        let t = text(required(c, axis).map_err(|_| WmsError::InvalidBbox(format!("coord without {axis}")))?);
        t.parse().map_err(|_| WmsError::InvalidBbox(format!("{t:?} is not a number")))
    };
    BoundingBox::new(num(lo, "X")?, num(lo, "Y")?, num(hi, "X")?, num(hi, "Y")?)
        .map_err(|e| WmsError::InvalidBbox(e.to_string()))
}

/// Parses a POST GetMap body into a request and its embedded SLD.
pub fn parse_post_getmap(body: &[u8]) -> Result<(GetMapRequest, SldDocument), WmsError> {
    let xml = decode_xml_bytes(body).map_err(|e| WmsError::XmlSyntaxError(e.to_string()))?;
    if nesting_exceeds(&xml, MAX_XML_DEPTH) {
        return Err(WmsError::XmlSyntaxError(format!("elements nested deeper than {MAX_XML_DEPTH}")));
    }
    let doc = Document::parse(&xml).map_err(|e| WmsError::XmlSyntaxError(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "GetMap" {
        return Err(WmsError::XmlSyntaxError(format!(
            "expected <GetMap> root, found <{}>",
            root.tag_name().name()
        )));
    }
    let sld_node = required(root, "StyledLayerDescriptor")?;
    let mut warnings = Vec::new();
    let sld = parse_sld_node(sld_node, &mut warnings).map_err(|e| WmsError::SldParseFailed(e.to_string()))?;
    let bbox = parse_bbox(required(root, "BoundingBox")?)?;
    let output = required(root, "Output")?;
    let size = required(output, "Size")?;
    let width = parse_dimension("WIDTH", &text(required(size, "Width")?))?;
    let height = parse_dimension("HEIGHT", &text(required(size, "Height")?))?;
    let mut req = GetMapRequest::new(Vec::new(), bbox, width, height);
    req.version = root.attribute("version").map(str::to_string);
    if let Some(f) = child(output, "Format") {
        req.format = check_format(&text(f))?;
    }
    if let Some(c) = child(output, "BGcolor") {
        req.bgcolor = parse_bgcolor(&text(c))?;
    }
    Ok((req, sld))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Color;

    const BODY: &str = r##"<?xml version="1.0"?>
<GetMap version="1.1.1" xmlns="http://www.opengis.net/ows">
  <StyledLayerDescriptor version="1.0.0">
    <NamedLayer><Name>Roads</Name><NamedStyle><Name>CenterLine</Name></NamedStyle></NamedLayer>
  </StyledLayerDescriptor>
  <BoundingBox><coord><X>0</X><Y>0</Y></coord><coord><X>1</X><Y>2</Y></coord></BoundingBox>
  <Output><Format>image/png</Format><Size><Width>40</Width><Height>30</Height></Size><BGcolor>0x000000</BGcolor></Output>
</GetMap>"##;

    #[test]
    fn parses_body() {
        let (req, sld) = parse_post_getmap(BODY.as_bytes()).unwrap();
        assert_eq!(req.bbox, BoundingBox::new(0.0, 0.0, 1.0, 2.0).unwrap());
        assert_eq!((req.width, req.height), (40, 30));
        assert_eq!(req.bgcolor, Color::BLACK);
        assert!(req.layers.is_empty());
        assert_eq!(sld.layers[0].name, "Roads");
    }

    #[test]
    fn text_bbox() {
        let body = BODY.replace(
            "<coord><X>0</X><Y>0</Y></coord><coord><X>1</X><Y>2</Y></coord>",
            "0,0,1,2",
        );
        assert_eq!(parse_post_getmap(body.as_bytes()).unwrap().0.bbox, BoundingBox::new(0.0, 0.0, 1.0, 2.0).unwrap());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_post_getmap(b""), Err(WmsError::XmlSyntaxError(_))));
        assert!(matches!(parse_post_getmap(b"<GetMap"), Err(WmsError::XmlSyntaxError(_))));
        assert!(matches!(parse_post_getmap(b"<Other/>"), Err(WmsError::XmlSyntaxError(_))));
        assert_eq!(
            parse_post_getmap(b"<GetMap/>").unwrap_err(),
            WmsError::MissingParameter("StyledLayerDescriptor".into())
        );
        let no_size = BODY.replace("<Width>40</Width>", "");
        assert_eq!(
            parse_post_getmap(no_size.as_bytes()).unwrap_err(),
            WmsError::MissingParameter("Width".into())
        );
        let bad_sld = BODY.replace("<Name>Roads</Name>", "");
        assert!(matches!(parse_post_getmap(bad_sld.as_bytes()), Err(WmsError::SldParseFailed(_))));
    }
}
