use xmlwriter::{Options, XmlWriter};

use crate::model::collection_bbox;

use super::catalog::ServerCatalog;
use super::exception::EXCEPTION_CONTENT_TYPE;
use crate::xml::inline_text;
use super::kvp::PNG_FORMAT;

pub const CAPABILITIES_CONTENT_TYPE: &str = "application/vnd.ogc.wms_xml";

fn text_element(w: &mut XmlWriter, name: &str, text: &str) {
    w.start_element(name);
    inline_text(w, text);
}

/// A minimal WMS 1.1.1 capabilities document: every catalog layer with
/// its extent and style names. The default style is listed first and
/// carries `default="1"`.
pub fn capabilities_xml(catalog: &ServerCatalog) -> String {
    let mut w = XmlWriter::new(Options::default());
    w.write_declaration();
    w.start_element("WMT_MS_Capabilities");
    w.write_attribute("version", "1.1.1");
    w.start_element("Service");
    text_element(&mut w, "Name", "OGC:WMS");
    text_element(&mut w, "Title", "Contour WMS");
    w.end_element();
    w.start_element("Capability");
    w.start_element("Request");
    w.start_element("GetCapabilities");
    text_element(&mut w, "Format", CAPABILITIES_CONTENT_TYPE);
    w.end_element();
    w.start_element("GetMap");
    text_element(&mut w, "Format", PNG_FORMAT);
    w.end_element();
    w.end_element();
    w.start_element("Exception");
    text_element(&mut w, "Format", EXCEPTION_CONTENT_TYPE);
    w.end_element();
    w.start_element("UserDefinedSymbolization");
    w.write_attribute("SupportSLD", "1");
    w.write_attribute("UserLayer", "0");
    w.write_attribute("UserStyle", "1");
    w.write_attribute("RemoteWFS", "1");
    w.end_element();
    w.start_element("Layer");
    text_element(&mut w, "Title", "Contour WMS");
    for name in catalog.layer_names() {
        w.start_element("Layer");
        w.write_attribute("queryable", "0");
        text_element(&mut w, "Name", name);
        text_element(&mut w, "Title", name);
        if let Some(bbox) = catalog.layer(name).and_then(|fc| collection_bbox(fc).ok()) {
            w.start_element("BoundingBox");
            w.write_attribute("SRS", "NONE");
            w.write_attribute("minx", &bbox.min_x().to_string());
            w.write_attribute("miny", &bbox.min_y().to_string());
            w.write_attribute("maxx", &bbox.max_x().to_string());
            w.write_attribute("maxy", &bbox.max_y().to_string());
            w.end_element();
        }
        let default = catalog.default_style_name(name);
        let mut styles: Vec<&str> = catalog.style_names(name).collect();
        styles.sort_by_key(|s| Some(*s) != default);
        for style in styles {
            w.start_element("Style");
            if Some(style) == default {
                w.write_attribute("default", "1");
            }
            text_element(&mut w, "Name", style);
            text_element(&mut w, "Title", style);
            w.end_element();
        }
        w.end_element();
    }
    let mut out = w.end_document();
    out.push('\n');
    out
}
