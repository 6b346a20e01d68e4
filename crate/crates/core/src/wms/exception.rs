use xmlwriter::{Options, XmlWriter};

use super::WmsError;
use crate::xml::inline_text;

pub const EXCEPTION_CONTENT_TYPE: &str = "application/vnd.ogc.se_xml";

/// A WMS 1.1.1 ServiceExceptionReport for `err`.
pub fn service_exception_xml(err: &WmsError) -> String {
    let mut w = XmlWriter::new(Options::default());
    w.write_declaration();
    w.start_element("ServiceExceptionReport");
    w.write_attribute("version", "1.1.1");
    w.start_element("ServiceException");
    w.write_attribute("code", err.code());
    inline_text(&mut w, &err.to_string());
    let mut out = w.end_document();
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_shape() {
        let xml = service_exception_xml(&WmsError::MissingParameter("BBOX".into()));
        let doc = roxmltree::Document::parse(&xml).unwrap();
        let root = doc.root_element();
        assert_eq!(root.tag_name().name(), "ServiceExceptionReport");
        let ex = root.first_element_child().unwrap();
        assert_eq!(ex.attribute("code"), Some("MissingParameter"));
        assert!(ex.text().unwrap().contains("BBOX"));
    }

    #[test]
    fn message_is_escaped() {
        let xml = service_exception_xml(&WmsError::LayerNotDefined("<a & b>".into()));
        let doc = roxmltree::Document::parse(&xml).unwrap();
        assert!(doc.root_element().first_element_child().unwrap().text().unwrap().contains("<a & b>"));
    }
}
