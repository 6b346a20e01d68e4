#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use contourwms::render::decode_png;
use contourwms::sld::decode_xml_bytes;
use contourwms::wms::{load_config, Service};
use contourwms::{Canvas, Color};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn service() -> Service {
    Service::from_config(&load_config(fixtures().join("catalog.json")).unwrap())
}

/// Fixture SLD as text, decoded per its XML declaration.
pub fn sld_text(name: &str) -> String {
    decode_xml_bytes(&fs::read(fixtures().join("sld").join(name)).unwrap()).unwrap()
}

fn strip_declaration(xml: &str) -> &str {
    let t = xml.trim_start();
    match t.strip_prefix("<?xml") {
        Some(rest) => rest.split_once("?>").map_or(t, |(_, body)| body),
        None => t,
    }
}

pub fn encode(s: &str) -> String {
    form_urlencoded::byte_serialize(s.as_bytes()).collect()
}

pub fn get_with_sld_body(sld: &str, bbox: [f64; 4], w: u32, h: u32) -> String {
    format!(
        "SERVICE=WMS&VERSION=1.1.1&REQUEST=GetMap&BBOX={},{},{},{}&WIDTH={w}&HEIGHT={h}&FORMAT=image/png&SLD_BODY={}",
        bbox[0],
        bbox[1],
        bbox[2],
        bbox[3],
        encode(sld)
    )
}

pub fn post_body(sld: &str, bbox: [f64; 4], w: u32, h: u32) -> String {
    format!(
        r#"<?xml version="1.0" encoding="UTF-8"?>
<GetMap version="1.1.1">
{}
<BoundingBox><coord><X>{}</X><Y>{}</Y></coord><coord><X>{}</X><Y>{}</Y></coord></BoundingBox>
<Output><Format>image/png</Format><Size><Width>{w}</Width><Height>{h}</Height></Size></Output>
</GetMap>"#,
        strip_declaration(sld),
        bbox[0],
        bbox[1],
        bbox[2],
        bbox[3]
    )
}

pub fn png(body: &[u8]) -> Canvas {
    decode_png(body).unwrap_or_else(|e| panic!("not a PNG ({e}): {}", String::from_utf8_lossy(body)))
}

pub fn hex(c: &str) -> Color {
    c.parse().unwrap()
}
