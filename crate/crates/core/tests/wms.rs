mod common;

use std::sync::Arc;

use common::*;
use contourwms::sld::{FeatureTypeStyle, LineSymbolizer, NamedLayerDef, Rule, StyleDef, Symbolizer};
use contourwms::wms::{
    capabilities_xml, parse_kvp, ServerCatalog, ServiceOptions, StyleSource, CAPABILITIES_CONTENT_TYPE,
    EXCEPTION_CONTENT_TYPE,
};
use contourwms::{BoundingBox, Color, Feature, FeatureCollection, Geometry, Point2D, Service, SldDocument, UserStyle};

const ROADS_OVER_RIVER: &str = "VERSION=1.1.0&REQUEST=GetMap&BBOX=0.0,0.0,1.0,1.0&LAYERS=Rivers,Roads,Houses\
&STYLES=CenterLine,CenterLine,Outline&WIDTH=400&HEIGHT=400&FORMAT=image/png";
const CASED_ROADS: &str = "VERSION=1.1.0&REQUEST=GetMap&BBOX=0.0,0.0,1.0,1.0&LAYERS=Roads,Roads,Houses\
&STYLES=Casing,CenterLine,Outline&WIDTH=400&HEIGHT=400&FORMAT=image/png";

const RIVER: &str = "#3366FF";
const ROAD: &str = "#FFCC66";
const CASING: &str = "#333333";
const HOUSE: &str = "#8B4513";

#[test]
fn kvp_example_parses() {
    let req = parse_kvp(ROADS_OVER_RIVER).unwrap();
    assert_eq!(req.layers, ["Rivers", "Roads", "Houses"]);
    assert_eq!(req.styles, ["CenterLine", "CenterLine", "Outline"]);
    assert_eq!(req.bbox, BoundingBox::new(0.0, 0.0, 1.0, 1.0).unwrap());
}

#[test]
fn roads_are_drawn_over_the_river() {
    let svc = service();
    let resp = svc.handle_get(ROADS_OVER_RIVER);
    assert_eq!((resp.status, resp.content_type), (200, "image/png"));
    let img = png(&resp.body);
    // road_1 runs along row 200 with width 3; the river crosses it near column 200.
    for y in 199..=201 {
        for x in 195..=205 {
            assert_eq!(img.pixel(x, y), hex(ROAD), "({x},{y})");
        }
    }
    // The river is visible just above and below the crossing.
    assert_eq!(img.pixel(199, 196), hex(RIVER));
    assert_eq!(img.pixel(201, 204), hex(RIVER));
    // Houses draw last: house_1's top edge is row 280 (y = 0.3).
    assert_eq!(img.pixel(100, 280), hex(HOUSE));
    assert_eq!(img.pixel(100, 250), Color::WHITE);
}

#[test]
fn casing_flanks_the_centerline() {
    let img = png(&service().handle_get(CASED_ROADS).body);
    let column: Vec<Color> = (196..=204).map(|y| img.pixel(100, y)).collect();
    assert_eq!(
        column,
        [
            Color::WHITE,
            Color::WHITE,
            hex(CASING),
            hex(ROAD),
            hex(ROAD),
            hex(ROAD),
            hex(CASING),
            Color::WHITE,
            Color::WHITE
        ]
    );
    // Along the vertical road_2 at x = 320 the casing shows left and right.
    let row: Vec<Color> = (317..=323).map(|x| img.pixel(x, 120)).collect();
    assert_eq!(
        row,
        [Color::WHITE, hex(CASING), hex(ROAD), hex(ROAD), hex(ROAD), hex(CASING), Color::WHITE]
    );
}

#[test]
fn rendering_is_deterministic() {
    let svc = service();
    for q in [ROADS_OVER_RIVER, CASED_ROADS] {
        let first = svc.handle_get(q).body;
        for _ in 0..3 {
            assert_eq!(svc.handle_get(q).body, first);
        }
        assert_eq!(service().handle_get(q).body, first);
    }
}

#[test]
fn golden_images_match() {
    let svc = service();
    for (q, name) in [(ROADS_OVER_RIVER, "roads_over_river.png"), (CASED_ROADS, "cased_roads.png")] {
        let golden = png(&std::fs::read(fixtures().join("golden").join(name)).unwrap());
        assert_eq!(png(&svc.handle_get(q).body), golden, "{name}");
    }
}

#[test]
fn sld_driven_equals_layers_request() {
    // The three NamedLayers are the same request as ROADS_OVER_RIVER.
    let svc = service();
    let via_sld = svc.handle_post(post_body(&sld_text("named_layers.sld"), [0.0, 0.0, 1.0, 1.0], 400, 400).as_bytes());
    assert_eq!(via_sld.status, 200);
    assert_eq!(via_sld.body, svc.handle_get(ROADS_OVER_RIVER).body);
}

#[test]
fn get_and_post_agree_on_every_fixture_sld() {
    let svc = service();
    for name in [
        "attribute_based_line.sld",
        "contour_ramp.sld",
        "named_layers.sld",
        "roads_casing.sld",
        "user_styles_mixed.sld",
    ] {
        let sld = sld_text(name);
        let (bbox, w, h) = if sld.contains("ELEVATION") {
            ([0.0, 0.0, 480.0, 400.0], 480, 400)
        } else {
            ([0.0, 0.0, 1.0, 1.0], 300, 300)
        };
        let get = svc.handle_get(&get_with_sld_body(&sld, bbox, w, h));
        let post = svc.handle_post(post_body(&sld, bbox, w, h).as_bytes());
        assert!(get.is_png(), "{name}: {}", String::from_utf8_lossy(&get.body));
        assert_eq!(get.body, post.body, "{name}");
    }
}

#[test]
fn attribute_based_line_draws_only_the_450_contour() {
    let svc = service();
    let q = get_with_sld_body(&sld_text("attribute_based_line.sld"), [0.0, 0.0, 480.0, 400.0], 480, 400);
    let img = png(&svc.handle_get(&q).body);
    let mut colors = std::collections::BTreeSet::new();
    for y in 0..img.height() {
        for x in 0..img.width() {
            colors.insert(img.pixel(x, y).to_rgba());
        }
    }
    assert!(colors.contains(&[0, 0, 255, 255]));
    assert!(colors.contains(&[0, 0, 0, 255]), "expected black label ink");
    // Anti-aliasing is off, so only background, stroke and label colors appear.
    assert_eq!(colors.len(), 3, "{colors:?}");
}

fn line_style(name: &str, color: Color, is_default: bool) -> UserStyle {
    UserStyle {
        name: Some(name.into()),
        title: None,
        is_default,
        feature_type_styles: vec![FeatureTypeStyle {
            rules: vec![Rule {
                name: None,
                filter: None,
                symbolizers: vec![Symbolizer::Line(LineSymbolizer {
                    stroke: color,
                    stroke_width: 3.0,
                })],
            }],
        }],
    }
}

#[derive(Debug, Clone, Copy)]
enum SldCase {
    /// UserStyle "S" (not default) under NamedLayer "L".
    Named,
    /// Default UserStyle "D" under "L".
    Default,
    /// Styles named "S" and marked default, but under another layer.
    OtherLayer,
    Absent,
}

#[derive(Debug, Clone, Copy)]
enum CatalogCase {
    /// ("L", "S") registered, no default.
    Named,
    /// Only ("L", "C") registered, as the default.
    Default,
    Empty,
}

const SLD_NAMED: Color = Color::rgb(10, 0, 0);
const SLD_DEFAULT: Color = Color::rgb(20, 0, 0);
const OTHER_LAYER: Color = Color::rgb(30, 0, 0);
const CAT_NAMED: Color = Color::rgb(40, 0, 0);
const CAT_DEFAULT: Color = Color::rgb(50, 0, 0);

fn matrix_catalog(case: CatalogCase) -> ServerCatalog {
    let mut c = ServerCatalog::new();
    let line = Feature::new(
        "l1",
        Geometry::PolyLine(vec![Point2D::new(0.0, 0.5), Point2D::new(1.0, 0.5)]),
    );
    c.add_layer("L", FeatureCollection::new("L", vec![line])).unwrap();
    match case {
        CatalogCase::Named => c.add_style("L", "S", line_style("cat", CAT_NAMED, false), false).unwrap(),
        CatalogCase::Default => c.add_style("L", "C", line_style("cat", CAT_DEFAULT, false), true).unwrap(),
        CatalogCase::Empty => {}
    }
    c
}

fn matrix_sld(case: SldCase) -> Option<SldDocument> {
    let (layer, style) = match case {
        SldCase::Named => ("L", line_style("S", SLD_NAMED, false)),
        SldCase::Default => ("L", line_style("D", SLD_DEFAULT, true)),
        SldCase::OtherLayer => ("M", line_style("S", OTHER_LAYER, true)),
        SldCase::Absent => return None,
    };
    Some(SldDocument::new(vec![NamedLayerDef {
        name: layer.into(),
        styles: vec![StyleDef::User(style)],
    }]))
}

#[test]
fn precedence_matrix() {
    use CatalogCase as C;
    use SldCase as S;
    type Expected = Option<(StyleSource, Color)>;
    let named = |src, c| -> Expected { Some((src, c)) };
    // (requested style, SLD, catalog) -> source and the color that must be drawn.
    let table: [(&str, SldCase, CatalogCase, Expected); 24] = [
        ("S", S::Named, C::Named, named(StyleSource::SldNamed, SLD_NAMED)),
        ("S", S::Named, C::Default, named(StyleSource::SldNamed, SLD_NAMED)),
        ("S", S::Named, C::Empty, named(StyleSource::SldNamed, SLD_NAMED)),
        ("S", S::Default, C::Named, named(StyleSource::CatalogNamed, CAT_NAMED)),
        ("S", S::Default, C::Default, None),
        ("S", S::Default, C::Empty, None),
        ("S", S::OtherLayer, C::Named, named(StyleSource::CatalogNamed, CAT_NAMED)),
        ("S", S::OtherLayer, C::Default, None),
        ("S", S::OtherLayer, C::Empty, None),
        ("S", S::Absent, C::Named, named(StyleSource::CatalogNamed, CAT_NAMED)),
        ("S", S::Absent, C::Default, None),
        ("S", S::Absent, C::Empty, None),
        ("", S::Named, C::Named, None),
        ("", S::Named, C::Default, named(StyleSource::CatalogDefault, CAT_DEFAULT)),
        ("", S::Named, C::Empty, None),
        ("", S::Default, C::Named, named(StyleSource::SldDefault, SLD_DEFAULT)),
        ("", S::Default, C::Default, named(StyleSource::SldDefault, SLD_DEFAULT)),
        ("", S::Default, C::Empty, named(StyleSource::SldDefault, SLD_DEFAULT)),
        ("", S::OtherLayer, C::Named, None),
        ("", S::OtherLayer, C::Default, named(StyleSource::CatalogDefault, CAT_DEFAULT)),
        ("", S::OtherLayer, C::Empty, None),
        ("", S::Absent, C::Named, None),
        ("", S::Absent, C::Default, named(StyleSource::CatalogDefault, CAT_DEFAULT)),
        ("", S::Absent, C::Empty, None),
    ];
    for (style, sld_case, cat_case, expected) in table {
        let svc = Service::new(matrix_catalog(cat_case), ServiceOptions::default());
        let sld = matrix_sld(sld_case);
        let mut req = parse_kvp(&format!("REQUEST=GetMap&LAYERS=L&STYLES={style}&BBOX=0,0,1,1&WIDTH=20&HEIGHT=20")).unwrap();
        req.bgcolor = Color::WHITE;
        let label = format!("style={style:?} sld={sld_case:?} catalog={cat_case:?}");
        match (svc.get_map(&req, sld.as_ref()), expected) {
            (Ok(map), Some((source, color))) => {
                assert_eq!(map.resolutions.len(), 1, "{label}");
                assert_eq!(map.resolutions[0].source, source, "{label}");
                assert_eq!(png(&map.png).pixel(10, 10), color, "{label}");
            }
            (Err(e), None) => assert_eq!(e.code(), "StyleNotDefined", "{label}"),
            (got, want) => panic!("{label}: got {:?}, want {want:?}", got.map(|m| m.resolutions)),
        }
    }
}

#[test]
fn repeated_layers_render_in_request_order() {
    let map = service().get_map_kvp(CASED_ROADS).unwrap();
    let styles: Vec<_> = map.resolutions.iter().map(|r| (r.layer.as_str(), r.requested_style.as_str())).collect();
    assert_eq!(styles, [("Roads", "Casing"), ("Roads", "CenterLine"), ("Houses", "Outline")]);
    assert!(map.resolutions.iter().all(|r| r.source == StyleSource::CatalogNamed));
}

#[test]
fn capabilities_list_styles_by_name() {
    let svc = service();
    for req in ["REQUEST=GetCapabilities", "request=getcapabilities&service=WMS", "REQUEST=GETCAPABILITIES"] {
        let resp = svc.handle_get(req);
        assert_eq!((resp.status, resp.content_type), (200, CAPABILITIES_CONTENT_TYPE));
        let xml = String::from_utf8(resp.body).unwrap();
        let doc = roxmltree::Document::parse(&xml).unwrap();
        let roads = doc
            .descendants()
            .find(|n| n.has_tag_name("Layer") && n.children().any(|c| c.has_tag_name("Name") && c.text() == Some("Roads")))
            .expect("Roads layer");
        let styles: Vec<_> = roads
            .children()
            .filter(|n| n.has_tag_name("Style"))
            .map(|s| s.children().find(|c| c.has_tag_name("Name")).and_then(|c| c.text()).unwrap())
            .collect();
        assert_eq!(styles, ["CenterLine", "Casing"]);
    }
    let empty = capabilities_xml(&ServerCatalog::new());
    let doc = roxmltree::Document::parse(&empty).unwrap();
    assert!(doc.descendants().filter(|n| n.has_tag_name("Layer")).all(|l| !l.children().any(|c| c.has_tag_name("Name"))));
}

#[test]
fn errors_are_service_exceptions() {
    let svc = service();
    let cases = [
        ("REQUEST=GetMap&LAYERS=Roads&STYLES=&WIDTH=10&HEIGHT=10", "MissingParameter"),
        ("REQUEST=GetMap&LAYERS=Roads&STYLES=&BBOX=1,1,0,0&WIDTH=10&HEIGHT=10", "InvalidBbox"),
        ("REQUEST=GetMap&LAYERS=Nope&STYLES=&BBOX=0,0,1,1&WIDTH=10&HEIGHT=10", "LayerNotDefined"),
        ("REQUEST=GetMap&LAYERS=Roads&STYLES=Dashed&BBOX=0,0,1,1&WIDTH=10&HEIGHT=10", "StyleNotDefined"),
        ("REQUEST=GetMap&LAYERS=Roads&STYLES=&BBOX=0,0,1,1&WIDTH=10&HEIGHT=10&SLD_BODY=%3CFoo", "SldParseFailed"),
        ("REQUEST=GetMap&LAYERS=Roads&STYLES=&BBOX=0,0,1,1&WIDTH=10&HEIGHT=10&SLD=http://127.0.0.1:9/x.sld", "SldFetchFailed"),
        ("REQUEST=GetMap&LAYERS=Roads,Rivers&STYLES=a&BBOX=0,0,1,1&WIDTH=10&HEIGHT=10", "LayerStyleCountMismatch"),
    ];
    for (q, code) in cases {
        let resp = svc.handle_get(q);
        assert_eq!((resp.status, resp.content_type), (400, EXCEPTION_CONTENT_TYPE), "{q}");
        let xml = String::from_utf8(resp.body).unwrap();
        let doc = roxmltree::Document::parse(&xml).unwrap();
        let exc = doc.descendants().find(|n| n.has_tag_name("ServiceException")).unwrap();
        assert_eq!(exc.attribute("code"), Some(code), "{q}");
    }
    let post = svc.handle_post(b"");
    assert_eq!(post.status, 400);
    assert!(String::from_utf8(post.body).unwrap().contains("code=\"XmlSyntaxError\""));
}

#[test]
fn legacy_status_flag() {
    let svc = Service::new(
        ServerCatalog::new(),
        ServiceOptions {
            legacy_status_200: true,
            ..ServiceOptions::default()
        },
    );
    let resp = svc.handle_get("REQUEST=GetMap");
    assert_eq!((resp.status, resp.content_type), (200, EXCEPTION_CONTENT_TYPE));
}

#[test]
fn service_is_shareable_across_threads() {
    let svc = Arc::new(service());
    let expected = svc.handle_get(ROADS_OVER_RIVER).body;
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let svc = Arc::clone(&svc);
            std::thread::spawn(move || svc.handle_get(ROADS_OVER_RIVER).body)
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), expected);
    }
}
