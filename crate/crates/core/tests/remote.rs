mod common;

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use common::*;
use contourwms::contour::{compute_levels, extract_contours, parse_ascii_grid, ContourSpec};
use contourwms::geojson::to_geojson;
use contourwms::wms::{fetch_remote_features, FetchLimits, RemoteOwsType};

struct Stub {
    base: String,
    hits: Arc<AtomicUsize>,
    paths: Arc<Mutex<Vec<String>>>,
}

/// Minimal HTTP/1.1 server: `routes` maps a path prefix to (status, body).
fn stub(routes: Vec<(&'static str, u16, String)>) -> Stub {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let paths = Arc::new(Mutex::new(Vec::new()));
    let (h, p) = (Arc::clone(&hits), Arc::clone(&paths));
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            if reader.read_line(&mut request_line).is_err() {
                continue;
            }
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).map_or(true, |n| n == 0) || line == "\r\n" {
                    break;
                }
            }
            h.fetch_add(1, Ordering::SeqCst);
            let path = request_line.split_whitespace().nth(1).unwrap_or("").to_string();
            p.lock().unwrap().push(path.clone());
            let (status, body) = routes
                .iter()
                .find(|(prefix, _, _)| path.starts_with(prefix))
                .map(|(_, s, b)| (*s, b.clone()))
                .unwrap_or((404, "not found".into()));
            let _ = write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
        }
    });
    Stub { base, hits, paths }
}

fn contour_geojson() -> String {
    let dem = parse_ascii_grid(fixtures().join("dem/plateau.asc")).unwrap();
    let (lo, hi) = dem.value_range().unwrap();
    to_geojson(&extract_contours(&dem, &compute_levels(lo, hi, ContourSpec::new(450.0, 25.0).unwrap())))
}

#[test]
fn wfs_stub_serves_contours() {
    let s = stub(vec![("/wfs", 200, contour_geojson())]);
    let fc = fetch_remote_features(RemoteOwsType::Wfs, &format!("{}/wfs", s.base), "contours", FetchLimits::default())
        .unwrap();
    assert_eq!(fc.len(), 11);
    assert_eq!(s.paths.lock().unwrap()[0], "/wfs?REQUEST=GetFeature&TYPENAME=contours");
}

#[test]
fn missing_remote_layer() {
    let s = stub(vec![]);
    let err = fetch_remote_features(RemoteOwsType::Wfs, &s.base, "x", FetchLimits::default()).unwrap_err();
    assert_eq!(err.code(), "RemoteFetchFailed");
    let s = stub(vec![("/", 200, "{not json".into())]);
    let err = fetch_remote_features(RemoteOwsType::Wfs, &s.base, "x", FetchLimits::default()).unwrap_err();
    assert_eq!(err.code(), "RemoteParseFailed");
}

#[test]
fn oversized_remote_body_is_rejected() {
    let s = stub(vec![("/", 200, " ".repeat(4096))]);
    let limits = FetchLimits {
        max_bytes: 1024,
        ..FetchLimits::default()
    };
    assert_eq!(
        fetch_remote_features(RemoteOwsType::Wfs, &s.base, "x", limits).unwrap_err().code(),
        "RemoteFetchFailed"
    );
}

#[test]
fn getmap_with_remote_features_is_cached() {
    let s = stub(vec![("/wfs", 200, contour_geojson())]);
    let svc = service();
    let q = format!(
        "REQUEST=GetMap&LAYERS=contours&STYLES=&BBOX=0,0,480,400&WIDTH=120&HEIGHT=100&REMOTE_OWS_TYPE=WFS&REMOTE_OWS_URL={}",
        encode(&format!("{}/wfs", s.base))
    );
    let first = svc.handle_get(&q);
    assert!(first.is_png(), "{}", String::from_utf8_lossy(&first.body));
    let second = svc.handle_get(&q);
    assert_eq!(first.body, second.body);
    assert_eq!(s.hits.load(Ordering::SeqCst), 1);
    assert_eq!(svc.remote_cache().len(), 1);
    // Same data locally gives the same image: remote data changes only the feature source.
    let local = svc.handle_get("REQUEST=GetMap&LAYERS=contours&STYLES=&BBOX=0,0,480,400&WIDTH=120&HEIGHT=100");
    assert_eq!(local.body, first.body);
}

#[test]
fn remote_failures_are_not_cached() {
    let s = stub(vec![]);
    let svc = service();
    let q = format!(
        "REQUEST=GetMap&LAYERS=contours&STYLES=&BBOX=0,0,1,1&WIDTH=10&HEIGHT=10&REMOTE_OWS_TYPE=WFS&REMOTE_OWS_URL={}",
        encode(&s.base)
    );
    for _ in 0..2 {
        let resp = svc.handle_get(&q);
        assert!(String::from_utf8_lossy(&resp.body).contains("RemoteFetchFailed"));
    }
    assert_eq!(s.hits.load(Ordering::SeqCst), 2);
    assert!(svc.remote_cache().is_empty());
}

#[test]
fn wcs_is_declared_but_not_implemented() {
    let resp = service().handle_get(
        "REQUEST=GetMap&LAYERS=contours&STYLES=&BBOX=0,0,1,1&WIDTH=10&HEIGHT=10&REMOTE_OWS_TYPE=WCS&REMOTE_OWS_URL=http://127.0.0.1:9/",
    );
    assert!(String::from_utf8_lossy(&resp.body).contains("code=\"NotImplemented\""));
}

#[test]
fn remote_sld_is_fetched() {
    let s = stub(vec![("/style.sld", 200, sld_text("roads_casing.sld"))]);
    let svc = service();
    let via_url = svc.handle_get(&format!(
        "REQUEST=GetMap&BBOX=0,0,1,1&WIDTH=200&HEIGHT=200&SLD={}",
        encode(&format!("{}/style.sld", s.base))
    ));
    let inline = svc.handle_get(&get_with_sld_body(&sld_text("roads_casing.sld"), [0.0, 0.0, 1.0, 1.0], 200, 200));
    assert!(via_url.is_png(), "{}", String::from_utf8_lossy(&via_url.body));
    assert_eq!(via_url.body, inline.body);

    let missing = svc.handle_get(&format!(
        "REQUEST=GetMap&BBOX=0,0,1,1&WIDTH=20&HEIGHT=20&SLD={}",
        encode(&format!("{}/gone.sld", s.base))
    ));
    assert!(String::from_utf8_lossy(&missing.body).contains("SldFetchFailed"));
}
