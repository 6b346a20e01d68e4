use std::hint::black_box;
use std::sync::Arc;

use contourwms::contour::{compute_levels, extract_contours, generate_ramp_sld, ContourSpec, LabelMode};
use contourwms::model::collection_bbox;
use contourwms::sld::{parse_sld, serialize_sld, StyleDef};
use contourwms::{render_map, Color, ResolvedStyledLayer};
use contourwms_bench::synthetic_dem;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn levels_for(n: usize) -> Vec<f64> {
    let dem = synthetic_dem(n);
    let (lo, hi) = dem.value_range().expect("grid has data");
    compute_levels(lo, hi, ContourSpec::new(0.0, 25.0).expect("valid spec"))
}

fn bench_extract(c: &mut Criterion) {
    let mut group = c.benchmark_group("extract_contours");
    for n in [64usize, 256] {
        let dem = synthetic_dem(n);
        let levels = levels_for(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| extract_contours(black_box(&dem), black_box(&levels)))
        });
    }
    group.finish();
}

fn bench_sld(c: &mut Criterion) {
    let levels = levels_for(64);
    let doc = generate_ramp_sld(&levels, Color::rgb(0, 0, 255), Color::rgb(255, 0, 0), LabelMode::All)
        .expect("ramp");
    let xml = serialize_sld(&doc);
    c.bench_function("parse_sld/ramp", |b| b.iter(|| parse_sld(black_box(&xml)).expect("parses")));
    c.bench_function("serialize_sld/ramp", |b| b.iter(|| serialize_sld(black_box(&doc))));
}

fn bench_render(c: &mut Criterion) {
    let dem = synthetic_dem(128);
    let levels = levels_for(128);
    let features = Arc::new(extract_contours(&dem, &levels));
    let bbox = collection_bbox(&features).expect("non-empty");
    let doc = generate_ramp_sld(&levels, Color::rgb(0, 0, 255), Color::rgb(255, 0, 0), LabelMode::IndexOnly)
        .expect("ramp");
    let StyleDef::User(style) = doc.layers[0].styles[0].clone() else { unreachable!() };
    let layers = [ResolvedStyledLayer { features, style }];
    let mut group = c.benchmark_group("render_map");
    for size in [256u32, 1024] {
        group.bench_with_input(BenchmarkId::from_parameter(size), &size, |b, &s| {
            b.iter(|| render_map(black_box(&layers), &bbox, s, s, Color::WHITE).expect("renders"))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_extract, bench_sld, bench_render);
criterion_main!(benches);
