//! Throughput comparison between the rayon-backed stages and their
//! sequential twins, plus the endpoint-search microbenchmark against the
//! pixel-walking baseline.
//!
//! Build with default features to compare both execution paths in one run;
//! `cargo bench --no-default-features` measures the pure sequential build.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use slope_mlaa::{
    brute_force_extend, build_mask, extend_endpoint, rasterize_halfplane, run_pipeline,
    run_pipeline_seq, supersample_reference, supersample_reference_seq, Dir, EdgeThreshold, Frac,
    HalfPlaneScene, Mode, PipelineConfig, Run, RunCache, RunEndRef, SearchBudget,
};

fn scene(p: i64, q: i64, w: u32, h: u32) -> HalfPlaneScene {
    HalfPlaneScene::new(Frac::new(p, q), Frac::new(13, 4), w, h).unwrap()
}

fn bench_pipeline(c: &mut Criterion) {
    let img = rasterize_halfplane(&scene(2, 7, 512, 512));
    let config = PipelineConfig {
        mode: Mode::SlopeMlaa,
        ..Default::default()
    };
    let mut group = c.benchmark_group("pipeline_512_slope_2_7");
    group.bench_function("parallel", |b| {
        b.iter(|| run_pipeline(black_box(&img), black_box(&config)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| run_pipeline_seq(black_box(&img), black_box(&config)))
    });
    group.finish();
}

fn bench_supersample(c: &mut Criterion) {
    let sc = scene(2, 7, 128, 128);
    let mut group = c.benchmark_group("supersample_128_s16");
    group.bench_function("parallel", |b| {
        b.iter(|| supersample_reference(black_box(&sc), 16).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| supersample_reference_seq(black_box(&sc), 16).unwrap())
    });
    group.finish();
}

fn bench_endpoint_search(c: &mut Criterion) {
    // Wide steps are where prediction pays: compare one slope search with
    // the pixel walk over the same span.
    let img = rasterize_halfplane(&scene(1, 16, 512, 48));
    let mask = build_mask(&img, EdgeThreshold::default());
    let cache = RunCache::build(&mask);
    let anchors: Vec<&Run> = cache
        .horizontal()
        .iter()
        .filter(|r| r.is_z_shaped() && r.is_interior())
        .collect();
    let run = anchors[anchors.len() / 2].clone();
    let end = RunEndRef::of(&run, Dir::Pos);

    let mut group = c.benchmark_group("endpoint_search_L16");
    for n in [4u32, 8] {
        group.bench_with_input(BenchmarkId::new("slope_predict", n), &n, |b, &n| {
            b.iter(|| {
                extend_endpoint(
                    black_box(&cache),
                    black_box(&end),
                    run.len(),
                    Dir::Pos,
                    SearchBudget(n),
                )
            })
        });
        group.bench_with_input(BenchmarkId::new("pixel_walk", n), &n, |b, &n| {
            b.iter(|| brute_force_extend(black_box(&mask), black_box(&end), Dir::Pos, n))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_pipeline, bench_supersample, bench_endpoint_search);
criterion_main!(benches);
