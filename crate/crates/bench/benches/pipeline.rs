use criterion::{black_box, criterion_group, criterion_main, Criterion};

use skelscan_core::config::PipelineConfig;
use skelscan_core::imaging::{correlation, GrayImage};
use skelscan_core::pipeline::analyze_frame;
use skelscan_core::skeleton::{build_graph, prune, thin};
use skelscan_core::synthgen::{render_humanoid, HumanoidSpec};

fn composite(bg: &GrayImage, fig: &skelscan_core::BinaryMask, at: (usize, usize)) -> GrayImage {
    let mut frame = bg.clone();
    for (r, c) in fig.iter_foreground() {
        frame.set(r + at.0, c + at.1, 230);
    }
    frame
}

fn bench_correlation(c: &mut Criterion) {
    let a = GrayImage::from_fn(320, 240, |r, col| ((r * 7 + col * 13) % 251) as u8);
    let b = GrayImage::from_fn(320, 240, |r, col| ((r * 5 + col * 11) % 251) as u8);
    c.bench_function("correlation_320x240", |bencher| {
        bencher.iter(|| correlation(black_box(&a), black_box(&b)).unwrap())
    });
}

fn bench_thin(c: &mut Criterion) {
    let fig = render_humanoid(&HumanoidSpec::default(), 0).unwrap();
    c.bench_function("thin_humanoid", |bencher| {
        bencher.iter(|| thin(black_box(&fig.mask)).unwrap())
    });
}

fn bench_prune(c: &mut Criterion) {
    let fig = render_humanoid(&HumanoidSpec::default(), 0).unwrap();
    let skeleton = thin(&fig.mask).unwrap();
    let graph = build_graph(&skeleton).unwrap();
    c.bench_function("prune_humanoid", |bencher| {
        bencher.iter(|| prune(black_box(&graph), 0.15, 5.0))
    });
}

fn bench_frame(c: &mut Criterion) {
    let fig = render_humanoid(&HumanoidSpec::default(), 0).unwrap();
    let bg = GrayImage::from_fn(260, 260, |r, col| (40 + (r * 3 + col * 5) % 40) as u8);
    let frame = composite(&bg, &fig.mask, (20, 40));
    let cfg = PipelineConfig::default();
    let bgs = [bg];
    c.bench_function("analyze_frame_humanoid", |bencher| {
        bencher.iter(|| analyze_frame(black_box(&bgs), black_box(&frame), 0, &cfg, false).unwrap())
    });
}

criterion_group!(benches, bench_correlation, bench_thin, bench_prune, bench_frame);
criterion_main!(benches);
