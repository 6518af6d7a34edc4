use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use geogirth::boxworld::{
    assemble_boxes, pair_boxes, prepare_parent_boxes, realize_odd_cycle_boxes, recursion_step_boxes, StepOptions,
};
use geogirth::gallai::{enumerate_copies, refute_colorings, ProviderPolicy};
use geogirth::graph::{chromatic_number, girth, is_k_colorable};
use geogirth::lineworld::{
    assemble_lines, build_shift_system, pair_lines, prepare_parent_lines, realize_odd_cycle_lines,
    recursion_step_lines, LineStepOptions, DEFAULT_FRAME_BUDGET,
};
use geogirth::{GroundSet, Rat};
use geogirth_bench::progression_points;

fn box_sweeps(c: &mut Criterion) {
    c.bench_function("boxes/pair step", |b| {
        b.iter(|| {
            recursion_step_boxes(&pair_boxes(), 2, 6, &ProviderPolicy::Pigeonhole, StepOptions::default()).unwrap()
        })
    });
    let sorted = prepare_parent_boxes(&realize_odd_cycle_boxes(5).unwrap()).unwrap();
    let t = GroundSet::new(sorted.traces()).unwrap();
    let mut group = c.benchmark_group("boxes/pentagon step");
    group.sample_size(10);
    for len in [20, 40, 70] {
        let cert = progression_points(&t, len, 3, 5, 1000);
        group.bench_with_input(BenchmarkId::from_parameter(len), &cert, |b, cert| {
            b.iter(|| assemble_boxes(&sorted, cert).unwrap())
        });
    }
    group.finish();
}

fn line_sweeps(c: &mut Criterion) {
    c.bench_function("lines/pair step", |b| {
        b.iter(|| {
            recursion_step_lines(
                &pair_lines(),
                2,
                6,
                &ProviderPolicy::Pigeonhole,
                LineStepOptions::default(),
            )
            .unwrap()
        })
    });
    let (sorted, frame) = prepare_parent_lines(&realize_odd_cycle_lines(5).unwrap(), DEFAULT_FRAME_BUDGET).unwrap();
    let t = GroundSet::new(frame.trace_params(&sorted.lines).unwrap()).unwrap();
    let mut group = c.benchmark_group("lines/pentagon step");
    group.sample_size(10);
    for len in [40, 80, 150] {
        let cert = progression_points(&t, len, 3, 5, 1000);
        group.bench_with_input(BenchmarkId::from_parameter(len), &cert, |b, cert| {
            b.iter(|| assemble_lines(&sorted, &frame, cert, 1_000_000).unwrap())
        });
    }
    group.finish();
}

fn graph_checks(c: &mut Criterion) {
    let sorted = prepare_parent_boxes(&realize_odd_cycle_boxes(5).unwrap()).unwrap();
    let t = GroundSet::new(sorted.traces()).unwrap();
    let big = assemble_boxes(&sorted, &progression_points(&t, 70, 3, 5, 1000))
        .unwrap()
        .graph();
    c.bench_function("girth/1940 boxes", |b| b.iter(|| girth(black_box(&big))));

    let cycle = realize_odd_cycle_boxes(21).unwrap().graph();
    c.bench_function("dsatur/chromatic C_21", |b| {
        b.iter(|| chromatic_number(black_box(&cycle), u64::MAX))
    });
    let shift = build_shift_system(9, 1).unwrap().graph().unwrap();
    c.bench_function("dsatur/3-colour G_9", |b| {
        b.iter(|| is_k_colorable(black_box(&shift), 3, u64::MAX))
    });
}

fn shift_systems(c: &mut Criterion) {
    let mut group = c.benchmark_group("shift system");
    group.sample_size(10);
    for n in [6, 8, 10] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| build_shift_system(n, 1).unwrap())
        });
    }
    group.finish();
}

fn progressions(c: &mut Criterion) {
    let t = GroundSet::ints(&[0, 1, 2]).unwrap();
    let x: Vec<Rat> = (1..=27).map(Rat::from_int).collect();
    let copies: Vec<Vec<usize>> = enumerate_copies(&t, &x)
        .iter()
        .map(|c| c.image.iter().map(|v| x.binary_search(v).unwrap()).collect())
        .collect();
    let mut group = c.benchmark_group("van der waerden");
    group.sample_size(10);
    group.bench_function("refute 3 colours of 1..27", |b| {
        b.iter(|| refute_colorings(27, &copies, 3, u64::MAX).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    box_sweeps,
    line_sweeps,
    graph_checks,
    shift_systems,
    progressions
);
criterion_main!(benches);
