use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use lattice_dp::{
    approximate_l1_target, construct_dp_linfty, dp_defect_search, expected_min_split, graph_operator,
    indicator_split_defect, optimal_assignment_bruteforce, perturbed_dp_instance, sphere_net, IndicatorOptions,
    NormSpec, SearchOptions,
};

fn split(c: &mut Criterion) {
    let mut g = c.benchmark_group("expected_min_split");
    for n in [12usize, 18, 22] {
        let b: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.37).sin().abs()).collect();
        g.bench_with_input(BenchmarkId::from_parameter(n), &b, |bch, b| bch.iter(|| expected_min_split(black_box(b))));
    }
    g.finish();
}

fn defects(c: &mut Criterion) {
    let g4 = graph_operator(4, 1.0, 2.0).unwrap();
    c.bench_function("indicator_split_graph4", |b| {
        b.iter(|| indicator_split_defect(black_box(&g4.op), &IndicatorOptions::default()))
    });
    c.bench_function("dp_search_graph4", |b| {
        b.iter(|| dp_defect_search(black_box(&g4.op), &SearchOptions::with_seed(0, 2)))
    });
}

fn approximants(c: &mut Criterion) {
    let (sup_op, eps) = perturbed_dp_instance(8, 12, 1e-3, 1, &NormSpec::Sup, &NormSpec::lp(2.0).unwrap()).unwrap();
    c.bench_function("phi_n_8x12", |b| b.iter(|| construct_dp_linfty(black_box(&sup_op), Some(eps))));
    let l1 = NormSpec::lp(1.0).unwrap();
    let (small, eps) = perturbed_dp_instance(4, 8, 1e-3, 2, &l1, &l1).unwrap();
    c.bench_function("assignment_bruteforce_4x8", |b| b.iter(|| optimal_assignment_bruteforce(black_box(&small))));
    c.bench_function("l1_pipeline_4x8", |b| b.iter(|| approximate_l1_target(black_box(&small), Some(eps))));
}

fn nets(c: &mut Criterion) {
    c.bench_function("sphere_net_q3_n64", |b| b.iter(|| sphere_net(black_box(3.0), 64)));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = split, defects, approximants, nets
}
criterion_main!(benches);
