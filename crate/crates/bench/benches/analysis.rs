use blockscope_bench::workloads;
use blockscope_core::fixtures::{gen_gcd, gen_random_profile};
use blockscope_core::io::{parse_netlist, serialize_netlist};
use blockscope_core::{
    area_report, build_registry, delay_report, power_score, AreaWeights, BlockDelayScope,
    CircuitGraph, PowerModel,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn delay(c: &mut Criterion) {
    let mut group = c.benchmark_group("delay_report");
    for (n, netlist) in workloads(&[100, 1_000, 5_000]) {
        let registry = build_registry(&netlist).unwrap();
        let graph = CircuitGraph::new(&netlist).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                delay_report(black_box(&graph), &registry, BlockDelayScope::default()).unwrap()
            })
        });
    }
    group.finish();
}

fn area_and_power(c: &mut Criterion) {
    let (gcd, _) = gen_gcd(8).unwrap();
    let registry = build_registry(&gcd).unwrap();
    let labels: Vec<_> = registry.labels().cloned().collect();
    let profile = gen_random_profile(7, &labels);
    c.bench_function("area_report/gcd8", |b| {
        b.iter(|| area_report(black_box(&gcd), &registry, &AreaWeights::default()).unwrap())
    });
    c.bench_function("power_score/gcd8", |b| {
        b.iter(|| {
            power_score(black_box(&gcd), &registry, &PowerModel::default(), &profile).unwrap()
        })
    });
}

fn parsing(c: &mut Criterion) {
    let (_, netlist) = workloads(&[5_000]).remove(0);
    let text = serialize_netlist(&netlist).unwrap();
    c.bench_function("parse_netlist/5000", |b| {
        b.iter(|| parse_netlist(black_box(text.as_bytes())).unwrap())
    });
}

criterion_group!(benches, delay, area_and_power, parsing);
criterion_main!(benches);
