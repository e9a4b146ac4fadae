use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use convexcalc_core::oracle::{fuzz, InstanceSpec, RuleKind};
use convexcalc_core::par::ExecMode;

fn fuzz_modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("fuzz");
    group.sample_size(10);
    let spec = InstanceSpec::with_seed(1);
    for kind in [RuleKind::Intersection, RuleKind::Sum, RuleKind::CodChain] {
        for (label, mode) in [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)] {
            group.bench_with_input(BenchmarkId::new(kind.name(), label), &mode, |b, &mode| {
                b.iter(|| fuzz(kind, &spec, 32, mode))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, fuzz_modes);
criterion_main!(benches);
