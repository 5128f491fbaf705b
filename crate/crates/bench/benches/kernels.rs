use criterion::{criterion_group, criterion_main};

criterion_group!(
    benches,
    paulispec_bench::expectation_kernel,
    paulispec_bench::fast_transform,
    paulispec_bench::gate_application,
    paulispec_bench::sampler_steps
);
criterion_main!(benches);
