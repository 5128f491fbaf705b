//! Criterion benchmarks for the expectation kernel, the fast Pauli transform,
//! gate application and sampler steps.

use criterion::{black_box, BenchmarkId, Criterion, Throughput};

use paulispec::ensembles::{self, rng_from_seed};
use paulispec::pauli::expectation;
use paulispec::sampler::{run_chain, SamplerConfig};
use paulispec::spectrum::{fast_pauli_transform, state_entropies};
use paulispec::{Group, PauliString};

pub fn expectation_kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("expectation");
    for n in [10usize, 14, 18] {
        let state = ensembles::haar_state(n, Group::Unitary, 1).expect("valid size");
        let p = PauliString::parse("X1 Y2 Z3", n).expect("valid string");
        group.throughput(Throughput::Elements(1 << n));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| expectation(black_box(&state), black_box(&p)).expect("matching sizes"))
        });
    }
    group.finish();
}

pub fn fast_transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("fast_transform");
    group.sample_size(10);
    for n in [6usize, 8, 10] {
        for (label, g) in [("unitary", Group::Unitary), ("orthogonal", Group::Orthogonal)] {
            let state = ensembles::haar_state(n, g, 2).expect("valid size");
            group.throughput(Throughput::Elements(1 << (2 * n)));
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, _| {
                b.iter(|| fast_pauli_transform(black_box(&state)).expect("within cap"))
            });
        }
    }
    let state = ensembles::haar_state(10, Group::Unitary, 3).expect("valid size");
    group.bench_function("entropies_q1to6/10", |b| {
        b.iter(|| state_entropies(black_box(&state), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).expect("valid orders"))
    });
    group.finish();
}

pub fn gate_application(c: &mut Criterion) {
    let mut group = c.benchmark_group("two_qubit_gate");
    let mut rng = rng_from_seed(4);
    let gate = ensembles::haar_two_qubit_gate(Group::Unitary, &mut rng);
    for n in [12usize, 16, 20] {
        let mut state = ensembles::haar_state(n, Group::Unitary, 5).expect("valid size");
        group.throughput(Throughput::Elements(1 << n));
        for (label, i, j) in [("adjacent", 0, 1), ("distant", 0, n - 1)] {
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, _| {
                b.iter(|| state.apply_two_qubit_gate(black_box(&gate), i, j).expect("distinct qubits"))
            });
        }
    }
    group.finish();
}

pub fn sampler_steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampler");
    group.sample_size(10);
    let steps = 2_000;
    for n in [10usize, 14] {
        let state = ensembles::haar_state(n, Group::Unitary, 6).expect("valid size");
        let config = SamplerConfig::new(steps, 7).with_burn_in(0);
        group.throughput(Throughput::Elements(steps as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| run_chain(black_box(&state), &config).expect("chain initializes"))
        });
    }
    group.finish();
}
