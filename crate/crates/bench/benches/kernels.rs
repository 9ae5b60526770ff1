use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spt_bench::reference_params;
use spt_core::groundstate;
use spt_core::linalg::{eig_hermitian, partial_trace};
use spt_core::model;
use spt_core::observables::{self, GridSpec};
use spt_core::sweep::{self, Axis, AxisParameter, MPolicy};

fn diagonalization(c: &mut Criterion) {
    let mut group = c.benchmark_group("eig_hermitian");
    group.sample_size(10);
    for m in [16usize, 64, 128] {
        let h = model::build_total(&reference_params(25.0, m)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(2 * m), &h, |b, h| {
            b.iter(|| eig_hermitian(black_box(h)).unwrap())
        });
    }
    group.finish();
}

fn wigner_grid(c: &mut Criterion) {
    let p = reference_params(25.0, 48);
    let g = groundstate::squeezed_frame_ground_state(&p).unwrap();
    let boson = partial_trace(&g.state, 0).unwrap();
    let grid = GridSpec {
        x_min: -6.0,
        x_max: 6.0,
        p_min: -6.0,
        p_max: 6.0,
        nx: 81,
        np: 81,
    };
    c.bench_function("wigner_81x81_m48", |b| {
        b.iter(|| observables::wigner(black_box(&boson), &grid).unwrap())
    });
}

fn coupling_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let axis = Axis::uniform(AxisParameter::LambdaTilde, 0.3, 1.0, 16);
    let template = reference_params(25.0, 32);
    group.bench_function("lambda_16_points_m32", |b| {
        b.iter(|| sweep::run_sweep(&template, &axis, None, MPolicy::Fixed(32)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, diagonalization, wigner_grid, coupling_sweep);
criterion_main!(benches);
