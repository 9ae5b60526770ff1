//! Randomized checks of the algebraic building blocks.

use proptest::prelude::*;
use spt_core::linalg::{eig_hermitian, expm_hermitian_generator, inner, partial_trace, OperatorMatrix, C64};
use spt_core::noise::{self, NoiseParams};
use spt_core::observables::{self, GridSpec};
use spt_core::QuantumState;

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b)), n)
}

fn matrix(dim: usize) -> impl Strategy<Value = OperatorMatrix> {
    complex_entries(dim * dim).prop_map(move |v| OperatorMatrix::from_row_major(dim, v).unwrap())
}

fn hermitian(dim: usize) -> impl Strategy<Value = OperatorMatrix> {
    matrix(dim).prop_map(|a| (&a + &a.adjoint()).scale_real(0.5))
}

/// `G G† / tr` for a random square `G`.
fn density(dim: usize) -> impl Strategy<Value = OperatorMatrix> {
    matrix(dim).prop_map(|g| {
        let rho = g.matmul(&g.adjoint());
        let tr = rho.trace().re;
        rho.scale_real(1.0 / tr)
    })
}

fn unit_vector(dim: usize) -> impl Strategy<Value = Vec<C64>> {
    complex_entries(dim).prop_filter_map("zero vector", |v| {
        let n = inner(&v, &v).re.sqrt();
        (n > 1e-6).then(|| v.into_iter().map(|z| z / n).collect())
    })
}

fn min_eigenvalue(m: &OperatorMatrix) -> f64 {
    eig_hermitian(m).unwrap().values[0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kron_is_associative(a in matrix(2), b in matrix(3), c in matrix(2)) {
        let left = a.kron(&b).unwrap().kron(&c).unwrap();
        let right = a.kron(&b.kron(&c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) <= 1e-12);
    }

    #[test]
    fn eigendecomposition_residual_and_orthonormality(
        h in prop::sample::select(vec![2usize, 4, 8, 16, 32]).prop_flat_map(hermitian)
    ) {
        let e = eig_hermitian(&h).unwrap();
        let scale = h.max_abs().max(1.0);
        for j in 0..h.dim() {
            let v = e.vector(j);
            let hv = h.apply(&v);
            let resid = hv.iter().zip(&v).map(|(x, y)| (x - y * e.values[j]).norm()).fold(0.0, f64::max);
            prop_assert!(resid <= 1e-9 * scale, "residual {resid}");
        }
        let gram = e.vectors.adjoint().matmul(&e.vectors);
        prop_assert!(gram.max_abs_diff(&OperatorMatrix::identity(h.dim()).unwrap()) <= 1e-9);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn evolution_is_unitary_and_composes(h in hermitian(6), s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let us = expm_hermitian_generator(&h, s).unwrap();
        let ut = expm_hermitian_generator(&h, t).unwrap();
        let ust = expm_hermitian_generator(&h, s + t).unwrap();
        prop_assert!(us.unitarity_defect() <= 1e-9);
        prop_assert!(us.matmul(&ut).max_abs_diff(&ust) <= 1e-9);
    }

    #[test]
    fn partial_trace_gives_valid_densities(rho in density(8), keep in 0usize..2) {
        let state = QuantumState::density(vec![4, 2], rho).unwrap();
        let r = partial_trace(&state, keep).unwrap().density_matrix();
        prop_assert!(r.hermiticity_defect() <= 1e-12);
        prop_assert!((r.trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(min_eigenvalue(&r) >= -1e-9);
    }

    #[test]
    fn channels_preserve_trace_and_positivity(
        rho in density(8),
        t1 in 0.5..50.0f64,
        t2 in 0.5..50.0f64,
        dt in 0.0..10.0f64,
        p_gad in 0.0..=1.0f64,
    ) {
        let np = NoiseParams { p_gad, ..NoiseParams::uniform(3, t1, t2, dt).unwrap() };
        let out = noise::apply_all_qubits(&QuantumState::density(vec![8], rho).unwrap(), &np).unwrap();
        let m = out.density_matrix();
        prop_assert!((m.trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(min_eigenvalue(&m) >= -1e-9);
    }

    #[test]
    fn moment_routes_agree(v in unit_vector(12)) {
        let state = QuantumState::pure(vec![12], v).unwrap();
        let direct = observables::quadrature_moments(&state).unwrap();
        let split = observables::quadrature_moments_by_decomposition(&state).unwrap();
        prop_assert!((direct.x - split.x).abs() <= 1e-10);
        prop_assert!((direct.x2 - split.x2).abs() <= 1e-10);
        prop_assert!((direct.n - split.n).abs() <= 1e-10);
    }

    #[test]
    fn entropy_is_symmetric_across_the_cut(v in unit_vector(16)) {
        let state = QuantumState::pure(vec![8, 2], v).unwrap();
        let boson = observables::reduced_entropy(&state, 0).unwrap();
        let spin = observables::reduced_entropy(&state, 1).unwrap();
        prop_assert!((boson - spin).abs() <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn wigner_of_pure_states_is_bounded(v in unit_vector(10)) {
        let state = QuantumState::pure(vec![10], v).unwrap();
        let grid = GridSpec { x_min: -4.0, x_max: 4.0, p_min: -4.0, p_max: 4.0, nx: 33, np: 33 };
        let w = observables::wigner(&state, &grid).unwrap();
        let bound = 2.0 / std::f64::consts::PI + 1e-3;
        prop_assert!(w.values.iter().all(|x| x.abs() <= bound));
        prop_assert!((w.normalization() - 1.0).abs() <= 0.02, "normalization {}", w.normalization());
    }
}
