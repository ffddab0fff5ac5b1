#[path = "common/oracles.rs"]
mod oracles;

use proptest::prelude::*;
use spinmagnus::expm::ExpmBackend;
use spinmagnus::hamiltonian::{hocp_coefficients, ChirpedPulseParams, SpinCoefficients, SpinSpec, SpinSystem};
use spinmagnus::observables::{bloch_components, frobenius_inner, normalized_component, ObservableSpec};
use spinmagnus::quadrature::QuadratureRule;
use spinmagnus::solvers::{propagate, propagate_with, Method, TimeGrid};
use spinmagnus::spinalg::{
    commutator, devectorize, embed_pair, embed_single, kron, liouvillian, pauli, vec_norm, vectorize, ComplexMatrix,
    KroneckerTerm, KroneckerTermList, Pauli, C64,
};

const I: C64 = C64::new(0.0, 1.0);

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), n * n).prop_map(move |v| ComplexMatrix::from_vec(n, n, v).unwrap())
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n).prop_map(|g| {
        let mut h = g.adjoint();
        h.add_scaled(C64::from(1.0), &g);
        h.scale_real(0.5)
    })
}

fn axis() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::Identity), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

fn spin_spec() -> impl Strategy<Value = SpinSpec> {
    prop_oneof![
        (0.5..10.0f64, 0.1..2.0f64, -2.0..2.0f64).prop_map(|(b, g, w)| SpinSpec::hocp(b, g, w)),
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(fx, fy, omega)| SpinSpec::Constant { fx, fy, omega }),
    ]
}

/// One or two spins, optional real-coefficient coupling, `rho0 = sigma_x (x) I`.
fn system() -> impl Strategy<Value = SpinSystem> {
    (1usize..=2)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(spin_spec(), n),
                prop::option::of(prop::collection::vec(
                    (-1.0..1.0f64, prop::collection::vec(axis(), n)),
                    1..3,
                )),
            )
        })
        .prop_map(|(specs, coupling)| {
            let n = specs.len();
            let spins = specs.iter().map(|s| s.to_coefficients(1.0).unwrap()).collect();
            let coupling = coupling.filter(|_| n > 1).map(|terms| {
                KroneckerTermList::new(n, terms.into_iter().map(|(c, f)| KroneckerTerm::new(c, f)).collect()).unwrap()
            });
            let mut f = vec![Pauli::Identity; n];
            f[0] = Pauli::X;
            SpinSystem::new(spins, coupling, KroneckerTermList::product(f).unwrap()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn liouvillian_of_hermitian_is_hermitian(h2 in hermitian(2), h4 in hermitian(4)) {
        prop_assert!(liouvillian(&h2).unwrap().hermitian_deviation() < 1e-13);
        prop_assert!(liouvillian(&h4).unwrap().hermitian_deviation() < 1e-13);
    }

    #[test]
    fn liouvillian_commutator_identity(h1 in hermitian(2), h2 in hermitian(2)) {
        let a = liouvillian(&h1).unwrap().scale(-I);
        let b = liouvillian(&h2).unwrap().scale(-I);
        let lhs = commutator(&a, &b).unwrap();
        let rhs = liouvillian(&commutator(&h2, &h1).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn embed_pair_is_product_of_singles(a in matrix(2), b in matrix(2), i in 1usize..=3, j in 1usize..=3) {
        prop_assume!(i != j);
        let pair = embed_pair(3, i, j, &a, &b).unwrap();
        let prod = embed_single(3, i, &a).unwrap().matmul(&embed_single(3, j, &b).unwrap());
        prop_assert!(pair.max_abs_diff(&prod) < 1e-13);
    }

    #[test]
    fn kron_mixed_product(a1 in matrix(2), a2 in matrix(2), b1 in matrix(2), b2 in matrix(2)) {
        let lhs = kron(&a1, &a2).matmul(&kron(&b1, &b2));
        let rhs = kron(&a1.matmul(&b1), &a2.matmul(&b2));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn vectorize_round_trip(a in matrix(4)) {
        prop_assert_eq!(devectorize(&vectorize(&a).unwrap(), 4).unwrap(), a);
    }

    #[test]
    fn hamiltonian_is_hermitian(sys in system(), t in 0.0..20.0f64) {
        prop_assert!(sys.hamiltonian_at(t).hermitian_deviation() < 1e-12);
    }

    #[test]
    fn uncoupled_hamiltonian_is_sum_of_spins(specs in prop::collection::vec(spin_spec(), 1..=3), t in 0.0..20.0f64) {
        let n = specs.len();
        let spins: Vec<SpinCoefficients> = specs.iter().map(|s| s.to_coefficients(1.0).unwrap()).collect();
        let mut rho0 = vec![Pauli::Identity; n];
        rho0[0] = Pauli::Z;
        let sys = SpinSystem::new(spins.clone(), None, KroneckerTermList::product(rho0).unwrap()).unwrap();
        let d = 1 << n;
        let mut sum = ComplexMatrix::zeros(d, d);
        for (j, s) in spins.iter().enumerate() {
            let mut h = pauli(Pauli::X).scale_real(s.f(t));
            h.add_scaled(C64::from(s.g(t)), &pauli(Pauli::Y));
            h.add_scaled(C64::from(s.omega()), &pauli(Pauli::Z));
            sum.add_scaled(C64::from(1.0), &embed_single(n, j + 1, &h).unwrap());
        }
        prop_assert!(sys.hamiltonian_at(t).max_abs_diff(&sum) < 1e-13);
    }

    #[test]
    fn pulse_quadratures_share_envelope(beta in 0.1..20.0f64, gamma in 0.0..5.0f64, t in 0.0..20.0f64) {
        let params = ChirpedPulseParams::new(beta, gamma);
        let (f, g) = hocp_coefficients(params);
        let e = params.envelope(t);
        let lhs = f(t).powi(2) + g(t).powi(2);
        prop_assert!((lhs - e * e).abs() <= 1e-12 * (e * e).max(f64::MIN_POSITIVE));
    }

    #[test]
    fn self_inner_product_is_real_nonnegative(a in matrix(4)) {
        let z = frobenius_inner(&a, &a).unwrap();
        prop_assert!(z.re >= 0.0 && z.im == 0.0);
    }

    #[test]
    fn normalized_component_is_linear(
        r1 in hermitian(4), r2 in hermitian(4), c in -3.0..3.0f64,
        f1 in prop::collection::vec(axis(), 2), f2 in prop::collection::vec(axis(), 2),
    ) {
        let op1 = ObservableSpec::product("a", f1.clone()).unwrap();
        let op2 = ObservableSpec::product("b", f2.clone()).unwrap();
        let both = ObservableSpec::new(
            "ab",
            KroneckerTermList::new(2, vec![KroneckerTerm::new(1.0, f1), KroneckerTerm::new(c, f2)]).unwrap(),
        ).unwrap();
        let mut r = r1.clone();
        r.add_scaled(C64::from(c), &r2);
        let v = |rho: &ComplexMatrix, op: &ObservableSpec| normalized_component(rho, op, 2).unwrap();
        prop_assert!((v(&r, &op1) - v(&r1, &op1) - c * v(&r2, &op1)).abs() < 1e-12);
        prop_assert!((v(&r1, &both) - v(&r1, &op1) - c * v(&r1, &op2)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn magnus_conserves_structure(sys in system(), two_term in any::<bool>(), rule in 0usize..4) {
        let rule = [
            QuadratureRule::InitialPoint,
            QuadratureRule::Midpoint,
            QuadratureRule::GaussLegendre3,
            QuadratureRule::adaptive(),
        ][rule];
        let method = if two_term { Method::Magnus2 } else { Method::Magnus1 };
        let grid = TimeGrid::new(8.0, 12.0, 4).unwrap();
        let traj = propagate(&sys, &grid, method, rule, ExpmBackend::Pade).unwrap();
        let rho0 = sys.rho0_matrix();
        for rho in &traj.states {
            prop_assert!((rho.trace() - rho0.trace()).norm() < 1e-10);
            prop_assert!(rho.hermitian_deviation() < 1e-10);
            prop_assert!((rho.norm_fro() - rho0.norm_fro()).abs() < 1e-10);
        }
    }

    #[test]
    fn euler_norms_are_monotone(sys in system(), k in 3u32..7) {
        let grid = TimeGrid::new(0.0, 4.0, k).unwrap();
        for (method, sign) in [(Method::Euler, 1.0), (Method::EulerImplicit, -1.0)] {
            let mut prev = f64::NAN;
            propagate_with(&sys, &grid, method, QuadratureRule::Midpoint, ExpmBackend::Pade, |n, _, x| {
                let norm = vec_norm(x);
                if n > 0 {
                    assert!(sign * (norm - prev) >= 0.0, "{method} step {n}: {prev} -> {norm}");
                }
                prev = norm;
                Ok(())
            }).unwrap();
        }
    }

    #[test]
    fn constant_hamiltonian_magnus1_is_exact(fx in -2.0..2.0f64, fy in -2.0..2.0f64, w in -2.0..2.0f64, rule in 0usize..4) {
        let rule = [
            QuadratureRule::InitialPoint,
            QuadratureRule::Midpoint,
            QuadratureRule::GaussLegendre3,
            QuadratureRule::adaptive(),
        ][rule];
        let sys = SpinSystem::new(
            vec![SpinCoefficients::constant(fx, fy, w)],
            None,
            KroneckerTermList::product(vec![Pauli::X]).unwrap(),
        ).unwrap();
        let grid = TimeGrid::new(0.0, 3.0, 3).unwrap();
        let traj = propagate(&sys, &grid, Method::Magnus1, rule, ExpmBackend::Pade).unwrap();
        let h = oracles::to_na(&sys.hamiltonian_at(0.0));
        let r0 = oracles::to_na(sys.rho0_matrix());
        for (t, rho) in traj.times().zip(&traj.states) {
            let u = oracles::expm_hermitian(&h, C64::new(0.0, -t));
            let exact = &u * &r0 * u.adjoint();
            prop_assert!(oracles::fro(&(oracles::to_na(rho) - exact)) < 1e-12);
        }
    }
}

#[test]
fn bloch_norm_is_conserved_over_full_interval() {
    let sys = SpinSystem::new(
        vec![SpinSpec::hocp(10.0, 2.0, 1.0).to_coefficients(1.0).unwrap()],
        None,
        KroneckerTermList::product(vec![Pauli::X]).unwrap(),
    )
    .unwrap();
    let grid = TimeGrid::new(0.0, 20.0, 6).unwrap();
    for method in [Method::Magnus1, Method::Magnus2] {
        let traj = propagate(&sys, &grid, method, QuadratureRule::GaussLegendre3, ExpmBackend::Pade).unwrap();
        for rho in &traj.states {
            let (x, y, z) = bloch_components(rho).unwrap();
            assert!((x * x + y * y + z * z - 1.0).abs() < 1e-9);
        }
    }
}
