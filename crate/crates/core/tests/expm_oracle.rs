#[path = "common/oracles.rs"]
mod oracles;

use oracles::{expm_hermitian, fro, from_na, random_hermitian, to_na, M};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinmagnus::expm::{
    krylov_expm_action, krylov_expm_action_operator, lanczos, lanczos_operator, pade_expm_auto, taylor_expm,
    taylor_order_for, taylor_remainder_bound, DiagonalOperator, DEFAULT_PADE_TOL, MAX_TAYLOR_ORDER,
};
use spinmagnus::spinalg::{ComplexMatrix, C64};

const I: C64 = C64::new(0.0, 1.0);

/// `exp(z H)` column by column through full-dimension Krylov.
fn krylov_full(h: &ComplexMatrix, z: C64) -> M {
    let n = h.rows();
    let mut out = M::zeros(n, n);
    for j in 0..n {
        let mut e = vec![C64::from(0.0); n];
        e[j] = C64::from(1.0);
        let col = krylov_expm_action_operator(h, &e, n, z).unwrap();
        for (i, c) in col.into_iter().enumerate() {
            out[(i, j)] = c;
        }
    }
    out
}

#[test]
fn backends_match_eigendecomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..50 {
        let n = rng.gen_range(2..=16);
        let norm = rng.gen_range(0.05..4.0);
        let h = random_hermitian(&mut rng, n, norm);
        // Even cases exponentiate H itself, odd cases -iH.
        let z = if case % 2 == 0 { C64::from(1.0) } else { -I };
        let a = from_na(&(&h * z));
        let oracle = expm_hermitian(&h, z);

        let pade = to_na(&pade_expm_auto(&a, DEFAULT_PADE_TOL).unwrap());
        let k = taylor_order_for(a.norm_inf(), 1e-15).unwrap();
        let taylor = to_na(&taylor_expm(&a, k).unwrap());
        let krylov = krylov_full(&from_na(&h), z);
        for (name, m) in [("pade", &pade), ("taylor", &taylor), ("krylov", &krylov)] {
            let err = fro(&(m - &oracle));
            assert!(
                err < 1e-10,
                "case {case}: {name} off by {err:e} (n = {n}, norm = {norm})"
            );
        }
    }
}

#[test]
fn pade_is_unitary_on_skew_hermitian() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let n = rng.gen_range(2..=12);
        let norm = rng.gen_range(0.1..30.0);
        let h = random_hermitian(&mut rng, n, norm);
        let u = pade_expm_auto(&from_na(&(h * -I)), DEFAULT_PADE_TOL).unwrap();
        let mut d = u.adjoint().matmul(&u);
        d.add_identity(C64::from(-1.0));
        assert!(d.max_abs() < 1e-12, "{:e}", d.max_abs());
    }
}

#[test]
fn small_skew_hermitian_pade() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let h = random_hermitian(&mut rng, 4, 1.0);
    let u = to_na(&pade_expm_auto(&from_na(&(&h * I)), DEFAULT_PADE_TOL).unwrap());
    assert!(fro(&(u - expm_hermitian(&h, I))) < 1e-12);
}

#[test]
fn taylor_agrees_with_pade_at_bounded_remainder() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..30 {
        let n = rng.gen_range(2..=8);
        let g = M::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let a = from_na(&g);
        let a = a.scale_real(rng.gen_range(0.01..1.0) / a.norm_inf());
        let norm = a.norm_inf();
        let k = (1..=MAX_TAYLOR_ORDER)
            .find(|&k| taylor_remainder_bound(norm, k).is_ok_and(|b| b <= 1e-12 * norm))
            .unwrap();
        let t = taylor_expm(&a, k).unwrap();
        let p = pade_expm_auto(&a, DEFAULT_PADE_TOL).unwrap();
        assert!(t.max_abs_diff(&p) < 1e-10);
    }
}

#[test]
fn taylor_examples() {
    let d = ComplexMatrix::from_diagonal(&[C64::from(1.0), C64::from(-1.0)]);
    let e = taylor_expm(&d, 30).unwrap();
    assert!((e[(0, 0)].re - 1f64.exp()).abs() < 1e-14);
    assert!((e[(1, 1)].re - (-1f64).exp()).abs() < 1e-14);
    let theta = 0.7;
    let sx = ComplexMatrix::from_rows(&[[C64::from(0.0), C64::from(1.0)], [C64::from(1.0), C64::from(0.0)]]).unwrap();
    let e = taylor_expm(&sx.scale(I * theta), 40).unwrap();
    assert!((e[(0, 0)] - C64::from(theta.cos())).norm() < 1e-15);
    assert!((e[(0, 1)] - I * theta.sin()).norm() < 1e-15);
    assert_eq!(
        taylor_expm(&ComplexMatrix::zeros(3, 3), 5).unwrap(),
        ComplexMatrix::identity(3)
    );
}

#[test]
fn full_lanczos_recovers_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let h = random_hermitian(&mut rng, 8, 3.0);
    let b: Vec<C64> = (0..8)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let f = lanczos(&from_na(&h), &b, 8).unwrap();
    assert!(f.beta().iter().all(|&x| x > 0.0));
    let t = to_na(&f.tridiagonal());
    let mut ev_t: Vec<f64> = nalgebra::SymmetricEigen::new(t).eigenvalues.iter().copied().collect();
    let mut ev_h: Vec<f64> = nalgebra::SymmetricEigen::new(h.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev_t.sort_by(f64::total_cmp);
    ev_h.sort_by(f64::total_cmp);
    for (x, y) in ev_t.iter().zip(&ev_h) {
        assert!((x - y).abs() < 1e-8);
    }
    let y = krylov_expm_action(&from_na(&h), &b, 8, 0.6).unwrap();
    let exact = expm_hermitian(&h, C64::from(0.6)) * nalgebra::DVector::from_vec(b);
    let err: f64 = y
        .iter()
        .zip(exact.iter())
        .map(|(a, e)| (a - e).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(err < 1e-10);
}

#[test]
fn lanczos_orthogonality_on_wide_diagonal() {
    let diag: Vec<f64> = (0..1001).map(|i| -40.0 + 40.0 * i as f64 / 1000.0).collect();
    let op = DiagonalOperator { diag };
    let b = vec![C64::from(1.0 / 1001f64.sqrt()); 1001];
    for m in [10, 20, 30, 40, 50] {
        let f = lanczos_operator(&op, &b, m).unwrap();
        assert!(
            f.orthogonality_drift() < 1e-10,
            "m = {m}: {:e}",
            f.orthogonality_drift()
        );
    }
}
