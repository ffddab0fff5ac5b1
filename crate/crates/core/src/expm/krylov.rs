use crate::error::{Error, Result};
use crate::spinalg::{vec_dot, vec_norm, ComplexMatrix, C64};

use super::pade::{pade_expm_auto, DEFAULT_PADE_TOL};

/// Overlap with earlier basis vectors above which the new vector is
/// re-orthogonalized against the whole basis.
pub const REORTH_THRESHOLD: f64 = 1e-8;

/// Relative size of `beta_{j+1}` treated as an exact invariant subspace.
const BREAKDOWN_TOL: f64 = 1e-13;

/// Hermitian-tolerance for dense input to [`lanczos`], relative to `max |a_ij|`.
const HERMITIAN_REL_TOL: f64 = 1e-10;

/// Matrix-free Hermitian operator `y = A x`.
pub trait HermitianOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

impl HermitianOperator for ComplexMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let n = self.cols();
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.as_slice()[i * n..(i + 1) * n];
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

/// Real diagonal operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalOperator {
    pub diag: Vec<f64>,
}

impl HermitianOperator for DiagonalOperator {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for ((yi, &d), &xi) in y.iter_mut().zip(&self.diag).zip(x) {
            *yi = xi * d;
        }
    }
}

/// `A V = V T + beta_{m+1} v_{m+1} e_m^T` with orthonormal `V` (n x m) and
/// real symmetric tridiagonal `T`.
#[derive(Clone, Debug)]
pub struct LanczosFactorization {
    basis: Vec<Vec<C64>>,
    alpha: Vec<f64>,
    /// Off-diagonal of `T`: `beta[i]` couples rows `i` and `i + 1`.
    beta: Vec<f64>,
    beta0: f64,
    reorthogonalizations: usize,
}

impl LanczosFactorization {
    /// Effective iteration count (smaller than requested after breakdown).
    pub fn m(&self) -> usize {
        self.alpha.len()
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn basis_vectors(&self) -> &[Vec<C64>] {
        &self.basis
    }

    pub fn reorthogonalizations(&self) -> usize {
        self.reorthogonalizations
    }

    pub fn basis(&self) -> ComplexMatrix {
        let n = self.basis[0].len();
        ComplexMatrix::from_fn(n, self.m(), |i, j| self.basis[j][i])
    }

    pub fn tridiagonal(&self) -> ComplexMatrix {
        let m = self.m();
        ComplexMatrix::from_fn(m, m, |i, j| {
            if i == j {
                C64::from(self.alpha[i])
            } else if i + 1 == j {
                C64::from(self.beta[i])
            } else if j + 1 == i {
                C64::from(self.beta[j])
            } else {
                C64::from(0.0)
            }
        })
    }

    /// `max |V^H V - I|`.
    pub fn orthogonality_drift(&self) -> f64 {
        let m = self.m();
        let mut drift: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let target = if i == j { 1.0 } else { 0.0 };
                drift = drift.max((vec_dot(&self.basis[i], &self.basis[j]) - target).norm());
            }
        }
        drift
    }

    /// `beta0 V exp(z T) e_1`.
    pub fn expm_action(&self, z: C64) -> Result<Vec<C64>> {
        let zt = self.tridiagonal().scale(z);
        let e = pade_expm_auto(&zt, DEFAULT_PADE_TOL)?;
        let n = self.basis[0].len();
        let mut out = vec![C64::from(0.0); n];
        for (k, v) in self.basis.iter().enumerate() {
            let c = e[(k, 0)] * self.beta0;
            for (o, &vi) in out.iter_mut().zip(v) {
                *o += c * vi;
            }
        }
        Ok(out)
    }
}

/// Lanczos on a dense Hermitian matrix.
pub fn lanczos(a: &ComplexMatrix, b: &[C64], m: usize) -> Result<LanczosFactorization> {
    a.square_dim()?;
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_REL_TOL * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    lanczos_operator(a, b, m)
}

pub fn lanczos_operator<A: HermitianOperator + ?Sized>(a: &A, b: &[C64], m: usize) -> Result<LanczosFactorization> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::Dimension(format!(
            "vector of length {} for a {n}-dimensional operator",
            b.len()
        )));
    }
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "Krylov dimension m = {m} must lie in 1..={n}"
        )));
    }
    let beta0 = vec_norm(b);
    if beta0 == 0.0 || !beta0.is_finite() {
        return Err(Error::InvalidArgument(
            "starting vector must be nonzero and finite".into(),
        ));
    }

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);
    let mut reorthogonalizations = 0;
    basis.push(b.iter().map(|x| x / beta0).collect());
    let mut w = vec![C64::from(0.0); n];
    let mut scale: f64 = 0.0;

    for j in 0..m {
        a.apply(&basis[j], &mut w);
        let aj = vec_dot(&basis[j], &w).re;
        alpha.push(aj);
        for (wi, &vi) in w.iter_mut().zip(&basis[j]) {
            *wi -= vi * aj;
        }
        if j > 0 {
            let bj = beta[j - 1];
            for (wi, &vi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= vi * bj;
            }
        }
        if j + 1 == m {
            break;
        }
        let mut norm = vec_norm(&w);
        scale = scale.max(aj.abs()).max(norm);
        if norm > 0.0 {
            let drift = basis.iter().map(|v| vec_dot(v, &w).norm()).fold(0.0, f64::max) / norm;
            if drift > REORTH_THRESHOLD {
                reorthogonalizations += 1;
                for _ in 0..2 {
                    for v in &basis {
                        let c = vec_dot(v, &w);
                        for (wi, &vi) in w.iter_mut().zip(v) {
                            *wi -= c * vi;
                        }
                    }
                }
                norm = vec_norm(&w);
            }
        }
        if norm <= BREAKDOWN_TOL * scale {
            break;
        }
        beta.push(norm);
        basis.push(w.iter().map(|x| x / norm).collect());
    }

    Ok(LanczosFactorization {
        basis,
        alpha,
        beta,
        beta0,
        reorthogonalizations,
    })
}

/// `exp(t A) b ≈ ||b|| V_m exp(t T_m) e_1`.
pub fn krylov_expm_action(a: &ComplexMatrix, b: &[C64], m: usize, t: f64) -> Result<Vec<C64>> {
    lanczos(a, b, m)?.expm_action(C64::from(t))
}

/// Krylov action for a matrix-free operator and complex time `z`:
/// `exp(z A) b`.
pub fn krylov_expm_action_operator<A: HermitianOperator + ?Sized>(
    a: &A,
    b: &[C64],
    m: usize,
    z: C64,
) -> Result<Vec<C64>> {
    lanczos_operator(a, b, m)?.expm_action(z)
}

/// Error bound for the `m`-step Krylov approximation of `exp(tA) v` when the
/// spectrum of `A` lies in `[-4 rho, 0]`:
///
/// ```text
/// 10 exp(-m^2 / (5 rho t))                    sqrt(4 rho t) <= m <= 2 rho t
/// 10 / (rho t) exp(-rho t) (e rho t / m)^m    m >= 2 rho t
/// ```
///
/// At `m = 2 rho t` the first form is returned.
pub fn krylov_error_bound(rho: f64, t: f64, m: usize) -> Result<f64> {
    if !(rho > 0.0 && t > 0.0 && rho.is_finite() && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "rho and t must be positive, got {rho}, {t}"
        )));
    }
    let rt = rho * t;
    let min = (4.0 * rt).sqrt();
    let mf = m as f64;
    if mf < min {
        return Err(Error::KrylovRegime { m, min });
    }
    if mf <= 2.0 * rt {
        Ok(krylov_bound_small_m(rt, mf))
    } else {
        Ok(krylov_bound_large_m(rt, mf))
    }
}

pub(crate) fn krylov_bound_small_m(rt: f64, m: f64) -> f64 {
    10.0 * (-m * m / (5.0 * rt)).exp()
}

pub(crate) fn krylov_bound_large_m(rt: f64, m: f64) -> f64 {
    // In log space: (e rt / m)^m overflows long before the product does.
    let log = (10.0 / rt).ln() - rt + m * (std::f64::consts::E * rt / m).ln();
    log.exp()
}

/// Both branch formulas at a given `m`, regardless of regime.
pub fn krylov_error_bound_branches(rho: f64, t: f64, m: usize) -> (f64, f64) {
    let rt = rho * t;
    (krylov_bound_small_m(rt, m as f64), krylov_bound_large_m(rt, m as f64))
}
