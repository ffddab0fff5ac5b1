use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spinalg::{ComplexMatrix, LuDecomposition, C64};

pub const DEFAULT_PADE_TOL: f64 = 1e-15;
const MAX_Q: usize = 30;
const MAX_J: u32 = 1100;

/// Diagonal Pade degree `q` and squaring count `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadeParams {
    pub q: usize,
    pub j: u32,
}

impl PadeParams {
    pub fn new(q: usize, j: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("Pade degree q must be at least 1".into()));
        }
        Ok(Self { q, j })
    }
}

/// `(q!)^2 / ((2q)! (2q+1)!)`.
fn pade_error_constant(q: usize) -> f64 {
    let mut c = 1.0;
    for k in 1..=q {
        // (q!)^2 / (2q)! = prod k / (q + k)
        c *= k as f64 / (q + k) as f64;
    }
    for k in 1..=2 * q + 1 {
        c /= k as f64;
    }
    c
}

/// Minimal `q + j` pair whose error bound for the scaled matrix,
/// `8 x^{2q+1} (q!)^2 / ((2q)! (2q+1)!)` with `x = norm / 2^j`, is at most
/// `eps`, subject to `norm <= 2^{j-1}`. Ties go to the smaller `j`.
pub fn pade_select_params(norm: f64, eps: f64) -> Result<PadeParams> {
    if !(norm.is_finite() && norm >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "norm must be finite and non-negative, got {norm}"
        )));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {eps}")));
    }
    if norm == 0.0 {
        return Ok(PadeParams { q: 1, j: 0 });
    }
    let mut j_min = 0u32;
    while norm > 2f64.powi(j_min as i32 - 1) {
        j_min += 1;
        if j_min > MAX_J {
            return Err(Error::InvalidArgument(format!("norm {norm} too large to scale")));
        }
    }
    let q_for = |j: u32| -> Option<usize> {
        let x = norm / 2f64.powi(j as i32);
        (1..=MAX_Q).find(|&q| 8.0 * x.powi(2 * q as i32 + 1) * pade_error_constant(q) <= eps)
    };
    let mut best: Option<PadeParams> = None;
    // q only decreases with j, so once j alone exceeds the best total we stop.
    for j in j_min..=MAX_J {
        if let Some(b) = best {
            if j as usize >= b.q + b.j as usize {
                break;
            }
        }
        if let Some(q) = q_for(j) {
            if best.is_none_or(|b| q + (j as usize) < b.q + b.j as usize) {
                best = Some(PadeParams { q, j });
            }
        }
    }
    best.ok_or_else(|| Error::InvalidArgument(format!("no Pade parameters reach tolerance {eps:e}")))
}

/// `c_k = (2q - k)! q! / ((2q)! k! (q - k)!)` for `k = 0..=q`.
pub fn pade_coefficients(q: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(q + 1);
    let mut ck = 1.0;
    c.push(ck);
    for k in 1..=q {
        ck *= (q + 1 - k) as f64 / ((2 * q + 1 - k) * k) as f64;
        c.push(ck);
    }
    c
}

/// `[D_qq(B)]^{-1} N_qq(B)` squared `j` times, with `B = A / 2^j`.
pub fn pade_expm(a: &ComplexMatrix, params: PadeParams) -> Result<ComplexMatrix> {
    let mut r = pade_expm_minus_identity(a, params)?;
    r.add_identity(C64::from(1.0));
    Ok(r)
}

/// `E` with `I + E` the Pade approximant of [`pade_expm`], formed without
/// rounding near the identity: `E = D^{-1} (N - D)` and each squaring maps
/// `E` to `2E + E^2`.
pub fn pade_expm_minus_identity(a: &ComplexMatrix, params: PadeParams) -> Result<ComplexMatrix> {
    let n = a.square_dim()?;
    if params.q == 0 {
        return Err(Error::InvalidArgument("Pade degree q must be at least 1".into()));
    }
    let b = a.scale_real(0.5f64.powi(params.j as i32));
    let coeffs = pade_coefficients(params.q);

    let mut den = ComplexMatrix::identity(n);
    // N - D keeps only the odd powers, doubled.
    let mut diff = ComplexMatrix::zeros(n, n);
    let mut power = ComplexMatrix::identity(n);
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        power = power.matmul(&b);
        if k % 2 == 0 {
            den.add_scaled(C64::from(c), &power);
        } else {
            den.add_scaled(C64::from(-c), &power);
            diff.add_scaled(C64::from(2.0 * c), &power);
        }
    }
    let lu = LuDecomposition::new(&den).map_err(|e| match e {
        Error::Singular { .. } => Error::ScalingInsufficient,
        other => other,
    })?;
    let mut e = lu.solve_mat(&diff);
    for _ in 0..params.j {
        let mut next = e.matmul(&e);
        next.add_scaled(C64::from(2.0), &e);
        e = next;
    }
    Ok(e)
}

/// [`pade_expm`] with parameters from the infinity norm and `eps`.
pub fn pade_expm_auto(a: &ComplexMatrix, eps: f64) -> Result<ComplexMatrix> {
    let params = pade_select_params(a.norm_inf(), eps)?;
    pade_expm(a, params)
}

/// [`pade_expm_minus_identity`] with automatically selected parameters.
pub fn pade_expm_minus_identity_auto(a: &ComplexMatrix, eps: f64) -> Result<ComplexMatrix> {
    let params = pade_select_params(a.norm_inf(), eps)?;
    pade_expm_minus_identity(a, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: [[(usize, u32); 5]; 6] = [
        [(1, 0), (1, 0), (2, 0), (3, 0), (3, 0)],
        [(1, 0), (2, 0), (3, 0), (4, 0), (4, 0)],
        [(2, 1), (3, 1), (4, 1), (5, 1), (6, 1)],
        [(2, 5), (3, 5), (4, 5), (5, 5), (6, 5)],
        [(2, 8), (3, 8), (4, 8), (5, 8), (6, 8)],
        [(2, 11), (3, 11), (4, 11), (5, 11), (6, 11)],
    ];

    #[test]
    fn reproduces_parameter_table() {
        for (r, row) in TABLE.iter().enumerate() {
            let norm = 10f64.powi(r as i32 - 2);
            for (c, &(q, j)) in row.iter().enumerate() {
                let eps = 10f64.powi(-3 * (c as i32 + 1));
                assert_eq!(
                    pade_select_params(norm, eps).unwrap(),
                    PadeParams { q, j },
                    "norm {norm:e}, eps {eps:e}"
                );
            }
        }
    }

    #[test]
    fn increment_keeps_small_generators() {
        // I + E would round the 1e-9 entries to 1e-9 +- 1e-16; E keeps them to full precision.
        let a = ComplexMatrix::from_rows(&[
            [C64::new(0.0, 1e-9), C64::from(3e-9)],
            [C64::from(-3e-9), C64::new(0.0, -2e-9)],
        ])
        .unwrap();
        let e = pade_expm_minus_identity_auto(&a, DEFAULT_PADE_TOL).unwrap();
        let mut second = a.matmul(&a).scale_real(0.5);
        second.add_scaled(C64::from(1.0), &a);
        assert!(e.max_abs_diff(&second) < 1e-24, "{:e}", e.max_abs_diff(&second));
        let mut full = pade_expm_auto(&a.scale_real(1e8), DEFAULT_PADE_TOL).unwrap();
        full.add_identity(C64::from(-1.0));
        let inc = pade_expm_minus_identity_auto(&a.scale_real(1e8), DEFAULT_PADE_TOL).unwrap();
        assert!(full.max_abs_diff(&inc) < 1e-15);
    }

    #[test]
    fn coefficients_q2() {
        // N_22(x) = 1 + x/2 + x^2/12
        let c = pade_coefficients(2);
        assert_eq!(c.len(), 3);
        assert!((c[1] - 0.5).abs() < 1e-16 && (c[2] - 1.0 / 12.0).abs() < 1e-16);
    }

    #[test]
    fn zero_and_scalar() {
        let z = pade_expm(&ComplexMatrix::zeros(2, 2), PadeParams { q: 3, j: 2 }).unwrap();
        assert!(z.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-16);
        let a = ComplexMatrix::from_diagonal(&[C64::from(3.0), C64::new(0.0, -2.0)]);
        let e = pade_expm_auto(&a, 1e-15).unwrap();
        assert!((e[(0, 0)] - C64::from(3f64.exp())).norm() < 1e-13);
        assert!((e[(1, 1)] - C64::new(2f64.cos(), -2f64.sin())).norm() < 1e-15);
    }

    #[test]
    fn singular_denominator() {
        // D_11(x) = 1 - x/2 vanishes at x = 2.
        let a = ComplexMatrix::from_diagonal(&[C64::from(2.0)]);
        assert!(matches!(
            pade_expm(&a, PadeParams { q: 1, j: 0 }),
            Err(Error::ScalingInsufficient)
        ));
        assert!(pade_expm(&a, PadeParams { q: 1, j: 3 }).is_ok());
    }
}
