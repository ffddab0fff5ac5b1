use crate::error::{Error, Result};
use crate::spinalg::{ComplexMatrix, C64};

pub const MAX_TAYLOR_ORDER: usize = 200;

/// `sum_{j=0}^{K} A^j / j!` by Horner's scheme.
pub fn taylor_expm(a: &ComplexMatrix, order: usize) -> Result<ComplexMatrix> {
    let mut e = taylor_expm_minus_identity(a, order)?;
    e.add_identity(C64::from(1.0));
    Ok(e)
}

/// `sum_{j=1}^{K} A^j / j!`, the Taylor polynomial without its constant term.
pub fn taylor_expm_minus_identity(a: &ComplexMatrix, order: usize) -> Result<ComplexMatrix> {
    let n = a.square_dim()?;
    if order == 0 {
        return Ok(ComplexMatrix::zeros(n, n));
    }
    // Horner: A (I + A/2 (I + A/3 (...))).
    let mut acc = ComplexMatrix::identity(n);
    for j in (2..=order).rev() {
        acc = a.matmul(&acc).scale(C64::from(1.0 / j as f64));
        acc.add_identity(C64::from(1.0));
    }
    Ok(a.matmul(&acc))
}

/// Bound on the truncation error after `K` terms for `||tA|| = norm_ta`:
/// `(x^K / K!) (x / (K + 1)) / (1 - x / (K + 2))`.
pub fn taylor_remainder_bound(norm_ta: f64, order: usize) -> Result<f64> {
    if !(norm_ta >= 0.0 && norm_ta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "norm must be finite and non-negative, got {norm_ta}"
        )));
    }
    let epsilon = norm_ta / (order + 2) as f64;
    if epsilon >= 1.0 {
        return Err(Error::InvalidTaylorOrder {
            norm: norm_ta,
            order,
            epsilon,
        });
    }
    let mut leading = 1.0;
    for j in 1..=order {
        leading *= norm_ta / j as f64;
    }
    Ok(leading * (norm_ta / (order + 1) as f64) / (1.0 - epsilon))
}

/// Smallest `K <= 200` whose remainder bound is at most `tol`.
pub fn taylor_order_for(norm_ta: f64, tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    for order in 0..=MAX_TAYLOR_ORDER {
        match taylor_remainder_bound(norm_ta, order) {
            Ok(bound) if bound <= tol => return Ok(order),
            Ok(_) | Err(Error::InvalidTaylorOrder { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::InvalidArgument(format!(
        "no Taylor order up to {MAX_TAYLOR_ORDER} reaches tolerance {tol:e} for norm {norm_ta}"
    )))
}

/// [`taylor_expm`] with the order chosen from the infinity norm.
pub fn taylor_expm_auto(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let order = taylor_order_for(a.norm_inf(), tol)?;
    taylor_expm(a, order)
}

/// [`taylor_expm_minus_identity`] at the order [`taylor_order_for`] picks.
pub fn taylor_expm_minus_identity_auto(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let order = taylor_order_for(a.norm_inf(), tol)?;
    taylor_expm_minus_identity(a, order)
}
