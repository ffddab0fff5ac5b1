//! One-step methods for `x' = A(t) x` on the vectorized state.

use crate::error::{Error, Result};
use crate::spinalg::{ComplexMatrix, LuDecomposition, C64};

fn check_step(x: &[C64], h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {h}")));
    }
    if x.is_empty() {
        return Err(Error::Dimension("empty state vector".into()));
    }
    Ok(())
}

fn check_generator(a: &ComplexMatrix, x: &[C64]) -> Result<()> {
    if a.rows() != x.len() || a.cols() != x.len() {
        return Err(Error::Dimension(format!(
            "generator is {}x{}, state has length {}",
            a.rows(),
            a.cols(),
            x.len()
        )));
    }
    Ok(())
}

fn axpy(alpha: C64, x: &[C64], y: &[C64]) -> Vec<C64> {
    y.iter().zip(x).map(|(yi, xi)| yi + alpha * xi).collect()
}

/// `(I + h A(t)) x`.
pub fn step_euler_explicit(a_fn: &dyn Fn(f64) -> ComplexMatrix, x: &[C64], t: f64, h: f64) -> Result<Vec<C64>> {
    check_step(x, h)?;
    let a = a_fn(t);
    check_generator(&a, x)?;
    Ok(axpy(C64::from(h), &a.mul_vec(x), x))
}

/// Solves `(I - h A(t + h)) x_next = x`.
pub fn step_euler_implicit(a_fn: &dyn Fn(f64) -> ComplexMatrix, x: &[C64], t: f64, h: f64) -> Result<Vec<C64>> {
    check_step(x, h)?;
    let a = a_fn(t + h);
    check_generator(&a, x)?;
    let mut m = a.scale_real(-h);
    m.add_identity(C64::from(1.0));
    Ok(LuDecomposition::new(&m)?.solve_vec(x))
}

/// Time at which the trapezoidal generator is sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrapezoidalVariant {
    /// `A(t)`
    Initial,
    /// `A(t + h/2)`
    Midpoint,
}

/// `(I - h/2 A(tau))^{-1} (I + h/2 A(tau)) x`.
pub fn step_trapezoidal(
    a_fn: &dyn Fn(f64) -> ComplexMatrix,
    x: &[C64],
    t: f64,
    h: f64,
    variant: TrapezoidalVariant,
) -> Result<Vec<C64>> {
    check_step(x, h)?;
    let tau = match variant {
        TrapezoidalVariant::Initial => t,
        TrapezoidalVariant::Midpoint => t + 0.5 * h,
    };
    let a = a_fn(tau);
    check_generator(&a, x)?;
    let rhs = axpy(C64::from(0.5 * h), &a.mul_vec(x), x);
    let mut m = a.scale_real(-0.5 * h);
    m.add_identity(C64::from(1.0));
    Ok(LuDecomposition::new(&m)?.solve_vec(&rhs))
}

/// Classical fourth-order Runge-Kutta.
pub fn step_rk4(a_fn: &dyn Fn(f64) -> ComplexMatrix, x: &[C64], t: f64, h: f64) -> Result<Vec<C64>> {
    check_step(x, h)?;
    let a0 = a_fn(t);
    check_generator(&a0, x)?;
    let a_half = a_fn(t + 0.5 * h);
    let a1 = a_fn(t + h);
    let k1 = a0.mul_vec(x);
    let k2 = a_half.mul_vec(&axpy(C64::from(0.5 * h), &k1, x));
    let k3 = a_half.mul_vec(&axpy(C64::from(0.5 * h), &k2, x));
    let k4 = a1.mul_vec(&axpy(C64::from(h), &k3, x));
    let w = h / 6.0;
    Ok(x.iter()
        .enumerate()
        .map(|(i, xi)| xi + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * w)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(lambda: f64) -> impl Fn(f64) -> ComplexMatrix {
        move |_| ComplexMatrix::from_diagonal(&[C64::from(lambda)])
    }

    #[test]
    fn null_generator_is_identity() {
        let zero = |_: f64| ComplexMatrix::zeros(2, 2);
        let x = vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.25)];
        assert_eq!(step_euler_explicit(&zero, &x, 0.0, 0.1).unwrap(), x);
        assert_eq!(step_euler_implicit(&zero, &x, 0.0, 0.1).unwrap(), x);
        assert_eq!(
            step_trapezoidal(&zero, &x, 0.0, 0.1, TrapezoidalVariant::Initial).unwrap(),
            x
        );
        assert_eq!(step_rk4(&zero, &x, 0.0, 0.1).unwrap(), x);
    }

    #[test]
    fn scalar_steps() {
        let x = [C64::from(2.0)];
        let lam = -3.0;
        let h = 0.1;
        let e = step_euler_explicit(&scalar(lam), &x, 0.0, h).unwrap();
        assert!((e[0].re - 2.0 * (1.0 + h * lam)).abs() < 1e-15);
        let i = step_euler_implicit(&scalar(lam), &x, 0.0, h).unwrap();
        assert!((i[0].re - 2.0 / (1.0 - h * lam)).abs() < 1e-15);
        let r = step_rk4(&scalar(-1.0), &[C64::from(1.0)], 0.0, 0.1).unwrap();
        assert!((r[0].re - 0.904_837_5).abs() < 1e-7);
        let quartic = 1.0 - 0.1 + 0.01 / 2.0 - 0.001 / 6.0 + 0.0001 / 24.0;
        assert!((r[0].re - quartic).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_step() {
        let x = [C64::from(1.0)];
        assert!(step_rk4(&scalar(1.0), &x, 0.0, 0.0).is_err());
        assert!(step_euler_explicit(&scalar(1.0), &x, 0.0, -1.0).is_err());
        assert!(step_euler_explicit(&scalar(1.0), &[C64::from(1.0); 2], 0.0, 0.1).is_err());
        // 1 - h lambda = 0
        assert!(matches!(
            step_euler_implicit(&scalar(10.0), &x, 0.0, 0.1),
            Err(Error::Singular { .. })
        ));
    }
}
