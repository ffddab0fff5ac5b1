//! One- and two-term Magnus generators for `r' = -i L{H(t)} r` over a step
//! `[a, b]`, assembled from scalar integrals of the coefficient functions.
//!
//! With `Hbar = sum_j (If_j I_j^x + Ig_j I_j^y + Omega_j h I_j^z) + h H_J`:
//!
//! ```text
//! Omega_1 = -i L{Hbar}
//! Omega_2 = 1/2 L{ sum_j  D(g_j) (2i Omega_j I_j^x + [I_j^y, H_J])
//!                       - D(f_j) (2i Omega_j I_j^y + [H_J, I_j^x])
//!                       + 2i X(f_j, g_j) I_j^z }
//! ```
//!
//! `D` and `X` are the triangular double integrals of [`crate::quadrature`].
//! Both generators are skew-Hermitian for Hermitian `H_J`.

use crate::error::{Error, Result};
use crate::hamiltonian::SpinSystem;
use crate::quadrature::QuadratureRule;
use crate::spinalg::{liouvillian, ComplexMatrix, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Per-step Liouville-space generators.
#[derive(Clone, Debug)]
pub struct MagnusStepTerms {
    pub omega1: ComplexMatrix,
    pub omega2: Option<ComplexMatrix>,
}

impl MagnusStepTerms {
    /// `Omega_1 + Omega_2`, or `Omega_1` alone.
    pub fn generator(&self) -> ComplexMatrix {
        match &self.omega2 {
            Some(o2) => &self.omega1 + o2,
            None => self.omega1.clone(),
        }
    }
}

fn check_step(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(Error::InvalidInterval { a, b })
    }
}

/// `Hbar`, the Hilbert-space integral of `H` over `[a, b]`.
pub fn integrated_hamiltonian(system: &SpinSystem, a: f64, b: f64, rule: QuadratureRule) -> Result<ComplexMatrix> {
    check_step(a, b)?;
    let h = b - a;
    let weights = system
        .spins()
        .iter()
        .map(|s| {
            let (fi, gi) = s.integrals(a, b, rule)?;
            Ok((fi, gi, s.omega() * h))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(system.combine(&weights, h))
}

/// The Hilbert-space operator `K` with `Omega_2 = 1/2 L{K}`.
pub fn second_order_kernel(system: &SpinSystem, a: f64, b: f64, rule: QuadratureRule) -> Result<ComplexMatrix> {
    check_step(a, b)?;
    let d = system.dim();
    let mut k = ComplexMatrix::zeros(d, d);
    for (j, spin) in system.spins().iter().enumerate() {
        let (df, dg, x) = spin.double_integrals(a, b, rule)?;
        let omega = spin.omega();
        let ops = [
            system.spin_operator(j, crate::spinalg::Pauli::X)?,
            system.spin_operator(j, crate::spinalg::Pauli::Y)?,
            system.spin_operator(j, crate::spinalg::Pauli::Z)?,
        ];
        k.add_scaled(I * (2.0 * omega * dg), ops[0]);
        k.add_scaled(I * (-2.0 * omega * df), ops[1]);
        k.add_scaled(I * (2.0 * x), ops[2]);
        if let Some((y_hj, hj_x)) = system.coupling_commutators(j) {
            k.add_scaled(C64::from(dg), y_hj);
            k.add_scaled(C64::from(-df), hj_x);
        }
    }
    Ok(k)
}

pub fn magnus_omega1(system: &SpinSystem, a: f64, b: f64, rule: QuadratureRule) -> Result<ComplexMatrix> {
    let hbar = integrated_hamiltonian(system, a, b, rule)?;
    liouvillian(&hbar.scale(-I))
}

pub fn magnus_omega2(system: &SpinSystem, a: f64, b: f64, rule: QuadratureRule) -> Result<ComplexMatrix> {
    let k = second_order_kernel(system, a, b, rule)?;
    liouvillian(&k.scale_real(0.5))
}

pub fn magnus_terms(
    system: &SpinSystem,
    a: f64,
    b: f64,
    rule: QuadratureRule,
    two_term: bool,
) -> Result<MagnusStepTerms> {
    Ok(MagnusStepTerms {
        omega1: magnus_omega1(system, a, b, rule)?,
        omega2: if two_term {
            Some(magnus_omega2(system, a, b, rule)?)
        } else {
            None
        },
    })
}

/// `Omega_1 (+ Omega_2)` built from a single Liouvillian of the combined
/// Hilbert-space operator `-i Hbar (+ K/2)`.
pub fn magnus_generator(
    system: &SpinSystem,
    a: f64,
    b: f64,
    rule: QuadratureRule,
    two_term: bool,
) -> Result<ComplexMatrix> {
    let mut m = integrated_hamiltonian(system, a, b, rule)?.scale(-I);
    if two_term {
        m.add_scaled(C64::from(0.5), &second_order_kernel(system, a, b, rule)?);
    }
    liouvillian(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::SpinCoefficients;
    use crate::spinalg::{pauli, KroneckerTermList, Pauli};
    use std::sync::Arc;

    fn single(spin: SpinCoefficients) -> SpinSystem {
        SpinSystem::new(vec![spin], None, KroneckerTermList::product(vec![Pauli::X]).unwrap()).unwrap()
    }

    #[test]
    fn constant_hamiltonian_omega1() {
        let sys = single(SpinCoefficients::constant(0.4, -1.1, 0.7));
        let h = sys.hamiltonian_at(0.0);
        let expected = liouvillian(&h).unwrap().scale(C64::new(0.0, -0.3));
        for rule in ["initial", "midpoint", "gl3", "exact"] {
            let o1 = magnus_omega1(&sys, 1.0, 1.3, rule.parse().unwrap()).unwrap();
            assert!(o1.max_abs_diff(&expected) < 1e-15);
            let o2 = magnus_omega2(&sys, 1.0, 1.3, rule.parse().unwrap()).unwrap();
            assert!(o2.max_abs() < 1e-15, "{rule}");
        }
    }

    #[test]
    fn z_only() {
        let sys = single(SpinCoefficients::constant(0.0, 0.0, 1.0));
        let o1 = magnus_omega1(&sys, 0.0, 0.25, QuadratureRule::Midpoint).unwrap();
        let expected = liouvillian(&pauli(Pauli::Z)).unwrap().scale(C64::new(0.0, -0.25));
        assert!(o1.max_abs_diff(&expected) < 1e-16);
    }

    #[test]
    fn linear_drive_second_term() {
        // f(t) = t, g = 0, Omega = 1 on [0, 1]: D(f) = -1/6, D(g) = X = 0,
        // so K = -D(f) 2i sigma_y = (i/3) sigma_y.
        let sys = single(SpinCoefficients::new(Arc::new(|t| t), Arc::new(|_| 0.0), 1.0));
        let o2 = magnus_omega2(&sys, 0.0, 1.0, QuadratureRule::adaptive()).unwrap();
        let expected = liouvillian(&pauli(Pauli::Y).scale(C64::new(0.0, 1.0 / 6.0))).unwrap();
        assert!(o2.max_abs_diff(&expected) < 1e-12);
        assert!(o2.skew_hermitian_deviation() < 1e-15);
    }

    #[test]
    fn combined_generator_matches_sum() {
        let sys = single(
            crate::hamiltonian::SpinSpec::hocp(10.0, 2.0, 1.0)
                .to_coefficients(1.0)
                .unwrap(),
        );
        let rule = QuadratureRule::GaussLegendre3;
        let terms = magnus_terms(&sys, 9.0, 9.1, rule, true).unwrap();
        let direct = magnus_generator(&sys, 9.0, 9.1, rule, true).unwrap();
        assert!(terms.generator().max_abs_diff(&direct) < 1e-14);
        assert!(magnus_omega1(&sys, 1.0, 1.0, rule).is_err());
    }
}
