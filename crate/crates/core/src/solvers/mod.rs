//! Time stepping for `r' = -i L{H(t)} r` on a dyadic grid.

pub mod baseline;
pub mod grid;
pub mod magnus;

use std::fmt;
use std::str::FromStr;

pub use baseline::{step_euler_explicit, step_euler_implicit, step_rk4, step_trapezoidal, TrapezoidalVariant};
pub use grid::TimeGrid;
pub use magnus::{
    integrated_hamiltonian, magnus_generator, magnus_omega1, magnus_omega2, magnus_terms, second_order_kernel,
    MagnusStepTerms,
};

use crate::error::{Error, Result};
use crate::expm::ExpmBackend;
use crate::hamiltonian::SpinSystem;
use crate::quadrature::QuadratureRule;
use crate::spinalg::{devectorize, liouvillian, vectorize, ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Euler,
    EulerImplicit,
    Trapezoidal,
    TrapezoidalMid,
    Rk4,
    Magnus1,
    Magnus2,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Euler,
        Method::EulerImplicit,
        Method::Trapezoidal,
        Method::TrapezoidalMid,
        Method::Rk4,
        Method::Magnus1,
        Method::Magnus2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Euler => "euler",
            Method::EulerImplicit => "euler_implicit",
            Method::Trapezoidal => "trapezoidal",
            Method::TrapezoidalMid => "trapezoidal_mid",
            Method::Rk4 => "rk4",
            Method::Magnus1 => "magnus1",
            Method::Magnus2 => "magnus2",
        }
    }

    pub fn is_magnus(&self) -> bool {
        matches!(self, Method::Magnus1 | Method::Magnus2)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `A(t) = -i L{H(t)}`.
pub fn generator_at(system: &SpinSystem, t: f64) -> ComplexMatrix {
    let h = system.hamiltonian_at(t).scale(C64::new(0.0, -1.0));
    liouvillian(&h).expect("Hamiltonian is square")
}

/// Advances the vectorized state by one step `[t, t + h]`.
pub fn step(
    system: &SpinSystem,
    method: Method,
    rule: QuadratureRule,
    backend: ExpmBackend,
    x: &[C64],
    t: f64,
    h: f64,
) -> Result<Vec<C64>> {
    let a_fn = |s: f64| generator_at(system, s);
    match method {
        Method::Euler => step_euler_explicit(&a_fn, x, t, h),
        Method::EulerImplicit => step_euler_implicit(&a_fn, x, t, h),
        Method::Trapezoidal => step_trapezoidal(&a_fn, x, t, h, TrapezoidalVariant::Initial),
        Method::TrapezoidalMid => step_trapezoidal(&a_fn, x, t, h, TrapezoidalVariant::Midpoint),
        Method::Rk4 => step_rk4(&a_fn, x, t, h),
        Method::Magnus1 | Method::Magnus2 => {
            let omega = magnus_generator(system, t, t + h, rule, method == Method::Magnus2)?;
            omega.check_finite()?;
            backend.apply(&omega, x)
        }
    }
}

/// Runs `method` over `grid`, calling `visit(n, t_n, r_n)` at every grid
/// point including the initial one. States are not stored.
pub fn propagate_with(
    system: &SpinSystem,
    grid: &TimeGrid,
    method: Method,
    rule: QuadratureRule,
    backend: ExpmBackend,
    mut visit: impl FnMut(usize, f64, &[C64]) -> Result<()>,
) -> Result<()> {
    let mut x = vectorize(system.rho0_matrix())?;
    visit(0, grid.t0(), &x)?;
    let h = grid.h();
    for n in 0..grid.n_steps() {
        let t = grid.time(n);
        x = step(system, method, rule, backend, &x, t, h).map_err(|e| Error::StepFailed {
            step: n,
            t,
            source: Box::new(e),
        })?;
        visit(n + 1, grid.time(n + 1), &x)?;
    }
    Ok(())
}

/// Density matrices at every grid point.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub states: Vec<ComplexMatrix>,
}

impl Trajectory {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.grid.times()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

pub fn propagate(
    system: &SpinSystem,
    grid: &TimeGrid,
    method: Method,
    rule: QuadratureRule,
    backend: ExpmBackend,
) -> Result<Trajectory> {
    let d = system.dim();
    let mut states = Vec::with_capacity(grid.len());
    propagate_with(system, grid, method, rule, backend, |_, _, x| {
        states.push(devectorize(x, d)?);
        Ok(())
    })?;
    Ok(Trajectory { grid: *grid, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::SpinCoefficients;
    use crate::spinalg::{KroneckerTermList, Pauli};

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("leapfrog".parse::<Method>().is_err());
    }

    #[test]
    fn zero_hamiltonian_is_stationary() {
        let sys = SpinSystem::new(
            vec![SpinCoefficients::constant(0.0, 0.0, 0.0)],
            None,
            KroneckerTermList::product(vec![Pauli::X]).unwrap(),
        )
        .unwrap();
        let grid = TimeGrid::new(0.0, 2.0, 2).unwrap();
        for method in Method::ALL {
            let traj = propagate(&sys, &grid, method, QuadratureRule::Midpoint, ExpmBackend::Pade).unwrap();
            assert_eq!(traj.len(), 9);
            for s in &traj.states {
                assert!(s.max_abs_diff(sys.rho0_matrix()) < 1e-15, "{method}");
            }
        }
    }

    #[test]
    fn step_failure_carries_index() {
        // The first midpoint past t = 0.5 belongs to step 2.
        let sys = SpinSystem::new(
            vec![SpinCoefficients::new(
                std::sync::Arc::new(|t| if t > 0.5 { f64::NAN } else { 0.0 }),
                std::sync::Arc::new(|_| 0.0),
                0.0,
            )],
            None,
            KroneckerTermList::product(vec![Pauli::X]).unwrap(),
        )
        .unwrap();
        let grid = TimeGrid::new(0.0, 1.0, 2).unwrap();
        let err = propagate(
            &sys,
            &grid,
            Method::Magnus1,
            QuadratureRule::Midpoint,
            ExpmBackend::Pade,
        )
        .unwrap_err();
        assert!(matches!(err, Error::StepFailed { step: 2, .. }), "{err}");
    }
}
