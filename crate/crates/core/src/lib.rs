//! Magnus-expansion propagators for spin systems evolving under the
//! Liouville-von Neumann equation `rho' = -i [H(t), rho]`.
//!
//! The state is the column-major vectorization `r = vec(rho)`, which evolves
//! as `r' = -i L{H(t)} r` with `L{H} = I (x) H - H^T (x) I`.
//!
//! - [`spinalg`]: dense complex matrices, Pauli algebra, the Liouvillian.
//! - [`hamiltonian`]: per-spin coefficient functions and chirped pulses.
//! - [`quadrature`]: single and triangular double integrals.
//! - [`expm`]: Taylor, Pade and Krylov matrix exponentials.
//! - [`solvers`]: baseline integrators and one-/two-term Magnus steppers.
//! - [`observables`]: expectation values and Bloch components.

pub mod error;
pub mod expm;
pub mod hamiltonian;
pub mod observables;
pub mod quadrature;
pub mod solvers;
pub mod spinalg;

pub use error::{Error, Result};
