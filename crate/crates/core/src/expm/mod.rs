//! Matrix exponentials: truncated Taylor, diagonal Pade with scaling and
//! squaring, and Lanczos-based Krylov approximations of `exp(tA) b`.

pub mod krylov;
pub mod pade;
pub mod taylor;

use std::fmt;
use std::str::FromStr;

pub use krylov::{
    krylov_error_bound, krylov_error_bound_branches, krylov_expm_action, krylov_expm_action_operator, lanczos,
    lanczos_operator, DiagonalOperator, HermitianOperator, LanczosFactorization,
};
pub use pade::{
    pade_coefficients, pade_expm, pade_expm_auto, pade_expm_minus_identity, pade_expm_minus_identity_auto,
    pade_select_params, PadeParams, DEFAULT_PADE_TOL,
};
pub use taylor::{
    taylor_expm, taylor_expm_auto, taylor_expm_minus_identity, taylor_expm_minus_identity_auto, taylor_order_for,
    taylor_remainder_bound, MAX_TAYLOR_ORDER,
};

use crate::error::{Error, Result};
use crate::spinalg::{ComplexMatrix, C64};

pub const DEFAULT_TAYLOR_TOL: f64 = 1e-15;
pub const DEFAULT_KRYLOV_M: usize = 30;

/// How `exp(Omega) x` is evaluated for a skew-Hermitian generator `Omega`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExpmBackend {
    #[default]
    Pade,
    Taylor,
    /// Lanczos on the Hermitian matrix `i Omega`, capped at the state dimension.
    Krylov {
        m: usize,
    },
}

impl ExpmBackend {
    pub fn name(&self) -> &'static str {
        match self {
            ExpmBackend::Pade => "pade",
            ExpmBackend::Taylor => "taylor",
            ExpmBackend::Krylov { .. } => "krylov",
        }
    }

    /// Parses a backend name with an optional Krylov dimension.
    pub fn from_name(name: &str, krylov_m: Option<usize>) -> Result<Self> {
        let backend: ExpmBackend = name.parse()?;
        match (backend, krylov_m) {
            (ExpmBackend::Krylov { .. }, Some(0)) => Err(Error::InvalidArgument("krylov_m must be positive".into())),
            (ExpmBackend::Krylov { .. }, Some(m)) => Ok(ExpmBackend::Krylov { m }),
            (_, Some(_)) => Err(Error::InvalidArgument(format!("krylov_m given for backend {name:?}"))),
            (b, None) => Ok(b),
        }
    }

    /// Dense `exp(Omega)`. Krylov falls back to Pade since it only provides
    /// matrix-vector actions.
    pub fn expm(&self, omega: &ComplexMatrix) -> Result<ComplexMatrix> {
        match self {
            ExpmBackend::Pade | ExpmBackend::Krylov { .. } => pade_expm_auto(omega, DEFAULT_PADE_TOL),
            ExpmBackend::Taylor => taylor_expm_auto(omega, DEFAULT_TAYLOR_TOL),
        }
    }

    /// `exp(Omega) - I`, formed without rounding near the identity.
    pub fn expm_minus_identity(&self, omega: &ComplexMatrix) -> Result<ComplexMatrix> {
        match self {
            ExpmBackend::Pade | ExpmBackend::Krylov { .. } => pade_expm_minus_identity_auto(omega, DEFAULT_PADE_TOL),
            ExpmBackend::Taylor => taylor_expm_minus_identity_auto(omega, DEFAULT_TAYLOR_TOL),
        }
    }

    /// `exp(Omega) x` for skew-Hermitian `Omega`. Dense backends apply
    /// `x + (exp(Omega) - I) x`: with a slowly varying generator the rounding
    /// of `I + E` repeats from step to step and accumulates as norm drift.
    pub fn apply(&self, omega: &ComplexMatrix, x: &[C64]) -> Result<Vec<C64>> {
        match *self {
            ExpmBackend::Krylov { m } => {
                if x.iter().all(|v| *v == C64::from(0.0)) {
                    return Ok(x.to_vec());
                }
                // exp(Omega) = exp(-i M) with M = i Omega Hermitian.
                let hermitian = omega.scale(C64::new(0.0, 1.0));
                let m = m.min(x.len());
                krylov_expm_action_operator(&hermitian, x, m, C64::new(0.0, -1.0))
            }
            _ => {
                let dx = self.expm_minus_identity(omega)?.mul_vec(x);
                Ok(x.iter().zip(dx).map(|(a, d)| a + d).collect())
            }
        }
    }
}

impl FromStr for ExpmBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pade" => Ok(ExpmBackend::Pade),
            "taylor" => Ok(ExpmBackend::Taylor),
            "krylov" => Ok(ExpmBackend::Krylov { m: DEFAULT_KRYLOV_M }),
            _ => Err(Error::InvalidArgument(format!(
                "unknown expm backend {s:?} (expected pade, taylor or krylov)"
            ))),
        }
    }
}

impl fmt::Display for ExpmBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpmBackend::Krylov { m } => write!(f, "krylov(m={m})"),
            other => f.write_str(other.name()),
        }
    }
}
