//! Spin Hamiltonians of the form
//!
//! ```text
//! H(t) = sum_j ( f_j(t) I_j^x + g_j(t) I_j^y + Omega_j I_j^z ) + H_J
//! ```
//!
//! where `I_j^a` is the Pauli matrix `sigma_a` embedded at site `j` and `H_J`
//! is a constant coupling.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureRule};
use crate::spinalg::{commutator, embed_single, pauli, ComplexMatrix, KroneckerTermList, Pauli};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Hermiticity tolerance for assembled `rho0` and `H_J`.
pub const HERMITIAN_TOL: f64 = 1e-12;

const PRIMITIVE_CHECK_POINTS: usize = 10;
const PRIMITIVE_CHECK_SEED: u64 = 0x5eed_0ff1;
const PRIMITIVE_REL_TOL: f64 = 1e-6;

/// `(f, g, Omega)` for one spin, optionally with antiderivatives `F, G`.
#[derive(Clone)]
pub struct SpinCoefficients {
    f: ScalarFn,
    g: ScalarFn,
    omega: f64,
    primitives: Option<(ScalarFn, ScalarFn)>,
}

impl fmt::Debug for SpinCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpinCoefficients")
            .field("omega", &self.omega)
            .field("has_primitives", &self.primitives.is_some())
            .finish_non_exhaustive()
    }
}

impl SpinCoefficients {
    pub fn new(f: ScalarFn, g: ScalarFn, omega: f64) -> Self {
        Self {
            f,
            g,
            omega,
            primitives: None,
        }
    }

    pub fn constant(fx: f64, fy: f64, omega: f64) -> Self {
        Self::new(Arc::new(move |_| fx), Arc::new(move |_| fy), omega)
            .with_primitives_unchecked(Arc::new(move |t| fx * t), Arc::new(move |t| fy * t))
    }

    pub fn hocp(params: ChirpedPulseParams, omega: f64) -> Self {
        let (f, g) = hocp_coefficients(params);
        Self::new(f, g, omega)
    }

    /// Attaches analytic antiderivatives after checking `F' = f`, `G' = g` by
    /// central differences at ten seeded points of `[t0, tf]`.
    pub fn with_primitives(self, big_f: ScalarFn, big_g: ScalarFn, t0: f64, tf: f64) -> Result<Self> {
        if !(t0.is_finite() && tf.is_finite() && t0 < tf) {
            return Err(Error::InvalidInterval { a: t0, b: tf });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(PRIMITIVE_CHECK_SEED);
        for _ in 0..PRIMITIVE_CHECK_POINTS {
            let t = rng.gen_range(t0..tf);
            check_primitive(&*big_f, &*self.f, t)?;
            check_primitive(&*big_g, &*self.g, t)?;
        }
        Ok(self.with_primitives_unchecked(big_f, big_g))
    }

    fn with_primitives_unchecked(mut self, big_f: ScalarFn, big_g: ScalarFn) -> Self {
        self.primitives = Some((big_f, big_g));
        self
    }

    pub fn f(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn g(&self, t: f64) -> f64 {
        (self.g)(t)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn has_primitives(&self) -> bool {
        self.primitives.is_some()
    }

    /// `(∫_a^b f, ∫_a^b g)`; analytic primitives are used under the adaptive rule.
    pub fn integrals(&self, a: f64, b: f64, rule: QuadratureRule) -> Result<(f64, f64)> {
        coefficient_integrals(self, a, b, rule)
    }

    /// `(D(f), D(g), X(f, g))` over `[a, b]`.
    pub fn double_integrals(&self, a: f64, b: f64, rule: QuadratureRule) -> Result<(f64, f64, f64)> {
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(Error::InvalidInterval { a, b });
        }
        let f = |t: f64| (self.f)(t);
        let g = |t: f64| (self.g)(t);
        match (&self.primitives, rule.is_adaptive()) {
            (Some((big_f, big_g)), true) => {
                let (fa, ga) = (big_f(a), big_g(a));
                let f_inner = |s: f64| Ok(big_f(s) - fa);
                let g_inner = |s: f64| Ok(big_g(s) - ga);
                Ok((
                    quadrature::double_antisym_with(&f, &f_inner, a, b, rule)?,
                    quadrature::double_antisym_with(&g, &g_inner, a, b, rule)?,
                    quadrature::double_cross_with(&f, &g, &f_inner, &g_inner, a, b, rule)?,
                ))
            }
            _ => Ok((
                quadrature::double_antisym(f, a, b, rule)?,
                quadrature::double_antisym(g, a, b, rule)?,
                quadrature::double_cross(f, g, a, b, rule)?,
            )),
        }
    }
}

fn check_primitive(
    big: &(dyn Fn(f64) -> f64 + Send + Sync),
    small: &(dyn Fn(f64) -> f64 + Send + Sync),
    t: f64,
) -> Result<()> {
    let h = 1e-5 * t.abs().max(1.0);
    let derivative = (big(t + h) - big(t - h)) / (2.0 * h);
    let value = small(t);
    if (derivative - value).abs() > PRIMITIVE_REL_TOL * value.abs().max(1.0) {
        return Err(Error::PrimitiveMismatch { t, derivative, value });
    }
    Ok(())
}

/// Chirped pulse `e(t) w(t)` with envelope
/// `e(t) = beta exp(-(t - centre)^8 / envelope_scale)` and phase
/// `w(t) = exp(i gamma (t - centre)^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChirpedPulseParams {
    pub beta: f64,
    pub gamma: f64,
    #[serde(default = "default_centre")]
    pub centre: f64,
    #[serde(default = "default_envelope_scale")]
    pub envelope_scale: f64,
}

pub const DEFAULT_PULSE_CENTRE: f64 = 10.0;
pub const DEFAULT_ENVELOPE_SCALE: f64 = 1e7;

fn default_centre() -> f64 {
    DEFAULT_PULSE_CENTRE
}

fn default_envelope_scale() -> f64 {
    DEFAULT_ENVELOPE_SCALE
}

impl ChirpedPulseParams {
    pub fn new(beta: f64, gamma: f64) -> Self {
        Self {
            beta,
            gamma,
            centre: DEFAULT_PULSE_CENTRE,
            envelope_scale: DEFAULT_ENVELOPE_SCALE,
        }
    }

    pub fn envelope(&self, t: f64) -> f64 {
        self.beta * (-(t - self.centre).powi(8) / self.envelope_scale).exp()
    }

    pub fn phase(&self, t: f64) -> f64 {
        self.gamma * (t - self.centre).powi(2)
    }
}

/// `(f, g) = (e Re w, e Im w)` for a chirped pulse.
pub fn hocp_coefficients(params: ChirpedPulseParams) -> (ScalarFn, ScalarFn) {
    let f = move |t: f64| params.envelope(t) * params.phase(t).cos();
    let g = move |t: f64| params.envelope(t) * params.phase(t).sin();
    (Arc::new(f), Arc::new(g))
}

/// `(∫_a^b f, ∫_a^b g)` under `rule`; exact differences of the primitives when
/// they are available and the rule is adaptive.
pub fn coefficient_integrals(spin: &SpinCoefficients, a: f64, b: f64, rule: QuadratureRule) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::InvalidInterval { a, b });
    }
    if let (Some((big_f, big_g)), true) = (&spin.primitives, rule.is_adaptive()) {
        return Ok((big_f(b) - big_f(a), big_g(b) - big_g(a)));
    }
    Ok((
        quadrature::integrate(&*spin.f, a, b, rule)?,
        quadrature::integrate(&*spin.g, a, b, rule)?,
    ))
}

/// JSON description of one spin. `field_scale` multiplies `beta`/`fx`/`fy`
/// and `omega`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SpinSpec {
    Hocp {
        beta: f64,
        gamma: f64,
        omega: f64,
        #[serde(default = "default_centre")]
        centre: f64,
        #[serde(default = "default_envelope_scale")]
        envelope_scale: f64,
    },
    Constant {
        fx: f64,
        fy: f64,
        omega: f64,
    },
}

impl SpinSpec {
    pub fn hocp(beta: f64, gamma: f64, omega: f64) -> Self {
        SpinSpec::Hocp {
            beta,
            gamma,
            omega,
            centre: DEFAULT_PULSE_CENTRE,
            envelope_scale: DEFAULT_ENVELOPE_SCALE,
        }
    }

    pub fn to_coefficients(&self, field_scale: f64) -> Result<SpinCoefficients> {
        let values: Vec<f64> = match *self {
            SpinSpec::Hocp {
                beta,
                gamma,
                omega,
                centre,
                envelope_scale,
            } => vec![beta, gamma, omega, centre, envelope_scale],
            SpinSpec::Constant { fx, fy, omega } => vec![fx, fy, omega],
        };
        if !field_scale.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("spin parameters must be finite".into()));
        }
        Ok(match *self {
            SpinSpec::Hocp {
                beta,
                gamma,
                omega,
                centre,
                envelope_scale,
            } => {
                if envelope_scale <= 0.0 {
                    return Err(Error::InvalidArgument("envelope_scale must be positive".into()));
                }
                let params = ChirpedPulseParams {
                    beta: beta * field_scale,
                    gamma,
                    centre,
                    envelope_scale,
                };
                SpinCoefficients::hocp(params, omega * field_scale)
            }
            SpinSpec::Constant { fx, fy, omega } => {
                SpinCoefficients::constant(fx * field_scale, fy * field_scale, omega * field_scale)
            }
        })
    }
}

/// A fully assembled spin system with cached embedded operators.
#[derive(Clone, Debug)]
pub struct SpinSystem {
    spins: Vec<SpinCoefficients>,
    coupling: Option<KroneckerTermList>,
    rho0: KroneckerTermList,
    h_j: Option<ComplexMatrix>,
    rho0_matrix: ComplexMatrix,
    /// `[I_j^x, I_j^y, I_j^z]` per spin.
    operators: Vec<[ComplexMatrix; 3]>,
    /// `([I_j^y, H_J], [H_J, I_j^x])` per spin, when coupled.
    coupling_commutators: Option<Vec<(ComplexMatrix, ComplexMatrix)>>,
}

impl SpinSystem {
    pub fn new(
        spins: Vec<SpinCoefficients>,
        coupling: Option<KroneckerTermList>,
        rho0: KroneckerTermList,
    ) -> Result<Self> {
        let n = spins.len();
        if n == 0 {
            return Err(Error::InvalidArgument("spin system needs at least one spin".into()));
        }
        if n > 12 {
            return Err(Error::InvalidArgument(format!(
                "{n} spins exceeds the dense storage limit"
            )));
        }
        if rho0.n_spins() != n {
            return Err(Error::Dimension(format!(
                "rho0 is defined on {} spins, system has {n}",
                rho0.n_spins()
            )));
        }
        let rho0_matrix = rho0.assemble();
        check_hermitian(&rho0_matrix)?;

        let h_j = match &coupling {
            Some(list) => {
                if list.n_spins() != n {
                    return Err(Error::Dimension(format!(
                        "coupling is defined on {} spins, system has {n}",
                        list.n_spins()
                    )));
                }
                let m = list.assemble();
                check_hermitian(&m)?;
                Some(m)
            }
            None => None,
        };

        let mut operators = Vec::with_capacity(n);
        for j in 1..=n {
            operators.push([
                embed_single(n, j, &pauli(Pauli::X))?,
                embed_single(n, j, &pauli(Pauli::Y))?,
                embed_single(n, j, &pauli(Pauli::Z))?,
            ]);
        }
        let coupling_commutators = match &h_j {
            Some(hj) => Some(
                operators
                    .iter()
                    .map(|[ix, iy, _]| Ok((commutator(iy, hj)?, commutator(hj, ix)?)))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };

        Ok(Self {
            spins,
            coupling,
            rho0,
            h_j,
            rho0_matrix,
            operators,
            coupling_commutators,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.spins.len()
    }

    /// Hilbert-space dimension `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.spins.len()
    }

    pub fn spins(&self) -> &[SpinCoefficients] {
        &self.spins
    }

    pub fn coupling(&self) -> Option<&KroneckerTermList> {
        self.coupling.as_ref()
    }

    pub fn coupling_matrix(&self) -> Option<&ComplexMatrix> {
        self.h_j.as_ref()
    }

    pub fn rho0(&self) -> &KroneckerTermList {
        &self.rho0
    }

    pub fn rho0_matrix(&self) -> &ComplexMatrix {
        &self.rho0_matrix
    }

    /// `I_j^a` for 0-based spin index `j`; `axis` must be X, Y or Z.
    pub fn spin_operator(&self, j: usize, axis: Pauli) -> Result<&ComplexMatrix> {
        let ops = self.operators.get(j).ok_or(Error::SpinIndex {
            index: j + 1,
            n_spins: self.n_spins(),
        })?;
        match axis {
            Pauli::X => Ok(&ops[0]),
            Pauli::Y => Ok(&ops[1]),
            Pauli::Z => Ok(&ops[2]),
            Pauli::Identity => Err(Error::InvalidArgument("spin operator axis must be x, y or z".into())),
        }
    }

    /// `([I_j^y, H_J], [H_J, I_j^x])` for 0-based `j`, or `None` when uncoupled.
    pub fn coupling_commutators(&self, j: usize) -> Option<(&ComplexMatrix, &ComplexMatrix)> {
        self.coupling_commutators
            .as_ref()
            .and_then(|v| v.get(j))
            .map(|(a, b)| (a, b))
    }

    /// `sum_j (x_j I_j^x + y_j I_j^y + z_j I_j^z) + c H_J` for per-spin real
    /// weights `(x_j, y_j, z_j)`.
    pub fn combine(&self, weights: &[(f64, f64, f64)], coupling_weight: f64) -> ComplexMatrix {
        assert_eq!(weights.len(), self.n_spins(), "one weight triple per spin");
        let d = self.dim();
        let mut h = ComplexMatrix::zeros(d, d);
        for (ops, &(x, y, z)) in self.operators.iter().zip(weights) {
            for (op, w) in ops.iter().zip([x, y, z]) {
                if w != 0.0 {
                    h.add_scaled(w.into(), op);
                }
            }
        }
        if let Some(hj) = &self.h_j {
            if coupling_weight != 0.0 {
                h.add_scaled(coupling_weight.into(), hj);
            }
        }
        h
    }

    pub fn hamiltonian_at(&self, t: f64) -> ComplexMatrix {
        let weights: Vec<_> = self.spins.iter().map(|s| (s.f(t), s.g(t), s.omega())).collect();
        self.combine(&weights, 1.0)
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let deviation = m.hermitian_deviation();
    if deviation < HERMITIAN_TOL {
        Ok(())
    } else {
        Err(Error::NotHermitian { deviation })
    }
}

/// `hamiltonian_at` as a free function.
pub fn hamiltonian_at(system: &SpinSystem, t: f64) -> ComplexMatrix {
    system.hamiltonian_at(t)
}
