//! Independent dense reference implementations built on nalgebra. Shared by
//! the core integration tests and the bench acceptance target.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use spinmagnus::hamiltonian::{SpinSpec, SpinSystem};
use spinmagnus::spinalg::{ComplexMatrix, KroneckerTerm, KroneckerTermList, Pauli, C64};

pub type M = DMatrix<C64>;

const I: C64 = C64::new(0.0, 1.0);

pub fn to_na(a: &ComplexMatrix) -> M {
    M::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

pub fn from_na(a: &M) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

pub fn fro(a: &M) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn pauli(p: Pauli) -> M {
    let (o, l) = (C64::from(0.0), C64::from(1.0));
    let v = match p {
        Pauli::Identity => [l, o, o, l],
        Pauli::X => [o, l, l, o],
        Pauli::Y => [o, -I, I, o],
        Pauli::Z => [l, o, o, -l],
    };
    M::from_row_slice(2, 2, &v)
}

pub fn pauli_string(factors: &[Pauli]) -> M {
    factors
        .iter()
        .fold(M::identity(1, 1), |acc, &p| acc.kronecker(&pauli(p)))
}

pub fn term_list(list: &KroneckerTermList) -> M {
    let d = 1 << list.n_spins();
    list.terms()
        .iter()
        .fold(M::zeros(d, d), |acc, t| acc + pauli_string(&t.factors) * t.coeff)
}

/// `sigma_axis` on spin `j` of `n`.
pub fn embed(n: usize, j: usize, axis: Pauli) -> M {
    let mut f = vec![Pauli::Identity; n];
    f[j] = axis;
    pauli_string(&f)
}

/// `-i (I (x) H - H^T (x) I)`.
pub fn generator(h: &M) -> M {
    let id = M::identity(h.nrows(), h.nrows());
    (id.kronecker(h) - h.transpose().kronecker(&id)) * (-I)
}

#[derive(Clone, Copy, Debug)]
pub enum OracleSpin {
    Hocp {
        beta: f64,
        gamma: f64,
        omega: f64,
        centre: f64,
        scale: f64,
    },
    Constant {
        fx: f64,
        fy: f64,
        omega: f64,
    },
}

impl OracleSpin {
    pub fn fg(&self, t: f64) -> (f64, f64) {
        match *self {
            OracleSpin::Hocp {
                beta,
                gamma,
                centre,
                scale,
                ..
            } => {
                let d = t - centre;
                let e = beta * (-d.powi(8) / scale).exp();
                let phase = gamma * d * d;
                (e * phase.cos(), e * phase.sin())
            }
            OracleSpin::Constant { fx, fy, .. } => (fx, fy),
        }
    }

    pub fn omega(&self) -> f64 {
        match *self {
            OracleSpin::Hocp { omega, .. } | OracleSpin::Constant { omega, .. } => omega,
        }
    }

    pub fn spec(&self) -> SpinSpec {
        match *self {
            OracleSpin::Hocp {
                beta,
                gamma,
                omega,
                centre,
                scale,
            } => SpinSpec::Hocp {
                beta,
                gamma,
                omega,
                centre,
                envelope_scale: scale,
            },
            OracleSpin::Constant { fx, fy, omega } => SpinSpec::Constant { fx, fy, omega },
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleSystem {
    pub spins: Vec<OracleSpin>,
    pub coupling: Option<KroneckerTermList>,
}

impl OracleSystem {
    pub fn n(&self) -> usize {
        self.spins.len()
    }

    pub fn hamiltonian(&self, t: f64) -> M {
        let n = self.n();
        let d = 1 << n;
        let mut h = M::zeros(d, d);
        for (j, s) in self.spins.iter().enumerate() {
            let (f, g) = s.fg(t);
            h += embed(n, j, Pauli::X) * C64::from(f)
                + embed(n, j, Pauli::Y) * C64::from(g)
                + embed(n, j, Pauli::Z) * C64::from(s.omega());
        }
        if let Some(c) = &self.coupling {
            h += term_list(c);
        }
        h
    }

    pub fn generator(&self, t: f64) -> M {
        generator(&self.hamiltonian(t))
    }

    /// The same system through the crate's constructors, `rho0 = sigma_x`
    /// on the first spin.
    pub fn build(&self) -> SpinSystem {
        let spins = self
            .spins
            .iter()
            .map(|s| s.spec().to_coefficients(1.0).unwrap())
            .collect();
        let mut f = vec![Pauli::Identity; self.n()];
        f[0] = Pauli::X;
        SpinSystem::new(spins, self.coupling.clone(), KroneckerTermList::product(f).unwrap()).unwrap()
    }

    pub fn random(rng: &mut impl Rng, n: usize) -> Self {
        let spins = (0..n)
            .map(|_| {
                if rng.gen_bool(0.7) {
                    OracleSpin::Hocp {
                        beta: rng.gen_range(0.5..10.0),
                        gamma: rng.gen_range(0.1..2.0),
                        omega: rng.gen_range(-2.0..2.0),
                        centre: rng.gen_range(5.0..15.0),
                        scale: 10f64.powf(rng.gen_range(3.0..7.0)),
                    }
                } else {
                    OracleSpin::Constant {
                        fx: rng.gen_range(-3.0..3.0),
                        fy: rng.gen_range(-3.0..3.0),
                        omega: rng.gen_range(-3.0..3.0),
                    }
                }
            })
            .collect();
        let coupling = (n > 1).then(|| {
            let all = [Pauli::Identity, Pauli::X, Pauli::Y, Pauli::Z];
            let terms = (0..3)
                .map(|_| {
                    let factors = (0..n).map(|_| all[rng.gen_range(0..4)]).collect();
                    KroneckerTerm::new(rng.gen_range(-1.5..1.5), factors)
                })
                .collect();
            KroneckerTermList::new(n, terms).unwrap()
        });
        Self { spins, coupling }
    }
}

const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Composite 5-point Gauss-Legendre nodes and weights on `[a, b]`.
pub fn gl5_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let w = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let lo = a + p as f64 * w;
            GL5_X
                .iter()
                .zip(GL5_W)
                .map(move |(&x, wt)| (lo + 0.5 * w * (x + 1.0), 0.5 * w * wt))
        })
        .collect()
}

fn integrate_generator(sys: &OracleSystem, a: f64, b: f64, panels: usize) -> M {
    let d = 1 << (2 * sys.n());
    gl5_nodes(a, b, panels)
        .into_iter()
        .fold(M::zeros(d, d), |acc, (t, w)| acc + sys.generator(t) * C64::from(w))
}

/// `int_a^b A(s) ds`.
pub fn dense_omega1(sys: &OracleSystem, a: f64, b: f64, panels: usize) -> M {
    integrate_generator(sys, a, b, panels)
}

/// `1/2 int_a^b int_a^s [A(s), A(r)] dr ds`.
pub fn dense_omega2(sys: &OracleSystem, a: f64, b: f64, panels: usize) -> M {
    let d = 1 << (2 * sys.n());
    let mut acc = M::zeros(d, d);
    for (s, w) in gl5_nodes(a, b, panels) {
        let a_s = sys.generator(s);
        let inner = integrate_generator(sys, a, s, panels);
        acc += (&a_s * &inner - &inner * &a_s) * C64::from(w);
    }
    acc * C64::from(0.5)
}

/// `exp(z H)` for Hermitian `H` by eigendecomposition.
pub fn expm_hermitian(h: &M, z: C64) -> M {
    let eig = SymmetricEigen::new(h.clone());
    let u = &eig.eigenvectors;
    let d = M::from_diagonal(&eig.eigenvalues.map(|l| (z * l).exp()));
    u * d * u.adjoint()
}

/// Random Hermitian matrix with spectral norm `norm`.
pub fn random_hermitian(rng: &mut impl Rng, n: usize, norm: f64) -> M {
    let g = M::from_fn(n, n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let h = (&g + g.adjoint()) * C64::from(0.5);
    let rho = SymmetricEigen::new(h.clone()).eigenvalues.amax();
    h * C64::from(norm / rho)
}
