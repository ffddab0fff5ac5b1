//! Spin algebra: Pauli matrices, Kronecker products, single- and two-site
//! embeddings, commutators, column-major vectorization and the Liouvillian
//! superoperator `L{H} = I (x) H - H^T (x) I`.

pub mod lu;
pub mod matrix;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use lu::LuDecomposition;
pub use matrix::{vec_dot, vec_norm, ComplexMatrix, C64};

use crate::error::{Error, Result};
use matrix::{I, ONE, ZERO};

/// Vectorized density matrix (column-major stacking).
pub type StateVector = Vec<C64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    #[serde(rename = "i")]
    Identity,
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
    #[serde(rename = "z")]
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::Identity, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        pauli(self)
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" | "I" => Ok(Pauli::Identity),
            "x" | "X" => Ok(Pauli::X),
            "y" | "Y" => Ok(Pauli::Y),
            "z" | "Z" => Ok(Pauli::Z),
            _ => Err(Error::InvalidArgument(format!("unknown Pauli label {s:?}"))),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pauli::Identity => "i",
            Pauli::X => "x",
            Pauli::Y => "y",
            Pauli::Z => "z",
        })
    }
}

pub fn pauli(label: Pauli) -> ComplexMatrix {
    let data = match label {
        Pauli::Identity => [ONE, ZERO, ZERO, ONE],
        Pauli::X => [ZERO, ONE, ONE, ZERO],
        Pauli::Y => [ZERO, -I, I, ZERO],
        Pauli::Z => [ONE, ZERO, ZERO, -ONE],
    };
    ComplexMatrix::from_vec(2, 2, data.to_vec()).expect("2x2 Pauli matrix")
}

/// Kronecker product `A (x) B`, the block matrix `[a_ij B]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = (a.rows(), a.cols());
    let (p, q) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(m * p, n * q);
    let cols = n * q;
    let data = out.as_mut_slice();
    for i in 0..m {
        for j in 0..n {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..p {
                let row = (i * p + k) * cols + j * q;
                for (o, &bkl) in data[row..row + q].iter_mut().zip(b.row(k)) {
                    *o = aij * bkl;
                }
            }
        }
    }
    out
}

fn check_site(n_spins: usize, index: usize) -> Result<()> {
    if index == 0 || index > n_spins {
        Err(Error::SpinIndex { index, n_spins })
    } else {
        Ok(())
    }
}

fn check_single_site_operator(a: &ComplexMatrix) -> Result<()> {
    if a.rows() == 2 && a.cols() == 2 {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "site operators must be 2x2, got {}x{}",
            a.rows(),
            a.cols()
        )))
    }
}

/// Kronecker product of a list of site operators, left to right.
fn kron_chain(factors: &[ComplexMatrix]) -> ComplexMatrix {
    let mut iter = factors.iter();
    let first = iter.next().expect("at least one factor").clone();
    iter.fold(first, |acc, f| kron(&acc, f))
}

/// `I (x) ... (x) A (x) ... (x) I` with `A` at 1-based position `j`.
pub fn embed_single(n_spins: usize, j: usize, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_site(n_spins, j)?;
    check_single_site_operator(a)?;
    let id = ComplexMatrix::identity(2);
    let factors: Vec<_> = (1..=n_spins)
        .map(|site| if site == j { a.clone() } else { id.clone() })
        .collect();
    Ok(kron_chain(&factors))
}

/// `A` at position `i` and `B` at position `j`; when `i == j` the single
/// factor `AB` sits at that position.
pub fn embed_pair(n_spins: usize, i: usize, j: usize, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_site(n_spins, i)?;
    check_site(n_spins, j)?;
    check_single_site_operator(a)?;
    check_single_site_operator(b)?;
    if i == j {
        return embed_single(n_spins, j, &(a * b));
    }
    let id = ComplexMatrix::identity(2);
    let factors: Vec<_> = (1..=n_spins)
        .map(|site| match site {
            s if s == i => a.clone(),
            s if s == j => b.clone(),
            _ => id.clone(),
        })
        .collect();
    Ok(kron_chain(&factors))
}

/// `[A, B] = AB - BA`
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.square_dim()?;
    if b.rows() != n || b.cols() != n {
        return Err(Error::Dimension(format!(
            "commutator of {n}x{n} and {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    let mut out = a * b;
    out -= &(b * a);
    Ok(out)
}

/// Column-major stacking of a square matrix.
pub fn vectorize(x: &ComplexMatrix) -> Result<StateVector> {
    let n = x.square_dim()?;
    let mut v = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            v.push(x[(i, j)]);
        }
    }
    Ok(v)
}

/// Inverse of [`vectorize`] for an `n x n` matrix.
pub fn devectorize(v: &[C64], n: usize) -> Result<ComplexMatrix> {
    if n == 0 || v.len() != n * n {
        return Err(Error::NotPerfectSquare { len: v.len(), n });
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| v[i + n * j]))
}

/// Side length of the square matrix a vectorized state reshapes into.
pub fn state_dim(v: &[C64]) -> Result<usize> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != v.len() {
        return Err(Error::NotPerfectSquare { len: v.len(), n });
    }
    Ok(n)
}

/// `L{H} = I_n (x) H - H^T (x) I_n`, so that `vec([H, X]) = L{H} vec(X)`.
///
/// Accepts any square matrix; the Magnus generators feed skew-Hermitian
/// arguments through the same map.
pub fn liouvillian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = h.square_dim()?;
    let dim = n * n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    let data = out.as_mut_slice();
    // Row (p, i) <-> index p*n + i, column (q, k) <-> q*n + k.
    for p in 0..n {
        for i in 0..n {
            let row = (p * n + i) * dim;
            // I (x) H: block-diagonal copies of H.
            for k in 0..n {
                data[row + p * n + k] += h[(i, k)];
            }
            // H^T (x) I: entry H[q, p] on the diagonal of block (p, q).
            for q in 0..n {
                data[row + q * n + i] -= h[(q, p)];
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTerm", into = "RawTerm")]
pub struct KroneckerTerm {
    pub coeff: C64,
    pub factors: Vec<Pauli>,
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    coeff: [f64; 2],
    factors: Vec<Pauli>,
}

impl TryFrom<RawTerm> for KroneckerTerm {
    type Error = Error;

    fn try_from(raw: RawTerm) -> Result<Self> {
        let coeff = C64::new(raw.coeff[0], raw.coeff[1]);
        if !coeff.re.is_finite() || !coeff.im.is_finite() {
            return Err(Error::InvalidArgument("term coefficient must be finite".into()));
        }
        Ok(Self {
            coeff,
            factors: raw.factors,
        })
    }
}

impl From<KroneckerTerm> for RawTerm {
    fn from(t: KroneckerTerm) -> Self {
        Self {
            coeff: [t.coeff.re, t.coeff.im],
            factors: t.factors,
        }
    }
}

impl KroneckerTerm {
    pub fn new(coeff: impl Into<C64>, factors: Vec<Pauli>) -> Self {
        Self {
            coeff: coeff.into(),
            factors,
        }
    }
}

/// A sum of Pauli strings, `sum_k c_k (P_k1 (x) ... (x) P_kn)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTermList", into = "RawTermList")]
pub struct KroneckerTermList {
    n_spins: usize,
    terms: Vec<KroneckerTerm>,
}

#[derive(Serialize, Deserialize)]
struct RawTermList {
    n_spins: usize,
    terms: Vec<KroneckerTerm>,
}

impl TryFrom<RawTermList> for KroneckerTermList {
    type Error = Error;

    fn try_from(raw: RawTermList) -> Result<Self> {
        Self::new(raw.n_spins, raw.terms)
    }
}

impl From<KroneckerTermList> for RawTermList {
    fn from(list: KroneckerTermList) -> Self {
        Self {
            n_spins: list.n_spins,
            terms: list.terms,
        }
    }
}

impl KroneckerTermList {
    pub fn new(n_spins: usize, terms: Vec<KroneckerTerm>) -> Result<Self> {
        if n_spins == 0 {
            return Err(Error::InvalidArgument("term list needs at least one spin".into()));
        }
        if terms.is_empty() {
            return Err(Error::InvalidArgument("term list is empty".into()));
        }
        for (k, term) in terms.iter().enumerate() {
            if term.factors.len() != n_spins {
                return Err(Error::InvalidArgument(format!(
                    "term {k} has {} factors, expected {n_spins}",
                    term.factors.len()
                )));
            }
        }
        Ok(Self { n_spins, terms })
    }

    /// A single product term with unit coefficient.
    pub fn product(factors: Vec<Pauli>) -> Result<Self> {
        Self::new(factors.len(), vec![KroneckerTerm::new(1.0, factors)])
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn terms(&self) -> &[KroneckerTerm] {
        &self.terms
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.im == 0.0)
    }

    pub fn assemble(&self) -> ComplexMatrix {
        assemble_term_list(self)
    }
}

pub fn assemble_term_list(spec: &KroneckerTermList) -> ComplexMatrix {
    let dim = 1usize << spec.n_spins;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for term in &spec.terms {
        let factors: Vec<_> = term.factors.iter().map(|&p| pauli(p)).collect();
        out.add_scaled(term.coeff, &kron_chain(&factors));
    }
    out
}
