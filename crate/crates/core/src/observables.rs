//! Expectation values `<rho, A>_F = Tr(rho^H A)`, normalized spin components
//! and trajectory tables.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::Trajectory;
use crate::spinalg::{pauli, ComplexMatrix, KroneckerTerm, KroneckerTermList, Pauli, C64};

pub const OBSERVABLE_HERMITIAN_TOL: f64 = 1e-12;
/// Largest imaginary part tolerated in a normalized component, relative to
/// `max(1, |re|)`.
pub const IMAG_TOL: f64 = 1e-10;

/// `Tr(A^H B) = sum conj(a_ij) b_ij`.
pub fn frobenius_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::Dimension(format!(
            "inner product of {}x{} and {}x{} matrices",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.conj() * y).sum())
}

/// A labelled Hermitian observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawObservable", into = "RawObservable")]
pub struct ObservableSpec {
    label: String,
    operator: KroneckerTermList,
    matrix: ComplexMatrix,
}

/// Either a single Pauli string (`factors`) or a full term list (`terms`).
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObservable {
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factors: Option<Vec<Pauli>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<KroneckerTerm>>,
}

impl TryFrom<RawObservable> for ObservableSpec {
    type Error = Error;

    fn try_from(raw: RawObservable) -> Result<Self> {
        let operator = match (raw.factors, raw.terms) {
            (Some(factors), None) => KroneckerTermList::product(factors)?,
            (None, Some(terms)) => {
                let n = terms.first().map_or(0, |t| t.factors.len());
                KroneckerTermList::new(n, terms)?
            }
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "observable {:?} needs exactly one of `factors` or `terms`",
                    raw.label
                )))
            }
        };
        ObservableSpec::new(raw.label, operator)
    }
}

impl From<ObservableSpec> for RawObservable {
    fn from(spec: ObservableSpec) -> Self {
        Self {
            label: spec.label,
            factors: None,
            terms: Some(spec.operator.terms().to_vec()),
        }
    }
}

impl ObservableSpec {
    pub fn new(label: impl Into<String>, operator: KroneckerTermList) -> Result<Self> {
        let matrix = operator.assemble();
        let deviation = matrix.hermitian_deviation();
        if deviation >= OBSERVABLE_HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            label: label.into(),
            operator,
            matrix,
        })
    }

    /// Unit-coefficient Pauli string.
    pub fn product(label: impl Into<String>, factors: Vec<Pauli>) -> Result<Self> {
        Self::new(label, KroneckerTermList::product(factors)?)
    }

    /// `sigma_axis` on spin `j` (0-based) of an `n`-spin system.
    pub fn spin_component(n_spins: usize, j: usize, axis: Pauli) -> Result<Self> {
        if j >= n_spins {
            return Err(Error::SpinIndex { index: j + 1, n_spins });
        }
        let mut factors = vec![Pauli::Identity; n_spins];
        factors[j] = axis;
        let label = format!("{axis}{}", j + 1);
        Self::product(label, factors)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn operator(&self) -> &KroneckerTermList {
        &self.operator
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn n_spins(&self) -> usize {
        self.operator.n_spins()
    }
}

fn real_part(z: C64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL * z.re.abs().max(1.0) || !z.re.is_finite() {
        return Err(Error::NonRealExpectation { imag: z.im });
    }
    Ok(z.re)
}

/// `2^{-n} Re <rho, A>_F`.
pub fn normalized_component(rho: &ComplexMatrix, op: &ObservableSpec, n_spins: usize) -> Result<f64> {
    let dim = 1usize << n_spins;
    if op.n_spins() != n_spins || rho.rows() != dim {
        return Err(Error::Dimension(format!(
            "{n_spins}-spin component of a {}x{} density matrix with a {}-spin operator",
            rho.rows(),
            rho.cols(),
            op.n_spins()
        )));
    }
    real_part(frobenius_inner(rho, op.matrix())? / dim as f64)
}

/// `(d_x, d_y, d_z) = 1/2 (<rho, sigma_x>, <rho, sigma_y>, <rho, sigma_z>)` for a
/// single spin.
pub fn bloch_components(rho: &ComplexMatrix) -> Result<(f64, f64, f64)> {
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::Dimension(format!(
            "Bloch components need a 2x2 density matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let c = |p| -> Result<f64> { real_part(frobenius_inner(rho, &pauli(p))? * 0.5) };
    Ok((c(Pauli::X)?, c(Pauli::Y)?, c(Pauli::Z)?))
}

/// One row per grid point: `t` followed by one value per column label.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTable {
    pub labels: Vec<String>,
    pub rows: Vec<(f64, Vec<f64>)>,
}

impl SeriesTable {
    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let idx = self.labels.iter().position(|l| l == label)?;
        Some(self.rows.iter().map(|(_, v)| v[idx]).collect())
    }

    /// CSV with header `t,<labels>` and 17 significant digits.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        write!(w, "t")?;
        for l in &self.labels {
            write!(w, ",{l}")?;
        }
        writeln!(w)?;
        for (t, values) in &self.rows {
            write!(w, "{t:.16e}")?;
            for v in values {
                write!(w, ",{v:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

pub fn observable_series(traj: &Trajectory, ops: &[ObservableSpec]) -> Result<SeriesTable> {
    let n_spins = traj
        .states
        .first()
        .map(|s| s.rows().trailing_zeros() as usize)
        .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
    let rows = traj
        .times()
        .zip(&traj.states)
        .map(|(t, rho)| {
            let values = ops
                .iter()
                .map(|op| normalized_component(rho, op, n_spins))
                .collect::<Result<Vec<_>>>()?;
            Ok((t, values))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesTable {
        labels: ops.iter().map(|o| o.label().to_string()).collect(),
        rows,
    })
}

/// `(t, d_x, d_y, d_z)` along a single-spin trajectory.
pub fn bloch_series(traj: &Trajectory) -> Result<SeriesTable> {
    let rows = traj
        .times()
        .zip(&traj.states)
        .map(|(t, rho)| {
            let (x, y, z) = bloch_components(rho)?;
            Ok((t, vec![x, y, z]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesTable {
        labels: vec!["dx".into(), "dy".into(), "dz".into()],
        rows,
    })
}
