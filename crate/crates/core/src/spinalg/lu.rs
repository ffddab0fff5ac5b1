//! LU factorization with partial pivoting for dense complex systems.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Pivots smaller than this multiple of `||A||_inf` are treated as zero.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-14;

/// `PA = LU` packed into one matrix (unit lower triangle implicit).
#[derive(Clone, Debug)]
pub struct LuDecomposition {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl LuDecomposition {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let n = a.square_dim()?;
        let threshold = SINGULAR_PIVOT_RATIO * a.norm_inf();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold || pivot == 0.0 {
                return Err(Error::Singular { pivot, threshold });
            }
            if p != k {
                perm.swap(p, k);
                let data = lu.as_mut_slice();
                for j in 0..n {
                    data.swap(k * n + j, p * n + j);
                }
            }
            let inv = lu[(k, k)].inv();
            for i in k + 1..n {
                let factor = lu[(i, k)] * inv;
                lu[(i, k)] = factor;
                if factor == ZERO {
                    continue;
                }
                let data = lu.as_mut_slice();
                for j in k + 1..n {
                    let u = data[k * n + j];
                    data[i * n + j] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "right-hand side length mismatch");
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve_mat(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        assert_eq!(b.rows(), n, "right-hand side row mismatch");
        let m = b.cols();
        let mut x = ComplexMatrix::zeros(n, m);
        // Work row-wise on all right-hand sides at once.
        let bd = b.as_slice();
        {
            let xd = x.as_mut_slice();
            for (i, &p) in self.perm.iter().enumerate() {
                xd[i * m..(i + 1) * m].copy_from_slice(&bd[p * m..(p + 1) * m]);
            }
            for i in 0..n {
                for j in 0..i {
                    let l = self.lu[(i, j)];
                    if l == ZERO {
                        continue;
                    }
                    for c in 0..m {
                        let v = xd[j * m + c];
                        xd[i * m + c] -= l * v;
                    }
                }
            }
            for i in (0..n).rev() {
                for j in i + 1..n {
                    let u = self.lu[(i, j)];
                    if u == ZERO {
                        continue;
                    }
                    for c in 0..m {
                        let v = xd[j * m + c];
                        xd[i * m + c] -= u * v;
                    }
                }
                let inv = self.lu[(i, i)].inv();
                for c in 0..m {
                    xd[i * m + c] *= inv;
                }
            }
        }
        x
    }
}

/// Solves `A x = b`.
pub fn solve(a: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>> {
    Ok(LuDecomposition::new(a)?.solve_vec(b))
}
