//! Measured Krylov approximation error against the a-priori bound for a
//! diagonal operator with spectrum in `[-4 rho, 0]`.
//!
//! Past roughly 45 Lanczos steps the bound falls below what double
//! precision can resolve, so the measurement is also carried out in
//! double-double arithmetic: Lanczos with full re-orthogonalization,
//! `exp(t T_m) e_1` by Taylor substeps and the exact action by scalar
//! exponentials, all at about 32 significant digits.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinmagnus::expm::{krylov_error_bound, krylov_expm_action_operator, DiagonalOperator};
use spinmagnus::spinalg::C64;
use twofloat::TwoFloat;

use crate::error::{BenchError, Result};

type Dd = TwoFloat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenvaluePlacement {
    /// `-4 rho + 4 rho i / (dim - 1)`.
    Equispaced,
    /// Endpoints `-4 rho` and `0`, the rest uniform in between.
    Random { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Double,
    Extended,
}

pub fn eigenvalues(rho: f64, dim: usize, placement: EigenvaluePlacement) -> Vec<f64> {
    let lo = -4.0 * rho;
    if dim == 1 {
        return vec![lo];
    }
    match placement {
        EigenvaluePlacement::Equispaced => (0..dim).map(|i| lo + 4.0 * rho * i as f64 / (dim - 1) as f64).collect(),
        EigenvaluePlacement::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(lo..0.0)).collect();
            v[0] = lo;
            v[dim - 1] = 0.0;
            v
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovBoundRow {
    pub m: usize,
    pub bound: f64,
    pub error_double: f64,
    /// `None` in double-precision mode.
    pub error_extended: Option<f64>,
    pub pass: bool,
}

impl KrylovBoundRow {
    /// The error the pass flag is judged on.
    pub fn error(&self) -> f64 {
        self.error_extended.unwrap_or(self.error_double)
    }
}

#[derive(Clone, Debug)]
pub struct KrylovBoundTable {
    pub rho: f64,
    pub t: f64,
    pub dim: usize,
    pub precision: Precision,
    pub rows: Vec<KrylovBoundRow>,
}

impl KrylovBoundTable {
    pub fn all_pass(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.pass)
    }

    /// Columns `m,bound,error_double,error_extended,pass`.
    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("m,bound,error_double,error_extended,pass\n");
        for r in &self.rows {
            let ext = r.error_extended.map_or(String::new(), |e| format!("{e:.16e}"));
            let _ = writeln!(s, "{},{:.16e},{:.16e},{ext},{}", r.m, r.bound, r.error_double, r.pass);
        }
        s
    }
}

/// Smallest `m` inside the bound's validity range.
pub fn first_valid_m(rho: f64, t: f64) -> usize {
    (4.0 * rho * t).sqrt().ceil().max(1.0) as usize
}

/// Errors of the `m`-step Krylov approximation of `exp(tA) v`, `A` diagonal
/// with spectrum in `[-4 rho, 0]` and `v` the uniform unit vector, for every
/// `m` from the start of the validity range to `min(m_max, dim)`.
pub fn run_krylov_bound_check(
    rho: f64,
    t: f64,
    dim: usize,
    m_max: usize,
    placement: EigenvaluePlacement,
    precision: Precision,
) -> Result<KrylovBoundTable> {
    if dim == 0 {
        return Err(BenchError::Validation("dim must be positive".into()));
    }
    let m_lo = first_valid_m(rho, t);
    let m_hi = m_max.min(dim);
    // Validates rho and t.
    krylov_error_bound(rho, t, m_lo.max(m_hi))?;

    let lambda = eigenvalues(rho, dim, placement);
    let exact = exact_action(&lambda, t);
    let exact_f64: Vec<f64> = exact.iter().map(|x| x.hi()).collect();

    let op = DiagonalOperator { diag: lambda.clone() };
    let b = vec![C64::from(1.0 / (dim as f64).sqrt()); dim];
    let extended = match precision {
        Precision::Extended if m_lo <= m_hi => Some(DdLanczos::run(&lambda, m_hi)),
        _ => None,
    };

    let mut rows = Vec::new();
    for m in m_lo..=m_hi {
        let bound = krylov_error_bound(rho, t, m)?;
        let approx = krylov_expm_action_operator(&op, &b, m, C64::from(t))?;
        let error_double = approx
            .iter()
            .zip(&exact_f64)
            .map(|(a, e)| (a - e).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let error_extended = extended.as_ref().map(|lz| lz.error(m, t, &exact));
        let measured = error_extended.unwrap_or(error_double);
        rows.push(KrylovBoundRow {
            m,
            bound,
            error_double,
            error_extended,
            pass: measured <= bound,
        });
    }
    Ok(KrylovBoundTable {
        rho,
        t,
        dim,
        precision,
        rows,
    })
}

fn dd(x: f64) -> Dd {
    Dd::from(x)
}

/// `a / b` by long division on the leading word of `b`. The crate's
/// `TwoFloat / TwoFloat` loses about half the low word.
fn dd_div(a: Dd, b: Dd) -> Dd {
    let q1 = a / b.hi();
    let r = a - b * q1;
    let q2 = r / b.hi();
    let r = r - b * q2;
    q1 + q2 + r / b.hi()
}

/// `exp(x)` to double-double accuracy for moderate `|x|`.
fn dd_exp(x: Dd) -> Dd {
    const SQUARINGS: i32 = 8;
    let r = x * 0.5f64.powi(SQUARINGS);
    let mut term = dd(1.0);
    let mut sum = dd(1.0);
    for k in 1..80 {
        term = term * r / k as f64;
        sum += term;
        if term.abs() < 1e-36 {
            break;
        }
    }
    for _ in 0..SQUARINGS {
        sum = sum * sum;
    }
    sum
}

/// `exp(t lambda_i) / sqrt(dim)`.
fn exact_action(lambda: &[f64], t: f64) -> Vec<Dd> {
    let v = dd_div(dd(1.0), dd(lambda.len() as f64).sqrt());
    lambda.iter().map(|&l| dd_exp(Dd::new_mul(t, l)) * v).collect()
}

fn dot(x: &[Dd], y: &[Dd]) -> Dd {
    x.iter().zip(y).fold(dd(0.0), |acc, (&a, &b)| acc + a * b)
}

fn norm(x: &[Dd]) -> Dd {
    dot(x, x).sqrt()
}

/// Real Lanczos on a diagonal operator from the uniform unit vector.
/// Factorizations of every smaller order are leading sections of this one.
struct DdLanczos {
    basis: Vec<Vec<Dd>>,
    alpha: Vec<Dd>,
    beta: Vec<Dd>,
}

impl DdLanczos {
    fn run(lambda: &[f64], m: usize) -> Self {
        let n = lambda.len();
        let v0 = dd_div(dd(1.0), dd(n as f64).sqrt());
        let mut basis = vec![vec![v0; n]];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<Dd> = Vec::with_capacity(m);
        for j in 0..m {
            let v = &basis[j];
            let mut w: Vec<Dd> = v.iter().zip(lambda).map(|(&x, &l)| x * l).collect();
            let a = dot(v, &w);
            for (wi, &vi) in w.iter_mut().zip(v) {
                *wi -= a * vi;
            }
            if j > 0 {
                let (bp, vp) = (beta[j - 1], &basis[j - 1]);
                for (wi, &vi) in w.iter_mut().zip(vp) {
                    *wi -= bp * vi;
                }
            }
            alpha.push(a);
            if j + 1 == m {
                break;
            }
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    for (wi, &qi) in w.iter_mut().zip(q) {
                        *wi -= c * qi;
                    }
                }
            }
            let b = norm(&w);
            // Invariant subspace: every larger order reproduces this one.
            if b.hi() <= 1e-28 {
                break;
            }
            beta.push(b);
            let inv = dd_div(dd(1.0), b);
            basis.push(w.iter().map(|&x| x * inv).collect());
        }
        Self { basis, alpha, beta }
    }

    /// `exp(t T_m) e_1` by Taylor substeps with `||h T|| <= 1/2`.
    fn exp_e1(&self, m: usize, t: f64) -> Vec<Dd> {
        let alpha = &self.alpha[..m];
        let beta = &self.beta[..m - 1];
        let norm_t = (0..m)
            .map(|i| {
                let off = |k: usize| beta.get(k).map_or(0.0, |b| b.hi().abs());
                alpha[i].hi().abs() + off(i) + if i > 0 { off(i - 1) } else { 0.0 }
            })
            .fold(0.0, f64::max)
            * t;
        let steps = (norm_t / 0.5).ceil().max(1.0) as usize;
        let h = dd(t) / steps as f64;
        let apply = |x: &[Dd]| -> Vec<Dd> {
            (0..m)
                .map(|i| {
                    let mut y = alpha[i] * x[i];
                    if i > 0 {
                        y += beta[i - 1] * x[i - 1];
                    }
                    if i + 1 < m {
                        y += beta[i] * x[i + 1];
                    }
                    y * h
                })
                .collect()
        };
        let mut y = vec![dd(0.0); m];
        y[0] = dd(1.0);
        for _ in 0..steps {
            let mut term = y.clone();
            let mut sum = y.clone();
            for k in 1..100 {
                term = apply(&term).into_iter().map(|x| x / k as f64).collect();
                for (s, &x) in sum.iter_mut().zip(&term) {
                    *s += x;
                }
                if norm(&term).hi() < 1e-36 {
                    break;
                }
            }
            y = sum;
        }
        y
    }

    /// `||exact - V_m exp(t T_m) e_1||_2` with the start vector's norm 1.
    fn error(&self, m: usize, t: f64, exact: &[Dd]) -> f64 {
        let m = m.min(self.alpha.len());
        let y = self.exp_e1(m, t);
        let mut diff = exact.to_vec();
        for (yj, vj) in y.iter().zip(&self.basis) {
            for (d, &v) in diff.iter_mut().zip(vj) {
                *d -= *yj * v;
            }
        }
        norm(&diff).hi()
    }
}
