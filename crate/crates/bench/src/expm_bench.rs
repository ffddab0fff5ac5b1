//! Agreement of the matrix-exponential backends on a fixed test matrix.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinmagnus::expm::{
    krylov_expm_action_operator, pade_expm, pade_select_params, taylor_expm, taylor_order_for, PadeParams,
};
use spinmagnus::spinalg::{ComplexMatrix, C64};

use crate::error::{BenchError, Result};

pub const BENCH_DIM: usize = 8;
const BENCH_SEED: u64 = 0x5eed;

#[derive(Clone, Debug)]
pub struct ExpmBenchReport {
    pub norm: f64,
    pub eps: f64,
    pub pade: PadeParams,
    pub taylor_order: Option<usize>,
    /// `max|Pade - Taylor|`, when a Taylor order reaches `eps`.
    pub pade_vs_taylor: Option<f64>,
    /// `max|Pade - Krylov|` column by column with `m = dim`.
    pub pade_vs_krylov: f64,
    /// `max|E E^H - I|` for the Pade result.
    pub unitarity: f64,
}

impl ExpmBenchReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "norm = {:.16e}, eps = {:.16e}", self.norm, self.eps);
        let _ = writeln!(s, "pade q = {}, j = {}", self.pade.q, self.pade.j);
        match (self.taylor_order, self.pade_vs_taylor) {
            (Some(k), Some(d)) => {
                let _ = writeln!(s, "taylor K = {k}, max|pade - taylor| = {d:.16e}");
            }
            _ => {
                let _ = writeln!(s, "taylor: no order up to the cap reaches eps");
            }
        }
        let _ = writeln!(s, "max|pade - krylov| = {:.16e}", self.pade_vs_krylov);
        let _ = writeln!(s, "max|E E^H - I| = {:.16e}", self.unitarity);
        s
    }
}

/// `-i H` for a seeded random Hermitian `H`, scaled to infinity norm `norm`.
pub fn bench_matrix(norm: f64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(BENCH_SEED);
    let mut h = ComplexMatrix::zeros(BENCH_DIM, BENCH_DIM);
    for i in 0..BENCH_DIM {
        h[(i, i)] = C64::from(rng.gen_range(-1.0..1.0));
        for j in 0..i {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    let a = h.scale(C64::new(0.0, -1.0));
    let n = a.norm_inf();
    a.scale_real(norm / n)
}

pub fn run_expm_bench(norm: f64, eps: f64) -> Result<ExpmBenchReport> {
    if !(norm.is_finite() && norm > 0.0) {
        return Err(BenchError::Validation(format!("norm must be positive, got {norm}")));
    }
    let a = bench_matrix(norm);
    let pade = pade_select_params(a.norm_inf(), eps)?;
    let e = pade_expm(&a, pade)?;
    let taylor_order = taylor_order_for(a.norm_inf(), eps).ok();
    let pade_vs_taylor = match taylor_order {
        Some(k) => Some(taylor_expm(&a, k)?.max_abs_diff(&e)),
        None => None,
    };
    // exp(-i H) e_j, column by column.
    let h = a.scale(C64::new(0.0, 1.0));
    let mut krylov = 0.0f64;
    for j in 0..BENCH_DIM {
        let mut ej = vec![C64::from(0.0); BENCH_DIM];
        ej[j] = C64::from(1.0);
        let col = krylov_expm_action_operator(&h, &ej, BENCH_DIM, C64::new(0.0, -1.0))?;
        for (i, c) in col.iter().enumerate() {
            krylov = krylov.max((c - e[(i, j)]).norm());
        }
    }
    let mut eeh = e.matmul(&e.adjoint());
    eeh.add_identity(C64::from(-1.0));
    Ok(ExpmBenchReport {
        norm,
        eps,
        pade,
        taylor_order,
        pade_vs_taylor,
        pade_vs_krylov: krylov,
        unitarity: eeh.max_abs(),
    })
}
