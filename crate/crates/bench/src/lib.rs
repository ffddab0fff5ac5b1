//! Experiment harness for `spinmagnus`: run configuration, trajectory
//! output, convergence sweeps with slope fitting, and checks of the Krylov
//! error bound and the matrix-exponential backends.

pub mod config;
pub mod convergence;
pub mod error;
pub mod expm_bench;
pub mod krylov_check;
pub mod simulate;

pub use config::{load_config, parse_config, RunConfig, SystemConfig};
pub use convergence::{fit_slope, run_convergence, ConvergenceReport, FitWindow, Series};
pub use error::{BenchError, Result};
pub use krylov_check::{run_krylov_bound_check, EigenvaluePlacement, KrylovBoundTable, Precision};
