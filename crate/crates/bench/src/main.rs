use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use spinmagnus_bench::convergence::{run_convergence, FitWindow, Series};
use spinmagnus_bench::expm_bench::run_expm_bench;
use spinmagnus_bench::krylov_check::{run_krylov_bound_check, EigenvaluePlacement, Precision};
use spinmagnus_bench::{load_config, simulate};

#[derive(Parser)]
#[command(name = "spinmagnus", version, about = "Magnus propagators for spin systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a configured system and write its observables as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output_path.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sweep step sizes against a magnus1/midpoint reference.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 2)]
        k_min: u32,
        #[arg(long, default_value_t = 12)]
        k_max: u32,
        #[arg(long, default_value_t = 20)]
        reference_k: u32,
        /// Comma-separated `method[:rule]` list; the rule defaults to midpoint.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "magnus1:initial,magnus1:midpoint,magnus2:gl3"
        )]
        methods: Vec<Series>,
        /// Lower end of the slope-fit window. Without it, leading rows near
        /// the largest possible error are skipped.
        #[arg(long)]
        fit_k_min: Option<u32>,
        #[arg(long)]
        fit_k_max: Option<u32>,
        /// Directory for convergence.csv and convergence.gp.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Compare measured Krylov errors with the a-priori bound.
    KrylovBound {
        #[arg(long, default_value_t = 10.0)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1001)]
        dim: usize,
        #[arg(long, default_value_t = 60)]
        m_max: usize,
        /// Place eigenvalues uniformly at random with this seed.
        #[arg(long)]
        random_seed: Option<u64>,
        /// Skip the double-double measurement.
        #[arg(long)]
        double_only: bool,
    },
    /// Report Pade/Taylor parameters and backend agreement at a given norm.
    ExpmBench {
        #[arg(long)]
        norm: f64,
        #[arg(long, default_value_t = 1e-15)]
        eps: f64,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, output } => {
            let cfg = load_config(&config)?;
            let table = simulate::simulate(&cfg)?;
            let path = output.unwrap_or_else(|| cfg.output_path.clone());
            fs::write(&path, table.to_csv_string()).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {} rows to {}", table.rows.len(), path.display());
        }
        Command::Converge {
            config,
            k_min,
            k_max,
            reference_k,
            methods,
            fit_k_min,
            fit_k_max,
            out_dir,
        } => {
            let cfg = load_config(&config)?;
            let window = FitWindow::new(fit_k_min, fit_k_max);
            let report = run_convergence(&cfg, k_min, k_max, reference_k, &methods, window)?;
            fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            let csv = out_dir.join("convergence.csv");
            fs::write(&csv, report.to_csv_string()).with_context(|| format!("writing {}", csv.display()))?;
            let gp = out_dir.join("convergence.gp");
            fs::write(&gp, report.gnuplot_script("convergence.csv"))
                .with_context(|| format!("writing {}", gp.display()))?;
            print!("{}", report.summary());
        }
        Command::KrylovBound {
            rho,
            t,
            dim,
            m_max,
            random_seed,
            double_only,
        } => {
            let placement = random_seed.map_or(EigenvaluePlacement::Equispaced, |seed| EigenvaluePlacement::Random {
                seed,
            });
            let precision = if double_only {
                Precision::Double
            } else {
                Precision::Extended
            };
            let table = run_krylov_bound_check(rho, t, dim, m_max, placement, precision)?;
            print!("{}", table.to_csv_string());
            if !table.all_pass() {
                anyhow::bail!("measured error exceeds the bound for some m");
            }
        }
        Command::ExpmBench { norm, eps } => {
            print!("{}", run_expm_bench(norm, eps)?.render());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
