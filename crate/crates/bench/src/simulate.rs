use spinmagnus::observables::{observable_series, ObservableSpec, SeriesTable};
use spinmagnus::solvers::propagate;
use spinmagnus::spinalg::Pauli;

use crate::config::RunConfig;
use crate::error::Result;

/// `x1, y1, z1, x2, ...` for every spin.
pub fn default_observables(n_spins: usize) -> Result<Vec<ObservableSpec>> {
    let mut out = Vec::with_capacity(3 * n_spins);
    for j in 0..n_spins {
        for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
            out.push(ObservableSpec::spin_component(n_spins, j, axis)?);
        }
    }
    Ok(out)
}

/// Propagates the configured run and evaluates its observables (the spin
/// components when none are configured) at every grid point.
pub fn simulate(config: &RunConfig) -> Result<SeriesTable> {
    let grid = config.grid()?;
    let traj = propagate(&config.system, &grid, config.method, config.rule, config.expm_backend)?;
    let ops = if config.observables.is_empty() {
        default_observables(config.system.n_spins())?
    } else {
        config.observables.clone()
    };
    Ok(observable_series(&traj, &ops)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn larmor_run() {
        let cfg = parse_config(
            r#"{"t_span": [0, 2], "k": 5,
                "system": {"spins": [{"type": "constant", "fx": 0, "fy": 0, "omega": 1.5}],
                           "rho0": {"n_spins": 1, "terms": [{"coeff": [1, 0], "factors": ["x"]}]}},
                "method": "magnus1", "rule": "midpoint", "expm_backend": "pade"}"#,
        )
        .unwrap();
        let table = simulate(&cfg).unwrap();
        assert_eq!(table.labels, ["x1", "y1", "z1"]);
        assert_eq!(table.rows.len(), 2 * 32 + 1);
        for (t, v) in &table.rows {
            assert!((v[0] - (3.0 * t).cos()).abs() < 1e-12);
            assert!((v[1] - (3.0 * t).sin()).abs() < 1e-12);
        }
    }
}
