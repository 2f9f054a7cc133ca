use decoherence::io::{read_spectrum, read_state};
use decoherence::propagator::evolve_with_error;
use decoherence::state::validate_density;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{invalid, CliError, CliResult};
use crate::output::{Report, Table};

/// Tolerance for the validation of every emitted state.
pub const OUTPUT_TOL: f64 = 1e-9;

pub fn run(cfg: &RunConfig) -> CliResult<Report> {
    let spectrum_path = cfg.spectrum.as_ref().ok_or_else(|| invalid("--spectrum is required"))?;
    let rho_path = cfg.rho0.as_ref().ok_or_else(|| invalid("--rho0 is required"))?;
    let spectrum = read_spectrum::<f64>(spectrum_path)?;
    let rho0 = read_state::<f64>(rho_path)?;
    let params = cfg.kernel()?;
    let method = cfg.method()?;
    let times = cfg.times()?;
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(invalid("times must be finite and non-negative"));
    }

    let n = rho0.dim();
    let mut header = vec!["t".to_string()];
    for i in 0..n {
        for j in 0..n {
            header.push(format!("re_{i}_{j}"));
            header.push(format!("im_{i}_{j}"));
        }
    }
    let mut table = Table::new(header);
    let mut max_se = 0.0f64;
    let mut min_eig = f64::INFINITY;
    for &t in &times {
        let out = evolve_with_error(&rho0, &spectrum, &params, t, method)?;
        let report = validate_density(&out.state, OUTPUT_TOL);
        if !report.is_valid() {
            return Err(CliError::Invariant(format!("state at t = {t}: {report}")));
        }
        min_eig = min_eig.min(report.min_eigenvalue);
        max_se = out.std_error.iter().copied().fold(max_se, f64::max);
        let mut row = Vec::with_capacity(1 + 2 * n * n);
        row.push(t);
        for z in out.state.entries().as_slice() {
            row.push(z.re);
            row.push(z.im);
        }
        table.push(row);
    }
    let summary = json!({
        "method": method,
        "dim": n,
        "tau1": params.tau1,
        "tau2": params.tau2,
        "rows": times.len(),
        "min_eigenvalue": min_eig,
        "max_std_error": max_se,
    });
    Ok(Report::new(Some(table), summary))
}
