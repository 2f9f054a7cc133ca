use decoherence::kernel::{gamma_pdf, kernel_moments, support_bound, upper_tail_mass};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{invalid, CliResult};
use crate::output::{Report, Table};

/// Mass left beyond the printed grid.
const GRID_TAIL: f64 = 1e-7;

/// Density of the effective time on a uniform grid from 0 to a point beyond
/// which less than `GRID_TAIL` of the mass lies. The `t' = 0` row is left out
/// when the density is infinite there.
pub fn run(cfg: &RunConfig) -> CliResult<Report> {
    let params = cfg.kernel()?;
    let t = cfg.single_time()?;
    if !(t > 0.0) {
        return Err(invalid("the kernel is a point mass at t = 0; give a positive time"));
    }
    let points = cfg.count("points", 1001)?;
    if points < 2 {
        return Err(invalid("points must be at least 2"));
    }
    let upper = support_bound(&params, t, GRID_TAIL)?;
    let mut table = Table::new(["t_prime", "pdf"]);
    for i in 0..points {
        let tp = if i + 1 == points { upper } else { upper * i as f64 / (points - 1) as f64 };
        let p = gamma_pdf(&params, t, tp)?;
        if p.is_finite() {
            table.push(vec![tp, p]);
        }
    }
    let m = kernel_moments(&params, t)?;
    let summary = json!({
        "t": t,
        "tau1": params.tau1,
        "tau2": params.tau2,
        "shape": params.shape(t),
        "mean": m.mean,
        "sigma": m.sigma,
        "relative_dispersion": m.relative_dispersion,
        "grid_upper": upper,
        "mass_covered": 1.0 - upper_tail_mass(&params, t, upper)?,
        "ordering_advisory": params.ordering_advisory(),
    });
    Ok(Report::new(Some(table), summary))
}
