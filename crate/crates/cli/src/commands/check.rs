use decoherence::invariants::{
    check_instance, random_observable, rng_for, run_invariant_suite, Instance, InvariantReport, SuiteConfig, TAU_RATIOS,
};
use decoherence::io::{read_spectrum, read_state};
use decoherence::KernelParams;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{invalid, CliResult};
use crate::output::Report;

/// Random streams for fixture checks start here, clear of the suite's own.
const FIXTURE_STREAM: u64 = 1 << 40;

/// Random suite plus, when `--spectrum` and `--rho0` are given, the same
/// checks on that state with random observables and times. Without
/// `--tau1/--tau2` the fixture runs at `tau2 = 1` for each standard ratio.
pub fn run(cfg: &RunConfig) -> CliResult<Report> {
    let suite = SuiteConfig {
        seed: cfg.seed(),
        instances: cfg.instances.unwrap_or(SuiteConfig::default().instances),
        min_dim: cfg.count("min_dim", 2)?,
        max_dim: cfg.count("max_dim", 6)?,
    };
    let random = run_invariant_suite(&suite)?;
    let mut total = random.clone();

    let fixture = match (&cfg.spectrum, &cfg.rho0) {
        (Some(sp), Some(rp)) => {
            let spectrum = read_spectrum::<f64>(sp)?;
            let rho0 = read_state::<f64>(rp)?;
            if spectrum.dim() != rho0.dim() {
                return Err(invalid(format!("spectrum has {} levels, state has {}", spectrum.dim(), rho0.dim())));
            }
            let kernels = if cfg.tau1.is_some() || cfg.tau2.is_some() {
                vec![cfg.kernel()?]
            } else {
                TAU_RATIOS.iter().map(|&r| KernelParams::new(r, 1.0)).collect::<Result<Vec<_>, _>>()?
            };
            let draws = cfg.count("draws", 20)?;
            let mut rep = InvariantReport::default();
            let mut stream = FIXTURE_STREAM;
            for params in kernels {
                for _ in 0..draws {
                    let mut rng = rng_for(cfg.seed(), stream);
                    stream += 1;
                    let inst = Instance {
                        rho0: rho0.clone(),
                        spectrum: spectrum.clone(),
                        params,
                        observable: random_observable(&mut rng, rho0.dim()),
                    };
                    rep.merge(&check_instance(&inst, &mut rng)?);
                }
            }
            total.merge(&rep);
            Some(rep)
        }
        (None, None) => None,
        _ => return Err(invalid("fixture checks need both --spectrum and --rho0")),
    };

    let summary = json!({
        "instances": total.instances,
        "ehrenfest_max_residual": total.ehrenfest_max_residual,
        "tm_violations": total.tm_violations,
        "violations": total.violations,
        "totals": total,
        "random": random,
        "fixture": fixture,
        "suite": suite,
    });
    let mut report = Report::new(None, summary);
    if !total.is_clean() {
        report.violation = Some(format!("{} failed invariant checks", total.violations));
    }
    Ok(report)
}
