use decoherence::propagator::{decay_rate, frequency_shift, milburn_frozen_frequencies, propagator_factor};
use decoherence::scenarios::cat::{
    cat_interference_at, check_frequency, default_grid, interference_frequency_candidate,
    interference_frequency_formula, interference_frequency_oracle, CatParams,
};
use decoherence::scenarios::epr::{epr_correlation, singlet_fidelity, unit_x, unit_y, unit_z, EprParams};
use decoherence::scenarios::oscillator::{oscillator_amplitude_by, OscillatorParams};
use decoherence::scenarios::rabi::{fit_envelope_rate, rabi_population, rabi_time_grid, RabiParams};
use decoherence::C64;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{invalid, CliResult};
use crate::output::{Report, Table};

pub fn rate_or_inf(gamma: f64) -> f64 {
    if gamma > 0.0 { 1.0 / gamma } else { f64::INFINITY }
}

pub fn oscillator_params(cfg: &RunConfig) -> CliResult<OscillatorParams<f64>> {
    let a0 = C64::new(cfg.param_or("a0_re", 1.0), cfg.param_or("a0_im", 0.0));
    Ok(OscillatorParams::new(cfg.require("omega")?, a0, cfg.kernel()?)?)
}

/// Defaults: `m = σ_x = ħ = 1`, `D = 4`, minimum-uncertainty `σ_v` and `E = m σ_v² / 2`.
pub fn cat_params(cfg: &RunConfig) -> CliResult<CatParams<f64>> {
    let mass = cfg.param_or("mass", 1.0);
    let sigma_x = cfg.param_or("sigma_x", 1.0);
    let hbar = cfg.param_or("hbar", 1.0);
    let sigma_v = cfg.param_or("sigma_v", hbar / (2.0 * mass * sigma_x));
    let energy = cfg.param_or("energy", 0.5 * mass * sigma_v * sigma_v);
    let separation = cfg.param_or("separation", 4.0);
    Ok(CatParams::new(mass, sigma_x, sigma_v, separation, energy, cfg.kernel()?, hbar)?)
}

/// The calibrated frequency, or a user-supplied `omega_if` checked against the oracle.
pub fn cat_frequency(cfg: &RunConfig, params: &CatParams<f64>) -> CliResult<f64> {
    let omega = cfg.param("omega_if").unwrap_or_else(|| interference_frequency_formula(params));
    Ok(check_frequency(params, omega)?)
}

pub fn rabi_params(cfg: &RunConfig) -> CliResult<RabiParams<f64>> {
    let n = cfg.count("n_photons", 0)?;
    let n = u32::try_from(n).map_err(|_| invalid("n_photons out of range"))?;
    Ok(RabiParams::new(cfg.param_or("g", 1.0), n, cfg.kernel()?)?)
}

/// Rabi times: the given ones, or `periods` periods at `per_period` samples each.
pub fn rabi_times(cfg: &RunConfig, params: &RabiParams<f64>) -> CliResult<Vec<f64>> {
    match cfg.times_opt()? {
        Some(ts) => Ok(ts),
        None => Ok(rabi_time_grid(params, cfg.count("periods", 10)?, cfg.count("per_period", 400)?.max(3))),
    }
}

pub fn epr_params(cfg: &RunConfig) -> CliResult<EprParams<f64>> {
    Ok(EprParams::new(
        cfg.require("omega0")?,
        cfg.param_or("flight_length", 1.0),
        cfg.param_or("speed", 1.0),
        cfg.kernel()?,
    )?)
}

pub fn run(cfg: &RunConfig) -> CliResult<Report> {
    let name = cfg.scenario.as_deref().ok_or_else(|| invalid("scenario name required: osc, cat, rabi or epr"))?;
    match name {
        "osc" | "oscillator" => oscillator(cfg),
        "cat" => cat(cfg),
        "rabi" => rabi(cfg),
        "epr" => epr(cfg),
        other => Err(invalid(format!("unknown scenario {other:?}; expected osc, cat, rabi or epr"))),
    }
}

fn oscillator(cfg: &RunConfig) -> CliResult<Report> {
    let p = oscillator_params(cfg)?;
    let method = cfg.method()?;
    let traj = oscillator_amplitude_by(&p, &cfg.times()?, method)?;
    let mut table = Table::new(["t", "re", "im", "abs"]);
    for (&t, a) in traj.iter() {
        table.push(vec![t, a.re, a.im, a.norm()]);
    }
    let frozen_count = cfg.count("frozen", 3)?;
    let frozen: Vec<Value> = milburn_frozen_frequencies(&p.kernel, frozen_count.max(1))?
        .into_iter()
        .map(|w| json!({ "omega": w, "gamma": decay_rate(w, &p.kernel), "nu": frequency_shift(w, &p.kernel) }))
        .collect();
    let gamma = decay_rate(p.omega, &p.kernel);
    let summary = json!({
        "scenario": "osc",
        "method": method,
        "omega": p.omega,
        "gamma": gamma,
        "nu": frequency_shift(p.omega, &p.kernel),
        "t_decoherence": rate_or_inf(gamma),
        "frozen": frozen,
    });
    Ok(Report::new(Some(table), summary))
}

fn cat(cfg: &RunConfig) -> CliResult<Report> {
    let p = cat_params(cfg)?;
    let omega_if = cat_frequency(cfg, &p)?;
    let times = cfg.times_opt()?.unwrap_or_else(|| vec![0.0]);
    let grid = default_grid(&p, cfg.count("points", 2001)?);
    let mut table = Table::new(["t", "x", "p_bar"]);
    let mut snapshots = Vec::with_capacity(times.len());
    for &t in &times {
        let snap = cat_interference_at(&p, omega_if, t, &grid)?;
        for (&x, &d) in grid.iter().zip(&snap.p_bar) {
            table.push(vec![t, x, d]);
        }
        snapshots.push(json!({
            "t": t,
            "visibility": snap.visibility,
            "mass": snap.mass,
            "numeric_warning": snap.warning,
        }));
    }
    let gamma = decay_rate(omega_if, &p.kernel);
    let summary = json!({
        "scenario": "cat",
        "omega_if": omega_if,
        "omega_formula": interference_frequency_formula(&p),
        "omega_oracle": interference_frequency_oracle(&p),
        "omega_energy_form": interference_frequency_candidate(&p),
        "gamma": gamma,
        "nu": frequency_shift(omega_if, &p.kernel),
        "t_decoherence": rate_or_inf(gamma),
        "minimum_uncertainty_advisory": p.minimum_uncertainty_advisory(),
        "snapshots": snapshots,
    });
    Ok(Report::new(Some(table), summary))
}

fn rabi(cfg: &RunConfig) -> CliResult<Report> {
    let p = rabi_params(cfg)?;
    let times = rabi_times(cfg, &p)?;
    let traj = rabi_population(&p, &times)?;
    let mut table = Table::new(["t", "d"]);
    for (&t, &d) in traj.iter() {
        table.push(vec![t, d]);
    }
    let fitted = fit_envelope_rate(&traj.times, &traj.values).ok();
    let summary = json!({
        "scenario": "rabi",
        "n_photons": p.n_photons,
        "rabi_frequency": p.rabi_frequency(),
        "gamma": p.damping_rate(),
        "nu": p.frequency(),
        "t_decoherence": rate_or_inf(p.damping_rate()),
        "fitted_gamma": fitted,
    });
    Ok(Report::new(Some(table), summary))
}

fn epr(cfg: &RunConfig) -> CliResult<Report> {
    let p = epr_params(cfg)?;
    let times = cfg.times_opt()?.unwrap_or_else(|| vec![p.flight_time()]);
    let mut table = Table::new(["t", "e_xx", "e_yy", "e_zz", "fidelity"]);
    for &t in &times {
        table.push(vec![
            t,
            epr_correlation(&p, t, unit_x(), unit_x())?,
            epr_correlation(&p, t, unit_y(), unit_y())?,
            epr_correlation(&p, t, unit_z(), unit_z())?,
            singlet_fidelity(&p, t)?,
        ]);
    }
    let gamma = decay_rate(p.omega0, &p.kernel);
    let tf = p.flight_time();
    let summary = json!({
        "scenario": "epr",
        "omega0": p.omega0,
        "flight_time": tf,
        "gamma": gamma,
        "nu": frequency_shift(p.omega0, &p.kernel),
        "t_decoherence": rate_or_inf(gamma),
        "coherence_at_flight_time": propagator_factor(p.omega0, &p.kernel, tf).norm(),
    });
    Ok(Report::new(Some(table), summary))
}
