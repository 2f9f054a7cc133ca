use decoherence::io::{read_spectrum, read_state};
use decoherence::kernel::kernel_moments;
use decoherence::propagator::{decay_rate, evolve, frequency_shift, propagator_factor};
use decoherence::scenarios::epr::{epr_correlation, singlet_fidelity, unit_x, unit_y, unit_z};
use decoherence::scenarios::oscillator::oscillator_amplitude_by;
use decoherence::scenarios::rabi::{fit_envelope_rate, rabi_population};
use decoherence::{DensityMatrix, EnergySpectrum};
use rayon::prelude::*;
use serde_json::json;

use super::scenario::{cat_frequency, cat_params, epr_params, oscillator_params, rabi_params, rabi_times, rate_or_inf};
use crate::config::{RunConfig, SweepSpec, MAX_SWEEP_CELLS};
use crate::error::{invalid, CliError, CliResult};
use crate::output::{Report, Table};

const TARGETS: &str = "kernel, evolve, osc, cat, rabi, epr";

struct Loaded {
    spectrum: EnergySpectrum<f64>,
    rho0: DensityMatrix<f64>,
}

/// One value per cell; cells run in parallel and are emitted in lexicographic
/// order of their axis indices (last axis fastest). Cell `i` runs with seed
/// `seed + i`.
pub fn run(cfg: &RunConfig) -> CliResult<Report> {
    let spec = cfg.sweep.as_ref().ok_or_else(|| invalid("sweep needs axes, a target and a reduction"))?;
    let counts = spec.axes.iter().map(|a| Ok((a.name.clone(), a.values.count()?))).collect::<CliResult<Vec<_>>>()?;
    let cells = cell_count(spec, &counts)?;
    let axes: Vec<(String, Vec<f64>)> =
        spec.axes.iter().map(|a| Ok((a.name.clone(), a.values.expand()?))).collect::<CliResult<_>>()?;
    let loaded = if spec.target == "evolve" { Some(load(cfg)?) } else { None };
    let base_seed = cfg.seed();

    let values: Vec<CliResult<f64>> = (0..cells)
        .into_par_iter()
        .map(|i| {
            let mut cell = cfg.clone();
            cell.seed = Some(base_seed.wrapping_add(i as u64));
            for (name, v) in cell_values(&axes, i) {
                cell.set(name, v);
            }
            reduce(&spec.target, &spec.reduction, &cell, loaded.as_ref())
        })
        .collect();

    let mut header: Vec<String> = axes.iter().map(|a| a.0.clone()).collect();
    header.push(spec.reduction.clone());
    let mut table = Table::new(header);
    for (i, v) in values.into_iter().enumerate() {
        let mut row: Vec<f64> = cell_values(&axes, i).map(|(_, x)| x).collect();
        row.push(v?);
        table.push(row);
    }
    let summary = json!({
        "target": spec.target,
        "reduction": spec.reduction,
        "cells": cells,
        "axes": axes.iter().map(|a| json!({ "name": a.0, "count": a.1.len() })).collect::<Vec<_>>(),
    });
    Ok(Report::new(Some(table), summary))
}

fn cell_count(spec: &SweepSpec, counts: &[(String, usize)]) -> CliResult<usize> {
    if counts.is_empty() {
        return Err(invalid("sweep needs at least one axis"));
    }
    let mut total: u128 = 1;
    for (name, n) in counts {
        if *n == 0 {
            return Err(invalid(format!("axis {name} has no values")));
        }
        total = total.saturating_mul(*n as u128);
    }
    if total > MAX_SWEEP_CELLS && !spec.allow_large {
        return Err(invalid(format!("sweep has {total} cells, above the limit of {MAX_SWEEP_CELLS}; pass --allow-large to run it")));
    }
    usize::try_from(total).map_err(|_| invalid(format!("sweep of {total} cells is too large")))
}

fn cell_values(axes: &[(String, Vec<f64>)], index: usize) -> impl Iterator<Item = (&str, f64)> {
    let mut idx = vec![0; axes.len()];
    let mut rest = index;
    for (k, (_, vals)) in axes.iter().enumerate().rev() {
        idx[k] = rest % vals.len();
        rest /= vals.len();
    }
    axes.iter().zip(idx).map(|((name, vals), j)| (name.as_str(), vals[j]))
}

fn load(cfg: &RunConfig) -> CliResult<Loaded> {
    let sp = cfg.spectrum.as_ref().ok_or_else(|| invalid("--spectrum is required"))?;
    let rp = cfg.rho0.as_ref().ok_or_else(|| invalid("--rho0 is required"))?;
    Ok(Loaded { spectrum: read_spectrum(sp)?, rho0: read_state(rp)? })
}

fn unknown(target: &str, reduction: &str, known: &str) -> CliError {
    invalid(format!("unknown reduction {reduction:?} for {target}; expected one of {known}"))
}

fn reduce(target: &str, reduction: &str, cfg: &RunConfig, loaded: Option<&Loaded>) -> CliResult<f64> {
    match target {
        "kernel" => {
            let k = cfg.kernel()?;
            let t = cfg.single_time()?;
            let m = kernel_moments(&k, t)?;
            match reduction {
                "mean" => Ok(m.mean),
                "sigma" => Ok(m.sigma),
                "relative_dispersion" => Ok(m.relative_dispersion),
                r => Err(unknown(target, r, "mean, sigma, relative_dispersion")),
            }
        }
        "evolve" => {
            let l = loaded.expect("evolve sweeps preload their inputs");
            let rho = evolve(&l.rho0, &l.spectrum, &cfg.kernel()?, cfg.single_time()?, cfg.method()?)?;
            let m = rho.entries();
            let n = m.dim();
            match reduction {
                "purity" => Ok(m.trace_product(m).re),
                "max_coherence" => Ok((0..n)
                    .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                    .map(|(i, j)| m[(i, j)].norm())
                    .fold(0.0, f64::max)),
                r => Err(unknown(target, r, "purity, max_coherence")),
            }
        }
        "osc" | "oscillator" => {
            let p = oscillator_params(cfg)?;
            let gamma = decay_rate(p.omega, &p.kernel);
            match reduction {
                "gamma" => Ok(gamma),
                "nu" => Ok(frequency_shift(p.omega, &p.kernel)),
                "t_decoherence" => Ok(rate_or_inf(gamma)),
                "abs" | "re" | "im" => {
                    let t = cfg.single_time()?;
                    let a = oscillator_amplitude_by(&p, &[t], cfg.method()?)?.values[0];
                    Ok(match reduction {
                        "abs" => a.norm(),
                        "re" => a.re,
                        _ => a.im,
                    })
                }
                r => Err(unknown(target, r, "gamma, nu, t_decoherence, abs, re, im")),
            }
        }
        "cat" => {
            let p = cat_params(cfg)?;
            let w = cat_frequency(cfg, &p)?;
            let gamma = decay_rate(w, &p.kernel);
            match reduction {
                "omega_if" => Ok(w),
                "gamma" => Ok(gamma),
                "t_decoherence" => Ok(rate_or_inf(gamma)),
                "visibility" => Ok(propagator_factor(w, &p.kernel, cfg.single_time()?).norm()),
                r => Err(unknown(target, r, "omega_if, gamma, t_decoherence, visibility")),
            }
        }
        "rabi" => {
            let p = rabi_params(cfg)?;
            match reduction {
                "gamma" => Ok(p.damping_rate()),
                "nu" => Ok(p.frequency()),
                "rabi_frequency" => Ok(p.rabi_frequency()),
                "fitted_gamma" => {
                    let times = rabi_times(cfg, &p)?;
                    let traj = rabi_population(&p, &times)?;
                    Ok(fit_envelope_rate(&traj.times, &traj.values)?)
                }
                "d" => Ok(rabi_population(&p, &[cfg.single_time()?])?.values[0]),
                r => Err(unknown(target, r, "gamma, nu, rabi_frequency, fitted_gamma, d")),
            }
        }
        "epr" => {
            let p = epr_params(cfg)?;
            let t = match cfg.times_opt()? {
                Some(_) => cfg.single_time()?,
                None => p.flight_time(),
            };
            match reduction {
                "gamma" => Ok(decay_rate(p.omega0, &p.kernel)),
                "fidelity" => Ok(singlet_fidelity(&p, t)?),
                "e_xx" => Ok(epr_correlation(&p, t, unit_x(), unit_x())?),
                "e_yy" => Ok(epr_correlation(&p, t, unit_y(), unit_y())?),
                "e_zz" => Ok(epr_correlation(&p, t, unit_z(), unit_z())?),
                r => Err(unknown(target, r, "gamma, fidelity, e_xx, e_yy, e_zz")),
            }
        }
        other => Err(invalid(format!("unknown sweep target {other:?}; expected one of {TARGETS}"))),
    }
}
