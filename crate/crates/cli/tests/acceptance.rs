//! Acceptance criteria 1-10. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits non-zero if any criterion fails.

use std::f64::consts::{LN_2, PI};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use decoherence::invariants::{random_density, random_instance, random_spectrum, rng_for};
use decoherence::io::{read_spectrum, read_state};
use decoherence::kernel::{coarse_grain, kernel_moments, poisson_pmf, sample_effective_time};
use decoherence::observables::{ehrenfest_fd_residual, ehrenfest_scale, tm_report};
use decoherence::propagator::{
    decay_rate, evolve, frequency_shift, milburn_factor, propagator_factor, second_order_factor, EvolutionMethod,
    FactorSource,
};
use decoherence::scenarios::cat::{cat_interference, default_grid, CatParams};
use decoherence::scenarios::epr::{epr_correlation, singlet_fidelity, unit_x, unit_z, EprParams};
use decoherence::scenarios::rabi::{fit_envelope_rate, rabi_population, rabi_time_grid, RabiParams};
use decoherence::{Error, KernelParams, C64};
use rand::Rng;

type Outcome = Result<String, String>;

fn kp(tau1: f64, tau2: f64) -> KernelParams<f64> {
    KernelParams::new(tau1, tau2).expect("valid kernel")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn c1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let (mut max_quad, mut max_z) = (0.0f64, 0.0f64);
    let mut seed = 0;
    for wt in [0.1, 1.0, 10.0] {
        for k in [0.5, 1.0, 5.0, 20.0] {
            let p = kp(1.0, 1.0);
            let (w, t) = (wt, k);
            let cf = propagator_factor(w, &p, t);
            let quad = coarse_grain(&p, t, |tp| C64::new(0.0, -w * tp).exp(), 1e-10).map_err(|e| e.to_string())?;
            let d = (cf - quad).norm();
            ensure(d <= 1e-8, || format!("quadrature off by {d:e} at ωτ1={wt}, t/τ2={k}"))?;
            max_quad = max_quad.max(d);
            seed += 1;
            let src = FactorSource::new(EvolutionMethod::MonteCarlo { seed, count: 100_000 }, &p, t)
                .map_err(|e| e.to_string())?;
            let (mc, se) = src.factor(w).map_err(|e| e.to_string())?;
            let z = (cf - mc).norm() / se;
            ensure(z <= 4.0, || format!("Monte-Carlo {z:.2} standard errors away at ωτ1={wt}, t/τ2={k}"))?;
            max_z = max_z.max(z);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!("max |cf-quad| {max_quad:.1e}, max MC deviation {max_z:.2} se, {secs:.1} s"))
}

fn c2_rate_formulas() -> Outcome {
    let p = kp(1.0, 1.0);
    let g = decay_rate(1.0, &p);
    let nu = frequency_shift(1.0, &p);
    ensure((g - LN_2 / 2.0).abs() <= 1e-12, || format!("gamma {g}"))?;
    ensure((nu - PI / 4.0).abs() <= 1e-12, || format!("nu {nu}"))?;
    let mut worst = 0.0f64;
    for (w, tau1, tau2) in [(1.0, 1.0, 1.0), (3.0, 0.2, 0.5), (0.01, 2.0, 1.0), (40.0, 0.1, 0.3)] {
        let p = kp(tau1, tau2);
        let g = decay_rate(w, &p);
        for i in 0..=400 {
            let t = 20.0 * tau2 * i as f64 / 400.0;
            let d = (propagator_factor(w, &p, t).norm() - (-g * t).exp()).abs();
            worst = worst.max(d);
        }
    }
    ensure(worst <= 1e-12, || format!("|factor| deviates from e^(-γt) by {worst:e}"))?;
    Ok(format!("γ err {:.1e}, ν err {:.1e}, modulus err {worst:.1e}", (g - LN_2 / 2.0).abs(), (nu - PI / 4.0).abs()))
}

fn c3_limits() -> Outcome {
    let spectrum = read_spectrum::<f64>(fixtures().join("spectrum3.json")).map_err(|e| e.to_string())?;
    let rho0 = read_state::<f64>(fixtures().join("rho3.json")).map_err(|e| e.to_string())?;
    let t = 1.0;
    let exact = evolve(&rho0, &spectrum, &kp(1.0, 1.0), t, EvolutionMethod::Unitary).map_err(|e| e.to_string())?;
    let err = |tau: f64| -> Result<f64, String> {
        let s = evolve(&rho0, &spectrum, &kp(tau, tau), t, EvolutionMethod::ClosedForm).map_err(|e| e.to_string())?;
        Ok(s.entries().max_abs_diff(exact.entries()))
    };
    let mut ratios = Vec::new();
    for tau in [0.02, 0.01, 0.005] {
        let r = err(tau)? / err(tau / 2.0)?;
        ensure((r - 2.0).abs() <= 0.3, || format!("error ratio {r:.3} when τ halves from {tau}"))?;
        ratios.push(r);
    }
    let mut worst = 0.0f64;
    for wt in [0.001, 0.01, 0.05, 0.1] {
        for tau2 in [0.1, 1.0, 7.0] {
            let p = kp(1.0, tau2);
            let w = wt / p.tau1;
            let t = 10.0 * tau2;
            let a = propagator_factor(w, &p, t).norm();
            let b = second_order_factor(w, &p, t).norm();
            worst = worst.max((a - b).abs() / b);
        }
    }
    ensure(worst <= 1e-3, || format!("second-order modulus differs by {:.3}%", worst * 100.0))?;
    Ok(format!("halving ratios {ratios:.3?}, second-order rel. diff {worst:.1e}"))
}

fn c4_structural() -> Outcome {
    let (mut trace, mut herm, mut min_eig, mut semi, mut fd) = (0.0f64, 0.0f64, f64::INFINITY, 0.0f64, 0.0f64);
    let mut dims = [0usize; 7];
    for i in 0..200u64 {
        let mut rng = rng_for(4, i);
        let dim = rng.random_range(2..=6);
        dims[dim] += 1;
        let rho0 = random_density(&mut rng, dim).map_err(|e| e.to_string())?;
        let spectrum = random_spectrum(&mut rng, dim);
        let tau2 = rng.random_range(0.1..2.0);
        let p = kp(tau2 * [0.1, 1.0, 3.0][rng.random_range(0..3)], tau2);
        let (t1, t2) = (rng.random_range(0.0..10.0) * tau2, rng.random_range(0.0..10.0) * tau2);
        let run = |r: &decoherence::DensityMatrix<f64>, t: f64, m: EvolutionMethod| {
            evolve(r, &spectrum, &p, t, m).map_err(|e| e.to_string())
        };
        let a = run(&rho0, t1, EvolutionMethod::ClosedForm)?;
        let ab = run(&rho0, t1 + t2, EvolutionMethod::ClosedForm)?;
        let composed = run(&a, t2, EvolutionMethod::ClosedForm)?;
        for s in [&a, &ab] {
            trace = trace.max((s.entries().trace() - rho0.entries().trace()).norm());
            herm = herm.max(s.entries().hermiticity_error());
            min_eig = min_eig.min(s.entries().hermitian_eigenvalues()[0]);
        }
        semi = semi.max(composed.entries().max_abs_diff(ab.entries()));
        let n = rng.random_range(1..=12u32);
        let tg = tau2 * n as f64;
        let f = run(&rho0, tg, EvolutionMethod::FiniteDifference)?;
        let c = run(&rho0, tg, EvolutionMethod::ClosedForm)?;
        fd = fd.max(f.entries().max_abs_diff(c.entries()));
    }
    ensure(trace == 0.0, || format!("trace error {trace:e}"))?;
    ensure(herm <= 1e-12, || format!("Hermiticity error {herm:e}"))?;
    ensure(min_eig >= -1e-10, || format!("min eigenvalue {min_eig:e}"))?;
    ensure(semi <= 1e-12, || format!("semigroup error {semi:e}"))?;
    ensure(fd <= 1e-12, || format!("finite-difference vs closed form {fd:e}"))?;
    Ok(format!(
        "200 states (dims 2-6: {:?}), herm {herm:.1e}, min eig {min_eig:.2e}, semigroup {semi:.1e}, fd {fd:.1e}",
        &dims[2..]
    ))
}

fn c5_kernel_statistics() -> Outcome {
    let mut worst_z = 0.0f64;
    for (i, (tau1, tau2, t)) in [(2.0, 1.0, 5.0), (0.5, 1.0, 0.3), (1.0, 0.1, 3.0), (0.05, 0.05, 1.0)].into_iter().enumerate() {
        let p = kp(tau1, tau2);
        let m = kernel_moments(&p, t).map_err(|e| e.to_string())?;
        let s = sample_effective_time(&p, t, 50 + i as u64, 100_000).map_err(|e| e.to_string())?;
        let n = s.count as f64;
        let mean = s.mean();
        let sd = s.std_dev();
        let m4 = s.values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
        let se_mean = s.std_error();
        let se_sd = ((m4 - sd.powi(4)) / n).sqrt() / (2.0 * sd);
        let z_mean = (mean - m.mean).abs() / se_mean;
        let z_sd = (sd - m.sigma).abs() / se_sd;
        ensure(z_mean <= 3.0 && z_sd <= 3.0, || {
            format!("τ1={tau1}, τ2={tau2}, t={t}: mean {z_mean:.2} se, sigma {z_sd:.2} se")
        })?;
        worst_z = worst_z.max(z_mean).max(z_sd);
    }
    let mut norm_err = 0.0f64;
    for (tau1, tau2) in [(1.0, 1.0), (0.3, 2.0), (2.0, 0.5)] {
        for k in [0.1, 0.5, 1.0, 3.7, 20.0, 150.0] {
            let p = kp(tau1, tau2);
            let v = coarse_grain(&p, k * tau2, |_| C64::new(1.0, 0.0), 1e-11).map_err(|e| e.to_string())?;
            norm_err = norm_err.max((v - C64::new(1.0, 0.0)).norm());
        }
    }
    ensure(norm_err <= 1e-10, || format!("kernel mass off by {norm_err:e}"))?;
    let mut pois_err = 0.0f64;
    for lambda in [0.01, 0.5, 1.0, 7.3, 60.0, 400.0] {
        let p = kp(1.0, 1.0);
        let mut sum = 0.0;
        let mut n = 0u64;
        loop {
            let q = poisson_pmf(&p, lambda, n).map_err(|e| e.to_string())?;
            sum += q;
            if n as f64 > lambda && q < 1e-17 {
                break;
            }
            n += 1;
        }
        pois_err = pois_err.max((sum - 1.0).abs());
    }
    ensure(pois_err <= 1e-12, || format!("Poisson sum off by {pois_err:e}"))?;
    Ok(format!("moments within {worst_z:.2} se, mass err {norm_err:.1e}, Poisson err {pois_err:.1e}"))
}

fn c6_ehrenfest() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let mut rng = rng_for(6, i);
        let inst = random_instance(&mut rng, 2, 6).map_err(|e| e.to_string())?;
        let t = inst.params.tau2 * rng.random_range(1.0..10.0);
        let r = ehrenfest_fd_residual(&inst.rho0, &inst.observable, &inst.spectrum, &inst.params, t)
            .map_err(|e| e.to_string())?;
        worst = worst.max(r / ehrenfest_scale(&inst.observable, &inst.spectrum));
    }
    ensure(worst <= 1e-10, || format!("relative residual {worst:e}"))?;
    Ok(format!("100 instances, max residual {worst:.1e} × ‖A‖‖H‖/ħ"))
}

fn c7_tam_mandelstam() -> Outcome {
    let (mut valid, mut skipped, mut violations) = (0, 0, 0);
    let mut tightest = f64::INFINITY;
    let mut i = 0u64;
    while valid < 100 {
        let mut rng = rng_for(7, i);
        i += 1;
        let inst = random_instance(&mut rng, 2, 6).map_err(|e| e.to_string())?;
        let t = inst.params.tau2 * rng.random_range(1.0..10.0);
        match tm_report(&inst.rho0, &inst.observable, &inst.spectrum, &inst.params, t) {
            Ok(r) => {
                valid += 1;
                if !r.holds || r.lhs > r.rhs + 1e-12 {
                    violations += 1;
                }
                tightest = tightest.min(r.rhs - r.lhs);
            }
            Err(Error::DegenerateInput(_)) => skipped += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("{valid} instances ({skipped} degenerate skipped), 0 violations, min slack {tightest:.2e}"))
}

fn c8_milburn() -> Outcome {
    let mut milburn_err = 0.0f64;
    let mut mod_err = 0.0f64;
    let want = (1.0 + 4.0 * PI * PI).powf(-0.5);
    for (tau1, tau2) in [(1.0, 1.0), (0.1, 1.0), (2.0, 0.3), (1e-3, 1e-2)] {
        let p = kp(tau1, tau2);
        let w = 2.0 * PI / tau1;
        for i in 0..=200 {
            let t = tau2 * 0.37 * i as f64;
            milburn_err = milburn_err.max((milburn_factor(w, &p, t) - C64::new(1.0, 0.0)).norm());
        }
        mod_err = mod_err.max((propagator_factor(w, &p, tau2).norm() - want).abs());
    }
    ensure(milburn_err <= 1e-12, || format!("Milburn factor deviates from 1 by {milburn_err:e}"))?;
    ensure(mod_err <= 1e-12, || format!("closed-form modulus off by {mod_err:e}"))?;
    Ok(format!("Milburn |f-1| {milburn_err:.1e}, closed-form modulus err {mod_err:.1e}"))
}

fn c9_scenarios() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();

    let k = kp(0.05, 0.05);
    let mut worst_fit = 0.0f64;
    let mut worst_lin = 0.0f64;
    let g0 = RabiParams::new(1.0, 0, k).map_err(|e| e.to_string())?.damping_rate();
    for n in 0..=3u32 {
        let p = RabiParams::new(1.0, n, k).map_err(|e| e.to_string())?;
        ensure(p.rabi_frequency() * k.tau1 <= 0.1 + 1e-15, || "Ωτ1 above 0.1".into())?;
        let times = rabi_time_grid(&p, 10, 400);
        let traj = rabi_population(&p, &times).map_err(|e| e.to_string())?;
        let fit = fit_envelope_rate(&traj.times, &traj.values).map_err(|e| e.to_string())?;
        let rel = (fit - p.damping_rate()).abs() / p.damping_rate();
        ensure(rel <= 0.02, || format!("Rabi fit off by {:.2}% at n={n}", rel * 100.0))?;
        worst_fit = worst_fit.max(rel);
        let lin = (p.damping_rate() / ((n + 1) as f64 * g0) - 1.0).abs();
        ensure(lin <= 0.01, || format!("γ(n) departs from linear by {:.2}% at n={n}", lin * 100.0))?;
        worst_lin = worst_lin.max(lin);
    }
    notes.push(format!("rabi fit {:.2}%, linearity {:.2}%", worst_fit * 100.0, worst_lin * 100.0));

    let cat = |d: f64, tau1: f64| CatParams::new(1.0, 1.0, 0.5, d, 0.125, kp(tau1, 1.0), 1.0);
    let p = cat(4.0, 0.5).map_err(|e| e.to_string())?;
    let grid = default_grid(&p, 2001);
    let mut vis_err = 0.0f64;
    let mut mass_err = 0.0f64;
    for t in [0.0, 0.5, 1.0, 3.0, 10.0, 40.0] {
        let s = cat_interference(&p, t, &grid).map_err(|e| e.to_string())?;
        let gamma = decay_rate(s.omega_if, &p.kernel);
        ensure((s.t_decoherence * gamma - 1.0).abs() <= 1e-9, || "t_decoherence is not 1/γ".into())?;
        vis_err = vis_err.max((s.visibility - (-t / s.t_decoherence).exp()).abs());
        mass_err = mass_err.max((s.mass - 1.0).abs());
        ensure(s.p_bar.iter().all(|&v| v >= -1e-12), || "negative density".into())?;
    }
    ensure(vis_err <= 1e-9, || format!("visibility differs from e^(-t/t_d) by {vis_err:e}"))?;
    ensure(mass_err <= 1e-6, || format!("p_bar mass off by {mass_err:e}"))?;
    let rate = |d: f64| -> Result<f64, String> {
        let p = cat(d, 0.1).map_err(|e| e.to_string())?;
        let s = cat_interference(&p, 1.0, &default_grid(&p, 2001)).map_err(|e| e.to_string())?;
        ensure(s.omega_if * 0.1 <= 0.1, || "ω_if τ1 above 0.1".into())?;
        Ok(1.0 / s.t_decoherence)
    };
    let r0 = rate(0.5)?;
    let mut worst_d2 = 0.0f64;
    for d in [1.0, 2.0, 3.0] {
        let rel = (rate(d)? / r0 / (d / 0.5).powi(2) - 1.0).abs();
        worst_d2 = worst_d2.max(rel);
    }
    ensure(worst_d2 <= 0.02, || format!("rate departs from D² scaling by {:.2}%", worst_d2 * 100.0))?;
    notes.push(format!("cat visibility err {vis_err:.1e}, mass err {mass_err:.1e}, D² dev {:.2}%", worst_d2 * 100.0));

    let w0 = 2.0 * PI;
    let mut corr_ok = true;
    for (tau1, tau2) in [(1e-5, 1e-5), (0.1, 0.5), (1.0, 0.05)] {
        let p = EprParams::new(w0, 1.0, 1.0, kp(tau1, tau2)).map_err(|e| e.to_string())?;
        let g = decay_rate(w0, &p.kernel);
        for i in 0..=50 {
            let t = 0.1 * i as f64;
            let zz = epr_correlation(&p, t, unit_z(), unit_z()).map_err(|e| e.to_string())?;
            let xx = epr_correlation(&p, t, unit_x(), unit_x()).map_err(|e| e.to_string())?;
            corr_ok &= zz == -1.0 && xx.abs() <= (-g * t).exp() + 1e-15;
        }
    }
    ensure(corr_ok, || "E(z,z) or |E(x,x)| bound failed".into())?;
    let sharp = EprParams::new(w0, 1.0, 1.0, kp(1e-5, 1e-5)).map_err(|e| e.to_string())?;
    let blurred = EprParams::new(w0, 1.0, 1.0, kp(1.0, 0.05)).map_err(|e| e.to_string())?;
    let tf = sharp.flight_time();
    let (g_sharp, g_blur) = (decay_rate(w0, &sharp.kernel) * tf, decay_rate(w0, &blurred.kernel) * tf);
    ensure(g_sharp <= 1e-3 && g_blur >= 10.0, || format!("γt premises {g_sharp:e}, {g_blur}"))?;
    let f_sharp = singlet_fidelity(&sharp, tf).map_err(|e| e.to_string())?;
    let f_blur = singlet_fidelity(&blurred, tf).map_err(|e| e.to_string())?;
    ensure(f_sharp >= 0.99, || format!("fidelity {f_sharp} with γt = {g_sharp:e}"))?;
    ensure(f_blur <= 0.51, || format!("fidelity {f_blur} with γt = {g_blur}"))?;
    notes.push(format!("epr fidelity {f_sharp:.6} (γt {g_sharp:.1e}) vs {f_blur:.6} (γt {g_blur:.1})"));

    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 60.0, || format!("took {secs:.1} s"))?;
    notes.push(format!("{secs:.1} s"));
    Ok(notes.join("; "))
}

fn decohere(args: &[&str], dir: &Path, tag: &str) -> Result<(Vec<u8>, Vec<u8>), String> {
    let out = dir.join(format!("{tag}.out"));
    let summary = dir.join(format!("{tag}.summary"));
    let status = Command::new(env!("CARGO_BIN_EXE_decohere"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .arg("--summary")
        .arg(&summary)
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.success(), || format!("{args:?} exited with {status}"))?;
    let read = |p: &Path| std::fs::read(p).unwrap_or_default();
    Ok((read(&out), read(&summary)))
}

fn c10_reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fx = fixtures();
    let spectrum = fx.join("spectrum3.json");
    let rho = fx.join("rho3.json");
    let (sp, rh) = (spectrum.to_str().unwrap(), rho.to_str().unwrap());
    let runs: Vec<Vec<&str>> = vec![
        vec!["evolve", "--spectrum", sp, "--rho0", rh, "--tau1", "0.3", "--tau2", "1", "--times", "0:5:6", "--method", "monte_carlo", "--seed", "9", "--samples", "20000"],
        vec!["evolve", "--spectrum", sp, "--rho0", rh, "--tau1", "0.3", "--tau2", "1", "--times", "0:5:6", "--method", "quadrature"],
        vec!["scenario", "osc", "--tau1", "0.2", "--tau2", "1", "--param", "omega=3", "--times", "0:4:9", "--method", "monte_carlo", "--samples", "30000", "--format", "json"],
        vec!["sweep", "--axis", "tau1=0.1,0.2,0.4", "--axis", "t=1:3:3", "--target", "osc", "--reduction", "abs", "--param", "omega=2", "--tau2", "1", "--method", "monte_carlo", "--samples", "5000", "--workers", "4"],
        vec!["kernel", "--tau1", "0.5", "--tau2", "1", "--t", "0.4"],
        vec!["check", "--spectrum", sp, "--rho0", rh, "--instances", "50", "--seed", "3"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let a = decohere(args, dir.path(), &format!("a{i}"))?;
        let b = decohere(args, dir.path(), &format!("b{i}"))?;
        ensure(!a.0.is_empty(), || format!("{} produced no output", args[0]))?;
        ensure(a == b, || format!("outputs differ for {args:?}"))?;
    }
    Ok(format!("{} configurations byte-identical across two runs", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("rate formulas", c2_rate_formulas),
        ("limits", c3_limits),
        ("structural invariants", c4_structural),
        ("kernel statistics", c5_kernel_statistics),
        ("finite-difference Ehrenfest identity", c6_ehrenfest),
        ("generalized Tam-Mandelstam inequality", c7_tam_mandelstam),
        ("Milburn comparison", c8_milburn),
        ("scenarios", c9_scenarios),
        ("CLI reproducibility", c10_reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
