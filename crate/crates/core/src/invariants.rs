//! Seeded random instances and the aggregate invariant suite.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::KernelParams;
use crate::matrix::CMatrix;
use crate::observables::{ehrenfest_fd_residual, ehrenfest_scale, tm_report};
use crate::propagator::{evolve, EvolutionMethod};
use crate::state::{DensityMatrix, EnergySpectrum, Observable, HERMITICITY_TOL, POSITIVITY_TOL};

pub const SEMIGROUP_TOL: f64 = 1e-12;
pub const FINITE_DIFFERENCE_TOL: f64 = 1e-12;
/// Relative to `‖A‖ ‖H‖ / ħ`.
pub const EHRENFEST_TOL: f64 = 1e-10;

/// Ratios `τ1/τ2` drawn by [`random_instance`].
pub const TAU_RATIOS: [f64; 3] = [0.1, 1.0, 3.0];

pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn normal_complex<R: Rng>(rng: &mut R) -> Complex<f64> {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `G G† / Tr(G G†)` for a `dim × rank` Ginibre matrix `G`, with the rank
/// drawn uniformly so that pure and rank-deficient states appear too.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize) -> Result<DensityMatrix<f64>> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let rank = rng.random_range(1..=dim);
    let g: Vec<Complex<f64>> = (0..dim * rank).map(|_| normal_complex(rng)).collect();
    let mut m = CMatrix::from_fn(dim, |i, j| (0..rank).map(|r| g[i * rank + r] * g[j * rank + r].conj()).sum());
    let tr = m.trace().re;
    m = m.scale(1.0 / tr);
    for i in 0..dim {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..dim {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    DensityMatrix::try_new(m)
}

pub fn random_observable<R: Rng>(rng: &mut R, dim: usize) -> Observable<f64> {
    let g: Vec<Complex<f64>> = (0..dim * dim).map(|_| normal_complex(rng)).collect();
    let m = CMatrix::from_fn(dim, |i, j| {
        if i == j {
            Complex::new(g[i * dim + i].re, 0.0)
        } else {
            (g[i * dim + j] + g[j * dim + i].conj()) * 0.5
        }
    });
    Observable::new(m).expect("symmetrized matrix is Hermitian")
}

pub fn random_spectrum<R: Rng>(rng: &mut R, dim: usize) -> EnergySpectrum<f64> {
    let energies = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
    EnergySpectrum::new(energies, rng.random_range(0.5..2.0)).expect("positive hbar, finite energies")
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub rho0: DensityMatrix<f64>,
    pub spectrum: EnergySpectrum<f64>,
    pub params: KernelParams<f64>,
    pub observable: Observable<f64>,
}

pub fn random_instance<R: Rng>(rng: &mut R, min_dim: usize, max_dim: usize) -> Result<Instance> {
    if min_dim == 0 || min_dim > max_dim {
        return Err(Error::invalid(format!("bad dimension range {min_dim}..={max_dim}")));
    }
    let dim = rng.random_range(min_dim..=max_dim);
    let tau2 = rng.random_range(0.1..2.0);
    let ratio = TAU_RATIOS[rng.random_range(0..TAU_RATIOS.len())];
    Ok(Instance {
        rho0: random_density(rng, dim)?,
        spectrum: random_spectrum(rng, dim),
        params: KernelParams::new(ratio * tau2, tau2)?,
        observable: random_observable(rng, dim),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub instances: usize,
    pub min_dim: usize,
    pub max_dim: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: 0, instances: 200, min_dim: 2, max_dim: 6 }
    }
}

/// Worst-case figures over every checked instance. `violations` counts
/// individual failed checks of any kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub instances: usize,
    pub trace_max_error: f64,
    pub hermiticity_max_error: f64,
    pub min_eigenvalue: f64,
    pub semigroup_max_error: f64,
    pub finite_difference_max_error: f64,
    /// Largest residual divided by `‖A‖ ‖H‖ / ħ`.
    pub ehrenfest_max_residual: f64,
    pub tm_evaluated: usize,
    pub tm_skipped: usize,
    pub tm_violations: usize,
    pub violations: usize,
}

impl Default for InvariantReport {
    fn default() -> Self {
        Self {
            instances: 0,
            trace_max_error: 0.0,
            hermiticity_max_error: 0.0,
            min_eigenvalue: f64::INFINITY,
            semigroup_max_error: 0.0,
            finite_difference_max_error: 0.0,
            ehrenfest_max_residual: 0.0,
            tm_evaluated: 0,
            tm_skipped: 0,
            tm_violations: 0,
            violations: 0,
        }
    }
}

impl InvariantReport {
    pub fn is_clean(&self) -> bool {
        self.violations == 0
    }

    pub fn merge(&mut self, other: &InvariantReport) {
        self.instances += other.instances;
        self.trace_max_error = self.trace_max_error.max(other.trace_max_error);
        self.hermiticity_max_error = self.hermiticity_max_error.max(other.hermiticity_max_error);
        self.min_eigenvalue = self.min_eigenvalue.min(other.min_eigenvalue);
        self.semigroup_max_error = self.semigroup_max_error.max(other.semigroup_max_error);
        self.finite_difference_max_error = self.finite_difference_max_error.max(other.finite_difference_max_error);
        self.ehrenfest_max_residual = self.ehrenfest_max_residual.max(other.ehrenfest_max_residual);
        self.tm_evaluated += other.tm_evaluated;
        self.tm_skipped += other.tm_skipped;
        self.tm_violations += other.tm_violations;
        self.violations += other.violations;
    }
}

/// Runs every check on one instance with its own time draws.
pub fn check_instance<R: Rng>(inst: &Instance, rng: &mut R) -> Result<InvariantReport> {
    let mut rep = InvariantReport { instances: 1, ..Default::default() };
    let (rho0, spec, params) = (&inst.rho0, &inst.spectrum, &inst.params);
    let tau2 = params.tau2;
    let t1 = tau2 * rng.random_range(0.0..10.0);
    let t2 = tau2 * rng.random_range(0.0..10.0);

    let rho_t1 = evolve(rho0, spec, params, t1, EvolutionMethod::ClosedForm)?;
    let rho_sum = evolve(rho0, spec, params, t1 + t2, EvolutionMethod::ClosedForm)?;
    let composed = evolve(&rho_t1, spec, params, t2, EvolutionMethod::ClosedForm)?;

    let tr0 = rho0.entries().trace();
    for state in [&rho_t1, &rho_sum] {
        let m = state.entries();
        rep.trace_max_error = rep.trace_max_error.max((m.trace() - tr0).norm());
        rep.hermiticity_max_error = rep.hermiticity_max_error.max(m.hermiticity_error());
        let lo = m.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
        rep.min_eigenvalue = rep.min_eigenvalue.min(lo);
    }
    rep.semigroup_max_error = composed.entries().max_abs_diff(rho_sum.entries());

    let steps = rng.random_range(1..=12u32);
    let t_grid = tau2 * f64::from(steps);
    let fd = evolve(rho0, spec, params, t_grid, EvolutionMethod::FiniteDifference)?;
    let cf = evolve(rho0, spec, params, t_grid, EvolutionMethod::ClosedForm)?;
    rep.finite_difference_max_error = fd.entries().max_abs_diff(cf.entries());

    let t_e = tau2 * rng.random_range(1.0..10.0);
    let a = &inst.observable;
    let residual = ehrenfest_fd_residual(rho0, a, spec, params, t_e)?;
    let scale = ehrenfest_scale(a, spec);
    rep.ehrenfest_max_residual = if scale > 0.0 { residual / scale } else { residual };

    match tm_report(rho0, a, spec, params, t_e) {
        Ok(tm) => {
            rep.tm_evaluated = 1;
            if !tm.holds {
                rep.tm_violations = 1;
            }
        }
        Err(Error::DegenerateInput(_)) => rep.tm_skipped = 1,
        Err(e) => return Err(e),
    }

    rep.violations = [
        rep.trace_max_error != 0.0,
        rep.hermiticity_max_error > HERMITICITY_TOL,
        rep.min_eigenvalue < -POSITIVITY_TOL,
        rep.semigroup_max_error > SEMIGROUP_TOL,
        rep.finite_difference_max_error > FINITE_DIFFERENCE_TOL,
        rep.ehrenfest_max_residual > EHRENFEST_TOL,
    ]
    .iter()
    .filter(|&&v| v)
    .count()
        + rep.tm_violations;
    Ok(rep)
}

/// Instance `i` draws from its own ChaCha stream, so results do not depend on
/// evaluation order.
pub fn run_invariant_suite(config: &SuiteConfig) -> Result<InvariantReport> {
    let mut total = InvariantReport::default();
    for i in 0..config.instances {
        let mut rng = rng_for(config.seed, i as u64);
        let inst = random_instance(&mut rng, config.min_dim, config.max_dim)?;
        total.merge(&check_instance(&inst, &mut rng)?);
    }
    Ok(total)
}
