//! Evolution maps acting elementwise on energy-basis density matrices.
//!
//! Each method multiplies the coherence `rho[n][m]` by a scalar factor of the
//! Bohr frequency `omega[n][m]`:
//!
//! | method              | factor                                              |
//! |---------------------|-----------------------------------------------------|
//! | `unitary`           | `e^{-iωt}`                                          |
//! | `closed_form`       | `(1 + iωτ1)^{-t/τ2}` (principal branch)             |
//! | `finite_difference` | `(1 + iωτ1)^{-k}`, `t = kτ2`                        |
//! | `second_order`      | `exp(-iωτ1 t/τ2 - ω²τ1² t/(2τ2))`                   |
//! | `milburn`           | `exp((t/τ2)(e^{-iωτ1} - 1))`                        |
//! | `quadrature`        | kernel average of `e^{-iωt'}` by adaptive quadrature|
//! | `monte_carlo`       | sample mean of `e^{-iωt'}` over Gamma draws         |
//!
//! Populations (`ω = 0` on the diagonal) are untouched by every method.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{coarse_grain, sample_effective_time, KernelParams, SampleSet};
use crate::matrix::CMatrix;
use crate::state::{bohr_frequencies, BohrFrequencyTable, DensityMatrix, EnergySpectrum};
use crate::{Complex, Real};

/// Default tolerance of the quadrature method.
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-10;
/// Default Monte-Carlo sample count.
pub const DEFAULT_MC_SAMPLES: usize = 100_000;
/// Relative slack when deciding whether `t` lies on the `tau2` grid.
pub const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvolutionMethod {
    Unitary,
    ClosedForm,
    FiniteDifference,
    SecondOrder,
    Milburn,
    Quadrature { tol: f64 },
    MonteCarlo { seed: u64, count: usize },
}

impl EvolutionMethod {
    pub fn name(&self) -> &'static str {
        match self {
            EvolutionMethod::Unitary => "unitary",
            EvolutionMethod::ClosedForm => "closed_form",
            EvolutionMethod::FiniteDifference => "finite_difference",
            EvolutionMethod::SecondOrder => "second_order",
            EvolutionMethod::Milburn => "milburn",
            EvolutionMethod::Quadrature { .. } => "quadrature",
            EvolutionMethod::MonteCarlo { .. } => "monte_carlo",
        }
    }

    /// Parses a method name; `quadrature` and `monte_carlo` take the given
    /// tolerance, seed and sample count.
    pub fn parse(name: &str, tol: f64, seed: u64, count: usize) -> Result<Self> {
        Ok(match name {
            "unitary" => EvolutionMethod::Unitary,
            "closed_form" => EvolutionMethod::ClosedForm,
            "finite_difference" => EvolutionMethod::FiniteDifference,
            "second_order" => EvolutionMethod::SecondOrder,
            "milburn" => EvolutionMethod::Milburn,
            "quadrature" => EvolutionMethod::Quadrature { tol },
            "monte_carlo" => EvolutionMethod::MonteCarlo { seed, count },
            other => return Err(Error::invalid(format!("unknown evolution method '{other}'"))),
        })
    }
}

/// Per-coherence decay rate and frequency shift of the closed-form map.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceRates<T> {
    dim: usize,
    gamma: Vec<T>,
    nu: Vec<T>,
}

impl<T: Real> DecoherenceRates<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self, n: usize, m: usize) -> T {
        self.gamma[n * self.dim + m]
    }

    pub fn nu(&self, n: usize, m: usize) -> T {
        self.nu[n * self.dim + m]
    }
}

/// `gamma = ln(1 + ω²τ1²) / (2τ2)`
pub fn decay_rate<T: Real>(omega: T, params: &KernelParams<T>) -> T {
    let x = omega * params.tau1;
    (x * x).ln_1p() / (T::lit(2.0) * params.tau2)
}

/// `nu = atan(ωτ1) / τ2`
pub fn frequency_shift<T: Real>(omega: T, params: &KernelParams<T>) -> T {
    (omega * params.tau1).atan() / params.tau2
}

pub fn rates<T: Real>(table: &BohrFrequencyTable<T>, params: &KernelParams<T>) -> DecoherenceRates<T> {
    let dim = table.dim();
    let mut gamma = vec![T::zero(); dim * dim];
    let mut nu = vec![T::zero(); dim * dim];
    for n in 0..dim {
        for m in 0..dim {
            let w = table.get(n, m);
            if !w.is_zero() {
                gamma[n * dim + m] = decay_rate(w, params);
                nu[n * dim + m] = frequency_shift(w, params);
            }
        }
    }
    DecoherenceRates { dim, gamma, nu }
}

/// One cronon step of the finite-difference map, `(1 + iωτ1)^{-1}`.
pub fn step_factor<T: Real>(omega: T, params: &KernelParams<T>) -> Complex<T> {
    Complex::new(T::one(), omega * params.tau1).inv()
}

/// Closed-form factor `exp(-(t/τ2) Log(1 + iωτ1))`.
///
/// `1 + iωτ1` has positive real part for every real ω, so the principal
/// logarithm never crosses its branch cut. Its parts are taken as
/// `ln_1p(x²)/2` and `atan(x)`, which keeps full relative precision for small
/// `x = ωτ1` and matches [`decay_rate`] and [`frequency_shift`] exactly.
pub fn propagator_factor<T: Real>(omega: T, params: &KernelParams<T>, t: T) -> Complex<T> {
    if omega.is_zero() || t.is_zero() {
        return Complex::one();
    }
    let x = omega * params.tau1;
    let log = Complex::new((x * x).ln_1p() / T::lit(2.0), x.atan());
    (log * -(t / params.tau2)).exp()
}

pub fn unitary_factor<T: Real>(omega: T, t: T) -> Complex<T> {
    Complex::new(T::zero(), -omega * t).exp()
}

/// Exponential of the second-order (phase diffusion) generator.
pub fn second_order_factor<T: Real>(omega: T, params: &KernelParams<T>, t: T) -> Complex<T> {
    let x = omega * params.tau1;
    let s = t / params.tau2;
    Complex::new(-x * x * s / T::lit(2.0), -x * s).exp()
}

/// Poisson-jump factor `exp((t/τ2)(e^{-iωτ1} - 1))`.
pub fn milburn_factor<T: Real>(omega: T, params: &KernelParams<T>, t: T) -> Complex<T> {
    if omega.is_zero() || t.is_zero() {
        return Complex::one();
    }
    // e^{-iθ} - 1 = -2 sin²(θ/2) - i sin θ, free of cancellation near θ = 0
    let theta = omega * params.tau1;
    let half = (theta / T::lit(2.0)).sin();
    let jump = Complex::new(T::lit(-2.0) * half * half, -theta.sin());
    (jump * (t / params.tau2)).exp()
}

/// Number of whole cronons in `t`, or an error when `t` is off the grid.
pub fn grid_steps<T: Real>(params: &KernelParams<T>, t: T) -> Result<u32> {
    let k = (t / params.tau2).to_f64_lossy();
    let rounded = k.round();
    if !(k >= 0.0) || (k - rounded).abs() > GRID_TOL * rounded.max(1.0) || rounded > u32::MAX as f64 {
        return Err(Error::invalid(format!(
            "finite-difference evolution needs t on the tau2 grid; t/tau2 = {k}"
        )));
    }
    Ok(rounded as u32)
}

/// Finite-difference factor after `steps` cronons.
pub fn finite_difference_factor<T: Real>(omega: T, params: &KernelParams<T>, steps: u32) -> Complex<T> {
    if omega.is_zero() {
        return Complex::one();
    }
    let s = step_factor(omega, params);
    let mut acc = Complex::one();
    for _ in 0..steps {
        acc = acc * s;
    }
    acc
}

/// Frequencies `2nπ/τ1`, `n = 1..=n_max`, at which the Milburn factor is one.
pub fn milburn_frozen_frequencies<T: Real>(params: &KernelParams<T>, n_max: usize) -> Result<Vec<T>> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    Ok((1..=n_max).map(|n| T::lit(2.0) * T::PI() * T::from_usize_lossy(n) / params.tau1).collect())
}

/// Factor source for one `(method, params, t)` triple. Monte-Carlo draws are
/// made once and shared by every coherence, which keeps the sampled map a
/// mixture of unitaries.
pub enum FactorSource<'a, T> {
    Analytic { method: EvolutionMethod, params: &'a KernelParams<T>, t: T, steps: u32 },
    Sampled(SampleSet<T>),
}

impl<'a, T: Real> FactorSource<'a, T> {
    pub fn new(method: EvolutionMethod, params: &'a KernelParams<T>, t: T) -> Result<Self> {
        if !(t >= T::zero() && t.is_finite()) {
            return Err(Error::invalid(format!("time must be non-negative and finite, got {t}")));
        }
        let steps = match method {
            EvolutionMethod::FiniteDifference => grid_steps(params, t)?,
            _ => 0,
        };
        match method {
            EvolutionMethod::MonteCarlo { seed, count } if t > T::zero() => {
                Ok(FactorSource::Sampled(sample_effective_time(params, t, seed, count)?))
            }
            EvolutionMethod::Quadrature { tol } if !(tol > 0.0) => {
                Err(Error::invalid(format!("quadrature tolerance must be positive, got {tol}")))
            }
            _ => Ok(FactorSource::Analytic { method, params, t, steps }),
        }
    }

    /// Factor for Bohr frequency `omega` together with its standard error
    /// (zero for deterministic methods).
    pub fn factor(&self, omega: T) -> Result<(Complex<T>, f64)> {
        if omega.is_zero() {
            return Ok((Complex::one(), 0.0));
        }
        match self {
            FactorSource::Sampled(samples) => {
                Ok(samples.average(|tp| Complex::new(T::zero(), -omega * tp).exp()))
            }
            FactorSource::Analytic { method, params, t, steps } => {
                let (params, t) = (*params, *t);
                if t.is_zero() {
                    return Ok((Complex::one(), 0.0));
                }
                let z = match *method {
                    EvolutionMethod::Unitary => unitary_factor(omega, t),
                    EvolutionMethod::ClosedForm => propagator_factor(omega, params, t),
                    EvolutionMethod::FiniteDifference => finite_difference_factor(omega, params, *steps),
                    EvolutionMethod::SecondOrder => second_order_factor(omega, params, t),
                    EvolutionMethod::Milburn => milburn_factor(omega, params, t),
                    EvolutionMethod::Quadrature { tol } => {
                        coarse_grain(params, t, |tp| Complex::new(T::zero(), -omega * tp).exp(), tol)?
                    }
                    EvolutionMethod::MonteCarlo { .. } => unreachable!("sampled source handles t > 0"),
                };
                Ok((z, 0.0))
            }
        }
    }
}

/// Evolved state together with the per-element standard error of the factors
/// (all zero except for Monte-Carlo).
#[derive(Debug, Clone, PartialEq)]
pub struct Evolved<T> {
    pub state: DensityMatrix<T>,
    pub std_error: Vec<f64>,
}

fn check_dims<T: Real>(rho0: &DensityMatrix<T>, spectrum: &EnergySpectrum<T>) -> Result<()> {
    if rho0.dim() != spectrum.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: state {} vs spectrum {}",
            rho0.dim(),
            spectrum.dim()
        )));
    }
    Ok(())
}

/// Applies `factor(omega[n][m])` to every coherence. The lower triangle uses
/// the conjugate of the upper-triangle factor, so Hermiticity is preserved
/// exactly.
pub fn apply_factors<T: Real>(
    rho0: &DensityMatrix<T>,
    table: &BohrFrequencyTable<T>,
    mut factor: impl FnMut(T) -> Result<(Complex<T>, f64)>,
) -> Result<Evolved<T>> {
    let n = rho0.dim();
    let mut out = rho0.entries().clone();
    let mut se = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (f, e) = factor(table.get(i, j))?;
            out[(i, j)] = rho0.get(i, j) * f;
            out[(j, i)] = rho0.get(j, i) * f.conj();
            let scale = rho0.get(i, j).norm().to_f64_lossy();
            se[i * n + j] = e * scale;
            se[j * n + i] = e * scale;
        }
    }
    Ok(Evolved { state: DensityMatrix::from_entries_unchecked(out), std_error: se })
}

/// Evolves `rho0` to time `t` and reports per-element standard errors.
pub fn evolve_with_error<T: Real>(
    rho0: &DensityMatrix<T>,
    spectrum: &EnergySpectrum<T>,
    params: &KernelParams<T>,
    t: T,
    method: EvolutionMethod,
) -> Result<Evolved<T>> {
    check_dims(rho0, spectrum)?;
    let source = FactorSource::new(method, params, t)?;
    let table = bohr_frequencies(spectrum);
    apply_factors(rho0, &table, |w| source.factor(w))
}

pub fn evolve<T: Real>(
    rho0: &DensityMatrix<T>,
    spectrum: &EnergySpectrum<T>,
    params: &KernelParams<T>,
    t: T,
    method: EvolutionMethod,
) -> Result<DensityMatrix<T>> {
    evolve_with_error(rho0, spectrum, params, t, method).map(|e| e.state)
}

/// The diagonal superoperator `rho -> factor ⊙ rho` of a method at time `t`,
/// exposed as a dense factor matrix.
pub fn factor_matrix<T: Real>(
    spectrum: &EnergySpectrum<T>,
    params: &KernelParams<T>,
    t: T,
    method: EvolutionMethod,
) -> Result<CMatrix<T>> {
    let source = FactorSource::new(method, params, t)?;
    let table = bohr_frequencies(spectrum);
    let n = table.dim();
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = Complex::one();
        for j in (i + 1)..n {
            let (f, _) = source.factor(table.get(i, j))?;
            m[(i, j)] = f;
            m[(j, i)] = f.conj();
        }
    }
    Ok(m)
}
