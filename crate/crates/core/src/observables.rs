//! Coarse-grained expectation values, the cronon-step Ehrenfest identity and
//! the generalized Tam–Mandelstam inequality.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{coarse_grain, KernelParams};
use crate::propagator::{evolve, unitary_factor, EvolutionMethod};
use crate::state::{bohr_frequencies, expectation, std_dev, DensityMatrix, EnergySpectrum, Observable};
use crate::{Complex, Real};

/// Time series of values produced by one evolution method.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T, V> {
    pub times: Vec<T>,
    pub values: Vec<V>,
    pub method: EvolutionMethod,
}

impl<T: Real, V> Trajectory<T, V> {
    pub fn new(times: Vec<T>, values: Vec<V>, method: EvolutionMethod) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::invalid("trajectory times and values differ in length"));
        }
        check_times(&times)?;
        Ok(Self { times, values, method })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &V)> {
        self.times.iter().zip(&self.values)
    }
}

/// Times must be finite, non-negative and strictly ascending.
pub fn check_times<T: Real>(times: &[T]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !(**t >= T::zero() && t.is_finite())) {
        return Err(Error::invalid(format!("times must be non-negative and finite, got {t}")));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("times must be strictly ascending"));
    }
    Ok(())
}

/// `<A>` along the coarse-grained evolution.
pub fn expectation_trajectory<T: Real>(
    rho0: &DensityMatrix<T>,
    a: &Observable<T>,
    spectrum: &EnergySpectrum<T>,
    params: &KernelParams<T>,
    times: &[T],
    method: EvolutionMethod,
) -> Result<Trajectory<T, T>> {
    check_times(times)?;
    let values = times
        .iter()
        .map(|&t| expectation(&evolve(rho0, spectrum, params, t, method)?, a))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(times.to_vec(), values, method)
}

/// Kernel average of the unitary expectation `Tr(U(t') rho0 U(t')† A)`,
/// computed by quadrature over the effective time instead of through the
/// closed-form factors.
pub fn coarse_grained_unitary_expectation<T: Real>(
    rho0: &DensityMatrix<T>,
    a: &Observable<T>,
    spectrum: &EnergySpectrum<T>,
    params: &KernelParams<T>,
    t: T,
    tol: f64,
) -> Result<T> {
    if rho0.dim() != a.dim() || rho0.dim() != spectrum.dim() {
        return Err(Error::invalid("dimension mismatch between state, observable and spectrum"));
    }
    if t.is_zero() {
        return expectation(rho0, a);
    }
    let table = bohr_frequencies(spectrum);
    let n = rho0.dim();
    let unitary_expectation = |tp: T| {
        let mut acc = Complex::<T>::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + rho0.get(i, j) * unitary_factor(table.get(i, j), tp) * a.entries()[(j, i)];
            }
        }
        Complex::new(acc.re, T::zero())
    };
    Ok(coarse_grain(params, t, unitary_expectation, tol)?.re)
}

fn closed_form_state<T: Real>(
    rho0: &DensityMatrix<T>,
    spectrum: &EnergySpectrum<T>,
    params: &KernelParams<T>,
    t: T,
) -> Result<DensityMatrix<T>> {
    evolve(rho0, spectrum, params, t, EvolutionMethod::ClosedForm)
}

/// Change of `<A>` over the last cronon together with the commutator term
/// `(i τ1/ħ) Tr(rho(t) [A, H])` that should cancel it.
fn cronon_difference<T: Real>(
    rho0: &DensityMatrix<T>,
    a: &Observable<T>,
    spectrum: &EnergySpectrum<T>,
    params: &KernelParams<T>,
    t: T,
) -> Result<(DensityMatrix<T>, T, Complex<T>)> {
    if !(t >= params.tau2) {
        return Err(Error::invalid(format!("t must be at least tau2 ({}), got {t}", params.tau2)));
    }
    if rho0.dim() != a.dim() || rho0.dim() != spectrum.dim() {
        return Err(Error::invalid("dimension mismatch between state, observable and spectrum"));
    }
    let now = closed_form_state(rho0, spectrum, params, t)?;
    let before = closed_form_state(rho0, spectrum, params, t - params.tau2)?;
    let delta = expectation(&now, a)? - expectation(&before, a)?;
    let h = spectrum.hamiltonian();
    let comm = a.entries().commutator(h.entries());
    let tr = now.entries().trace_product(&comm);
    let term = Complex::new(T::zero(), params.tau1 / spectrum.hbar()) * tr;
    Ok((now, delta, term))
}

/// `|ΔA + (iτ1/ħ) Tr(rho(t)[A,H])|` with `ΔA = A(t) - A(t - τ2)` on the
/// closed-form trajectory. Vanishes up to rounding because one cronon of the
/// closed form is exactly the finite-difference step.
pub fn ehrenfest_fd_residual<T: Real>(
    rho0: &DensityMatrix<T>,
    a: &Observable<T>,
    spectrum: &EnergySpectrum<T>,
    params: &KernelParams<T>,
    t: T,
) -> Result<T> {
    let (_, delta, term) = cronon_difference(rho0, a, spectrum, params, t)?;
    Ok((Complex::new(delta, T::zero()) + term).norm())
}

/// Tolerance scale `‖A‖ ‖H‖ / ħ` (spectral norms).
pub fn ehrenfest_scale<T: Real>(a: &Observable<T>, spectrum: &EnergySpectrum<T>) -> f64 {
    a.spectral_norm() * spectrum.max_abs_energy().to_f64_lossy() / spectrum.hbar().to_f64_lossy()
}

fn spectral_range<T: Real>(a: &Observable<T>) -> f64 {
    let ev = a.entries().hermitian_eigenvalues();
    ev.last().copied().unwrap_or(0.0) - ev.first().copied().unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TmReport<T> {
    /// `A(t) - A(t - τ2)`
    pub delta_a_bar: T,
    pub sigma_a: T,
    pub sigma_h: T,
    /// Intrinsic inner time `ħ / (2 σ(H))`.
    pub tau_e: T,
    /// `|ΔA| / σ(A)`
    pub lhs: T,
    /// `τ1 / τ_E`
    pub rhs: T,
    pub holds: bool,
}

/// Slack on the inequality comparison.
pub const TM_SLACK: f64 = 1e-12;

/// Generalized Tam–Mandelstam check at time `t`; both dispersions are taken
/// on the coarse-grained state at `t`.
pub fn tm_report<T: Real>(
    rho0: &DensityMatrix<T>,
    a: &Observable<T>,
    spectrum: &EnergySpectrum<T>,
    params: &KernelParams<T>,
    t: T,
) -> Result<TmReport<T>> {
    let (now, delta, _) = cronon_difference(rho0, a, spectrum, params, t)?;
    let sigma_h = std_dev(&now, &spectrum.hamiltonian())?;
    let sigma_a = std_dev(&now, a)?;
    // Dispersions at the rounding level of the second moment count as zero:
    // sqrt(eps)·‖A‖ from cancellation, relative to the eigenvalue spread.
    let floor = |op: &Observable<T>| T::lit(1e-6 * spectral_range(op) + 1e-7 * op.spectral_norm());
    if sigma_h <= floor(&spectrum.hamiltonian()) {
        return Err(Error::DegenerateInput(
            "sigma(H) vanishes on the evolved state; the inner time is undefined".into(),
        ));
    }
    if sigma_a <= floor(a) {
        return Err(Error::DegenerateInput(
            "sigma(A) vanishes on the evolved state; the ratio |ΔA|/sigma(A) is undefined".into(),
        ));
    }
    let tau_e = spectrum.hbar() / (T::lit(2.0) * sigma_h);
    let lhs = delta.abs() / sigma_a;
    let rhs = params.tau1 / tau_e;
    Ok(TmReport { delta_a_bar: delta, sigma_a, sigma_h, tau_e, lhs, rhs, holds: lhs <= rhs + T::lit(TM_SLACK) })
}
