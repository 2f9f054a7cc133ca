//! Amplitude `<a>(t)` of a single field mode.

use crate::error::{Error, Result};
use crate::kernel::KernelParams;
use crate::observables::{check_times, Trajectory};
use crate::propagator::{EvolutionMethod, FactorSource};
use crate::{Complex, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams<T> {
    /// Mode frequency.
    pub omega: T,
    /// Initial amplitude `<a>_0`.
    pub a0: Complex<T>,
    pub kernel: KernelParams<T>,
}

impl<T: Real> OscillatorParams<T> {
    pub fn new(omega: T, a0: Complex<T>, kernel: KernelParams<T>) -> Result<Self> {
        if !(omega > T::zero() && omega.is_finite()) {
            return Err(Error::invalid(format!("mode frequency must be positive, got {omega}")));
        }
        Ok(Self { omega, a0, kernel })
    }
}

/// `<a>(t) = a0 · factor(ω, t)` for any evolution method.
pub fn oscillator_amplitude_by<T: Real>(
    params: &OscillatorParams<T>,
    times: &[T],
    method: EvolutionMethod,
) -> Result<Trajectory<T, Complex<T>>> {
    check_times(times)?;
    let values = times
        .iter()
        .map(|&t| {
            let source = FactorSource::new(method, &params.kernel, t)?;
            Ok(params.a0 * source.factor(params.omega)?.0)
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(times.to_vec(), values, method)
}

/// Closed-form amplitude `a0 · e^{-(γ + iν) t}`.
pub fn oscillator_amplitude<T: Real>(params: &OscillatorParams<T>, times: &[T]) -> Result<Trajectory<T, Complex<T>>> {
    oscillator_amplitude_by(params, times, EvolutionMethod::ClosedForm)
}
