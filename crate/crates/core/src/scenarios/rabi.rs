//! Two-level atom in a resonant cavity with `n` photons.
//!
//! The dynamics are modelled in the dressed-state picture: two levels split
//! by the Rabi frequency `Ω = g √(n+1)`, so that the unitary population
//! difference is `d(t) = cos Ωt` and the coarse-grained one is
//! `Re[factor(Ω, t)] = e^{-γt} cos νt`.

use crate::error::{Error, Result};
use crate::kernel::KernelParams;
use crate::observables::{check_times, Trajectory};
use crate::propagator::{decay_rate, frequency_shift, propagator_factor, EvolutionMethod};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiParams<T> {
    /// One-photon Rabi frequency.
    pub g: T,
    pub n_photons: u32,
    pub kernel: KernelParams<T>,
}

impl<T: Real> RabiParams<T> {
    pub fn new(g: T, n_photons: u32, kernel: KernelParams<T>) -> Result<Self> {
        if !(g > T::zero() && g.is_finite()) {
            return Err(Error::invalid(format!("coupling g must be positive, got {g}")));
        }
        Ok(Self { g, n_photons, kernel })
    }

    /// `Ω = g √(n+1)`
    pub fn rabi_frequency(&self) -> T {
        self.g * T::lit(f64::from(self.n_photons) + 1.0).sqrt()
    }

    /// `γ(n) = ln(1 + Ω²τ1²) / (2τ2)`
    pub fn damping_rate(&self) -> T {
        decay_rate(self.rabi_frequency(), &self.kernel)
    }

    pub fn frequency(&self) -> T {
        frequency_shift(self.rabi_frequency(), &self.kernel)
    }

    pub fn envelope(&self, t: T) -> T {
        (-self.damping_rate() * t).exp()
    }
}

/// Coarse-grained population difference `d(t)`.
pub fn rabi_population<T: Real>(params: &RabiParams<T>, times: &[T]) -> Result<Trajectory<T, T>> {
    check_times(times)?;
    let omega = params.rabi_frequency();
    let values = times.iter().map(|&t| propagator_factor(omega, &params.kernel, t).re).collect();
    Trajectory::new(times.to_vec(), values, EvolutionMethod::ClosedForm)
}

/// Exponential decay rate of the local maxima of `|d(t)|`.
///
/// Peaks are located on the sampled series and refined by a parabola through
/// the three samples around each maximum; the rate is the negated slope of a
/// least-squares line through `(t_peak, ln |d_peak|)`.
pub fn fit_envelope_rate<T: Real>(times: &[T], values: &[T]) -> Result<T> {
    if times.len() != values.len() {
        return Err(Error::invalid("times and values differ in length"));
    }
    let t: Vec<f64> = times.iter().map(|v| v.to_f64_lossy()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.to_f64_lossy().abs()).collect();
    let mut peaks = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        if y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > 0.0 {
            // Vertex of the parabola through three equally spaced samples.
            let h = t[i + 1] - t[i];
            let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
            let curv = a - 2.0 * b + c;
            let (dt, peak) = if curv < 0.0 {
                let s = 0.5 * (a - c) / curv;
                (s * h, b - 0.25 * (a - c) * s)
            } else {
                (0.0, b)
            };
            peaks.push((t[i] + dt, peak.ln()));
        }
    }
    if peaks.len() < 2 {
        return Err(Error::DegenerateInput(format!("need at least two envelope peaks, found {}", peaks.len())));
    }
    let n = peaks.len() as f64;
    let mx = peaks.iter().map(|p| p.0).sum::<f64>() / n;
    let my = peaks.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = peaks.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = peaks.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(T::lit(-sxy / sxx))
}

/// Uniform time grid covering `periods` Rabi periods with `per_period` samples each.
pub fn rabi_time_grid<T: Real>(params: &RabiParams<T>, periods: usize, per_period: usize) -> Vec<T> {
    let period = T::lit(2.0) * T::PI() / params.frequency();
    let n = periods * per_period;
    (0..=n).map(|i| period * T::from_usize_lossy(i) / T::from_usize_lossy(per_period)).collect()
}
