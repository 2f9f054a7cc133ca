//! The Gamma-distributed effective-time kernel.
//!
//! For a laboratory time `t` the effective evolution time `t'` follows a Gamma
//! law with shape `k = t / tau2` and scale `tau1`:
//!
//! ```text
//! P(t, t') = (1/tau1) · e^{-t'/tau1} · (t'/tau1)^{k-1} / Γ(k)
//! ```
//!
//! Equivalently, the number of elementary evolution events in `[0, t]` is
//! Poisson distributed with mean `t / tau2`, each event advancing the state by
//! `tau1`.

pub mod quadrature;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::{Complex, Real};

pub use quadrature::QuadratureOutcome;

/// Default evaluation budget for [`coarse_grain`].
pub const DEFAULT_QUADRATURE_BUDGET: usize = 20_000;

/// Samples drawn per independent random stream in [`sample_effective_time`].
pub const SAMPLE_BLOCK: usize = 4096;

/// The two characteristic times of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelParams<T> {
    /// Width of each elementary evolution event.
    pub tau1: T,
    /// Mean spacing between events (the cronon).
    pub tau2: T,
}

impl<T: Real> KernelParams<T> {
    pub fn new(tau1: T, tau2: T) -> Result<Self> {
        if !(tau1 > T::zero() && tau1.is_finite()) {
            return Err(Error::invalid(format!("tau1 must be positive and finite, got {tau1}")));
        }
        if !(tau2 > T::zero() && tau2.is_finite()) {
            return Err(Error::invalid(format!("tau2 must be positive and finite, got {tau2}")));
        }
        Ok(Self { tau1, tau2 })
    }

    /// `tau1 = tau2 = tau`.
    pub fn symmetric(tau: T) -> Result<Self> {
        Self::new(tau, tau)
    }

    /// Set when `tau1 > tau2`. Allowed, but atypical: events are normally
    /// shorter than their spacing.
    pub fn ordering_advisory(&self) -> bool {
        self.tau1 > self.tau2
    }

    /// Gamma shape `t / tau2` (the mean number of events up to `t`).
    #[inline]
    pub fn shape(&self, t: T) -> T {
        t / self.tau2
    }
}

fn check_time<T: Real>(t: T) -> Result<()> {
    if !(t > T::zero() && t.is_finite()) {
        return Err(Error::invalid(format!("laboratory time must be positive, got {t}")));
    }
    Ok(())
}

fn ln_gamma_of<T: Real>(x: T) -> T {
    T::lit(ln_gamma(x.to_f64_lossy()))
}

/// Density of the effective time `tprime` at laboratory time `t`.
///
/// Returns `+inf` at `tprime = 0` when the shape is below one.
pub fn gamma_pdf<T: Real>(params: &KernelParams<T>, t: T, tprime: T) -> Result<T> {
    check_time(t)?;
    if !(tprime >= T::zero()) {
        return Err(Error::invalid(format!("effective time must be non-negative, got {tprime}")));
    }
    let k = params.shape(t);
    if tprime.is_zero() {
        return Ok(if k < T::one() {
            T::infinity()
        } else if k == T::one() {
            T::one() / params.tau1
        } else {
            T::zero()
        });
    }
    let x = tprime / params.tau1;
    let log_pdf = (k - T::one()) * x.ln() - x - ln_gamma_of(k) - params.tau1.ln();
    Ok(log_pdf.exp())
}

/// Mean, standard deviation and relative dispersion of the effective time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelMoments<T> {
    pub mean: T,
    pub sigma: T,
    pub relative_dispersion: T,
}

impl<T: Real> KernelMoments<T> {
    /// Second raw moment `mean^2 + sigma^2`.
    pub fn second_moment(&self) -> T {
        self.mean * self.mean + self.sigma * self.sigma
    }
}

pub fn kernel_moments<T: Real>(params: &KernelParams<T>, t: T) -> Result<KernelMoments<T>> {
    check_time(t)?;
    let mean = t * params.tau1 / params.tau2;
    let sigma = params.tau1 * (t / params.tau2).sqrt();
    Ok(KernelMoments { mean, sigma, relative_dispersion: (params.tau2 / t).sqrt() })
}

/// Probability of exactly `n` evolution events up to time `t`.
pub fn poisson_pmf<T: Real>(params: &KernelParams<T>, t: T, n: u64) -> Result<T> {
    check_time(t)?;
    let lambda = params.shape(t);
    if n == 0 {
        return Ok((-lambda).exp());
    }
    let nf = T::lit(n as f64);
    let log_p = nf * lambda.ln() - lambda - ln_gamma_of(nf + T::one());
    Ok(log_p.exp())
}

/// Seeded Monte-Carlo draws of the effective time.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    pub values: Vec<T>,
    pub seed: u64,
    pub count: usize,
}

impl<T: Real> SampleSet<T> {
    pub fn mean(&self) -> f64 {
        self.values.iter().map(|v| v.to_f64_lossy()).sum::<f64>() / self.count as f64
    }

    /// Unbiased sample standard deviation.
    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v.to_f64_lossy() - m).powi(2)).sum();
        (ss / (self.count.saturating_sub(1).max(1)) as f64).sqrt()
    }

    /// Standard error of the sample mean.
    pub fn std_error(&self) -> f64 {
        self.std_dev() / (self.count as f64).sqrt()
    }

    /// Sample mean of `f(t')` with its standard error. For complex `f` the
    /// error is `sqrt(mean |f - mean|^2 / count)`.
    pub fn average<F: Fn(T) -> Complex<T> + Sync>(&self, f: F) -> (Complex<T>, f64) {
        let n = self.count as f64;
        let (sum_re, sum_im) = self
            .values
            .iter()
            .map(|&v| f(v))
            .fold((0.0f64, 0.0f64), |(r, i), z| (r + z.re.to_f64_lossy(), i + z.im.to_f64_lossy()));
        let (mr, mi) = (sum_re / n, sum_im / n);
        let ss: f64 = self
            .values
            .iter()
            .map(|&v| {
                let z = f(v);
                (z.re.to_f64_lossy() - mr).powi(2) + (z.im.to_f64_lossy() - mi).powi(2)
            })
            .sum();
        let se = (ss / (n - 1.0).max(1.0) / n).sqrt();
        (Complex::new(T::lit(mr), T::lit(mi)), se)
    }
}

/// Draws `count` effective times for laboratory time `t`.
///
/// Uses the Marsaglia–Tsang Gamma sampler from `rand_distr` (with the
/// `U^{1/k}` boost for shapes below one) on ChaCha8 streams. Sample `i` comes
/// from stream `i / SAMPLE_BLOCK` of the generator seeded with `seed`, so the
/// output is identical however the blocks are scheduled across threads.
pub fn sample_effective_time<T: Real>(params: &KernelParams<T>, t: T, seed: u64, count: usize) -> Result<SampleSet<T>> {
    check_time(t)?;
    if count == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let shape = params.shape(t).to_f64_lossy();
    let scale = params.tau1.to_f64_lossy();
    let law = Gamma::new(shape, scale).map_err(|e| Error::invalid(format!("gamma law: {e}")))?;
    let blocks = count.div_ceil(SAMPLE_BLOCK);
    let values: Vec<T> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let n = SAMPLE_BLOCK.min(count - b * SAMPLE_BLOCK);
            (0..n).map(move |_| T::lit(law.sample(&mut rng))).collect::<Vec<_>>()
        })
        .collect();
    Ok(SampleSet { values, seed, count })
}

/// Smallest `x` (in units of tau1) with upper-tail Gamma mass below `mass`.
fn truncation_point(shape: f64, mass: f64) -> f64 {
    let mut x = shape + 4.0 * shape.sqrt() + 4.0;
    while gamma_ur(shape, x) > mass {
        x *= 1.25;
    }
    x
}

/// Kernel mass above `tprime`.
pub fn upper_tail_mass<T: Real>(params: &KernelParams<T>, t: T, tprime: T) -> Result<f64> {
    check_time(t)?;
    let x = (tprime / params.tau1).to_f64_lossy();
    Ok(if x <= 0.0 { 1.0 } else { gamma_ur(params.shape(t).to_f64_lossy(), x) })
}

/// An effective time beyond which less than `tail` of the kernel mass lies.
pub fn support_bound<T: Real>(params: &KernelParams<T>, t: T, tail: f64) -> Result<T> {
    check_time(t)?;
    if !(tail > 0.0 && tail < 1.0) {
        return Err(Error::invalid(format!("tail mass must lie in (0, 1), got {tail}")));
    }
    Ok(params.tau1 * T::lit(truncation_point(params.shape(t).to_f64_lossy(), tail)))
}

/// Coarse-grain average `∫_0^∞ P(t,t') f(t') dt'`.
///
/// The tail beyond the point where the kernel mass drops below `tol/10` is
/// dropped. For shapes `k < 1` the integration variable is `u = (t'/tau1)^k`,
/// which turns the `t'^{k-1}` endpoint singularity into the bounded integrand
/// `e^{-u^{1/k}} f(tau1 u^{1/k}) / Γ(k+1)`.
pub fn coarse_grain<T, F>(params: &KernelParams<T>, t: T, f: F, tol: f64) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    coarse_grain_detailed(params, t, f, tol, DEFAULT_QUADRATURE_BUDGET).map(|o| o.value)
}

/// [`coarse_grain`] with an explicit evaluation budget, returning the error
/// estimate and evaluation count.
pub fn coarse_grain_detailed<T, F>(
    params: &KernelParams<T>,
    t: T,
    f: F,
    tol: f64,
    max_evals: usize,
) -> Result<QuadratureOutcome<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    check_time(t)?;
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let k = params.shape(t);
    let tau1 = params.tau1;
    // Tail cut is kept far below tol so polynomially growing test integrands
    // (moments) lose nothing measurable either.
    let tail = (tol / 10.0).min(1e-15);
    let x_max = truncation_point(k.to_f64_lossy(), tail);
    let quad_tol = 0.9 * tol;
    let panels = 16;
    if k < T::one() {
        let inv_k = T::one() / k;
        let log_norm = ln_gamma_of(k + T::one());
        let u_max = T::lit(x_max).powf(k);
        let g = |u: T| {
            let x = u.powf(inv_k);
            f(tau1 * x) * (-x - log_norm).exp()
        };
        quadrature::integrate(g, T::zero(), u_max, quad_tol, panels, max_evals)
    } else {
        let log_norm = ln_gamma_of(k);
        let km1 = k - T::one();
        let g = |x: T| {
            let w = if x.is_zero() {
                if km1.is_zero() { T::one() } else { T::zero() }
            } else {
                (km1 * x.ln() - x - log_norm).exp()
            };
            f(tau1 * x) * w
        };
        quadrature::integrate(g, T::zero(), T::lit(x_max), quad_tol, panels, max_evals)
    }
}
