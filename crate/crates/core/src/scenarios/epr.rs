//! Spin singlet whose partners cross a magnetic field region.
//!
//! Basis ordering is `(++, +-, -+, --)`. Only the `+-`/`-+` coherence of the
//! singlet is non-zero; it evolves at the Larmor frequency `ω0`, so
//!
//! ```text
//! rho(t) = rho_D - [f |+-><-+| + f* |-+><+-|] / 2,   f = e^{-(γ + iν) t}
//! ```
//!
//! with `rho_D = diag(0, 1/2, 1/2, 0)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::kernel::KernelParams;
use crate::matrix::CMatrix;
use crate::propagator::propagator_factor;
use crate::state::{DensityMatrix, EnergySpectrum};
use crate::Real;

/// Unit-vector tolerance for measurement axes.
pub const AXIS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprParams<T> {
    /// Larmor frequency in the field region.
    pub omega0: T,
    pub flight_length: T,
    pub speed: T,
    pub kernel: KernelParams<T>,
}

impl<T: Real> EprParams<T> {
    pub fn new(omega0: T, flight_length: T, speed: T, kernel: KernelParams<T>) -> Result<Self> {
        if !omega0.is_finite() {
            return Err(Error::invalid("omega0 must be finite"));
        }
        if !(flight_length > T::zero() && flight_length.is_finite()) {
            return Err(Error::invalid(format!("flight length must be positive, got {flight_length}")));
        }
        if !(speed > T::zero() && speed.is_finite()) {
            return Err(Error::invalid(format!("speed must be positive, got {speed}")));
        }
        Ok(Self { omega0, flight_length, speed, kernel })
    }

    /// `L / v`
    pub fn flight_time(&self) -> T {
        self.flight_length / self.speed
    }

    /// Four-level spectrum (hbar = 1) whose `+-`/`-+` Bohr frequency is `ω0`.
    pub fn spectrum(&self) -> EnergySpectrum<T> {
        let h = self.omega0 / T::lit(2.0);
        EnergySpectrum::with_unit_hbar(vec![T::zero(), h, -h, T::zero()]).expect("finite energies")
    }
}

/// Singlet `(|+-> - |-+>)/√2` as a density matrix.
pub fn singlet<T: Real>() -> DensityMatrix<T> {
    let half = Complex::new(T::lit(0.5), T::zero());
    let mut m = CMatrix::zeros(4);
    m[(1, 1)] = half;
    m[(2, 2)] = half;
    m[(1, 2)] = -half;
    m[(2, 1)] = -half;
    DensityMatrix::from_entries_unchecked(m)
}

pub fn epr_state<T: Real>(params: &EprParams<T>, t: T) -> Result<DensityMatrix<T>> {
    if !(t >= T::zero() && t.is_finite()) {
        return Err(Error::invalid(format!("time must be non-negative, got {t}")));
    }
    let f = propagator_factor(params.omega0, &params.kernel, t);
    let half = T::lit(0.5);
    let mut m = CMatrix::zeros(4);
    m[(1, 1)] = Complex::new(half, T::zero());
    m[(2, 2)] = Complex::new(half, T::zero());
    m[(1, 2)] = -f * half;
    m[(2, 1)] = -f.conj() * half;
    Ok(DensityMatrix::from_entries_unchecked(m))
}

/// `σ·n` for a unit axis.
pub fn spin_along<T: Real>(axis: [T; 3]) -> CMatrix<T> {
    let [x, y, z] = axis;
    CMatrix::from_row_major(
        2,
        vec![
            Complex::new(z, T::zero()),
            Complex::new(x, -y),
            Complex::new(x, y),
            Complex::new(-z, T::zero()),
        ],
    )
}

fn check_axis<T: Real>(axis: [T; 3]) -> Result<()> {
    let norm = axis.iter().fold(T::zero(), |a, c| a + *c * *c).sqrt();
    if !((norm - T::one()).abs().to_f64_lossy() <= AXIS_TOL) {
        return Err(Error::invalid(format!("measurement axis must be a unit vector (norm {norm})")));
    }
    Ok(())
}

/// `E(a, b) = Tr[rho(t) (σ·a ⊗ σ·b)]`
pub fn epr_correlation<T: Real>(params: &EprParams<T>, t: T, a: [T; 3], b: [T; 3]) -> Result<T> {
    check_axis(a)?;
    check_axis(b)?;
    let rho = epr_state(params, t)?;
    let op = spin_along(a).kron(&spin_along(b));
    Ok(rho.entries().trace_product(&op).re)
}

/// `<S| rho(t) |S>` for the singlet `|S>`.
pub fn singlet_fidelity<T: Real>(params: &EprParams<T>, t: T) -> Result<T> {
    let rho = epr_state(params, t)?;
    let s = singlet::<T>();
    Ok(rho.entries().trace_product(s.entries()).re)
}

pub fn unit_x<T: Real>() -> [T; 3] {
    [T::one(), T::zero(), T::zero()]
}

pub fn unit_y<T: Real>() -> [T; 3] {
    [T::zero(), T::one(), T::zero()]
}

pub fn unit_z<T: Real>() -> [T; 3] {
    [T::zero(), T::zero(), T::one()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::{decay_rate, evolve, EvolutionMethod};
    use crate::state::validate_density;

    fn params(omega0: f64, tau1: f64, tau2: f64) -> EprParams<f64> {
        EprParams::new(omega0, 1.0, 1.0, KernelParams::new(tau1, tau2).unwrap()).unwrap()
    }

    #[test]
    fn starts_as_singlet() {
        let p = params(3.0, 0.2, 1.0);
        assert_eq!(epr_state(&p, 0.0).unwrap(), singlet());
        assert!((singlet_fidelity(&p, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let e = epr_correlation(&p, 0.0, unit_x(), unit_x()).unwrap();
        assert!((e + 1.0).abs() < 1e-15);
    }

    #[test]
    fn zz_correlation_is_frozen() {
        let p = params(3.0, 0.2, 1.0);
        for t in [0.0, 0.7, 5.0, 100.0] {
            assert!((epr_correlation(&p, t, unit_z(), unit_z()).unwrap() + 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn coherence_dies_after_ten_decay_times() {
        let p = params(2.0, 0.5, 1.0);
        let t = 10.0 / decay_rate(2.0, &p.kernel);
        let rho = epr_state(&p, t).unwrap();
        assert!(rho.get(1, 2).norm() <= 0.5 * (-10.0f64).exp() * (1.0 + 1e-12));
        assert!(validate_density(&rho, 1e-12).is_valid());
    }

    #[test]
    fn matches_generic_evolution() {
        let p = params(1.7, 0.3, 0.6);
        for t in [0.0, 0.4, 3.0] {
            let direct = epr_state(&p, t).unwrap();
            let generic = evolve(&singlet(), &p.spectrum(), &p.kernel, t, EvolutionMethod::ClosedForm).unwrap();
            assert!(direct.entries().max_abs_diff(generic.entries()) < 1e-15);
        }
    }

    #[test]
    fn unitary_limit_recovers_singlet_after_full_turn() {
        let w = 2.0 * std::f64::consts::PI;
        let p = params(w, 1e-7, 1e-7);
        let f = singlet_fidelity(&p, 1.0).unwrap();
        assert!(f > 1.0 - 1e-6, "fidelity {f}");
    }

    #[test]
    fn rejects_non_unit_axes() {
        let p = params(1.0, 0.1, 1.0);
        assert!(epr_correlation(&p, 1.0, [1.0, 1.0, 0.0], unit_z()).is_err());
        assert!(EprParams::new(1.0, 0.0, 1.0, p.kernel).is_err());
    }
}
