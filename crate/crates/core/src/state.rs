//! States, observables and spectra in the energy eigenbasis.
//!
//! Every propagator in this crate is diagonal in this basis: the coherence
//! `rho[n][m]` evolves only through the Bohr frequency `omega[n][m]`.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::{Complex, Real};

/// Hermiticity tolerance for [`DensityMatrix`] and [`Observable`].
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Energy eigenvalues `E_n` together with the value of hbar.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySpectrum<T> {
    energies: Vec<T>,
    hbar: T,
}

impl<T: Real> EnergySpectrum<T> {
    pub fn new(energies: Vec<T>, hbar: T) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::invalid("spectrum must contain at least one level"));
        }
        if let Some(e) = energies.iter().find(|e| !e.is_finite()) {
            return Err(Error::invalid(format!("non-finite energy {e}")));
        }
        if !(hbar > T::zero()) || !hbar.is_finite() {
            return Err(Error::invalid(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { energies, hbar })
    }

    /// Spectrum in units where hbar = 1.
    pub fn with_unit_hbar(energies: Vec<T>) -> Result<Self> {
        Self::new(energies, T::one())
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// The Hamiltonian as a diagonal observable.
    pub fn hamiltonian(&self) -> Observable<T> {
        Observable { entries: CMatrix::from_real_diagonal(&self.energies) }
    }

    /// Largest |E_n|, the spectral norm of the Hamiltonian.
    pub fn max_abs_energy(&self) -> T {
        self.energies.iter().fold(T::zero(), |a, e| a.max(e.abs()))
    }
}

/// `omega[n][m] = (E_n - E_m) / hbar`.
#[derive(Debug, Clone, PartialEq)]
pub struct BohrFrequencyTable<T> {
    dim: usize,
    omega: Vec<T>,
}

impl<T: Real> BohrFrequencyTable<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, n: usize, m: usize) -> T {
        self.omega[n * self.dim + m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.omega.chunks(self.dim)
    }
}

pub fn bohr_frequencies<T: Real>(spectrum: &EnergySpectrum<T>) -> BohrFrequencyTable<T> {
    let e = spectrum.energies();
    let dim = e.len();
    let mut omega = vec![T::zero(); dim * dim];
    for n in 0..dim {
        for m in (n + 1)..dim {
            let w = (e[n] - e[m]) / spectrum.hbar();
            omega[n * dim + m] = w;
            omega[m * dim + n] = -w;
        }
    }
    BohrFrequencyTable { dim, omega }
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
///
/// Constructors that accept arbitrary entries validate them; maps inside the
/// crate that provably preserve the invariants use the unchecked path.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    entries: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates at the type tolerances.
    pub fn try_new(entries: CMatrix<T>) -> Result<Self> {
        let report = validate_matrix(&entries, None);
        if report.is_valid() {
            Ok(Self { entries })
        } else {
            Err(Error::invalid(format!("not a density matrix: {report}")))
        }
    }

    /// Wraps entries without checking. Use [`validate_density`] to inspect
    /// the result when the source is untrusted.
    pub fn from_entries_unchecked(entries: CMatrix<T>) -> Self {
        Self { entries }
    }

    /// The maximally mixed state `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { entries: CMatrix::identity(dim).scale(T::one() / T::from_usize_lossy(dim)) }
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn entries(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix<T> {
        self.entries
    }

    #[inline]
    pub fn get(&self, n: usize, m: usize) -> Complex<T> {
        self.entries[(n, m)]
    }

    /// Population of level `n`.
    pub fn population(&self, n: usize) -> T {
        self.entries[(n, n)].re
    }
}

/// A Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable<T> {
    entries: CMatrix<T>,
}

impl<T: Real> Observable<T> {
    pub fn new(entries: CMatrix<T>) -> Result<Self> {
        let err = entries.hermiticity_error().to_f64_lossy();
        if !(err <= HERMITICITY_TOL) {
            return Err(Error::invalid(format!("observable not Hermitian (deviation {err:e})")));
        }
        Ok(Self { entries })
    }

    pub fn diagonal(values: &[T]) -> Self {
        Self { entries: CMatrix::from_real_diagonal(values) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: CMatrix::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn entries(&self) -> &CMatrix<T> {
        &self.entries
    }

    /// Real linear combination `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        Self { entries: &self.entries.scale(a) + &other.entries.scale(b) }
    }

    pub fn spectral_norm(&self) -> f64 {
        self.entries.hermitian_norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantKind {
    Hermiticity,
    Trace,
    Positivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub kind: InvariantKind,
    /// Size of the breach: max Hermitian deviation, |Tr - 1|, or minus the
    /// smallest eigenvalue.
    pub magnitude: f64,
}

/// Violated density-matrix invariants; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub min_eigenvalue: f64,
    pub trace_error: f64,
    pub hermiticity_error: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violation(&self, kind: InvariantKind) -> Option<&Violation> {
        self.violations.iter().find(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> =
            self.violations.iter().map(|v| format!("{:?} violated by {:e}", v.kind, v.magnitude)).collect();
        write!(f, "{}", parts.join("; "))
    }
}

fn validate_matrix<T: Real>(m: &CMatrix<T>, tol: Option<f64>) -> ValidationReport {
    let (herm_tol, trace_tol, pos_tol) = match tol {
        Some(t) => (t, t, t),
        None => (HERMITICITY_TOL, TRACE_TOL, POSITIVITY_TOL),
    };
    let mut report = ValidationReport::default();
    if !m.is_finite() {
        report.violations.push(Violation { kind: InvariantKind::Hermiticity, magnitude: f64::INFINITY });
        report.hermiticity_error = f64::INFINITY;
        report.trace_error = f64::INFINITY;
        report.min_eigenvalue = f64::NAN;
        return report;
    }
    let herm = m.hermiticity_error().to_f64_lossy();
    report.hermiticity_error = herm;
    if herm > herm_tol {
        report.violations.push(Violation { kind: InvariantKind::Hermiticity, magnitude: herm });
    }
    let tr = m.trace();
    let trace_err = (tr - Complex::new(T::one(), T::zero())).norm().to_f64_lossy();
    report.trace_error = trace_err;
    if trace_err > trace_tol {
        report.violations.push(Violation { kind: InvariantKind::Trace, magnitude: trace_err });
    }
    let lambda_min = m.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
    report.min_eigenvalue = lambda_min;
    if lambda_min < -pos_tol {
        report.violations.push(Violation { kind: InvariantKind::Positivity, magnitude: -lambda_min });
    }
    report
}

/// Checks the three density-matrix invariants at a common tolerance.
pub fn validate_density<T: Real>(rho: &DensityMatrix<T>, tol: f64) -> ValidationReport {
    validate_matrix(&rho.entries, Some(tol))
}

/// `|psi><psi|` for the normalized input.
pub fn make_density_from_pure<T: Real>(amplitudes: &[Complex<T>]) -> Result<DensityMatrix<T>> {
    if amplitudes.is_empty() {
        return Err(Error::invalid("empty amplitude vector"));
    }
    if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("non-finite amplitude"));
    }
    let norm_sqr = amplitudes.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    if norm_sqr.is_zero() {
        return Err(Error::invalid("zero vector cannot be normalized"));
    }
    let norm = norm_sqr.sqrt();
    let psi: Vec<Complex<T>> = amplitudes.iter().map(|z| z / norm).collect();
    let mut m = CMatrix::outer(&psi, &psi);
    // Diagonal is real by construction; strip the rounding residue.
    for i in 0..m.dim() {
        m[(i, i)].im = T::zero();
    }
    Ok(DensityMatrix { entries: m })
}

fn check_dims<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<()> {
    if rho.dim() != a.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: state {} vs observable {}",
            rho.dim(),
            a.dim()
        )));
    }
    Ok(())
}

/// Tr(rho A). The imaginary residue is discarded.
pub fn expectation<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<T> {
    check_dims(rho, a)?;
    Ok(rho.entries.trace_product(&a.entries).re)
}

/// Tr(rho A^2) - Tr(rho A)^2, clamped at zero for tiny negative rounding.
pub fn variance<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<T> {
    check_dims(rho, a)?;
    let mean = rho.entries.trace_product(&a.entries).re;
    let a2 = &a.entries * &a.entries;
    let second = rho.entries.trace_product(&a2).re;
    let v = second - mean * mean;
    Ok(if v < T::zero() && v > -T::lit(1e-12) { T::zero() } else { v })
}

/// Standard deviation sigma(A) on `rho`.
pub fn std_dev<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<T> {
    Ok(variance(rho, a)?.max(T::zero()).sqrt())
}

pub fn diagonal_part<T: Real>(rho: &DensityMatrix<T>) -> DensityMatrix<T> {
    let entries = rho.entries.map_indexed(|i, j, z| if i == j { z } else { Complex::zero() });
    DensityMatrix { entries }
}
