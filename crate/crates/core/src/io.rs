//! JSON file formats for spectra and states.
//!
//! Spectrum: `{"hbar": 1.0, "energies": [0.0, 1.0]}` (`hbar` defaults to 1).
//! State: `{"dim": 2, "re": [[..], [..]], "im": [[..], [..]]}`, row-major,
//! both matrices `dim × dim`. Multi-spin states use the basis ordering
//! `(++, +-, -+, --)`.

use std::fs;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::state::{DensityMatrix, EnergySpectrum};
use crate::Real;

fn default_hbar() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumFile {
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl SpectrumFile {
    pub fn into_spectrum<T: Real>(self) -> Result<EnergySpectrum<T>> {
        EnergySpectrum::new(self.energies.into_iter().map(T::lit).collect(), T::lit(self.hbar))
    }

    pub fn from_spectrum<T: Real>(spectrum: &EnergySpectrum<T>) -> Self {
        Self {
            hbar: spectrum.hbar().to_f64_lossy(),
            energies: spectrum.energies().iter().map(|e| e.to_f64_lossy()).collect(),
        }
    }
}

impl StateFile {
    /// Entries as a matrix, without checking density-matrix invariants.
    pub fn to_matrix<T: Real>(&self) -> Result<CMatrix<T>> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::invalid("state dimension must be positive"));
        }
        let shape_ok = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|row| row.len() == n);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::invalid(format!("state matrices must be {n}x{n}")));
        }
        Ok(CMatrix::from_fn(n, |i, j| Complex::new(T::lit(self.re[i][j]), T::lit(self.im[i][j]))))
    }

    pub fn into_density<T: Real>(self) -> Result<DensityMatrix<T>> {
        DensityMatrix::try_new(self.to_matrix()?)
    }

    pub fn from_matrix<T: Real>(m: &CMatrix<T>) -> Self {
        let n = m.dim();
        let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re.to_f64_lossy()).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| m[(i, j)].im.to_f64_lossy()).collect()).collect();
        Self { dim: n, re, im }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_spectrum<T: Real>(json: &str) -> Result<EnergySpectrum<T>> {
    let file: SpectrumFile =
        serde_json::from_str(json).map_err(|e| Error::invalid(format!("malformed spectrum JSON: {e}")))?;
    file.into_spectrum()
}

pub fn parse_state<T: Real>(json: &str) -> Result<DensityMatrix<T>> {
    let file: StateFile =
        serde_json::from_str(json).map_err(|e| Error::invalid(format!("malformed state JSON: {e}")))?;
    file.into_density()
}

pub fn read_spectrum<T: Real>(path: impl AsRef<Path>) -> Result<EnergySpectrum<T>> {
    parse_spectrum(&read(path.as_ref())?)
}

pub fn read_state<T: Real>(path: impl AsRef<Path>) -> Result<DensityMatrix<T>> {
    parse_state(&read(path.as_ref())?)
}

pub fn state_to_json<T: Real>(rho: &DensityMatrix<T>) -> String {
    serde_json::to_string(&StateFile::from_matrix(rho.entries())).expect("state serializes")
}

pub fn spectrum_to_json<T: Real>(spectrum: &EnergySpectrum<T>) -> String {
    serde_json::to_string(&SpectrumFile::from_spectrum(spectrum)).expect("spectrum serializes")
}
