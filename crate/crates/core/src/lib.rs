//! Coarse-grained ("intrinsic decoherence") time evolution of finite-dimensional
//! density matrices.
//!
//! Unitary evolution is averaged over a Gamma-distributed effective time with
//! two characteristic times: `tau1`, the width of each elementary evolution
//! event, and `tau2`, the mean spacing between events. In the energy eigenbasis
//! every map in this crate acts elementwise on the density matrix, so the whole
//! dynamics reduces to scalar factors of the Bohr frequencies.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64` for everyday use.

pub mod error;
pub mod invariants;
pub mod io;
pub mod kernel;
pub mod matrix;
pub mod observables;
pub mod propagator;
pub mod scalar;
pub mod scenarios;
pub mod state;

pub use error::{Error, Result};
pub use kernel::{KernelMoments, KernelParams, SampleSet};
pub use matrix::CMatrix;
pub use observables::{TmReport, Trajectory};
pub use propagator::{DecoherenceRates, EvolutionMethod};
pub use scalar::Real;
pub use state::{BohrFrequencyTable, DensityMatrix, EnergySpectrum, Observable};

/// Complex scalar used throughout.
pub type Complex<T> = num_complex::Complex<T>;

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;

pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type Observable64 = Observable<f64>;
pub type Observable32 = Observable<f32>;
pub type EnergySpectrum64 = EnergySpectrum<f64>;
pub type EnergySpectrum32 = EnergySpectrum<f32>;
pub type KernelParams64 = KernelParams<f64>;
pub type KernelParams32 = KernelParams<f32>;
pub type DecoherenceRates64 = DecoherenceRates<f64>;
pub type DecoherenceRates32 = DecoherenceRates<f32>;
