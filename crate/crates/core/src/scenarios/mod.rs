//! Closed-form evaluators for four physical settings of the coarse-grained
//! dynamics. Every decaying quantity is a [`propagator_factor`] evaluation at
//! the relevant Bohr frequency.
//!
//! [`propagator_factor`]: crate::propagator::propagator_factor

pub mod cat;
pub mod epr;
pub mod oscillator;
pub mod rabi;

pub use cat::{cat_interference, free_particle_spread, interference_frequency, CatParams, CatSnapshot};
pub use epr::{epr_correlation, epr_state, singlet_fidelity, EprParams};
pub use oscillator::{oscillator_amplitude, OscillatorParams};
pub use rabi::{fit_envelope_rate, rabi_population, RabiParams};
