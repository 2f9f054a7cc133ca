pub mod check;
pub mod evolve;
pub mod kernel;
pub mod scenario;
pub mod sweep;
