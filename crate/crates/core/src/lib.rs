//! Decay of a two-level system coupled to a bath of Dirac particles: memory
//! kernels, time-domain and Laplace-domain solvers, pole and branch-cut
//! decomposition, short-time series, environment wave functions, an SSH
//! lattice realization and Markovianity diagnostics.

pub mod branch_cut;
pub mod discretized;
pub mod error;
pub mod kernel;
pub mod markov;
pub mod model;
pub mod poles;
pub mod quad;
pub mod resolvent;
pub mod short_time;
pub mod ssh;
pub mod volterra;
pub mod wavefunction;

pub use error::{DecayError, Result};
pub use model::{ComplexSeries, Cutoff, ModelParams, Picture, Regime, Scaling, TimeGrid};
