//! Metaplectic Wigner distributions on discrete grids.
//!
//! The crate covers symplectic matrix algebra, metaplectic operators written
//! as generator programs, the Cohen-class / shift-invertibility / spectrogram
//! classification of 4d×4d symplectic matrices, closed-form Cohen kernels,
//! an FFT engine for time-frequency representations and their quantizations,
//! and a verification harness tying the identities to numerics.

pub mod classify;
pub mod engine;
pub mod error;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod program;
pub mod quant;
pub mod verify;

pub use classify::{CohenReport, SpectrogramReport, WindowSpec};
pub use engine::{DiscreteSignal, Grid1D, TfGrid};
pub use error::{Error, Result};
pub use kernels::ChirpDelta;
pub use linalg::{BlockMatrix4d, Mat, SymEig, SymplecticMatrix};
pub use num_complex::Complex64;
pub use program::{GeneratorStep, MetaplecticProgram};
pub use verify::{run_suite, SuiteReport};
