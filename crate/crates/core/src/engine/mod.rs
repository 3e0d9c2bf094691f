//! Grid discretization, FFT-based time-frequency representations and
//! execution of metaplectic programs. Signals are one-dimensional; the
//! time-frequency plane is the corresponding square lattice.

mod exec;
pub mod fft;
mod grid;
mod tf;
mod tfgrid;

pub use exec::{
    execute_adjoint, execute_on_signal, execute_program, metaplectic_spectrogram, metaplectic_wigner,
    signal_field,
};
pub use grid::{lp_norm, Axis, DiscreteSignal, Grid1D};
pub use tf::{
    ba_distribution, cohen_convolve, gaussian, generalized_spectrogram, generalized_spectrogram_with,
    realize_window, stft, stft_with, tau_wigner, wigner,
};
pub use tfgrid::{max_rel_error, rel_l2_error, TfGrid};
