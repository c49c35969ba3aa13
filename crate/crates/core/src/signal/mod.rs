//! Numerical kernels shared by preprocessing and feature extraction.

mod fourier;
mod hilbert;
mod psd;
mod wavelet;

pub use fourier::{dft, idft, real_dft};
pub use hilbert::{analytic_signal, hilbert_envelope};
pub use psd::{psd, Spectrum, Window};
pub use wavelet::{dwt, idwt, Wavelet, WaveletDecomposition};
pub(crate) use wavelet::subband_names as subband_labels;

pub use num_complex::Complex64;
