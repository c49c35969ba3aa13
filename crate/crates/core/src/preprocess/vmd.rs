//! Variational mode decomposition solved by ADMM in the frequency domain.
//!
//! The signal is mirror-extended to length `2N`, transformed once, and the
//! modes are updated on the non-negative half of the spectrum as Wiener-like
//! filters centred on their current center frequencies. Center frequencies
//! are spectral centroids of the mode power. Modes are returned in the time
//! domain, cropped back to `N` and sorted by center frequency.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::{idft, real_dft};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VmdParams {
    /// Number of modes `K`.
    pub modes: usize,
    /// Bandwidth penalty.
    pub alpha: f64,
    /// Dual ascent step; 0 disables the Lagrangian update (noise slack).
    pub tau: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub extension: Extension,
}

/// Boundary extension applied before the transform.
///
/// Both reflect half the signal at each end, doubling its length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extension {
    /// Plain mirror (`x[i]`), which leaves a slope kink at each boundary.
    #[default]
    Even,
    /// Point reflection about each end sample (`2·x[0] − x[i]`). Keeps the
    /// first derivative continuous at the crop boundaries.
    Odd,
}

impl Default for VmdParams {
    fn default() -> Self {
        VmdParams {
            modes: 6,
            alpha: 2000.0,
            tau: 0.0,
            tol: 1e-7,
            max_iter: 500,
            extension: Extension::Even,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VmdResult {
    /// `[K, N]` modes in the time domain, lowest center frequency first.
    pub modes: Array2<f64>,
    /// Center frequencies normalised to the sample rate, in `[0, 0.5]`.
    pub center_freqs: Vec<f64>,
    pub iterations: usize,
    /// Value of the convergence measure at the last iteration.
    pub final_residual: f64,
}

impl VmdResult {
    pub fn center_freqs_hz(&self, sample_rate: f64) -> Vec<f64> {
        self.center_freqs.iter().map(|w| w * sample_rate).collect()
    }

    /// Sum of all modes except the `drop` lowest-frequency ones.
    pub fn reconstruct_without_lowest(&self, drop: usize) -> Vec<f64> {
        let n = self.modes.ncols();
        let mut out = vec![0.0; n];
        for mode in self.modes.rows().into_iter().skip(drop) {
            for (o, v) in out.iter_mut().zip(mode) {
                *o += v;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Vec<f64> {
        self.reconstruct_without_lowest(0)
    }
}

pub fn vmd(x: &[f64], params: &VmdParams) -> Result<VmdResult> {
    let n = x.len();
    let k_modes = params.modes;
    if n < 16 {
        return Err(Error::invalid_arg(format!("vmd needs at least 16 samples, got {n}")));
    }
    if k_modes == 0 {
        return Err(Error::invalid_arg("vmd needs at least one mode"));
    }
    if k_modes > n / 4 {
        return Err(Error::invalid_arg(format!(
            "{k_modes} modes exceed N/4 = {} for a {n}-sample signal",
            n / 4
        )));
    }
    if !(params.alpha.is_finite() && params.alpha >= 0.0) || !params.tau.is_finite() {
        return Err(Error::invalid_arg("alpha and tau must be finite, alpha ≥ 0"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid_arg("vmd input contains non-finite samples"));
    }

    // Reflected first half, signal, reflected second half.
    let head = n.div_ceil(2);
    let mut mirrored = Vec::with_capacity(2 * n);
    match params.extension {
        Extension::Even => {
            mirrored.extend(x[..head].iter().rev());
            mirrored.extend_from_slice(x);
            mirrored.extend(x[head..].iter().rev());
        }
        Extension::Odd => {
            let (first, last) = (x[0], x[n - 1]);
            mirrored.extend(x[..head].iter().rev().map(|v| 2.0 * first - v));
            mirrored.extend_from_slice(x);
            mirrored.extend(x[head..].iter().rev().map(|v| 2.0 * last - v));
        }
    }
    let t_len = mirrored.len();
    let half = t_len / 2;

    // Only bins 0..half (frequencies 0 … 0.5 − 1/T) are optimised; the
    // negative half is restored by Hermitian symmetry at the end.
    let spectrum = real_dft(&mirrored);
    let f_hat: Vec<Complex64> = spectrum[..half].to_vec();
    let freqs: Vec<f64> = (0..half).map(|j| j as f64 / t_len as f64).collect();

    let zero = Complex64::new(0.0, 0.0);
    let mut u_hat = vec![vec![zero; half]; k_modes];
    let mut omega: Vec<f64> = (0..k_modes).map(|k| 0.5 * k as f64 / k_modes as f64).collect();
    let mut lambda = vec![zero; half];
    let mut sum_u = vec![zero; half];

    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let eps = 1e-12;
    while iterations < params.max_iter {
        iterations += 1;
        let mut change = 0.0;
        for k in 0..k_modes {
            let mut diff = 0.0;
            let mut prev_norm = 0.0;
            let mut num = 0.0;
            let mut den = 0.0;
            let wk = omega[k];
            for j in 0..half {
                let old = u_hat[k][j];
                let others = sum_u[j] - old;
                let d = freqs[j] - wk;
                let new = (f_hat[j] - others + lambda[j] * 0.5) / (1.0 + 2.0 * params.alpha * d * d);
                u_hat[k][j] = new;
                sum_u[j] = others + new;
                let p = new.norm_sqr();
                num += freqs[j] * p;
                den += p;
                diff += (new - old).norm_sqr();
                prev_norm += old.norm_sqr();
            }
            if den > 0.0 {
                omega[k] = num / den;
            }
            change += diff / (prev_norm + eps);
        }
        if params.tau != 0.0 {
            for j in 0..half {
                lambda[j] += (f_hat[j] - sum_u[j]) * params.tau;
            }
        }
        residual = change;
        if residual < params.tol {
            break;
        }
    }

    let mut order: Vec<usize> = (0..k_modes).collect();
    order.sort_by(|&a, &b| omega[a].total_cmp(&omega[b]).then(a.cmp(&b)));

    let mut modes = Array2::<f64>::zeros((k_modes, n));
    let mut full = vec![zero; t_len];
    for (row, &k) in order.iter().enumerate() {
        full.fill(zero);
        full[..half].copy_from_slice(&u_hat[k]);
        for j in 1..half {
            full[t_len - j] = u_hat[k][j].conj();
        }
        // DC must be real for a real mode; the Nyquist bin is left empty
        full[0] = Complex64::new(full[0].re, 0.0);
        let time = idft(&full);
        for i in 0..n {
            modes[[row, i]] = time[head + i].re;
        }
    }
    let center_freqs = order.iter().map(|&k| omega[k]).collect();
    if modes.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("vmd produced non-finite modes"));
    }
    Ok(VmdResult {
        modes,
        center_freqs,
        iterations,
        final_residual: residual,
    })
}
