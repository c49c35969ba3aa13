use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Forward DFT, `X[k] = Σ_n x[n]·e^{-2πi·kn/N}`, for any length.
pub fn dft(x: &[Complex64]) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    transform(&mut buf, false);
    buf
}

/// Inverse DFT with the `1/N` normalisation, so `idft(dft(x)) ≈ x`.
pub fn idft(x: &[Complex64]) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    transform(&mut buf, true);
    let scale = 1.0 / buf.len().max(1) as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// DFT of a real signal (full two-sided spectrum).
pub fn real_dft(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(&mut buf, false);
    buf
}

fn transform(buf: &mut [Complex64], inverse: bool) {
    if buf.len() <= 1 {
        return;
    }
    PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        let fft = if inverse {
            planner.plan_fft_inverse(buf.len())
        } else {
            planner.plan_fft_forward(buf.len())
        };
        fft.process(buf);
    });
}
