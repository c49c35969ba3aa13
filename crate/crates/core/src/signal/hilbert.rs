use num_complex::Complex64;

use super::fourier::{idft, real_dft};

/// Analytic signal `x + i·H{x}` built by one-siding the spectrum.
pub fn analytic_signal(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let mut spec = real_dft(x);
    if n < 2 {
        return spec;
    }
    let half = n / 2;
    // bins 1..ceil(n/2) doubled; DC (and Nyquist for even n) kept; negatives zeroed
    let positive_end = if n % 2 == 0 { half } else { half + 1 };
    for (k, v) in spec.iter_mut().enumerate() {
        if k == 0 || (n % 2 == 0 && k == half) {
            continue;
        }
        if k < positive_end {
            *v *= 2.0;
        } else {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    idft(&spec)
}

/// Instantaneous amplitude, `|analytic_signal(x)|`.
pub fn hilbert_envelope(x: &[f64]) -> Vec<f64> {
    analytic_signal(x).iter().map(|c| c.norm()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_tone_has_unit_envelope() {
        let fs = 256.0;
        let x: Vec<f64> = (0..640).map(|i| (2.0 * PI * 10.0 * i as f64 / fs).sin()).collect();
        let env = hilbert_envelope(&x);
        for &e in &env[64..576] {
            assert!((0.95..=1.05).contains(&e), "{e}");
        }
    }

    #[test]
    fn zero_and_constant() {
        assert!(hilbert_envelope(&[0.0; 32]).iter().all(|&v| v == 0.0));
        for v in hilbert_envelope(&[-2.0; 33]) {
            assert!((v - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn real_part_is_the_signal() {
        let x: Vec<f64> = (0..31).map(|i| ((i * 7 % 5) as f64).sin()).collect();
        for (a, b) in analytic_signal(&x).iter().zip(&x) {
            assert!((a.re - b).abs() < 1e-12);
        }
    }
}
