//! Unitary DFT helpers shared by the OFDM chain, the channel model and the
//! sparse-recovery operators.
//!
//! The convention throughout the crate is the unitary pair
//! `X(k) = N^{-1/2} Σ_n x(n) e^{-j2πkn/N}` (forward) and its conjugate
//! transpose (inverse), so `‖forward(x)‖₂ = ‖x‖₂`.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Unitary N-point DFT. Cheap to clone; the plans are shared.
#[derive(Clone)]
pub struct Dft {
    n: usize,
    forward_plan: Arc<dyn Fft<f64>>,
    inverse_plan: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Dft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dft").field("n", &self.n).finish()
    }
}

impl Dft {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "transform size must be positive");
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward_plan: planner.plan_fft_forward(n),
            inverse_plan: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `X = F x` with the unitary convention.
    pub fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n, "length mismatch");
        let mut buf = x.to_vec();
        self.forward_plan.process(&mut buf);
        let scale = 1.0 / (self.n as f64).sqrt();
        for v in &mut buf {
            *v *= scale;
        }
        buf
    }

    /// `x = F^H X` with the unitary convention.
    pub fn inverse(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n, "length mismatch");
        let mut buf = x.to_vec();
        self.inverse_plan.process(&mut buf);
        let scale = 1.0 / (self.n as f64).sqrt();
        for v in &mut buf {
            *v *= scale;
        }
        buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn forward_inverse_round_trip() {
        let dft = Dft::new(64);
        let x: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let back = dft.inverse(&dft.forward(&x));
        assert!(approx_eq(&x, &back, 1e-10));
    }

    #[test]
    fn forward_is_unitary() {
        let dft = Dft::new(64);
        let x: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((i as f64).cos(), (2.0 * i as f64).sin()))
            .collect();
        let y = dft.forward(&x);
        let ex: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let ey: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        assert!((ex - ey).abs() < 1e-10);
    }

    #[test]
    fn single_tone_maps_to_constant() {
        let n = 16;
        let dft = Dft::new(n);
        let mut tone = vec![Complex64::new(0.0, 0.0); n];
        tone[0] = Complex64::new(1.0, 0.0);
        let x = dft.inverse(&tone);
        let expect = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        assert!(x.iter().all(|v| (v - expect).norm() < 1e-12));
    }
}
