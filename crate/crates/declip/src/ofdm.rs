//! Transmitter-side OFDM framing and the soft magnitude limiter.
//!
//! The limiter saturates time samples at `γ` while preserving phase, which
//! is equivalent to adding a peak-reducing clip signal `c` to the frame:
//! `x̄ = x + c`, with `c` sparse in time for typical thresholds.

use crate::error::{Error, Result};
use crate::fourier::Dft;
use num_complex::Complex64;

/// One OFDM frame through the clipper.
#[derive(Debug, Clone)]
pub struct FrameState {
    /// Frequency-domain data symbols `X` (length N).
    pub freq: Vec<Complex64>,
    /// Time-domain signal `x = F^H X` (length L·N).
    pub time: Vec<Complex64>,
    /// Clipped time signal `x̄`.
    pub clipped: Vec<Complex64>,
    /// Clip signal `c = x̄ − x`.
    pub clip_signal: Vec<Complex64>,
    /// Temporal support of `c` (indices of altered samples), ascending.
    pub support: Vec<usize>,
    /// Clip threshold γ.
    pub gamma: f64,
    /// Oversampling factor L.
    pub oversampling: usize,
}

impl FrameState {
    /// Run the critically-sampled (L = 1) transmit chain for one frame.
    pub fn build(freq: Vec<Complex64>, gamma: f64, dft: &Dft) -> Self {
        let time = dft.inverse(&freq);
        let (clipped, clip_signal, support) = clip(&time, gamma);
        Self {
            freq,
            time,
            clipped,
            clip_signal,
            support,
            gamma,
            oversampling: 1,
        }
    }

    /// Frequency-domain transmitted symbols `X̄ = F x̄` (L = 1 frames only).
    pub fn transmitted_freq(&self, dft: &Dft) -> Vec<Complex64> {
        assert_eq!(self.oversampling, 1, "recovery path is defined at L = 1");
        dft.forward(&self.clipped)
    }
}

/// IDFT framing: `x = F^H X`, optionally oversampled.
///
/// For `oversampling > 1` the spectrum is zero-padded symmetrically (low
/// tones at the head, high tones at the tail of the long transform) and the
/// transform keeps the `N^{-1/2}` scale, so per-sample power is independent
/// of L. At L = 1 this is exactly the unitary inverse and `‖x‖₂ = ‖X‖₂`.
pub fn modulate(freq: &[Complex64], oversampling: usize) -> Vec<Complex64> {
    assert!(oversampling >= 1, "oversampling factor must be >= 1");
    let n = freq.len();
    if oversampling == 1 {
        return Dft::new(n).inverse(freq);
    }
    let ln = n * oversampling;
    let mut padded = vec![Complex64::new(0.0, 0.0); ln];
    let head = n / 2 + n % 2;
    padded[..head].copy_from_slice(&freq[..head]);
    padded[ln - (n - head)..].copy_from_slice(&freq[head..]);
    let mut x = Dft::new(ln).inverse(&padded);
    let scale = (oversampling as f64).sqrt();
    for v in &mut x {
        *v *= scale;
    }
    x
}

/// Forward transform back to the frequency domain (L = 1).
pub fn demodulate(time: &[Complex64]) -> Vec<Complex64> {
    Dft::new(time.len()).forward(time)
}

/// Soft magnitude limiter.
///
/// Returns `(x̄, c, support)` where `x̄(i) = γ·e^{jθ_x(i)}` wherever
/// `|x(i)| > γ` and `x(i)` elsewhere, `c = x̄ − x`, and `support` lists the
/// altered sample indices.
pub fn clip(time: &[Complex64], gamma: f64) -> (Vec<Complex64>, Vec<Complex64>, Vec<usize>) {
    assert!(gamma > 0.0, "clip threshold must be positive");
    let mut clipped = time.to_vec();
    let mut clip_signal = vec![Complex64::new(0.0, 0.0); time.len()];
    let mut support = Vec::new();
    // A few ulps of slack keep the limiter idempotent: rescaling can round a
    // limited sample a hair above γ.
    let threshold = gamma * (1.0 + 4.0 * f64::EPSILON);
    for (i, v) in time.iter().enumerate() {
        let mag = v.norm();
        if mag > threshold {
            let limited = v * (gamma / mag);
            clip_signal[i] = limited - v;
            clipped[i] = limited;
            support.push(i);
        }
    }
    (clipped, clip_signal, support)
}

/// Clip threshold from a clipping level in dB: `γ = σ_x · 10^{level/20}`,
/// i.e. the level is `10·log10(γ²/σ_x²)`.
pub fn gamma_from_clip_level(level_db: f64, sigma_x: f64) -> f64 {
    assert!(sigma_x > 0.0, "signal RMS must be positive");
    sigma_x * 10f64.powf(level_db / 20.0)
}

/// Peak-to-average power ratio in dB.
pub fn papr(time: &[Complex64]) -> Result<f64> {
    let peak = time.iter().map(|v| v.norm_sqr()).fold(0.0f64, f64::max);
    if peak == 0.0 {
        return Err(Error::invalid("PAPR of the all-zero signal is undefined"));
    }
    let mean = time.iter().map(|v| v.norm_sqr()).sum::<f64>() / time.len() as f64;
    Ok(10.0 * (peak / mean).log10())
}
