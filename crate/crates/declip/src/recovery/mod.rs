//! Pilotless compressive-sensing recovery of the sparse clip signal from the
//! deviations on a selected tone set.
//!
//! The observation model is `Y′ = Ψ c + Z′` with `Ψ` the rows of the unitary
//! N-point DFT at the selected tones. Both solvers work on a phase-augmented
//! real reparameterisation: every clip sample points opposite the transmit
//! sample, `c(n) = a(n)·e^{j(θ̂(n)+π)}` with `a(n) ≥ 0`, where `θ̂(n)` is the
//! phase of the receiver's time-domain estimate.

mod bmp;
mod wpal;

pub use bmp::{activity_log_odds, bmp_solve, BmpConfig, BmpPriors};
pub use wpal::{wpal_solve, WpalConfig};

use crate::channel::{ChannelRealization, DistortionModel};
use crate::constellation::QamConstellation;
use crate::error::{Error, Result};
use crate::fourier::Dft;
use num_complex::Complex64;

/// Partial unitary DFT `Ψ_{Ω}`: the rows of the N-point unitary DFT at the
/// tone set Ω, applied implicitly through a full transform.
#[derive(Debug, Clone)]
pub struct PartialDft {
    dft: Dft,
    tones: Vec<usize>,
}

impl PartialDft {
    pub fn new(dft: Dft, tones: Vec<usize>) -> Self {
        assert!(tones.iter().all(|&k| k < dft.len()), "tone out of range");
        Self { dft, tones }
    }

    /// Number of rows (selected tones).
    pub fn rows(&self) -> usize {
        self.tones.len()
    }

    /// Ambient dimension N.
    pub fn cols(&self) -> usize {
        self.dft.len()
    }

    pub fn tones(&self) -> &[usize] {
        &self.tones
    }

    /// `Ψ v`: transform and keep the selected tones.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let full = self.dft.forward(v);
        self.tones.iter().map(|&k| full[k]).collect()
    }

    /// `Ψ^H y`: scatter onto the selected tones and inverse-transform.
    pub fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(y.len(), self.tones.len());
        let mut full = vec![Complex64::new(0.0, 0.0); self.dft.len()];
        for (v, &k) in y.iter().zip(&self.tones) {
            full[k] = *v;
        }
        self.dft.inverse(&full)
    }
}

/// The assembled observation model for one frame.
#[derive(Debug, Clone)]
pub struct CsModel {
    /// Selected tone indices, ascending.
    pub tones: Vec<usize>,
    /// Deviations `X̂̄(k) − ⟨X̂̄(k)⟩` on the selected tones.
    pub observation: Vec<Complex64>,
    /// The partial-Fourier measurement operator.
    pub operator: PartialDft,
    /// Equalized noise scale `σ_Z/|Λ(k)|` per selected tone.
    pub noise_scales: Vec<f64>,
    /// Data-aided weights `w(n) = ||x̂(n)| − γ|` over the time samples.
    pub weights: Vec<f64>,
    /// Phase estimates `θ̂(n)` of the receiver's time-domain signal.
    pub phase_estimates: Vec<f64>,
    /// Magnitudes `|x̂(n)|` of the receiver's time-domain signal.
    pub time_magnitudes: Vec<f64>,
    /// The clip threshold γ the weights were measured against.
    pub clip_threshold: f64,
    /// Equalized-noise variance per time sample, `σ_Z²·mean_k|Λ(k)|⁻²`.
    pub time_noise_var: f64,
}

impl CsModel {
    /// Ambient dimension N.
    pub fn n(&self) -> usize {
        self.operator.cols()
    }

    /// Measurement count m.
    pub fn m(&self) -> usize {
        self.tones.len()
    }

    /// Residual budget from the selected-tone noise level:
    /// `ε = m·σ̄² (1 + 2/√m)` with `σ̄²` the mean noise variance, a χ²
    /// concentration bound on `‖Z′‖₂²`.
    pub fn default_epsilon(&self) -> f64 {
        let m = self.m() as f64;
        let mean_var = self.noise_scales.iter().map(|s| s * s).sum::<f64>() / m;
        m * mean_var * (1.0 + 2.0 / m.sqrt())
    }

    /// Clip-phase factors `e^{j(θ̂(n)+π)} = −e^{jθ̂(n)}`.
    fn clip_phase(&self, n: usize) -> Complex64 {
        -Complex64::from_polar(1.0, self.phase_estimates[n])
    }

    /// `Ψ̃ a`: map nonneg real amplitudes through the clip phases and the
    /// partial transform.
    pub fn forward_real(&self, amplitudes: &[f64]) -> Vec<Complex64> {
        let c: Vec<Complex64> = amplitudes
            .iter()
            .enumerate()
            .map(|(n, &a)| self.clip_phase(n) * a)
            .collect();
        self.operator.apply(&c)
    }

    /// Real adjoint `Re(Ψ̃^H y)` against the amplitude space.
    pub fn adjoint_real(&self, y: &[Complex64]) -> Vec<f64> {
        let t = self.operator.adjoint(y);
        t.iter()
            .enumerate()
            .map(|(n, v)| (self.clip_phase(n).conj() * v).re)
            .collect()
    }

    /// Reconstruct the complex clip estimate from real amplitudes.
    pub fn amplitudes_to_clip(&self, amplitudes: &[f64]) -> Vec<Complex64> {
        amplitudes
            .iter()
            .enumerate()
            .map(|(n, &a)| self.clip_phase(n) * a)
            .collect()
    }
}

/// Output of either solver.
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    /// Time-domain clip estimate ĉ (length N).
    pub clip_estimate: Vec<Complex64>,
    /// Indices with nonzero recovered amplitude, ascending.
    pub support: Vec<usize>,
    /// Iterations spent (proximal steps or greedy expansions).
    pub iterations: usize,
    /// Final residual norm `‖Y′ − Ψ̃ a‖₂`.
    pub residual_norm: f64,
    /// Whether the residual constraint was met (WPAL) — always true for BMP.
    pub feasible: bool,
}

impl RecoveryResult {
    /// The all-zero estimate (no correction applied).
    pub fn zero(n: usize, residual_norm: f64) -> Self {
        Self {
            clip_estimate: vec![Complex64::new(0.0, 0.0); n],
            support: Vec::new(),
            iterations: 0,
            residual_norm,
            feasible: true,
        }
    }
}

/// Assemble the CS model for one frame from the equalized symbols, their
/// hard decisions and the selected tone set.
#[allow(clippy::too_many_arguments)]
pub fn build_model(
    eq_symbols: &[Complex64],
    decoded: &[usize],
    selected_tones: &[usize],
    ch: &ChannelRealization,
    _dm: &DistortionModel,
    gamma: f64,
    constellation: &QamConstellation,
    dft: &Dft,
) -> Result<CsModel> {
    let n = eq_symbols.len();
    if selected_tones.is_empty() {
        return Err(Error::invalid("selected tone set is empty"));
    }
    if selected_tones.iter().any(|&k| k >= n) {
        return Err(Error::invalid("selected tone index out of range"));
    }
    assert_eq!(decoded.len(), n);
    assert_eq!(ch.len(), n);
    assert_eq!(dft.len(), n);

    let mut tones = selected_tones.to_vec();
    tones.sort_unstable();
    tones.dedup();

    let observation: Vec<Complex64> = tones
        .iter()
        .map(|&k| eq_symbols[k] - constellation.point(decoded[k]))
        .collect();
    let sigma_z = ch.noise_var().sqrt();
    let noise_scales: Vec<f64> = tones
        .iter()
        .map(|&k| sigma_z / ch.gains()[k].norm())
        .collect();

    let time_estimate = dft.inverse(eq_symbols);
    let time_magnitudes: Vec<f64> = time_estimate.iter().map(|v| v.norm()).collect();
    let weights: Vec<f64> = time_magnitudes.iter().map(|&mag| (mag - gamma).abs()).collect();
    let phase_estimates: Vec<f64> = time_estimate.iter().map(|v| v.arg()).collect();
    let time_noise_var = ch.noise_var()
        * ch.gains().iter().map(|g| 1.0 / g.norm_sqr()).sum::<f64>()
        / n as f64;

    Ok(CsModel {
        operator: PartialDft::new(dft.clone(), tones.clone()),
        tones,
        observation,
        noise_scales,
        weights,
        phase_estimates,
        time_magnitudes,
        clip_threshold: gamma,
        time_noise_var,
    })
}

/// Subtract the recovered distortion in frequency: `X̂ = X̂̄ − F ĉ`.
pub fn correct_symbols(
    eq_symbols: &[Complex64],
    result: &RecoveryResult,
    dft: &Dft,
) -> Vec<Complex64> {
    let correction = dft.forward(&result.clip_estimate);
    eq_symbols
        .iter()
        .zip(&correction)
        .map(|(x, c)| x - c)
        .collect()
}

/// Subtract the recovered distortion and hard-decode every tone.
pub fn correct_and_decode(
    eq_symbols: &[Complex64],
    result: &RecoveryResult,
    constellation: &QamConstellation,
    dft: &Dft,
) -> Vec<usize> {
    constellation.decode_indices(&correct_symbols(eq_symbols, result, dft))
}
