//! Block-fading frequency-selective Rayleigh channel, AWGN at a per-bit SNR,
//! scalar equalization, and the per-tone distortion-scale model.
//!
//! The cyclic prefix diagonalizes the circulant channel, so one realization
//! is fully described by its per-tone gains `Λ(k)`; the time-domain circular
//! convolution and the diagonal frequency-domain model agree exactly.

use crate::error::{Error, Result};
use crate::fourier::Dft;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;

/// Draw a circular complex Gaussian sample with total variance `var`
/// (`var/2` per real component).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Gaussian tail function `Q(x) = Pr(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// One realization of the fading channel, drawn per frame.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    taps: Vec<Complex64>,
    gains: Vec<Complex64>,
    noise_var: f64,
}

impl ChannelRealization {
    /// Draw `tap_count` i.i.d. circular Gaussian taps with unit total mean
    /// energy and derive the per-tone gains. Realizations with a near-zero
    /// gain are redrawn so the equalizer stays well conditioned.
    pub fn draw<R: Rng + ?Sized>(
        dft: &Dft,
        tap_count: usize,
        noise_var: f64,
        rng: &mut R,
    ) -> Self {
        let n = dft.len();
        assert!(
            tap_count >= 1 && tap_count <= n,
            "tap count must be in 1..=N"
        );
        loop {
            let taps: Vec<Complex64> = (0..tap_count)
                .map(|_| complex_normal(rng, 1.0 / tap_count as f64))
                .collect();
            let gains = gains_from_taps(dft, &taps);
            if gains.iter().all(|g| g.norm() >= 1e-9) {
                return Self {
                    taps,
                    gains,
                    noise_var,
                };
            }
        }
    }

    /// Build a realization from explicit taps (tests and examples).
    pub fn from_taps(dft: &Dft, taps: Vec<Complex64>, noise_var: f64) -> Result<Self> {
        if taps.is_empty() || taps.len() > dft.len() {
            return Err(Error::invalid("tap count must be in 1..=N"));
        }
        let gains = gains_from_taps(dft, &taps);
        if gains.iter().any(|g| g.norm() < 1e-9) {
            return Err(Error::Conditioning(
                "channel has a near-zero tone gain".into(),
            ));
        }
        Ok(Self {
            taps,
            gains,
            noise_var,
        })
    }

    /// Flat unit-gain channel (tests and examples).
    pub fn flat(n: usize, noise_var: f64) -> Self {
        let mut taps = vec![Complex64::new(0.0, 0.0); 1];
        taps[0] = Complex64::new(1.0, 0.0);
        Self {
            taps,
            gains: vec![Complex64::new(1.0, 0.0); n],
            noise_var,
        }
    }

    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    /// Per-tone gains `Λ(k)`.
    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    /// Noise variance σ_Z² per complex sample.
    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

/// `Λ(k) = Σ_p h(p) e^{-j2πkp/N}` — plain (non-unitary) N-point transform of
/// the zero-padded taps, so unit tap energy gives `E[|Λ(k)|²] = 1`.
fn gains_from_taps(dft: &Dft, taps: &[Complex64]) -> Vec<Complex64> {
    let n = dft.len();
    let mut padded = vec![Complex64::new(0.0, 0.0); n];
    padded[..taps.len()].copy_from_slice(taps);
    let scale = (n as f64).sqrt();
    dft.forward(&padded).into_iter().map(|g| g * scale).collect()
}

/// `Y(k) = Λ(k)·X̄(k) + Z(k)` with i.i.d. circular Gaussian noise.
pub fn apply_channel<R: Rng + ?Sized>(
    tx_freq: &[Complex64],
    ch: &ChannelRealization,
    rng: &mut R,
) -> Vec<Complex64> {
    assert_eq!(tx_freq.len(), ch.len(), "dimension mismatch");
    tx_freq
        .iter()
        .zip(ch.gains())
        .map(|(x, g)| g * x + complex_normal(rng, ch.noise_var()))
        .collect()
}

/// Scalar zero-forcing equalization `X̂̄(k) = Λ(k)^{-1} Y(k)`.
pub fn equalize(rx_freq: &[Complex64], ch: &ChannelRealization) -> Result<Vec<Complex64>> {
    assert_eq!(rx_freq.len(), ch.len(), "dimension mismatch");
    if ch.gains().iter().any(|g| g.norm() < 1e-9) {
        return Err(Error::Conditioning(
            "cannot equalize a near-zero tone gain".into(),
        ));
    }
    Ok(rx_freq
        .iter()
        .zip(ch.gains())
        .map(|(y, g)| y / g)
        .collect())
}

/// Per-tone scale of the total frequency-domain distortion
/// `D(k) = C(k) + Λ(k)^{-1} Z(k)`, modelled circularly symmetric.
#[derive(Debug, Clone)]
pub struct DistortionModel {
    /// Average per-tone clip-distortion variance σ_C².
    pub clip_var: f64,
    /// Total per-tone scale `σ_D(k) = sqrt(σ_C² + σ_Z²/|Λ(k)|²)`.
    pub sigma_d: Vec<f64>,
}

impl DistortionModel {
    /// Circular Gaussian density of the distortion on tone `k`, evaluated at
    /// deviation `v`: `f(v) = exp(−|v|²/σ_D²)/(π σ_D²)`.
    pub fn density(&self, k: usize, v: Complex64) -> f64 {
        let s2 = self.sigma_d[k] * self.sigma_d[k];
        (-v.norm_sqr() / s2).exp() / (std::f64::consts::PI * s2)
    }
}

/// Mean clip-signal power per sample for a unit-power OFDM frame whose
/// envelope is Rayleigh: `σ_C² = ∫_γ^∞ (r−γ)²·(2r/σ_x²)e^{−r²/σ_x²} dr`,
/// which evaluates to `σ_x²·(e^{−g²} − √π·g·erfc(g))` with `g = γ/σ_x`.
pub fn clip_noise_power(gamma: f64, sigma_x: f64) -> f64 {
    assert!(gamma > 0.0 && sigma_x > 0.0);
    let g = gamma / sigma_x;
    sigma_x * sigma_x * ((-g * g).exp() - std::f64::consts::PI.sqrt() * g * erfc(g))
}

/// Mean transmitted (clipped) sample power `E|x̄|² = σ_x²(1 − e^{−γ²/σ_x²})`
/// under the same Rayleigh envelope model.
pub fn clipped_symbol_energy(gamma: f64, sigma_x: f64) -> f64 {
    assert!(gamma > 0.0 && sigma_x > 0.0);
    let g = gamma / sigma_x;
    sigma_x * sigma_x * (1.0 - (-g * g).exp())
}

/// Noise variance per complex sample for a per-bit SNR target, referenced to
/// the transmitted symbol energy: `σ_Z² = E_s/(log2(M)·10^{snr/10})`.
pub fn noise_variance_for_ebn0(snr_db_per_bit: f64, bits_per_symbol: usize, symbol_energy: f64) -> f64 {
    assert!(bits_per_symbol > 0 && symbol_energy > 0.0);
    symbol_energy / (bits_per_symbol as f64 * 10f64.powf(snr_db_per_bit / 10.0))
}

/// Boundary-crossing probability `P_e = 2Q(d_min/2σ)` of a symbol perturbed
/// by circularly symmetric distortion of total scale `sigma_d`; `σ` here is
/// the per-axis spread `σ_D/√2`, matching the two-sided crossing rate of a
/// decision boundary at distance `d_min/2`.
pub fn symbol_error_prob(d_min: f64, sigma_d: f64) -> f64 {
    if sigma_d <= 0.0 {
        return 0.0;
    }
    let per_axis = sigma_d / std::f64::consts::SQRT_2;
    2.0 * q_function(d_min / (2.0 * per_axis))
}

/// Assemble the per-tone distortion scales from one channel realization.
pub fn distortion_sigma(ch: &ChannelRealization, gamma: f64, sigma_x: f64) -> DistortionModel {
    let clip_var = clip_noise_power(gamma, sigma_x);
    let sigma_d = ch
        .gains()
        .iter()
        .map(|g| (clip_var + ch.noise_var() / g.norm_sqr()).sqrt())
        .collect();
    DistortionModel { clip_var, sigma_d }
}
