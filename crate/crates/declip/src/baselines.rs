//! Reference receivers: zero forcing, iterative ML decoding, decision-aided
//! reconstruction, Quasi-ML, and CS-corrected ItML.
//!
//! All of them are deterministic per-frame functions of the equalized
//! symbols; iteration counts are fixed by configuration, with no hidden
//! convergence exits.

use crate::constellation::QamConstellation;
use crate::fourier::Dft;
use crate::ofdm;
use crate::recovery::{correct_symbols, RecoveryResult};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    /// Iteration count for the iterative receivers.
    pub iterations: usize,
    /// Quasi-ML skip threshold as a fraction of d_min.
    pub quasi_eps_fraction: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            iterations: 4,
            quasi_eps_fraction: 0.5,
        }
    }
}

/// Hard decision per tone, no distortion mitigation.
pub fn zf_decode(eq_symbols: &[Complex64], constellation: &QamConstellation) -> Vec<usize> {
    constellation.decode_indices(eq_symbols)
}

/// Shared ItML loop: decode the running estimate, re-synthesise the
/// time-domain waveform, re-clip it to estimate the distortion, and subtract
/// that estimate from the anchor symbols.
///
/// `anchor` is always the original equalized frame; a CS-corrected start
/// only changes the initial estimate.
fn itml_loop(
    initial: &[Complex64],
    anchor: &[Complex64],
    constellation: &QamConstellation,
    gamma: f64,
    cfg: &BaselineConfig,
    dft: &Dft,
    skip_threshold: Option<f64>,
) -> Vec<usize> {
    let mut estimate = initial.to_vec();
    for _ in 0..cfg.iterations {
        let synth: Vec<Complex64> = estimate
            .iter()
            .map(|&v| {
                let (_, point) = constellation.hard_decision(v);
                if let Some(threshold) = skip_threshold {
                    let dev = v - point;
                    // Leave undecided tones at their soft value.
                    if dev.re.abs().max(dev.im.abs()) > threshold {
                        return v;
                    }
                }
                point
            })
            .collect();
        let time = dft.inverse(&synth);
        let (_, clip_estimate, _) = ofdm::clip(&time, gamma);
        let correction = dft.forward(&clip_estimate);
        estimate = anchor
            .iter()
            .zip(&correction)
            .map(|(a, c)| a - c)
            .collect();
    }
    constellation.decode_indices(&estimate)
}

/// Iterative ML decoding: frequency decisions regenerate the time waveform,
/// whose re-clip is subtracted before the next round of decisions.
pub fn itml(
    eq_symbols: &[Complex64],
    constellation: &QamConstellation,
    gamma: f64,
    cfg: &BaselineConfig,
    dft: &Dft,
) -> Vec<usize> {
    itml_loop(eq_symbols, eq_symbols, constellation, gamma, cfg, dft, None)
}

/// Quasi-ML: the ItML loop, except tones whose deviation exceeds
/// `quasi_eps_fraction·d_min` in either component keep their soft value
/// when the waveform is re-synthesised.
pub fn quasi_ml(
    eq_symbols: &[Complex64],
    constellation: &QamConstellation,
    gamma: f64,
    cfg: &BaselineConfig,
    dft: &Dft,
) -> Vec<usize> {
    let threshold = cfg.quasi_eps_fraction * constellation.d_min();
    itml_loop(
        eq_symbols,
        eq_symbols,
        constellation,
        gamma,
        cfg,
        dft,
        Some(threshold),
    )
}

/// Decision-aided reconstruction on the receiver's time-domain estimate:
/// samples at or above the clip threshold are replaced by the regenerated
/// (unclipped) waveform, then the frame is re-decoded.
pub fn dar(
    eq_symbols: &[Complex64],
    constellation: &QamConstellation,
    gamma: f64,
    cfg: &BaselineConfig,
    dft: &Dft,
) -> Vec<usize> {
    let received_time = dft.inverse(eq_symbols);
    // Clipped samples sit exactly at γ, so the comparison is inclusive (up
    // to rounding of the limiter output).
    let replace: Vec<bool> = received_time
        .iter()
        .map(|v| v.norm() >= gamma * (1.0 - 1e-9))
        .collect();

    let mut estimate = eq_symbols.to_vec();
    for _ in 0..cfg.iterations {
        let decided: Vec<Complex64> = estimate
            .iter()
            .map(|&v| constellation.hard_decision(v).1)
            .collect();
        let regenerated = dft.inverse(&decided);
        let repaired: Vec<Complex64> = received_time
            .iter()
            .zip(&regenerated)
            .zip(&replace)
            .map(|((rx, regen), &r)| if r { *regen } else { *rx })
            .collect();
        estimate = dft.forward(&repaired);
    }
    constellation.decode_indices(&estimate)
}

/// ItML initialized from CS-corrected symbols `X̂ = X̂̄ − F ĉ`; the update
/// anchor stays the original equalized frame.
pub fn cs_then_itml(
    eq_symbols: &[Complex64],
    recovery: &RecoveryResult,
    constellation: &QamConstellation,
    gamma: f64,
    cfg: &BaselineConfig,
    dft: &Dft,
) -> Vec<usize> {
    let corrected = correct_symbols(eq_symbols, recovery, dft);
    itml_loop(&corrected, eq_symbols, constellation, gamma, cfg, dft, None)
}
