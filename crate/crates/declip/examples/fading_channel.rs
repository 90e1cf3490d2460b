//! The channel side: Rayleigh tap statistics, per-tone gains, noise
//! calibration at a per-bit SNR, and the per-tone distortion scales the
//! reliability functions consume.
//!
//!     cargo run --release --example fading_channel

use declip::channel::{self, ChannelRealization};
use declip::constellation::QamConstellation;
use declip::fourier::Dft;
use declip::ofdm::{self, FrameState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let n = 64;
    let taps = 8;
    let dft = Dft::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    // Gain statistics over many realizations.
    let reals = 20_000;
    let mut gain_energy = 0.0;
    let mut deep_fades = 0usize;
    for _ in 0..reals {
        let ch = ChannelRealization::draw(&dft, taps, 0.0, &mut rng);
        gain_energy += ch.gains().iter().map(|g| g.norm_sqr()).sum::<f64>() / n as f64;
        deep_fades += ch.gains().iter().filter(|g| g.norm_sqr() < 0.01).count();
    }
    println!("{taps}-tap Rayleigh channel over {reals} realizations:");
    println!("  mean per-tone gain energy E|gain|^2 = {:.4}", gain_energy / reals as f64);
    println!(
        "  deep fades (|gain|^2 < -20 dB): {:.2}% of tones",
        100.0 * deep_fades as f64 / (reals * n) as f64
    );

    // Noise calibration at the reference operating point.
    let c = QamConstellation::new(16).unwrap();
    let gamma = ofdm::gamma_from_clip_level(2.0, 1.0);
    let es = channel::clipped_symbol_energy(gamma, 1.0);
    let noise_var = channel::noise_variance_for_ebn0(25.0, c.bits_per_symbol(), es);
    println!("\n25 dB per bit on the clipped frame: E_s = {es:.4}, sigma_Z^2 = {noise_var:.3e}");

    let frames = 4000;
    let mut es_meas = 0.0;
    for _ in 0..frames {
        let bits: Vec<bool> = (0..n * 4).map(|_| rng.gen_bool(0.5)).collect();
        let frame = FrameState::build(c.map_bits(&bits).unwrap(), gamma, &dft);
        es_meas += frame
            .transmitted_freq(&dft)
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            / n as f64;
    }
    es_meas /= frames as f64;
    println!(
        "measured per-bit SNR over {frames} frames: {:.3} dB",
        10.0 * (es_meas / (4.0 * noise_var)).log10()
    );

    // One realization end to end, with the distortion scales.
    let ch = ChannelRealization::draw(&dft, taps, noise_var, &mut rng);
    let dm = channel::distortion_sigma(&ch, gamma, 1.0);
    println!(
        "\none realization: clip variance sigma_C^2 = {:.4}; per-tone sigma_D ranges {:.4} ..= {:.4}",
        dm.clip_var,
        dm.sigma_d.iter().cloned().fold(f64::INFINITY, f64::min),
        dm.sigma_d.iter().cloned().fold(0.0, f64::max),
    );
    let bits: Vec<bool> = (0..n * 4).map(|_| rng.gen_bool(0.5)).collect();
    let tx_idx = c.indices_from_bits(&bits).unwrap();
    let frame = FrameState::build(c.map_bits(&bits).unwrap(), gamma, &dft);
    let rx = channel::apply_channel(&frame.transmitted_freq(&dft), &ch, &mut rng);
    let eq = channel::equalize(&rx, &ch).unwrap();
    let errors = c
        .decode_indices(&eq)
        .iter()
        .zip(&tx_idx)
        .filter(|(a, b)| a != b)
        .count();
    println!("zero-forcing decode of that frame: {errors}/{n} symbol errors");
}
