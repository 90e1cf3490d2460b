//! The transmitter side: how hard the limiter works at different clipping
//! levels, and what it buys in peak-to-average power ratio.
//!
//!     cargo run --release --example clip_and_papr

use declip::constellation::QamConstellation;
use declip::fourier::Dft;
use declip::ofdm::{self, FrameState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let n = 64;
    let c = QamConstellation::new(16).unwrap();
    let dft = Dft::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let frames = 2000;

    println!("{n}-subcarrier 16-QAM frames, {frames} frames per clipping level\n");
    println!(
        "{:>9} {:>8} {:>12} {:>12} {:>12} {:>12}",
        "level dB", "gamma", "clip rate", "analytic", "PAPR in", "PAPR out"
    );
    for level_db in [0.0, 1.0, 2.0, 3.0, 4.0, 6.0] {
        let gamma = ofdm::gamma_from_clip_level(level_db, 1.0);
        let mut clipped_samples = 0usize;
        let mut papr_in = 0.0;
        let mut papr_out = 0.0;
        for _ in 0..frames {
            let bits: Vec<bool> = (0..n * 4).map(|_| rng.gen_bool(0.5)).collect();
            let frame = FrameState::build(c.map_bits(&bits).unwrap(), gamma, &dft);
            clipped_samples += frame.support.len();
            papr_in += ofdm::papr(&frame.time).unwrap();
            papr_out += ofdm::papr(&frame.clipped).unwrap();
        }
        let rate = clipped_samples as f64 / (frames * n) as f64;
        println!(
            "{:>9.1} {:>8.4} {:>12.4} {:>12.4} {:>9.2} dB {:>9.2} dB",
            level_db,
            gamma,
            rate,
            (-gamma * gamma).exp(),
            papr_in / frames as f64,
            papr_out / frames as f64,
        );
    }

    // The oversampled view of one frame: the continuous-time peaks sit
    // between the critically-sampled points.
    let bits: Vec<bool> = (0..n * 4).map(|_| rng.gen_bool(0.5)).collect();
    let freq = c.map_bits(&bits).unwrap();
    let x1 = ofdm::modulate(&freq, 1);
    let x4 = ofdm::modulate(&freq, 4);
    println!(
        "\none frame, oversampling view: PAPR {:.2} dB at L=1, {:.2} dB at L=4",
        ofdm::papr(&x1).unwrap(),
        ofdm::papr(&x4).unwrap()
    );
}
