//! Scoring one received frame with the three reliability rules and checking
//! how well each ranked tone set avoids the true decoding errors.
//!
//!     cargo run --release --example reliability_ranking

use declip::channel::{self, ChannelRealization};
use declip::constellation::QamConstellation;
use declip::fourier::Dft;
use declip::ofdm::{self, FrameState};
use declip::reliability::{self, ReliabilityMethod, SelectionMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let n = 64;
    let c = QamConstellation::new(16).unwrap();
    let dft = Dft::new(n);
    let gamma = ofdm::gamma_from_clip_level(2.0, 1.0);
    let es = channel::clipped_symbol_energy(gamma, 1.0);
    let noise_var = channel::noise_variance_for_ebn0(25.0, 4, es);
    let mut rng = ChaCha8Rng::seed_from_u64(23);

    // Draw frames until one has a decoding error, so the ranking has
    // something to dodge.
    let (frame, eq, tx_idx, ch) = loop {
        let bits: Vec<bool> = (0..n * 4).map(|_| rng.gen_bool(0.5)).collect();
        let tx_idx = c.indices_from_bits(&bits).unwrap();
        let frame = FrameState::build(c.map_bits(&bits).unwrap(), gamma, &dft);
        let ch = ChannelRealization::draw(&dft, 8, noise_var, &mut rng);
        let rx = channel::apply_channel(&frame.transmitted_freq(&dft), &ch, &mut rng);
        let eq = channel::equalize(&rx, &ch).unwrap();
        if c.decode_indices(&eq) != tx_idx {
            break (frame, eq, tx_idx, ch);
        }
    };
    let dm = channel::distortion_sigma(&ch, gamma, 1.0);
    let decoded = c.decode_indices(&eq);
    let error_tones: Vec<usize> = (0..n).filter(|&k| decoded[k] != tx_idx[k]).collect();
    println!(
        "frame with {} clipped samples; decoding errors at tones {:?}\n",
        frame.support.len(),
        error_tones
    );

    let m = 16;
    for method in ReliabilityMethod::ALL {
        let scores = reliability::score(method, &eq, &c, &dm);
        let most = reliability::select_tones(&scores, m, SelectionMode::Most).unwrap();
        let least = reliability::select_tones(&scores, m, SelectionMode::Least).unwrap();
        let poisoned = most.iter().filter(|k| error_tones.contains(k)).count();
        let caught = least.iter().filter(|k| error_tones.contains(k)).count();
        println!("{method}:");
        println!("  top-{m} tones: {most:?}");
        println!(
            "  error tones among the top picks: {poisoned}; among the bottom {m}: {caught}"
        );
    }

    // The rules agree on what is obviously good but diverge near decision
    // boundaries; show the per-tone detail for a few tones.
    println!("\nper-tone detail (first 8 tones):");
    println!(
        "{:>5} {:>9} {:>9} {:>10} {:>10} {:>10}  zf",
        "tone", "|dev|", "sigma_D", "bayes", "mag_phase", "mag"
    );
    let by: Vec<_> = ReliabilityMethod::ALL
        .iter()
        .map(|&mth| reliability::score(mth, &eq, &c, &dm))
        .collect();
    for k in 0..8 {
        println!(
            "{:>5} {:>9.4} {:>9.4} {:>10.4} {:>10.4} {:>10.4}  {}",
            k,
            by[0].deviations[k].norm(),
            dm.sigma_d[k],
            by[0].scores[k],
            by[1].scores[k],
            by[2].scores[k],
            if decoded[k] == tx_idx[k] { "ok" } else { "WRONG" }
        );
    }
}
