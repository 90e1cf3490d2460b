//! One frame end to end: clip, fade, equalize, rank the tones, build the CS
//! model over the most reliable ones, and recover the clip signal with both
//! solvers.
//!
//!     cargo run --release --example recover_frame

use declip::channel::{self, ChannelRealization};
use declip::constellation::QamConstellation;
use declip::fourier::Dft;
use declip::ofdm::{self, FrameState};
use declip::recovery::{self, BmpConfig, BmpPriors, WpalConfig};
use declip::reliability::{self, ReliabilityMethod, SelectionMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn errors(decoded: &[usize], tx: &[usize]) -> usize {
    decoded.iter().zip(tx).filter(|(a, b)| a != b).count()
}

fn main() {
    let n = 64;
    let c = QamConstellation::new(16).unwrap();
    let dft = Dft::new(n);
    let gamma = ofdm::gamma_from_clip_level(2.0, 1.0);
    let es = channel::clipped_symbol_energy(gamma, 1.0);
    let noise_var = channel::noise_variance_for_ebn0(25.0, 4, es);
    let mut rng = ChaCha8Rng::seed_from_u64(40);

    // A frame where plain hard decisions get something wrong.
    let (frame, eq, tx_idx, ch) = loop {
        let bits: Vec<bool> = (0..n * 4).map(|_| rng.gen_bool(0.5)).collect();
        let tx_idx = c.indices_from_bits(&bits).unwrap();
        let frame = FrameState::build(c.map_bits(&bits).unwrap(), gamma, &dft);
        let ch = ChannelRealization::draw(&dft, 8, noise_var, &mut rng);
        let rx = channel::apply_channel(&frame.transmitted_freq(&dft), &ch, &mut rng);
        let eq = channel::equalize(&rx, &ch).unwrap();
        if errors(&c.decode_indices(&eq), &tx_idx) > 0 {
            break (frame, eq, tx_idx, ch);
        }
    };

    println!(
        "clipped samples at {:?} (|I_c| = {})",
        frame.support,
        frame.support.len()
    );
    let zf_idx = c.decode_indices(&eq);
    println!("zero-forcing symbol errors: {}/{}", errors(&zf_idx, &tx_idx), n);

    // Rank tones and sense over the most reliable m.
    let dm = channel::distortion_sigma(&ch, gamma, 1.0);
    let m = 24;
    let scores = reliability::score(ReliabilityMethod::MagPhase, &eq, &c, &dm);
    let tones = reliability::select_tones(&scores, m, SelectionMode::Most).unwrap();
    let model = recovery::build_model(&eq, &zf_idx, &tones, &ch, &dm, gamma, &c, &dft).unwrap();
    println!(
        "\nsensing over {m} tones; residual budget epsilon = {:.3e}",
        model.default_epsilon()
    );

    let wpal = recovery::wpal_solve(&model, model.default_epsilon(), &WpalConfig::default())
        .unwrap_or_else(|e| match e {
            declip::Error::SolverStall { best, .. } => *best,
            other => panic!("{other}"),
        });
    let wpal_dec = recovery::correct_and_decode(&eq, &wpal, &c, &dft);
    println!(
        "WPAL: support {:?}\n      {} iterations, residual {:.3e}, feasible {}, symbol errors {}/{}",
        wpal.support,
        wpal.iterations,
        wpal.residual_norm,
        wpal.feasible,
        errors(&wpal_dec, &tx_idx),
        n
    );

    let priors = BmpPriors::from_system(&model, gamma, 1.0);
    let bmp = recovery::bmp_solve(&model, &priors, &BmpConfig::default());
    let bmp_dec = recovery::correct_and_decode(&eq, &bmp, &c, &dft);
    println!(
        "BMP:  support {:?}\n      {} expansions, residual {:.3e}, symbol errors {}/{}",
        bmp.support,
        bmp.iterations,
        bmp.residual_norm,
        errors(&bmp_dec, &tx_idx),
        n
    );
    println!("true clip support:   {:?}", frame.support);
}
