//! The classical iterative receivers head to head: zero forcing, iterative
//! ML decoding, decision-aided reconstruction and Quasi-ML, including a
//! sweep of the Quasi-ML skip threshold.
//!
//!     cargo run --release --example baseline_receivers

use declip::harness::{self, ExperimentConfig, Method};
use declip::reliability::ReliabilityMethod;

fn main() {
    let cfg = ExperimentConfig {
        frames: 400,
        methods: vec![Method::Zf, Method::Itml, Method::Dar, Method::QuasiMl],
        reliability: vec![ReliabilityMethod::MagPhase],
        m_sweep: vec![16],
        ..ExperimentConfig::default()
    };
    println!(
        "operating point: N={}, 16-QAM, {} dB/bit, {} dB clipping, {} taps, {} frames\n",
        cfg.n, cfg.snr_db_per_bit, cfg.clip_level_db, cfg.taps, cfg.frames
    );
    let outcome = harness::run_experiment(&cfg).unwrap();
    println!("{:<10} {:>10}", "method", "SER");
    for r in &outcome.records {
        println!("{:<10} {:>10.5}", r.method.tag(), r.ser);
    }

    // Quasi-ML sensitivity to its skip threshold.
    println!("\nQuasi-ML skip threshold sweep (fraction of d_min):");
    println!("{:>10} {:>10}", "fraction", "SER");
    for fraction in [0.125, 0.25, 0.5, 0.75, 1.0] {
        let mut swept = ExperimentConfig {
            methods: vec![Method::QuasiMl],
            ..cfg.clone()
        };
        swept.baseline.quasi_eps_fraction = fraction;
        let outcome = harness::run_experiment(&swept).unwrap();
        println!("{:>10.3} {:>10.5}", fraction, outcome.records[0].ser);
    }
}
