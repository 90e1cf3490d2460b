//! Randomized algebraic invariants of the signal chain.

use declip::constellation::QamConstellation;
use declip::fourier::Dft;
use declip::ofdm;
use declip::reliability::{self, ReliabilityMethod, SelectionMode};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex_vec(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im)),
        len,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip_and_unitarity(freq in complex_vec(4..96)) {
        let dft = Dft::new(freq.len());
        let time = dft.inverse(&freq);
        let back = dft.forward(&time);
        for (a, b) in freq.iter().zip(&back) {
            prop_assert!((a - b).norm() < 1e-10);
        }
        let ef: f64 = freq.iter().map(|v| v.norm_sqr()).sum();
        let et: f64 = time.iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((ef - et).abs() < 1e-10 * (1.0 + ef));
    }

    #[test]
    fn adjoint_identity(u in complex_vec(16..17), v in complex_vec(16..17)) {
        let dft = Dft::new(16);
        let lhs: Complex64 = dft.forward(&u).iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        let rhs: Complex64 = u.iter().zip(&dft.inverse(&v)).map(|(a, b)| a.conj() * b).sum();
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn clip_decomposition_holds(freq in complex_vec(8..80), level_db in -3.0f64..9.0) {
        let x = ofdm::modulate(&freq, 1);
        let gamma = ofdm::gamma_from_clip_level(level_db, 1.0);
        let (clipped, clip_signal, support) = ofdm::clip(&x, gamma);
        for i in 0..x.len() {
            prop_assert!((clipped[i] - (x[i] + clip_signal[i])).norm() < 1e-12);
            prop_assert!(clipped[i].norm() <= gamma + 1e-12);
            prop_assert_eq!(clip_signal[i].norm() > 0.0, support.contains(&i));
        }
        // Idempotence and the energy inequality.
        let (again, _, support2) = ofdm::clip(&clipped, gamma);
        prop_assert_eq!(&again, &clipped);
        prop_assert!(support2.is_empty());
        let ex: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let ec: f64 = clipped.iter().map(|v| v.norm_sqr()).sum();
        prop_assert!(ec <= ex + 1e-12);
    }

    #[test]
    fn clipping_never_raises_papr(freq in complex_vec(8..80), level_db in -3.0f64..9.0) {
        let x = ofdm::modulate(&freq, 1);
        prop_assume!(x.iter().any(|v| v.norm() > 0.0));
        let gamma = ofdm::gamma_from_clip_level(level_db, 1.0);
        let (clipped, _, support) = ofdm::clip(&x, gamma);
        prop_assume!(!support.is_empty());
        prop_assert!(ofdm::papr(&clipped).unwrap() <= ofdm::papr(&x).unwrap() + 1e-9);
    }

    #[test]
    fn hard_decision_is_nearest_and_idempotent(re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let c = QamConstellation::new(16).unwrap();
        let v = Complex64::new(re, im);
        let (idx, point) = c.hard_decision(v);
        for i in 0..c.order() {
            prop_assert!((v - point).norm_sqr() <= (v - c.point(i)).norm_sqr() + 1e-15);
        }
        prop_assert_eq!(c.hard_decision(point).0, idx);
    }

    #[test]
    fn selection_is_scale_invariant_and_matches_sort(
        scores in prop::collection::vec(0.0f64..1e3, 1..64),
        m_frac in 0.0f64..1.0,
        scale in 0.1f64..100.0,
        most in any::<bool>(),
    ) {
        let n = scores.len();
        let m = ((m_frac * n as f64) as usize).clamp(1, n);
        let mode = if most { SelectionMode::Most } else { SelectionMode::Least };
        let wrap = |s: Vec<f64>| reliability::ReliabilityScores {
            method: ReliabilityMethod::Mag,
            scores: s,
            deviations: vec![Complex64::new(0.0, 0.0); n],
        };
        let base = reliability::select_tones(&wrap(scores.clone()), m, mode).unwrap();
        let scaled: Vec<f64> = scores.iter().map(|s| s * scale).collect();
        prop_assert_eq!(&base, &reliability::select_tones(&wrap(scaled), m, mode).unwrap());

        // Full-sort oracle.
        let mut pairs: Vec<(usize, f64)> = scores.into_iter().enumerate().collect();
        match mode {
            SelectionMode::Most => pairs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))),
            SelectionMode::Least => pairs.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))),
        }
        let mut expect: Vec<usize> = pairs[..m].iter().map(|p| p.0).collect();
        expect.sort_unstable();
        prop_assert_eq!(base, expect);
    }

    #[test]
    fn bit_mapping_round_trips(words in prop::collection::vec(0usize..16, 1..64)) {
        let c = QamConstellation::new(16).unwrap();
        let bits: Vec<bool> = words.iter().flat_map(|&w| c.bits_for_index(w)).collect();
        let symbols = c.map_bits(&bits).unwrap();
        prop_assert_eq!(c.demap_bits(&symbols), bits);
    }
}
