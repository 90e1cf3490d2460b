//! Per-tone decoding-reliability scores and ranked tone selection.
//!
//! Each equalized symbol's deviation from its hard decision is a candidate
//! measurement of the frequency-domain distortion. The scores rank how
//! trustworthy each candidate is; only the ordering matters downstream.
//!
//! Three scoring rules are provided: an exact Bayesian log-ratio against the
//! full alphabet, a geometric magnitude-and-phase approximation, and a
//! magnitude-only approximation that is blind to the competing points.

use crate::channel::DistortionModel;
use crate::constellation::QamConstellation;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Floor ratio applied to the competing-hypothesis mass. 1/3 is exactly
/// enough to keep the score nonnegative when a symbol lands in the center
/// between four constellation points; rarer cases are absorbed by clamping.
const RATIO_FLOOR: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReliabilityMethod {
    /// Full-alphabet Bayesian log-ratio.
    Bayes,
    /// Magnitude and phase of the deviation alone.
    MagPhase,
    /// Magnitude of the deviation alone.
    Mag,
}

impl ReliabilityMethod {
    pub const ALL: [ReliabilityMethod; 3] = [
        ReliabilityMethod::Bayes,
        ReliabilityMethod::MagPhase,
        ReliabilityMethod::Mag,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            ReliabilityMethod::Bayes => "bayes",
            ReliabilityMethod::MagPhase => "mag_phase",
            ReliabilityMethod::Mag => "mag",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bayes" => Ok(ReliabilityMethod::Bayes),
            "mag_phase" => Ok(ReliabilityMethod::MagPhase),
            "mag" => Ok(ReliabilityMethod::Mag),
            other => Err(Error::invalid(format!("unknown reliability method {other:?}"))),
        }
    }
}

impl std::fmt::Display for ReliabilityMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionMode {
    /// Highest-scoring tones.
    Most,
    /// Lowest-scoring tones (the adversarial control set).
    Least,
}

impl SelectionMode {
    pub fn tag(&self) -> &'static str {
        match self {
            SelectionMode::Most => "most",
            SelectionMode::Least => "least",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "most" => Ok(SelectionMode::Most),
            "least" => Ok(SelectionMode::Least),
            other => Err(Error::invalid(format!("unknown selection mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for SelectionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Per-tone scores plus the deviations they were computed from.
#[derive(Debug, Clone)]
pub struct ReliabilityScores {
    pub method: ReliabilityMethod,
    pub scores: Vec<f64>,
    pub deviations: Vec<Complex64>,
}

/// Dispatch to the configured scoring rule.
pub fn score(
    method: ReliabilityMethod,
    eq_symbols: &[Complex64],
    constellation: &QamConstellation,
    dm: &DistortionModel,
) -> ReliabilityScores {
    match method {
        ReliabilityMethod::Bayes => reliability_bayes(eq_symbols, constellation, dm),
        ReliabilityMethod::MagPhase => reliability_mag_phase(eq_symbols, constellation, dm),
        ReliabilityMethod::Mag => reliability_mag(eq_symbols, constellation, dm),
    }
}

/// Exact Bayesian reliability: log-ratio of the decoded hypothesis' density
/// to the floored sum over every competing constellation point, clamped at
/// zero from below.
pub fn reliability_bayes(
    eq_symbols: &[Complex64],
    constellation: &QamConstellation,
    dm: &DistortionModel,
) -> ReliabilityScores {
    let mut scores = Vec::with_capacity(eq_symbols.len());
    let mut deviations = Vec::with_capacity(eq_symbols.len());
    for (k, &v) in eq_symbols.iter().enumerate() {
        let s2 = dm.sigma_d[k] * dm.sigma_d[k];
        let (decoded, point) = constellation.hard_decision(v);
        let dev = v - point;
        deviations.push(dev);

        // Log-domain evaluation: the density normalisation cancels in the
        // ratio, leaving the squared distances over σ_D².
        let log_num = -dev.norm_sqr() / s2;
        let mut max_term = f64::NEG_INFINITY;
        let mut terms = Vec::with_capacity(constellation.order() - 1);
        for (i, p) in constellation.points().iter().enumerate() {
            if i == decoded {
                continue;
            }
            let t = -(v - p).norm_sqr() / s2;
            max_term = max_term.max(t);
            terms.push(t);
        }
        let log_sum = max_term
            + terms
                .iter()
                .map(|t| (t - max_term).exp())
                .sum::<f64>()
                .ln();
        let r = log_num - RATIO_FLOOR.ln() - log_sum;
        scores.push(r.max(0.0));
    }
    ReliabilityScores {
        method: ReliabilityMethod::Bayes,
        scores,
        deviations,
    }
}

/// Angular penalty applied to a deviation of magnitude `r` (clamped at
/// `d_min/√2`, the decision-region corner) and phase `theta` in the
/// constellation frame. Unity toward the region corners (θ = π/4 + iπ/2),
/// tapering toward the boundary midpoints as the magnitude grows.
pub fn phase_penalty(r: f64, theta: f64, d_min: f64) -> f64 {
    let corner = d_min / std::f64::consts::SQRT_2;
    let r = r.min(corner);
    let span = std::f64::consts::SQRT_2 * d_min;
    (span - r) / span + (r / span) * (4.0 * theta + std::f64::consts::PI).cos()
}

/// Geometric reliability from the magnitude and phase of the deviation
/// alone: the circular density weighted by [`phase_penalty`].
pub fn reliability_mag_phase(
    eq_symbols: &[Complex64],
    constellation: &QamConstellation,
    dm: &DistortionModel,
) -> ReliabilityScores {
    let d_min = constellation.d_min();
    let deviations = constellation.deviations(eq_symbols);
    let scores = deviations
        .iter()
        .enumerate()
        .map(|(k, dev)| {
            let g = phase_penalty(dev.norm(), dev.arg(), d_min);
            dm.density(k, *dev) * g
        })
        .collect();
    ReliabilityScores {
        method: ReliabilityMethod::MagPhase,
        scores,
        deviations,
    }
}

/// Magnitude-only reliability: the circular density of the deviation.
pub fn reliability_mag(
    eq_symbols: &[Complex64],
    constellation: &QamConstellation,
    dm: &DistortionModel,
) -> ReliabilityScores {
    let deviations = constellation.deviations(eq_symbols);
    let scores = deviations
        .iter()
        .enumerate()
        .map(|(k, dev)| dm.density(k, *dev))
        .collect();
    ReliabilityScores {
        method: ReliabilityMethod::Mag,
        scores,
        deviations,
    }
}

/// Indices of the `m` highest- (or lowest-) scoring tones, ties broken by
/// the lower tone index, returned sorted ascending by tone index.
pub fn select_tones(scores: &ReliabilityScores, m: usize, mode: SelectionMode) -> Result<Vec<usize>> {
    select_from(&scores.scores, m, mode)
}

pub(crate) fn select_from(scores: &[f64], m: usize, mode: SelectionMode) -> Result<Vec<usize>> {
    let n = scores.len();
    if m == 0 || m > n {
        return Err(Error::invalid(format!(
            "tone count m = {m} out of range 1..={n}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    match mode {
        SelectionMode::Most => {
            idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)))
        }
        SelectionMode::Least => {
            idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)))
        }
    }
    idx.truncate(m);
    idx.sort_unstable();
    Ok(idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelRealization, distortion_sigma};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform_model(n: usize, sigma_d: f64) -> DistortionModel {
        DistortionModel {
            clip_var: sigma_d * sigma_d,
            sigma_d: vec![sigma_d; n],
        }
    }

    fn c16() -> QamConstellation {
        QamConstellation::new(16).unwrap()
    }

    #[test]
    fn bayes_grows_as_sigma_shrinks_at_zero_deviation() {
        let c = c16();
        let eq = vec![c.point(5)];
        let mut last = f64::NEG_INFINITY;
        for sigma in [0.5, 0.2, 0.1, 0.05] {
            let dm = uniform_model(1, sigma);
            let r = reliability_bayes(&eq, &c, &dm).scores[0];
            assert!(r > last, "sigma {sigma}: {r} <= {last}");
            last = r;
        }
    }

    #[test]
    fn bayes_is_zero_at_four_point_center() {
        let c = c16();
        // Center of the cell spanned by four interior-adjacent points: any
        // lattice cell center works; take the one next to point 0.
        let p = c.point(0);
        let center = p + Complex64::new(c.d_min() / 2.0, c.d_min() / 2.0);
        let dm = uniform_model(1, 0.2);
        let r = reliability_bayes(&[center], &c, &dm).scores[0];
        assert_eq!(r, 0.0);
    }

    #[test]
    fn bayes_matches_compensated_direct_summation() {
        // Oracle: direct density evaluation with Kahan-compensated summation
        // over the full alphabet, no log-domain tricks.
        let c = c16();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let dm = uniform_model(1, 0.21);
        for _ in 0..5000 {
            let v = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let r = reliability_bayes(&[v], &c, &dm).scores[0];

            let (decoded, point) = c.hard_decision(v);
            let s2 = dm.sigma_d[0] * dm.sigma_d[0];
            let f = |u: Complex64| (-u.norm_sqr() / s2).exp() / (std::f64::consts::PI * s2);
            let mut sum = 0.0f64;
            let mut comp = 0.0f64;
            for (i, p) in c.points().iter().enumerate() {
                if i == decoded {
                    continue;
                }
                let term = f(v - p);
                let y = term - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            let oracle = (f(v - point) / (RATIO_FLOOR * sum)).ln().max(0.0);
            assert!(
                (r - oracle).abs() < 1e-6,
                "v = {v}: log-domain {r} vs direct {oracle}"
            );
        }
    }

    #[test]
    fn bayes_boundary_midpoint_scores_below_interior_same_magnitude() {
        // Minimum certainty occurs at the decision boundary.
        let c = c16();
        let dm = uniform_model(1, 0.2);
        let interior = (0..16).find(|&i| c.is_interior(i)).unwrap();
        let p = c.point(interior);
        let r = c.d_min() / 2.0;
        let toward_nn = p + Complex64::new(r, 0.0);
        let diagonal = p + Complex64::from_polar(r, std::f64::consts::FRAC_PI_4 * 0.9);
        let s_nn = reliability_bayes(&[toward_nn], &c, &dm).scores[0];
        let s_diag = reliability_bayes(&[diagonal], &c, &dm).scores[0];
        assert!(s_nn < s_diag, "boundary {s_nn} vs interior {s_diag}");
    }

    #[test]
    fn phase_penalty_pinned_values() {
        let d = c16().d_min();
        // Toward a region corner the penalty is unity for any magnitude.
        for r in [0.0, 0.1 * d, d / std::f64::consts::SQRT_2] {
            let g = phase_penalty(r, std::f64::consts::FRAC_PI_4, d);
            assert!((g - 1.0).abs() < 1e-12, "r = {r}: g = {g}");
        }
        // At the corner magnitude toward a boundary midpoint it vanishes.
        let g0 = phase_penalty(d / std::f64::consts::SQRT_2, 0.0, d);
        assert!(g0.abs() < 1e-12);
        // Zero magnitude is isotropic.
        for theta in [0.0, 0.3, 1.2, 3.0] {
            assert!((phase_penalty(0.0, theta, d) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_penalty_stays_in_unit_interval() {
        let d = c16().d_min();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            let r = rng.gen_range(0.0..2.0 * d);
            let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let g = phase_penalty(r, theta, d);
            assert!((-1e-12..=1.0 + 1e-12).contains(&g), "g = {g}");
        }
    }

    #[test]
    fn mag_phase_peak_at_zero_deviation() {
        let c = c16();
        let dm = uniform_model(1, 0.2);
        let r = reliability_mag_phase(&[c.point(3)], &c, &dm).scores[0];
        let peak = 1.0 / (std::f64::consts::PI * 0.2 * 0.2);
        assert!((r - peak).abs() < 1e-9);
    }

    #[test]
    fn mag_peak_and_monotonicity() {
        let c = c16();
        let dm = uniform_model(1, 0.25);
        let p = c.point(9);
        let peak = reliability_mag(&[p], &c, &dm).scores[0];
        assert!((peak - 1.0 / (std::f64::consts::PI * 0.25 * 0.25)).abs() < 1e-9);
        let mut last = peak;
        for r in [0.05, 0.1, 0.15, 0.2] {
            let s = reliability_mag(&[p + Complex64::new(r, 0.0)], &c, &dm).scores[0];
            assert!(s < last);
            last = s;
        }
    }

    #[test]
    fn mag_ranking_follows_channel_gain() {
        // Equal deviations: the tone with the stronger gain (smaller σ_D)
        // has the sharper density and outranks the weaker one.
        let c = c16();
        let dm = DistortionModel {
            clip_var: 0.01,
            sigma_d: vec![0.15, 0.3],
        };
        let dev = Complex64::new(0.05, 0.0);
        let eq = vec![c.point(0) + dev, c.point(0) + dev];
        let s = reliability_mag(&eq, &c, &dm).scores.clone();
        assert!(s[0] > s[1]);
    }

    #[test]
    fn select_tones_examples() {
        let scores = ReliabilityScores {
            method: ReliabilityMethod::Mag,
            scores: vec![0.5, 2.0, 1.0],
            deviations: vec![Complex64::new(0.0, 0.0); 3],
        };
        assert_eq!(select_tones(&scores, 2, SelectionMode::Most).unwrap(), vec![1, 2]);
        assert_eq!(select_tones(&scores, 2, SelectionMode::Least).unwrap(), vec![0, 2]);
        assert_eq!(
            select_tones(&scores, 3, SelectionMode::Most).unwrap(),
            vec![0, 1, 2]
        );
        assert_eq!(
            select_tones(&scores, 3, SelectionMode::Least).unwrap(),
            vec![0, 1, 2]
        );
        assert!(select_tones(&scores, 0, SelectionMode::Most).is_err());
        assert!(select_tones(&scores, 4, SelectionMode::Most).is_err());
    }

    #[test]
    fn select_tones_ties_break_low_index() {
        let scores = vec![1.0, 3.0, 3.0, 0.5];
        assert_eq!(select_from(&scores, 1, SelectionMode::Most).unwrap(), vec![1]);
        let scores = vec![2.0, 2.0, 2.0];
        assert_eq!(
            select_from(&scores, 2, SelectionMode::Most).unwrap(),
            vec![0, 1]
        );
        assert_eq!(
            select_from(&scores, 2, SelectionMode::Least).unwrap(),
            vec![0, 1]
        );
    }

    #[test]
    fn select_tones_matches_full_sort_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..40);
            let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
            let m = rng.gen_range(1..=n);
            let got = select_from(&scores, m, SelectionMode::Most).unwrap();
            // Oracle: full sort of (score, index) pairs.
            let mut pairs: Vec<(usize, f64)> = scores.iter().cloned().enumerate().collect();
            pairs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let mut expect: Vec<usize> = pairs[..m].iter().map(|p| p.0).collect();
            expect.sort_unstable();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn selection_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let scores: Vec<f64> = (0..32).map(|_| rng.gen_range(0.0..1.0)).collect();
            let scaled: Vec<f64> = scores.iter().map(|s| s * 37.5).collect();
            for mode in [SelectionMode::Most, SelectionMode::Least] {
                assert_eq!(
                    select_from(&scores, 10, mode).unwrap(),
                    select_from(&scaled, 10, mode).unwrap()
                );
            }
        }
    }

    #[test]
    fn methods_agree_on_ranking_for_small_sigma_equal_phase() {
        // Deviations along the same diagonal, strictly inside the decision
        // regions: as σ_D shrinks all three rules rank by magnitude.
        let c = c16();
        let n = 6;
        let dm = uniform_model(n, 0.05);
        let dir = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * 1.1);
        let mags = [0.02, 0.08, 0.05, 0.11, 0.14, 0.035];
        let interior = (0..16).find(|&i| c.is_interior(i)).unwrap();
        let eq: Vec<Complex64> = mags.iter().map(|&r| c.point(interior) + dir * r).collect();
        let by_mag = select_from(
            &mags.iter().map(|&r| -r).collect::<Vec<f64>>(),
            n,
            SelectionMode::Most,
        )
        .unwrap();
        for method in ReliabilityMethod::ALL {
            let s = score(method, &eq, &c, &dm);
            let ranked = select_from(&s.scores, n, SelectionMode::Most).unwrap();
            assert_eq!(ranked, by_mag, "method {method} disagrees");
        }
    }

    #[test]
    fn selected_tone_positions_are_uniform_over_random_frames() {
        // Reliability selection should not favour any tone index.
        let c = c16();
        let dft = crate::fourier::Dft::new(64);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gamma = crate::ofdm::gamma_from_clip_level(2.0, 1.0);
        let m = 32;
        let trials = 6000;
        let mut counts = vec![0usize; 64];
        for _ in 0..trials {
            let bits: Vec<bool> = (0..256).map(|_| rng.gen_bool(0.5)).collect();
            let x = c.map_bits(&bits).unwrap();
            let frame = crate::ofdm::FrameState::build(x, gamma, &dft);
            let ch = ChannelRealization::draw(&dft, 8, 1e-3, &mut rng);
            let rx = crate::channel::apply_channel(&frame.transmitted_freq(&dft), &ch, &mut rng);
            let eq = crate::channel::equalize(&rx, &ch).unwrap();
            let dm = distortion_sigma(&ch, gamma, 1.0);
            let s = reliability_mag_phase(&eq, &c, &dm);
            for k in select_tones(&s, m, SelectionMode::Most).unwrap() {
                counts[k] += 1;
            }
        }
        let expected = trials as f64 * m as f64 / 64.0;
        for (k, &cnt) in counts.iter().enumerate() {
            let rel = cnt as f64 / expected;
            assert!(
                (0.9..1.1).contains(&rel),
                "tone {k} selected at {rel:.3}× the uniform rate"
            );
        }
    }
}
