//! Bayesian matching pursuit over the phase-augmented real amplitudes.
//!
//! Greedy MAP search over binary support vectors under a Bernoulli-Gaussian
//! prior: each expansion adds the single index with the largest
//! support-posterior gain, computed with rank-one (Sherman–Morrison) updates
//! of the Gaussian evidence, while a small beam of the best hypotheses is
//! kept alive. The amplitude estimate on the winning support is the
//! posterior mean.

use super::{CsModel, RecoveryResult};
use std::collections::HashSet;

/// Bernoulli-Gaussian prior parameters.
#[derive(Debug, Clone)]
pub struct BmpPriors {
    /// Per-sample activity probability p₁.
    pub activity: f64,
    /// Variance of an active amplitude.
    pub amp_var: f64,
    /// Noise variance per complex measurement.
    pub noise_var: f64,
}

impl BmpPriors {
    /// Priors from system knowledge: the receiver knows the clip threshold
    /// and the channel. The base activity is the Rayleigh tail mass
    /// `e^{−γ²/σ_x²}` (refined per sample by [`activity_log_odds`] inside
    /// the solver), the amplitude variance is the conditional mean-square
    /// clip amplitude, and the noise variance is the mean selected-tone
    /// level.
    pub fn from_system(model: &CsModel, gamma: f64, sigma_x: f64) -> Self {
        let activity = (-(gamma / sigma_x).powi(2)).exp().clamp(1e-12, 1.0 - 1e-12);
        let amp_var = crate::channel::clip_noise_power(gamma, sigma_x) / activity;
        let noise_var = model.noise_scales.iter().map(|s| s * s).sum::<f64>()
            / model.noise_scales.len() as f64;
        Self {
            activity,
            amp_var,
            noise_var,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BmpConfig {
    /// Beam width D.
    pub beam: usize,
    /// Support budget as a fraction of the measurement count.
    pub max_support_fraction: f64,
}

impl Default for BmpConfig {
    fn default() -> Self {
        Self {
            beam: 4,
            max_support_fraction: 1.0,
        }
    }
}

/// One support hypothesis with the state needed for rank-one updates.
///
/// `Φ_S^{-1}` is never formed; it is represented by the chain of update
/// vectors `u_i = Φ_i^{-1} A_{n_i}` with their scalars `κ_i`.
#[derive(Clone)]
struct Hypothesis {
    support: Vec<usize>,
    metric: f64,
    /// `A_n^T Φ_S^{-1} A_n` for every column.
    curvature: Vec<f64>,
    /// `A_n^T Φ_S^{-1} y` for every column.
    correlation: Vec<f64>,
}

/// Per-sample activity log-odds from the receiver's time-domain magnitudes.
///
/// A clipped sample is observed at the threshold magnitude plus radial
/// noise; an unclipped one follows the (truncated) Rayleigh envelope. The
/// base activity sets the prior mass, the magnitude likelihood ratio does
/// the rest. Odds are clamped so a single sample can never dominate the
/// support metric outright.
pub fn activity_log_odds(model: &CsModel, priors: &BmpPriors) -> Vec<f64> {
    let gamma = model.clip_threshold;
    let p = priors.activity.clamp(1e-12, 1.0 - 1e-12);
    let g2 = -p.ln(); // (γ/σ_x)² implied by the activity
    let sigma_x_sq = gamma * gamma / g2;
    let radial = (model.time_noise_var / 2.0).sqrt().max(1e-6 * gamma);
    let base = (p / (1.0 - p)).ln();
    let trunc_mass = (1.0 - (-g2).exp()).ln();
    model
        .time_magnitudes
        .iter()
        .map(|&mag| {
            let lf_clip = -0.5 * ((mag - gamma) / radial).powi(2) - radial.ln();
            let r = mag.min(gamma).max(1e-12 * gamma);
            let mut lf_unclip = (2.0 * r / sigma_x_sq).ln() - r * r / sigma_x_sq - trunc_mass;
            if mag > gamma {
                // Above the threshold the unclipped explanation needs the
                // same radial-noise excursion.
                lf_unclip -= 0.5 * ((mag - gamma) / radial).powi(2);
            }
            (base + lf_clip - lf_unclip).clamp(-9.0, 7.0)
        })
        .collect()
}

/// Stacked-real view of the phase-augmented operator and observation.
struct RealModel {
    /// Columns of `[Re Ψ̃; Im Ψ̃]`, column-major, each of length 2m.
    columns: Vec<Vec<f64>>,
    y: Vec<f64>,
    /// Per-real-dimension noise variance σ_n²/2.
    sigma_sq: f64,
    amp_var: f64,
    log_prior_ratio: Vec<f64>,
}

impl RealModel {
    fn build(model: &CsModel, priors: &BmpPriors) -> Self {
        let n = model.n();
        let m = model.m();
        let mut columns = Vec::with_capacity(n);
        for i in 0..n {
            let mut unit = vec![0.0f64; n];
            unit[i] = 1.0;
            let col = model.forward_real(&unit);
            let mut stacked = Vec::with_capacity(2 * m);
            stacked.extend(col.iter().map(|v| v.re));
            stacked.extend(col.iter().map(|v| v.im));
            columns.push(stacked);
        }
        let mut y = Vec::with_capacity(2 * m);
        y.extend(model.observation.iter().map(|v| v.re));
        y.extend(model.observation.iter().map(|v| v.im));
        // Keep the evidence covariance invertible even in noiseless tests.
        let sigma_sq = (priors.noise_var / 2.0).max(1e-9 * priors.amp_var);
        Self {
            columns,
            y,
            sigma_sq,
            amp_var: priors.amp_var,
            log_prior_ratio: activity_log_odds(model, priors),
        }
    }

    fn root_hypothesis(&self) -> Hypothesis {
        let y_energy: f64 = self.y.iter().map(|v| v * v).sum();
        let dims = self.y.len() as f64;
        let metric = -0.5 * y_energy / self.sigma_sq - 0.5 * dims * self.sigma_sq.ln();
        let curvature = self
            .columns
            .iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>() / self.sigma_sq)
            .collect();
        let correlation = self
            .columns
            .iter()
            .map(|c| dot(c, &self.y) / self.sigma_sq)
            .collect();
        Hypothesis {
            support: Vec::new(),
            metric,
            curvature,
            correlation,
        }
    }

    /// Posterior gain of adding column `n` to the hypothesis.
    fn gain(&self, hyp: &Hypothesis, n: usize) -> f64 {
        let denom = 1.0 + self.amp_var * hyp.curvature[n];
        0.5 * (self.amp_var / denom) * hyp.correlation[n] * hyp.correlation[n]
            - 0.5 * denom.ln()
            + self.log_prior_ratio[n]
    }

    /// Child hypothesis with column `n` added, via a rank-one update.
    ///
    /// Needs the chain of earlier update vectors to apply `Φ_S^{-1}`.
    fn expand(
        &self,
        hyp: &Hypothesis,
        chain: &UpdateChain,
        n: usize,
    ) -> (Hypothesis, (Vec<f64>, f64)) {
        // u = Φ_S^{-1} A_n applied through the update chain.
        let a_n = &self.columns[n];
        let mut u: Vec<f64> = a_n.iter().map(|v| v / self.sigma_sq).collect();
        for (uv, kappa) in chain {
            let proj = dot(uv, a_n);
            for (ui, uvi) in u.iter_mut().zip(uv) {
                *ui -= kappa * proj * uvi;
            }
        }
        let kappa = self.amp_var / (1.0 + self.amp_var * hyp.curvature[n]);

        let mut child = hyp.clone();
        child.metric += self.gain(hyp, n);
        child.support.push(n);
        child.support.sort_unstable();
        let u_dot_y = hyp.correlation[n];
        for i in 0..self.columns.len() {
            let proj = dot(&u, &self.columns[i]);
            child.curvature[i] -= kappa * proj * proj;
            child.correlation[i] -= kappa * proj * u_dot_y;
        }
        (child, (u, kappa))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The Sherman–Morrison update vectors `u_i` with their scalars `κ_i`,
/// representing `Φ_S^{-1}` without forming it.
type UpdateChain = Vec<(Vec<f64>, f64)>;

/// Greedy MAP support search; always returns the best hypothesis found.
pub fn bmp_solve(model: &CsModel, priors: &BmpPriors, cfg: &BmpConfig) -> RecoveryResult {
    let n = model.n();
    let real = RealModel::build(model, priors);
    let max_support = ((cfg.max_support_fraction * model.m() as f64).ceil() as usize).max(1);
    let beam_width = cfg.beam.max(1);

    // Each beam entry carries its hypothesis and the update-vector chain.
    let root = real.root_hypothesis();
    let mut beam: Vec<(Hypothesis, UpdateChain)> = vec![(root.clone(), Vec::new())];
    let mut best = root;
    let mut steps = 0usize;

    loop {
        if beam[0].0.support.len() >= max_support {
            break;
        }
        // Score every (parent, column) expansion without materialising it.
        let mut candidates: Vec<(usize, usize, f64)> = Vec::new();
        for (pi, (hyp, _)) in beam.iter().enumerate() {
            for col in 0..n {
                if hyp.support.binary_search(&col).is_ok() {
                    continue;
                }
                candidates.push((pi, col, hyp.metric + real.gain(hyp, col)));
            }
        }
        let Some(&(_, _, best_candidate)) = candidates
            .iter()
            .max_by(|a, b| a.2.total_cmp(&b.2))
        else {
            break;
        };
        if best_candidate < best.metric {
            break;
        }
        steps += 1;

        candidates.sort_by(|a, b| b.2.total_cmp(&a.2));
        let mut next: Vec<(Hypothesis, UpdateChain)> = Vec::with_capacity(beam_width);
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        for &(pi, col, _) in &candidates {
            if next.len() >= beam_width {
                break;
            }
            let mut key = beam[pi].0.support.clone();
            key.push(col);
            key.sort_unstable();
            if !seen.insert(key) {
                continue;
            }
            let (child, update) = real.expand(&beam[pi].0, &beam[pi].1, col);
            let mut chain = beam[pi].1.clone();
            chain.push(update);
            if child.metric > best.metric {
                best = child.clone();
            }
            next.push((child, chain));
        }
        if next.is_empty() {
            break;
        }
        beam = next;
    }

    // Posterior-mean amplitudes on the winning support, clamped to the
    // nonnegative clip model before mapping back through the phases.
    let mut amplitudes = vec![0.0f64; n];
    for &s in &best.support {
        amplitudes[s] = (real.amp_var * best.correlation[s]).max(0.0);
    }
    let clip_estimate = model.amplitudes_to_clip(&amplitudes);
    let residual: f64 = model
        .observation
        .iter()
        .zip(model.forward_real(&amplitudes))
        .map(|(y, p)| (y - p).norm_sqr())
        .sum();
    RecoveryResult {
        clip_estimate,
        support: best.support,
        iterations: steps,
        residual_norm: residual.sqrt(),
        feasible: true,
    }
}
