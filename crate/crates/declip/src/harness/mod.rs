//! Deterministic Monte Carlo experiment driver.
//!
//! Each trial is one OFDM frame through bits → map → clip → channel →
//! equalize → every configured receiver. The per-trial random stream is
//! derived from `(master_seed, trial_index)` only, so results are identical
//! for any worker-thread count and any scheduling order.

mod config;

pub use config::{ExperimentConfig, Method};

use crate::baselines;
use crate::channel::{self, ChannelRealization};
use crate::constellation::QamConstellation;
use crate::error::{Error, Result};
use crate::fourier::Dft;
use crate::ofdm::{self, FrameState};
use crate::recovery::{self, BmpPriors};
use crate::reliability::{self, ReliabilityMethod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::io::Write;
use std::time::Instant;

/// One output cell of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub method: Method,
    pub reliability: ReliabilityMethod,
    pub m: usize,
}

/// One aggregated CSV row.
#[derive(Debug, Clone)]
pub struct SerRecord {
    pub method: Method,
    pub reliability: ReliabilityMethod,
    pub m: usize,
    pub frames: usize,
    pub symbol_errors: u64,
    pub ser: f64,
    pub wall_time_ms: u64,
    pub seed: u64,
}

/// Ground-truth diagnostics recorded per trial (transmitter knowledge; never
/// fed back into the receiver path).
#[derive(Debug, Clone)]
pub struct FrameDiagnostics {
    /// |Ω_T|: tones whose equalized symbol still decodes to the transmitted
    /// point.
    pub omega_t_size: usize,
    /// Model-predicted per-tone decision-error probability, averaged over
    /// the frame's tones.
    pub predicted_error_prob: f64,
    /// |Ω_m ∩ Ω_T| / m per (reliability, m) combination, aligned with
    /// [`selection_grid`].
    pub subset_fraction: Vec<f64>,
    /// Solver diagnostics that were recorded (not fatal) during the trial.
    pub solver_stalls: u32,
}

/// Raw per-trial output, aligned with [`cells`].
#[derive(Debug, Clone)]
pub struct TrialOutput {
    pub errors: Vec<u64>,
    pub nanos: Vec<u64>,
    pub diagnostics: FrameDiagnostics,
}

/// Full experiment result.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub records: Vec<SerRecord>,
    pub diagnostics: Vec<FrameDiagnostics>,
}

/// The deterministic cell order: methods × reliability × m_sweep.
pub fn cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for &method in &cfg.methods {
        for &rel in &cfg.reliability {
            for &m in &cfg.m_sweep {
                out.push(Cell {
                    method,
                    reliability: rel,
                    m,
                });
            }
        }
    }
    out
}

/// The (reliability, m) combinations a trial selects tones for.
pub fn selection_grid(cfg: &ExperimentConfig) -> Vec<(ReliabilityMethod, usize)> {
    let mut out = Vec::new();
    for &rel in &cfg.reliability {
        for &m in &cfg.m_sweep {
            out.push((rel, m));
        }
    }
    out
}

/// Precomputed shared state for an experiment.
struct ExperimentContext {
    cfg: ExperimentConfig,
    constellation: QamConstellation,
    dft: Dft,
    gamma: f64,
    noise_var: f64,
    cells: Vec<Cell>,
    selection: Vec<(ReliabilityMethod, usize)>,
    needs_wpal: bool,
    needs_bmp: bool,
}

impl ExperimentContext {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let constellation = QamConstellation::new(cfg.qam_order)?;
        let sigma_x = 1.0;
        let gamma = ofdm::gamma_from_clip_level(cfg.clip_level_db, sigma_x);
        let symbol_energy = channel::clipped_symbol_energy(gamma, sigma_x);
        let noise_var = channel::noise_variance_for_ebn0(
            cfg.snr_db_per_bit,
            constellation.bits_per_symbol(),
            symbol_energy,
        );
        let needs_wpal = cfg
            .methods
            .iter()
            .any(|m| matches!(m, Method::Wpal | Method::WpalItml));
        let needs_bmp = cfg
            .methods
            .iter()
            .any(|m| matches!(m, Method::Bmp | Method::BmpItml));
        Ok(Self {
            cells: cells(cfg),
            selection: selection_grid(cfg),
            cfg: cfg.clone(),
            constellation,
            dft: Dft::new(cfg.n),
            gamma,
            noise_var,
            needs_wpal,
            needs_bmp,
        })
    }
}

fn count_errors(decoded: &[usize], tx: &[usize]) -> u64 {
    decoded.iter().zip(tx).filter(|(a, b)| a != b).count() as u64
}

/// Run a single trial. The random stream depends on `(master_seed,
/// trial_index)` only.
pub fn run_trial(cfg: &ExperimentConfig, trial_index: usize) -> Result<TrialOutput> {
    run_trial_in(&ExperimentContext::new(cfg)?, trial_index)
}

fn run_trial_in(ctx: &ExperimentContext, trial_index: usize) -> Result<TrialOutput> {
    let cfg = &ctx.cfg;
    let c = &ctx.constellation;
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);
    rng.set_stream(trial_index as u64);

    // Transmit chain.
    let bits: Vec<bool> = (0..n * c.bits_per_symbol()).map(|_| rng.gen_bool(0.5)).collect();
    let tx_idx = c.indices_from_bits(&bits)?;
    let frame = FrameState::build(c.map_bits(&bits)?, ctx.gamma, &ctx.dft);
    let tx_freq = frame.transmitted_freq(&ctx.dft);

    // Channel and equalization.
    let ch = ChannelRealization::draw(&ctx.dft, cfg.taps, ctx.noise_var, &mut rng);
    let rx = channel::apply_channel(&tx_freq, &ch, &mut rng);
    let eq = channel::equalize(&rx, &ch)?;
    let dm = channel::distortion_sigma(&ch, ctx.gamma, 1.0);

    // Ground-truth diagnostics.
    let zf_idx = baselines::zf_decode(&eq, c);
    let omega_t: Vec<bool> = zf_idx.iter().zip(&tx_idx).map(|(a, b)| a == b).collect();
    let omega_t_size = omega_t.iter().filter(|&&x| x).count();
    let predicted_error_prob = dm
        .sigma_d
        .iter()
        .map(|&s| channel::symbol_error_prob(c.d_min(), s))
        .sum::<f64>()
        / n as f64;

    // Baselines, each computed once per frame.
    let mut timed: std::collections::HashMap<Method, (u64, u64)> = Default::default();
    let zf_start = Instant::now();
    let zf_errors = count_errors(&zf_idx, &tx_idx);
    timed.insert(Method::Zf, (zf_errors, zf_start.elapsed().as_nanos() as u64));
    let b = &cfg.baseline;
    if cfg.methods.contains(&Method::Itml) {
        let t = Instant::now();
        let errs = count_errors(&baselines::itml(&eq, c, ctx.gamma, b, &ctx.dft), &tx_idx);
        timed.insert(Method::Itml, (errs, t.elapsed().as_nanos() as u64));
    }
    if cfg.methods.contains(&Method::Dar) {
        let t = Instant::now();
        let errs = count_errors(&baselines::dar(&eq, c, ctx.gamma, b, &ctx.dft), &tx_idx);
        timed.insert(Method::Dar, (errs, t.elapsed().as_nanos() as u64));
    }
    if cfg.methods.contains(&Method::QuasiMl) {
        let t = Instant::now();
        let errs = count_errors(&baselines::quasi_ml(&eq, c, ctx.gamma, b, &ctx.dft), &tx_idx);
        timed.insert(Method::QuasiMl, (errs, t.elapsed().as_nanos() as u64));
    }

    // Reliability scores per method, shared across the m sweep.
    let mut scores = std::collections::HashMap::new();
    if ctx.needs_wpal || ctx.needs_bmp {
        for &rel in &cfg.reliability {
            scores.insert(rel, reliability::score(rel, &eq, c, &dm));
        }
    }

    // CS recoveries per (reliability, m).
    struct CsCell {
        wpal: Option<(u64, u64)>,
        wpal_itml: Option<(u64, u64)>,
        bmp: Option<(u64, u64)>,
        bmp_itml: Option<(u64, u64)>,
    }
    let mut solver_stalls = 0u32;
    let mut subset_fraction = Vec::with_capacity(ctx.selection.len());
    let mut cs_results: Vec<CsCell> = Vec::with_capacity(ctx.selection.len());
    for &(rel, m) in &ctx.selection {
        let mut cell = CsCell {
            wpal: None,
            wpal_itml: None,
            bmp: None,
            bmp_itml: None,
        };
        if ctx.needs_wpal || ctx.needs_bmp {
            let tones = reliability::select_tones(&scores[&rel], m, cfg.selection)?;
            subset_fraction.push(
                tones.iter().filter(|&&k| omega_t[k]).count() as f64 / tones.len() as f64,
            );
            let model =
                recovery::build_model(&eq, &zf_idx, &tones, &ch, &dm, ctx.gamma, c, &ctx.dft)?;
            if ctx.needs_wpal {
                let t = Instant::now();
                let epsilon = model.default_epsilon() * cfg.wpal.eps_scale;
                let result = match recovery::wpal_solve(&model, epsilon, &cfg.wpal) {
                    Ok(r) => r,
                    Err(Error::SolverStall { best, .. }) => {
                        solver_stalls += 1;
                        *best
                    }
                    Err(e) => return Err(e),
                };
                let wpal_nanos = t.elapsed().as_nanos() as u64;
                let decoded = recovery::correct_and_decode(&eq, &result, c, &ctx.dft);
                cell.wpal = Some((count_errors(&decoded, &tx_idx), wpal_nanos));
                if cfg.methods.contains(&Method::WpalItml) {
                    let t2 = Instant::now();
                    let decoded =
                        baselines::cs_then_itml(&eq, &result, c, ctx.gamma, b, &ctx.dft);
                    cell.wpal_itml = Some((
                        count_errors(&decoded, &tx_idx),
                        wpal_nanos + t2.elapsed().as_nanos() as u64,
                    ));
                }
            }
            if ctx.needs_bmp {
                let t = Instant::now();
                let priors = BmpPriors::from_system(&model, ctx.gamma, 1.0);
                let result = recovery::bmp_solve(&model, &priors, &cfg.bmp);
                let bmp_nanos = t.elapsed().as_nanos() as u64;
                let decoded = recovery::correct_and_decode(&eq, &result, c, &ctx.dft);
                cell.bmp = Some((count_errors(&decoded, &tx_idx), bmp_nanos));
                if cfg.methods.contains(&Method::BmpItml) {
                    let t2 = Instant::now();
                    let decoded =
                        baselines::cs_then_itml(&eq, &result, c, ctx.gamma, b, &ctx.dft);
                    cell.bmp_itml = Some((
                        count_errors(&decoded, &tx_idx),
                        bmp_nanos + t2.elapsed().as_nanos() as u64,
                    ));
                }
            }
        } else {
            subset_fraction.push(f64::NAN);
        }
        cs_results.push(cell);
    }

    // Assemble the per-cell grid.
    let mut errors = Vec::with_capacity(ctx.cells.len());
    let mut nanos = Vec::with_capacity(ctx.cells.len());
    for cell in &ctx.cells {
        let grid_idx = ctx
            .selection
            .iter()
            .position(|&(r, m)| r == cell.reliability && m == cell.m)
            .expect("cell outside selection grid");
        let (e, t) = match cell.method {
            Method::Zf | Method::Itml | Method::Dar | Method::QuasiMl => timed[&cell.method],
            Method::Wpal => cs_results[grid_idx].wpal.expect("wpal result"),
            Method::WpalItml => cs_results[grid_idx].wpal_itml.expect("wpal_itml result"),
            Method::Bmp => cs_results[grid_idx].bmp.expect("bmp result"),
            Method::BmpItml => cs_results[grid_idx].bmp_itml.expect("bmp_itml result"),
        };
        errors.push(e);
        nanos.push(t);
    }

    Ok(TrialOutput {
        errors,
        nanos,
        diagnostics: FrameDiagnostics {
            omega_t_size,
            predicted_error_prob,
            subset_fraction,
            solver_stalls,
        },
    })
}

/// Run all trials (in parallel on the current rayon pool) and aggregate.
/// Aggregation is index-ordered, so the outcome does not depend on thread
/// count or scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let ctx = ExperimentContext::new(cfg)?;
    let outputs: Vec<Result<TrialOutput>> = (0..cfg.frames)
        .into_par_iter()
        .map(|t| run_trial_in(&ctx, t))
        .collect();

    let mut errors = vec![0u64; ctx.cells.len()];
    let mut nanos = vec![0u64; ctx.cells.len()];
    let mut diagnostics = Vec::with_capacity(cfg.frames);
    for out in outputs {
        let out = out?;
        for (i, (&e, &t)) in out.errors.iter().zip(&out.nanos).enumerate() {
            errors[i] += e;
            nanos[i] += t;
        }
        diagnostics.push(out.diagnostics);
    }

    let symbols = (cfg.frames * cfg.n) as f64;
    let records = ctx
        .cells
        .iter()
        .zip(errors.iter().zip(&nanos))
        .map(|(cell, (&symbol_errors, &ns))| SerRecord {
            method: cell.method,
            reliability: cell.reliability,
            m: cell.m,
            frames: cfg.frames,
            symbol_errors,
            ser: symbol_errors as f64 / symbols,
            wall_time_ms: ns / 1_000_000,
            seed: cfg.master_seed,
        })
        .collect();

    Ok(ExperimentOutcome {
        records,
        diagnostics,
    })
}

/// Render records as CSV (fixed column order, LF endings).
pub fn records_to_csv(records: &[SerRecord]) -> String {
    let mut out = String::from("method,reliability,m,frames,symbol_errors,ser,wall_time_ms,seed\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.method, r.reliability, r.m, r.frames, r.symbol_errors, r.ser, r.wall_time_ms, r.seed
        ));
    }
    out
}

/// Write the CSV; on failure the caller still holds the records.
pub fn write_csv(records: &[SerRecord], path: &std::path::Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(records_to_csv(records).as_bytes())?;
    Ok(())
}

/// Empirical vs predicted tail of the true-decision tone-set size.
#[derive(Debug, Clone)]
pub struct OmegaTStat {
    pub alpha: f64,
    /// Empirical Pr(|Ω_T| > α·N).
    pub empirical: f64,
    /// Binomial approximation with the model-predicted per-tone error
    /// probability.
    pub predicted: f64,
}

/// Compare the measured |Ω_T| exceedance curve against the binomial
/// approximation `Σ_{ℓ≤N(1−α)} C(N,ℓ) P_e^ℓ (1−P_e)^{N−ℓ}`.
pub fn omega_t_stats(
    diagnostics: &[FrameDiagnostics],
    n: usize,
    alphas: &[f64],
) -> Result<Vec<OmegaTStat>> {
    if diagnostics.len() < 500 {
        return Err(Error::invalid(format!(
            "need at least 500 frames of diagnostics, got {}",
            diagnostics.len()
        )));
    }
    let frames = diagnostics.len() as f64;
    let p = diagnostics
        .iter()
        .map(|d| d.predicted_error_prob)
        .sum::<f64>()
        / frames;
    Ok(alphas
        .iter()
        .map(|&alpha| {
            let empirical = diagnostics
                .iter()
                .filter(|d| d.omega_t_size as f64 > alpha * n as f64)
                .count() as f64
                / frames;
            let limit = ((n as f64) * (1.0 - alpha) + 1e-9).floor() as usize;
            OmegaTStat {
                alpha,
                empirical,
                predicted: binomial_cdf(n, p, limit),
            }
        })
        .collect())
}

/// `Pr(Binomial(n, p) ≤ limit)` with plain f64 accumulation (n is small).
fn binomial_cdf(n: usize, p: f64, limit: usize) -> f64 {
    let q = 1.0 - p;
    let mut coeff = 1.0f64; // C(n, 0)
    let mut sum = 0.0;
    for l in 0..=limit.min(n) {
        if l > 0 {
            coeff *= (n - l + 1) as f64 / l as f64;
        }
        sum += coeff * p.powi(l as i32) * q.powi((n - l) as i32);
    }
    sum.min(1.0)
}

/// Convenience wrapper used by the CLI and examples: run, write, report.
pub fn run_to_csv(cfg: &ExperimentConfig, out: &std::path::Path) -> Result<ExperimentOutcome> {
    let outcome = run_experiment(cfg)?;
    write_csv(&outcome.records, out)?;
    Ok(outcome)
}
