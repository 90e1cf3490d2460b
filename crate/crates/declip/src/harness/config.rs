//! Experiment configuration and its flat key=value file format.
//!
//! Every key is written on save and optional on load (defaults apply), so a
//! saved config parses back to an identical value and re-serialises to
//! identical bytes.

use crate::baselines::BaselineConfig;
use crate::error::{Error, Result};
use crate::recovery::{BmpConfig, WpalConfig};
use crate::reliability::{ReliabilityMethod, SelectionMode};

/// Receiver under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Zf,
    Itml,
    Dar,
    QuasiMl,
    Wpal,
    Bmp,
    WpalItml,
    BmpItml,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Zf,
        Method::Itml,
        Method::Dar,
        Method::QuasiMl,
        Method::Wpal,
        Method::Bmp,
        Method::WpalItml,
        Method::BmpItml,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Method::Zf => "zf",
            Method::Itml => "itml",
            Method::Dar => "dar",
            Method::QuasiMl => "quasi_ml",
            Method::Wpal => "wpal",
            Method::Bmp => "bmp",
            Method::WpalItml => "wpal_itml",
            Method::BmpItml => "bmp_itml",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .find(|m| m.tag() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }

    /// Whether the method consumes a reliability-selected tone set.
    pub fn uses_selection(&self) -> bool {
        matches!(
            self,
            Method::Wpal | Method::Bmp | Method::WpalItml | Method::BmpItml
        )
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Full experiment description: one run of the Monte Carlo driver.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Subcarrier count N.
    pub n: usize,
    /// Constellation order M.
    pub qam_order: usize,
    /// Clipping level 10·log10(γ²/σ_x²) in dB.
    pub clip_level_db: f64,
    /// Per-bit SNR in dB.
    pub snr_db_per_bit: f64,
    /// Channel tap count P.
    pub taps: usize,
    /// Monte Carlo trial count.
    pub frames: usize,
    pub master_seed: u64,
    pub methods: Vec<Method>,
    pub reliability: Vec<ReliabilityMethod>,
    pub selection: SelectionMode,
    /// Selected-tone counts |Ω_m| to sweep.
    pub m_sweep: Vec<usize>,
    pub baseline: BaselineConfig,
    pub wpal: WpalConfig,
    pub bmp: BmpConfig,
}

impl Default for ExperimentConfig {
    /// The reference operating point: 64 subcarriers of 16-QAM at 25 dB per
    /// bit through an 8-tap Rayleigh channel, clipped at 2 dB.
    fn default() -> Self {
        Self {
            n: 64,
            qam_order: 16,
            clip_level_db: 2.0,
            snr_db_per_bit: 25.0,
            taps: 8,
            frames: 2000,
            master_seed: 1,
            methods: Method::ALL.to_vec(),
            reliability: ReliabilityMethod::ALL.to_vec(),
            selection: SelectionMode::Most,
            m_sweep: vec![8, 16, 24, 32, 40, 48, 56, 64],
            baseline: BaselineConfig::default(),
            wpal: WpalConfig::default(),
            bmp: BmpConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.frames == 0 || self.taps == 0 {
            return Err(Error::Config("counts must be positive".into()));
        }
        if self.taps > self.n {
            return Err(Error::Config("taps must not exceed n".into()));
        }
        if !matches!(self.qam_order, 4 | 16 | 64) {
            return Err(Error::Config(format!(
                "unsupported qam_order {}",
                self.qam_order
            )));
        }
        if self.methods.is_empty() || self.reliability.is_empty() || self.m_sweep.is_empty() {
            return Err(Error::Config(
                "methods, reliability and m_sweep must be non-empty".into(),
            ));
        }
        if self.m_sweep.iter().any(|&m| m == 0 || m > self.n) {
            return Err(Error::Config("m_sweep values must be in 1..=n".into()));
        }
        if self.baseline.iterations == 0 {
            return Err(Error::Config("iterations must be >= 1".into()));
        }
        if !(self.baseline.quasi_eps_fraction > 0.0 && self.baseline.quasi_eps_fraction <= 1.0) {
            return Err(Error::Config(
                "quasi_eps_fraction must be in (0, 1]".into(),
            ));
        }
        if self.wpal.eps_scale <= 0.0 || self.wpal.max_iters == 0 {
            return Err(Error::Config("invalid wpal settings".into()));
        }
        if self.bmp.beam == 0
            || self.bmp.max_support_fraction <= 0.0
            || self.bmp.max_support_fraction > 1.0
        {
            return Err(Error::Config("invalid bmp settings".into()));
        }
        Ok(())
    }

    /// Serialise as the flat key=value config format.
    pub fn to_config_string(&self) -> String {
        let methods = self
            .methods
            .iter()
            .map(|m| m.tag())
            .collect::<Vec<_>>()
            .join(",");
        let reliability = self
            .reliability
            .iter()
            .map(|r| r.tag())
            .collect::<Vec<_>>()
            .join(",");
        let m_sweep = self
            .m_sweep
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "n={}\nqam_order={}\nclip_level_db={}\nsnr_db_per_bit={}\ntaps={}\nframes={}\n\
             master_seed={}\nmethods={}\nreliability={}\nselection={}\nm_sweep={}\n\
             iterations={}\nquasi_eps_fraction={}\nwpal_eps_scale={}\nwpal_max_iters={}\n\
             wpal_tol={}\nwpal_bisection_steps={}\nbmp_beam={}\nbmp_max_support_fraction={}\n",
            self.n,
            self.qam_order,
            self.clip_level_db,
            self.snr_db_per_bit,
            self.taps,
            self.frames,
            self.master_seed,
            methods,
            reliability,
            self.selection,
            m_sweep,
            self.baseline.iterations,
            self.baseline.quasi_eps_fraction,
            self.wpal.eps_scale,
            self.wpal.max_iters,
            self.wpal.tol,
            self.wpal.bisection_steps,
            self.bmp.beam,
            self.bmp.max_support_fraction,
        )
    }

    /// Parse the flat key=value format. Missing keys take their defaults;
    /// unknown keys are rejected.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| Error::Config(format!("line {}: bad {what}: {value:?}", lineno + 1));
            match key {
                "n" => cfg.n = value.parse().map_err(|_| bad("n"))?,
                "qam_order" => cfg.qam_order = value.parse().map_err(|_| bad("qam_order"))?,
                "clip_level_db" => {
                    cfg.clip_level_db = value.parse().map_err(|_| bad("clip_level_db"))?
                }
                "snr_db_per_bit" => {
                    cfg.snr_db_per_bit = value.parse().map_err(|_| bad("snr_db_per_bit"))?
                }
                "taps" => cfg.taps = value.parse().map_err(|_| bad("taps"))?,
                "frames" => cfg.frames = value.parse().map_err(|_| bad("frames"))?,
                "master_seed" => {
                    cfg.master_seed = value.parse().map_err(|_| bad("master_seed"))?
                }
                "methods" => {
                    cfg.methods = value
                        .split(',')
                        .map(|s| Method::parse(s.trim()))
                        .collect::<Result<_>>()?
                }
                "reliability" => {
                    cfg.reliability = value
                        .split(',')
                        .map(|s| ReliabilityMethod::parse(s.trim()))
                        .collect::<Result<_>>()?
                }
                "selection" => cfg.selection = SelectionMode::parse(value)?,
                "m_sweep" => {
                    cfg.m_sweep = value
                        .split(',')
                        .map(|s| s.trim().parse().map_err(|_| bad("m_sweep")))
                        .collect::<Result<_>>()?
                }
                "iterations" => {
                    cfg.baseline.iterations = value.parse().map_err(|_| bad("iterations"))?
                }
                "quasi_eps_fraction" => {
                    cfg.baseline.quasi_eps_fraction =
                        value.parse().map_err(|_| bad("quasi_eps_fraction"))?
                }
                "wpal_eps_scale" => {
                    cfg.wpal.eps_scale = value.parse().map_err(|_| bad("wpal_eps_scale"))?
                }
                "wpal_max_iters" => {
                    cfg.wpal.max_iters = value.parse().map_err(|_| bad("wpal_max_iters"))?
                }
                "wpal_tol" => cfg.wpal.tol = value.parse().map_err(|_| bad("wpal_tol"))?,
                "wpal_bisection_steps" => {
                    cfg.wpal.bisection_steps =
                        value.parse().map_err(|_| bad("wpal_bisection_steps"))?
                }
                "bmp_beam" => cfg.bmp.beam = value.parse().map_err(|_| bad("bmp_beam"))?,
                "bmp_max_support_fraction" => {
                    cfg.bmp.max_support_fraction =
                        value.parse().map_err(|_| bad("bmp_max_support_fraction"))?
                }
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_config_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_config_string())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_bit_exactly() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_config_string();
        let parsed = ExperimentConfig::from_config_str(&text).unwrap();
        assert_eq!(parsed, cfg);
        assert_eq!(parsed.to_config_string(), text);
    }

    #[test]
    fn modified_config_round_trips() {
        let mut cfg = ExperimentConfig {
            frames: 123,
            snr_db_per_bit: 17.25,
            methods: vec![Method::Wpal, Method::Zf],
            reliability: vec![ReliabilityMethod::MagPhase],
            selection: SelectionMode::Least,
            m_sweep: vec![4, 9, 64],
            ..ExperimentConfig::default()
        };
        cfg.baseline.quasi_eps_fraction = 0.375;
        cfg.wpal.eps_scale = 1.5;
        let parsed = ExperimentConfig::from_config_str(&cfg.to_config_string()).unwrap();
        assert_eq!(parsed, cfg);
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let text = "# comment\n\nframes=5\n  n = 128 \n";
        let cfg = ExperimentConfig::from_config_str(text).unwrap();
        assert_eq!(cfg.frames, 5);
        assert_eq!(cfg.n, 128);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ExperimentConfig::from_config_str("bogus=1\n").is_err());
        assert!(ExperimentConfig::from_config_str("frames=abc\n").is_err());
        assert!(ExperimentConfig::from_config_str("m_sweep=0\n").is_err());
        assert!(ExperimentConfig::from_config_str("m_sweep=8,999\n").is_err());
        assert!(ExperimentConfig::from_config_str("methods=warp\n").is_err());
        assert!(ExperimentConfig::from_config_str("quasi_eps_fraction=0\n").is_err());
    }
}
