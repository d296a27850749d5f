//! Resolved, serializable experiment descriptions.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use qwalk_nm::spectral::{BandSet, FilterKind, FrequencyBand};
use qwalk_nm::{CoinState, NoiseModel, WalkConfig, C64};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Shortest series the spectral pipeline accepts.
pub const MIN_SPECTRUM_SAMPLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(flatten)]
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Experiment {
    Walk(WalkExperiment),
    SweepVariance(SweepExperiment),
    Spectrum(SpectrumExperiment),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkExperiment {
    pub walk: WalkConfig,
    pub noise: Option<NoiseModel>,
    /// Per-step observables beyond P(x) and σ².
    pub series: Vec<SeriesKind>,
    pub plots: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepExperiment {
    pub steps: usize,
    pub coin_angle: f64,
    pub initial_coin: CoinState,
    /// RTN couplings a, swept for every γ.
    pub amplitudes: Vec<f64>,
    pub gammas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumExperiment {
    pub walk: WalkConfig,
    pub noise: Option<NoiseModel>,
    pub series: SeriesKind,
    pub filter: FilterKind,
    pub bands: BandSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    /// Coin trace distance of the (|0⟩±|1⟩)/√2 pair.
    Td,
    /// Coin–position mutual information.
    Mi,
    Variance,
}

impl SeriesKind {
    pub fn column(self) -> &'static str {
        match self {
            SeriesKind::Td => "trace_distance",
            SeriesKind::Mi => "mutual_information",
            SeriesKind::Variance => "variance",
        }
    }
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment,
        }
    }

    pub fn command(&self) -> &'static str {
        match self.experiment {
            Experiment::Walk(_) => "walk",
            Experiment::SweepVariance(_) => "sweep-variance",
            Experiment::Spectrum(_) => "spectrum",
        }
    }

    /// Every precondition of the run, checked before any work starts.
    pub fn validate(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        match &self.experiment {
            Experiment::Walk(w) => {
                w.walk.validate()?;
                validate_noise(w.noise)?;
            }
            Experiment::SweepVariance(s) => {
                if s.amplitudes.is_empty() || s.gammas.is_empty() {
                    return Err(CliError::usage("sweep grid is empty"));
                }
                sweep_walk(s, CoinState::up()).validate()?;
                for &gamma in &s.gammas {
                    for &a in &s.amplitudes {
                        NoiseModel::rtn(a, gamma).validate()?;
                    }
                }
            }
            Experiment::Spectrum(s) => {
                s.walk.validate()?;
                validate_noise(s.noise)?;
                s.bands.validate()?;
                if s.walk.steps + 1 < MIN_SPECTRUM_SAMPLES {
                    return Err(CliError::usage(format!(
                        "spectrum needs at least {MIN_SPECTRUM_SAMPLES} samples, got {} (steps + 1)",
                        s.walk.steps + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn noises(&self) -> Vec<NoiseModel> {
        match &self.experiment {
            Experiment::Walk(w) => w.noise.into_iter().collect(),
            Experiment::Spectrum(s) => s.noise.into_iter().collect(),
            Experiment::SweepVariance(s) => s
                .gammas
                .iter()
                .flat_map(|&g| s.amplitudes.iter().map(move |&a| NoiseModel::rtn(a, g)))
                .collect(),
        }
    }
}

fn validate_noise(noise: Option<NoiseModel>) -> CliResult<()> {
    if let Some(n) = noise {
        n.validate()?;
    }
    Ok(())
}

/// Walk configuration shared by every point of a sweep.
pub fn sweep_walk(s: &SweepExperiment, coin: CoinState) -> WalkConfig {
    WalkConfig::new(s.steps).with_angle(s.coin_angle).with_coin(coin)
}

/// `--coin-init` value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoinInit {
    Up,
    Plus,
    Minus,
    Symmetric,
    Custom([f64; 4]),
}

impl CoinInit {
    pub fn resolve(self) -> CliResult<CoinState> {
        Ok(match self {
            CoinInit::Up => CoinState::up(),
            CoinInit::Plus => CoinState::plus(),
            CoinInit::Minus => CoinState::minus(),
            CoinInit::Symmetric => CoinState::symmetric(),
            CoinInit::Custom([r0, i0, r1, i1]) => CoinState::new(C64::new(r0, i0), C64::new(r1, i1))?,
        })
    }
}

impl FromStr for CoinInit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "up" => Ok(CoinInit::Up),
            "plus" => Ok(CoinInit::Plus),
            "minus" => Ok(CoinInit::Minus),
            "symmetric" => Ok(CoinInit::Symmetric),
            _ => {
                let body = s.strip_prefix("custom:").ok_or_else(|| {
                    format!("unknown coin '{s}' (expected up, plus, minus, symmetric or custom:re0,im0,re1,im1)")
                })?;
                let parts = parse_floats(body)?;
                let parts: [f64; 4] = parts
                    .try_into()
                    .map_err(|v: Vec<f64>| format!("custom coin needs 4 numbers, got {}", v.len()))?;
                Ok(CoinInit::Custom(parts))
            }
        }
    }
}

/// `--bands p_lo,p_hi,s_lo,s_hi`.
pub fn parse_bands(s: &str) -> Result<BandSet, String> {
    let v = parse_floats(s)?;
    match v.as_slice() {
        &[p_lo, p_hi, s_lo, s_hi] => Ok(BandSet {
            primary: FrequencyBand::new(p_lo, p_hi),
            secondary: FrequencyBand::new(s_lo, s_hi),
        }),
        _ => Err(format!("--bands needs 4 numbers, got {}", v.len())),
    }
}

/// Comma-separated finite numbers.
pub fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let v: f64 = t.trim().parse().map_err(|_| format!("'{}' is not a number", t.trim()))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("'{}' is not finite", t.trim()))
            }
        })
        .collect()
}
