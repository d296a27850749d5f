use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qwalk_nm::spectral::{BandSet, FilterKind};
use qwalk_nm::NoiseModel;

use crate::config::{parse_bands, parse_floats, CoinInit, SeriesKind};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "qwalk-nm", version, about = "Open-system quantum walk experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one walk and export P(x), σ² and per-step observables.
    Walk(WalkArgs),
    /// Final variance over a grid of RTN couplings a, one curve per γ.
    SweepVariance(SweepArgs),
    /// Trend-filtered power spectrum of a TD, MI or variance series.
    Spectrum(SpectrumArgs),
    /// Built-in numerical checks, plus a checksum audit of an output directory.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseKind {
    Rtn,
    Oun,
    Pln,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    Mfbf,
    Expfit,
}

impl From<FilterArg> for FilterKind {
    fn from(f: FilterArg) -> Self {
        match f {
            FilterArg::Mfbf => FilterKind::Mfbf,
            FilterArg::Expfit => FilterKind::Expfit,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    /// Dephasing noise on the coin; omit for a noiseless walk.
    #[arg(long, value_enum)]
    pub noise: Option<NoiseKind>,
    /// RTN coupling a.
    #[arg(long = "a", allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Switching rate (RTN) or bandwidth (OUN, PLN) γ.
    #[arg(long = "gamma", allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Relaxation rate Γ (OUN, PLN).
    #[arg(long = "Gamma", allow_hyphen_values = true)]
    pub big_gamma: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CoinArgs {
    /// Coin angle θ of C(θ) = [[cos θ, sin θ], [sin θ, −cos θ]].
    #[arg(long = "coin-theta", allow_hyphen_values = true, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub coin_theta: f64,
    /// up, plus, minus, symmetric or custom:re0,im0,re1,im1.
    #[arg(long = "coin-init", allow_hyphen_values = true)]
    pub coin_init: Option<CoinInit>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[command(flatten)]
    pub coin: CoinArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Extra per-step observables for observables.csv.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "td,mi,variance")]
    pub series: Vec<SeriesKind>,
    /// Also write SVG figures.
    #[arg(long)]
    pub plots: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[command(flatten)]
    pub coin: CoinArgs,
    /// Only RTN can be swept over a.
    #[arg(long, value_enum)]
    pub noise: Option<NoiseKind>,
    /// Comma-separated RTN couplings.
    #[arg(long = "a", allow_hyphen_values = true, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1,1.2,1.4,1.6,1.8,2")]
    pub a: String,
    /// Comma-separated switching rates, one curve each.
    #[arg(long = "gamma", allow_hyphen_values = true, default_value = "0.001,5")]
    pub gamma: String,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// Number of steps T; the series has T + 1 samples.
    #[arg(long, default_value_t = 99)]
    pub steps: usize,
    #[command(flatten)]
    pub coin: CoinArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, value_enum, default_value = "td")]
    pub series: SeriesKind,
    #[arg(long, value_enum, default_value = "mfbf")]
    pub filter: FilterArg,
    /// p_lo,p_hi,s_lo,s_hi in cycles per step.
    #[arg(long, value_parser = parse_bands, default_value = "0.2,0.35,0,0.1")]
    pub bands: BandSet,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Directory holding a manifest.json to audit.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl NoiseArgs {
    /// The noise model, rejecting parameters that do not belong to it.
    pub fn resolve(&self) -> CliResult<Option<NoiseModel>> {
        let given = |name: &str, v: Option<f64>| v.map(|_| name.to_string());
        let need = |name: &str, v: Option<f64>, kind: &str| {
            v.ok_or_else(|| CliError::config(format!("--noise {kind} requires --{name}")))
        };
        let stray: Vec<String> = match self.noise {
            None => [given("a", self.a), given("gamma", self.gamma), given("Gamma", self.big_gamma)]
                .into_iter()
                .flatten()
                .collect(),
            Some(NoiseKind::Rtn) => given("Gamma", self.big_gamma).into_iter().collect(),
            Some(_) => given("a", self.a).into_iter().collect(),
        };
        if !stray.is_empty() {
            let kind = self.noise.map_or("none".to_string(), |k| format!("{k:?}").to_lowercase());
            return Err(CliError::config(format!(
                "--{} does not apply to noise '{kind}'",
                stray.join(", --")
            )));
        }
        let noise = match self.noise {
            None => return Ok(None),
            Some(NoiseKind::Rtn) => NoiseModel::rtn(need("a", self.a, "rtn")?, need("gamma", self.gamma, "rtn")?),
            Some(NoiseKind::Oun) => {
                NoiseModel::oun(need("Gamma", self.big_gamma, "oun")?, need("gamma", self.gamma, "oun")?)
            }
            Some(NoiseKind::Pln) => {
                NoiseModel::pln(need("Gamma", self.big_gamma, "pln")?, need("gamma", self.gamma, "pln")?)
            }
        };
        noise.validate()?;
        Ok(Some(noise))
    }
}

impl SweepArgs {
    pub fn grid(&self) -> CliResult<(Vec<f64>, Vec<f64>)> {
        if matches!(self.noise, Some(k) if k != NoiseKind::Rtn) {
            return Err(CliError::usage("sweep-variance sweeps the RTN coupling; only --noise rtn is accepted"));
        }
        let a = parse_floats(&self.a).map_err(CliError::usage)?;
        let gamma = parse_floats(&self.gamma).map_err(CliError::usage)?;
        Ok((a, gamma))
    }
}

impl RunArgs {
    pub fn pool(&self) -> CliResult<rayon::ThreadPool> {
        if self.threads == Some(0) {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads.unwrap_or(0))
            .build()
            .map_err(|e| CliError::config(format!("cannot start worker pool: {e}")))
    }
}
