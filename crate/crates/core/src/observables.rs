//! Per-step scalar observables of a walk.

use serde::{Deserialize, Serialize};

use crate::density::{mutual_information, trace_norm_distance, DensityOperator, Factor};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::walk::{CoinState, Lattice};

pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;

/// What produced a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub noise: Option<NoiseModel>,
    pub coin: CoinState,
    pub coin_angle: f64,
    pub steps: usize,
}

/// One observable sampled at steps `0..=T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub name: String,
    pub values: Vec<f64>,
    pub metadata: Option<RunMetadata>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integrity("non-finite value in time series".into()));
        }
        Ok(Self {
            name: name.into(),
            values,
            metadata: None,
        })
    }

    pub fn with_metadata(mut self, metadata: RunMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Leading `n` samples.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            name: self.name.clone(),
            values: self.values[..n.min(self.values.len())].to_vec(),
            metadata: self.metadata.clone(),
        }
    }
}

/// P(x) = Σ_c ⟨c, x|ρ|c, x⟩ over the lattice slots.
pub fn position_distribution(rho: &DensityOperator) -> Vec<f64> {
    let np = rho.position_dim();
    let pops = rho.populations();
    (0..np)
        .map(|x| (0..rho.coin_dim()).map(|c| pops[c * np + x]).sum())
        .collect()
}

pub fn mean_position(dist: &[f64], lattice: Lattice) -> f64 {
    dist.iter()
        .enumerate()
        .map(|(i, p)| lattice.position(i) as f64 * p)
        .sum()
}

/// Σx²P(x) − (ΣxP(x))².
pub fn variance(dist: &[f64], lattice: Lattice) -> Result<f64> {
    if dist.len() != lattice.size() {
        return Err(Error::Shape(format!(
            "distribution over {} sites on a lattice of {}",
            dist.len(),
            lattice.size()
        )));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Integrity(format!("distribution sums to {total}")));
    }
    let mean = mean_position(dist, lattice);
    let second: f64 = dist
        .iter()
        .enumerate()
        .map(|(i, p)| (lattice.position(i) as f64).powi(2) * p)
        .sum();
    Ok((second - mean * mean).max(0.0))
}

/// Variance of an unbiased ±1 classical random walk after `t` steps.
pub fn classical_walk_variance(t: usize) -> f64 {
    t as f64
}

/// Reduced coin states of two walks started from (|0⟩ ± |1⟩)/√2 under the
/// same noise and coin.
#[derive(Debug, Clone)]
pub struct PairedRun {
    pub rho_plus: Vec<DensityOperator>,
    pub rho_minus: Vec<DensityOperator>,
    /// Trace distance of the full coin ⊗ position states, when recorded.
    pub full_distance: Option<Vec<f64>>,
    pub metadata: Option<RunMetadata>,
}

/// D(t) between the reduced coin states of a paired run.
pub fn trace_distance_series(pair: &PairedRun) -> Result<TimeSeries> {
    if pair.rho_plus.len() != pair.rho_minus.len() {
        return Err(Error::Usage(format!(
            "paired runs have {} and {} steps",
            pair.rho_plus.len(),
            pair.rho_minus.len()
        )));
    }
    let values = pair
        .rho_plus
        .iter()
        .zip(&pair.rho_minus)
        .map(|(a, b)| trace_norm_distance(a, b))
        .collect::<Result<Vec<_>>>()?;
    let series = TimeSeries::new("trace_distance", values)?;
    Ok(match &pair.metadata {
        Some(m) => series.with_metadata(m.clone()),
        None => series,
    })
}

/// Coin–position mutual information (bits) of each state.
pub fn mutual_information_series<'a, I>(states: I) -> Result<TimeSeries>
where
    I: IntoIterator<Item = &'a DensityOperator>,
{
    let values = states
        .into_iter()
        .map(mutual_information)
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new("mutual_information", values)
}

/// Reduced coin state, the input of the coin trace distance.
pub fn coin_state(rho: &DensityOperator) -> DensityOperator {
    rho.partial_trace(Factor::Coin)
}

/// Total positive increase Σₙ max(0, x_{n+1} − x_n) of a series.
pub fn blp_backflow(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum()
}

/// Whether every increment is at most `tolerance`.
pub fn is_non_increasing(values: &[f64], tolerance: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + tolerance)
}

/// `max − min` of a series.
pub fn oscillation_amplitude(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}
