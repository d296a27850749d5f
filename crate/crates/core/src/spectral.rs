//! Separating recurrence components of a distinguishability series.
//!
//! A Markovian process can only make a distance measure fall monotonically,
//! so whatever a series does beyond its closest non-increasing fit (the
//! monotonically falling best fit, MFBF) is backflow. The residual's power
//! spectrum then places each backflow source at its own frequency: the
//! walker's position at the fast primary recurrence, memory noise at a slow
//! secondary one.
//!
//! ```
//! use qwalk_nm::spectral::{mfbf, power_spectrum};
//!
//! let fit = mfbf(&[1.0, 0.0, 1.0]);
//! assert_eq!(fit.fitted, vec![1.0, 0.5, 0.5]);
//!
//! let spectrum = power_spectrum(&[1.0; 8]);
//! assert!((spectrum.power[0] - 64.0).abs() < 1e-12);
//! ```

use std::ops::Range;
use std::str::FromStr;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Peaks must exceed `median + PEAK_MAD_FACTOR · MAD` of their band.
pub const PEAK_MAD_FACTOR: f64 = 3.0;
/// Powers below this fraction of the spectrum maximum are roundoff.
pub const PEAK_RELATIVE_FLOOR: f64 = 1e-12;
/// A filtered series whose residual power is below this fraction of the
/// series power is treated as a monotone trend.
pub const MONOTONE_TREND_RESIDUAL_FRACTION: f64 = 0.05;

/// Closest non-increasing sequence in the least-squares sense.
#[derive(Debug, Clone, PartialEq)]
pub struct MfbfResult {
    pub fitted: Vec<f64>,
    pub residual: Vec<f64>,
    pub sse: f64,
    /// Index ranges pooled into a single fitted level.
    pub blocks: Vec<Range<usize>>,
}

/// Antitonic least-squares regression by pool-adjacent-violators.
pub fn mfbf(values: &[f64]) -> MfbfResult {
    // (sum, count, start) per pooled block.
    let mut stack: Vec<(f64, usize, usize)> = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        stack.push((v, 1, i));
        while stack.len() >= 2 {
            let (s1, n1, _) = stack[stack.len() - 1];
            let (s0, n0, start) = stack[stack.len() - 2];
            if s0 / n0 as f64 >= s1 / n1 as f64 {
                break;
            }
            stack.pop();
            let last = stack.len() - 1;
            stack[last] = (s0 + s1, n0 + n1, start);
        }
    }
    let mut fitted = Vec::with_capacity(values.len());
    let mut blocks = Vec::with_capacity(stack.len());
    for (sum, count, start) in stack {
        let level = sum / count as f64;
        fitted.extend(std::iter::repeat_n(level, count));
        blocks.push(start..start + count);
    }
    let residual: Vec<f64> = values.iter().zip(&fitted).map(|(x, f)| x - f).collect();
    let sse = residual.iter().map(|r| r * r).sum();
    MfbfResult {
        fitted,
        residual,
        sse,
        blocks,
    }
}

/// Least-squares exponential `exp(α + βn)` through the positive samples.
pub fn exponential_fit(values: &[f64]) -> Result<Vec<f64>> {
    let points: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(n, &v)| (n as f64, v.ln()))
        .collect();
    if points.len() < 2 {
        return Err(Error::Usage(
            "exponential fit needs at least two positive samples".into(),
        ));
    }
    let m = points.len() as f64;
    let mean_n = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_n).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_n) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_n;
    Ok((0..values.len())
        .map(|n| (intercept + slope * n as f64).exp())
        .collect())
}

/// Trend removed before the spectrum is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    /// Monotonically falling best fit.
    Mfbf,
    /// Straight line through the logarithm of the series.
    Expfit,
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mfbf" => Ok(FilterKind::Mfbf),
            "expfit" => Ok(FilterKind::Expfit),
            other => Err(Error::Usage(format!("unknown filter {other:?}"))),
        }
    }
}

/// Trend and residual of a filtered series.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtered {
    pub kind: FilterKind,
    pub fitted: Vec<f64>,
    pub residual: Vec<f64>,
}

pub fn apply_filter(values: &[f64], kind: FilterKind) -> Result<Filtered> {
    let fitted = match kind {
        FilterKind::Mfbf => mfbf(values).fitted,
        FilterKind::Expfit => exponential_fit(values)?,
    };
    let residual = values.iter().zip(&fitted).map(|(x, f)| x - f).collect();
    Ok(Filtered {
        kind,
        fitted,
        residual,
    })
}

/// Closed frequency interval in cycles per step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBand {
    pub lo: f64,
    pub hi: f64,
}

impl FrequencyBand {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.lo && f <= self.hi
    }

    fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandKind {
    Primary,
    Secondary,
}

/// Where to look for the two recurrence components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSet {
    pub primary: FrequencyBand,
    pub secondary: FrequencyBand,
}

impl Default for BandSet {
    /// Primary [0.2, 0.35], secondary (0, 0.1]; the zero bin is never searched.
    fn default() -> Self {
        Self {
            primary: FrequencyBand::new(0.2, 0.35),
            secondary: FrequencyBand::new(0.0, 0.1),
        }
    }
}

impl BandSet {
    pub fn validate(&self) -> Result<()> {
        for b in [self.primary, self.secondary] {
            if !(b.lo.is_finite() && b.hi.is_finite() && 0.0 <= b.lo && b.lo < b.hi && b.hi <= 0.5) {
                return Err(Error::Usage(format!(
                    "band [{}, {}] must lie within (0, 0.5]",
                    b.lo, b.hi
                )));
            }
        }
        if self.primary.overlaps(&self.secondary) {
            return Err(Error::Usage("primary and secondary bands overlap".into()));
        }
        Ok(())
    }

    fn labelled(&self) -> [(BandKind, FrequencyBand); 2] {
        [(BandKind::Primary, self.primary), (BandKind::Secondary, self.secondary)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub band: BandKind,
    pub bin: usize,
    pub frequency: f64,
    pub power: f64,
    /// The in-band significance level it exceeded.
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPowers {
    pub primary_area: f64,
    pub secondary_area: f64,
    /// primary / secondary; `+∞` when the secondary band carries no power.
    pub ratio: f64,
    pub secondary_empty: bool,
}

/// Power spectrum 𝒮(k) = |Σₙ xₙ e^{−2πikn/N}|² at f = k/N, plus whatever
/// peak and band analysis has been attached.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub power: Vec<f64>,
    pub frequencies: Vec<f64>,
    pub peaks: Vec<Peak>,
    pub band_powers: Option<BandPowers>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    /// Bins with 0 < f ≤ 0.5 inside `band`.
    fn bins_in(&self, band: &FrequencyBand) -> Vec<usize> {
        (1..self.len())
            .filter(|&k| self.frequencies[k] <= 0.5 && band.contains(self.frequencies[k]))
            .collect()
    }

    pub fn peak_in(&self, band: BandKind) -> Option<&Peak> {
        self.peaks.iter().find(|p| p.band == band)
    }

    /// Total power over the bins of `band`.
    pub fn band_sum(&self, band: &FrequencyBand) -> f64 {
        self.bins_in(band).iter().map(|&k| self.power[k]).sum()
    }
}

/// DFT power spectrum of a real series (FFT-backed).
pub fn power_spectrum(values: &[f64]) -> SpectrumResult {
    let n = values.len();
    let mut buffer: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    if n > 0 {
        FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    }
    let power: Vec<f64> = buffer.iter().map(|z| z.norm_sqr()).collect();
    let frequencies = (0..n).map(|k| k as f64 / n as f64).collect();

    #[cfg(debug_assertions)]
    {
        let energy: f64 = values.iter().map(|x| x * x).sum();
        let parseval: f64 = power.iter().sum::<f64>() / n.max(1) as f64;
        debug_assert!((energy - parseval).abs() <= 1e-9 * energy.max(1e-300));
        let scale = power.iter().copied().fold(0.0, f64::max);
        for k in 1..n {
            debug_assert!((power[k] - power[n - k]).abs() <= 1e-9 * scale.max(1e-300));
        }
    }

    SpectrumResult {
        power,
        frequencies,
        peaks: Vec::new(),
        band_powers: None,
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Significance level `median + 3·MAD` of a set of powers.
pub fn peak_threshold(powers: &[f64]) -> f64 {
    let mut sorted = powers.to_vec();
    sorted.sort_by(f64::total_cmp);
    let med = median(&sorted);
    let mut dev: Vec<f64> = sorted.iter().map(|p| (p - med).abs()).collect();
    dev.sort_by(f64::total_cmp);
    med + PEAK_MAD_FACTOR * median(&dev)
}

/// Strongest significant local maximum in each band, at most one per band.
///
/// Powers at roundoff level relative to the spectrum maximum never count.
/// A bin is a local maximum when it is strictly above its lower neighbour
/// and not below its upper one, so plateaus resolve toward lower frequency.
pub fn detect_peaks(
    spec: &SpectrumResult,
    bands: &[(BandKind, FrequencyBand)],
) -> Result<Vec<Peak>> {
    let n = spec.len();
    let floor = PEAK_RELATIVE_FLOOR * spec.power[1.min(n)..].iter().copied().fold(0.0, f64::max);
    let mut peaks = Vec::new();
    for &(kind, band) in bands {
        let bins = spec.bins_in(&band);
        if bins.is_empty() {
            return Err(Error::Usage(format!(
                "band [{}, {}] holds no spectral bins at N = {n}",
                band.lo, band.hi
            )));
        }
        let in_band: Vec<f64> = bins.iter().map(|&k| spec.power[k]).collect();
        let threshold = peak_threshold(&in_band).max(floor);
        let mut best: Option<Peak> = None;
        for &k in &bins {
            let p = spec.power[k];
            let below = spec.power[k - 1];
            let above = if k + 1 < n { spec.power[k + 1] } else { f64::NEG_INFINITY };
            if !(p > below && p >= above && p > threshold) {
                continue;
            }
            if best.is_none_or(|b| p > b.power) {
                best = Some(Peak {
                    band: kind,
                    bin: k,
                    frequency: spec.frequencies[k],
                    power: p,
                    threshold,
                });
            }
        }
        peaks.extend(best);
    }
    Ok(peaks)
}

/// Trapezoidal area of 𝒮 over the bins of a band (bin spacing 1/N).
pub fn band_area(spec: &SpectrumResult, band: &FrequencyBand) -> f64 {
    let bins = spec.bins_in(band);
    let df = 1.0 / spec.len().max(1) as f64;
    bins.windows(2)
        .map(|w| 0.5 * (spec.power[w[0]] + spec.power[w[1]]) * df)
        .sum()
}

/// Ratio of the primary to the secondary band area.
pub fn band_power_ratio(spec: &SpectrumResult, bands: &BandSet) -> Result<BandPowers> {
    bands.validate()?;
    let primary_area = band_area(spec, &bands.primary);
    let secondary_area = band_area(spec, &bands.secondary);
    let secondary_empty = secondary_area <= 0.0;
    Ok(BandPowers {
        primary_area,
        secondary_area,
        ratio: if secondary_empty {
            f64::INFINITY
        } else {
            primary_area / secondary_area
        },
        secondary_empty,
    })
}

/// A filtered series with its analysed spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSpectrum {
    pub filter: Filtered,
    pub spectrum: SpectrumResult,
    pub bands: BandSet,
    /// Σ residual² / Σ series².
    pub residual_fraction: f64,
}

impl FilteredSpectrum {
    /// Residual energy below [`MONOTONE_TREND_RESIDUAL_FRACTION`] of the series.
    pub fn is_monotone_trend(&self) -> bool {
        self.residual_fraction < MONOTONE_TREND_RESIDUAL_FRACTION
    }
}

/// Removes the trend, takes the power spectrum of the residual and runs the
/// peak and band analysis.
pub fn filtered_spectrum(values: &[f64], kind: FilterKind, bands: &BandSet) -> Result<FilteredSpectrum> {
    if values.len() < 2 {
        return Err(Error::Usage("spectral analysis needs at least two samples".into()));
    }
    bands.validate()?;
    let filter = apply_filter(values, kind)?;
    let mut spectrum = power_spectrum(&filter.residual);
    spectrum.peaks = detect_peaks(&spectrum, &bands.labelled())?;
    spectrum.band_powers = Some(band_power_ratio(&spectrum, bands)?);
    let total: f64 = values.iter().map(|x| x * x).sum();
    let residual: f64 = filter.residual.iter().map(|x| x * x).sum();
    Ok(FilteredSpectrum {
        filter,
        spectrum,
        bands: *bands,
        residual_fraction: if total > 0.0 { residual / total } else { 0.0 },
    })
}
