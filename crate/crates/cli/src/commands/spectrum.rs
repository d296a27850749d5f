use serde::Serialize;

use qwalk_nm::experiment::{observe_run, trace_distance_run, ObserveOptions};
use qwalk_nm::spectral::{filtered_spectrum, BandPowers, BandSet, FilterKind, Peak};
use qwalk_nm::CoinState;

use crate::cli::SpectrumArgs;
use crate::config::{Experiment, ExperimentConfig, SeriesKind, SpectrumExperiment};
use crate::error::{CliError, CliResult};
use crate::manifest::Conventions;
use crate::output::{OutputDir, Table};
use crate::plot::{render, Chart, Line, Stroke};

pub fn run(args: SpectrumArgs) -> CliResult<()> {
    if args.series == SeriesKind::Td && args.coin.coin_init.is_some() {
        return Err(CliError::config(
            "the trace-distance series always uses the (|0⟩+|1⟩)/√2, (|0⟩−|1⟩)/√2 pair; drop --coin-init",
        ));
    }
    let walk = super::walk_config(args.steps, &args.coin, CoinState::symmetric())?;
    let noise = args.noise.resolve()?;
    let filter = FilterKind::from(args.filter);
    let config = ExperimentConfig::new(Experiment::Spectrum(SpectrumExperiment {
        walk,
        noise,
        series: args.series,
        filter,
        bands: args.bands,
    }));
    super::execute(config, Conventions::new(Some(filter), Some(args.bands)), &args.run, emit)
}

#[derive(Serialize)]
struct PeakReport<'a> {
    series: SeriesKind,
    filter: FilterKind,
    bands: BandSet,
    samples: usize,
    peaks: &'a [Peak],
    /// `ratio` is null when the secondary band holds no power.
    band_powers: BandPowersReport,
    residual_fraction: f64,
    monotone_trend: bool,
}

#[derive(Serialize)]
struct BandPowersReport {
    primary_area: f64,
    secondary_area: f64,
    ratio: Option<f64>,
    secondary_empty: bool,
}

impl From<&BandPowers> for BandPowersReport {
    fn from(b: &BandPowers) -> Self {
        Self {
            primary_area: b.primary_area,
            secondary_area: b.secondary_area,
            ratio: b.ratio.is_finite().then_some(b.ratio),
            secondary_empty: b.secondary_empty,
        }
    }
}

fn emit(config: &ExperimentConfig, out: &mut OutputDir) -> CliResult<()> {
    let Experiment::Spectrum(s) = &config.experiment else {
        unreachable!("spectrum command builds a spectrum experiment")
    };
    let values = match s.series {
        SeriesKind::Td => trace_distance_run(&s.walk, s.noise)?.values,
        SeriesKind::Mi | SeriesKind::Variance => {
            let options = ObserveOptions {
                mutual_information: s.series == SeriesKind::Mi,
                all_distributions: false,
            };
            let rec = observe_run(&s.walk, s.noise, options)?;
            match rec.mutual_information {
                Some(mi) => mi.values,
                None => rec.variance.values,
            }
        }
    };
    let fs = filtered_spectrum(&values, s.filter, &s.bands)?;
    let column = s.series.column();

    let mut series = Table::new(["step", column]);
    for (n, &v) in values.iter().enumerate() {
        series.push(n, &[v]);
    }
    out.write_table("series.csv", &series)?;

    let mut trend = Table::new(["step", column, "trend", "residual"]);
    for (n, ((&v, &f), &r)) in values.iter().zip(&fs.filter.fitted).zip(&fs.filter.residual).enumerate() {
        trend.push(n, &[v, f, r]);
    }
    out.write_table("mfbf.csv", &trend)?;

    let spec = &fs.spectrum;
    let half = spec.len() / 2;
    let mut table = Table::new(["bin", "frequency", "power"]);
    for k in 0..=half {
        table.push(k, &[spec.frequencies[k], spec.power[k]]);
    }
    out.write_table("spectrum.csv", &table)?;

    let report = PeakReport {
        series: s.series,
        filter: s.filter,
        bands: s.bands,
        samples: values.len(),
        peaks: &spec.peaks,
        band_powers: spec.band_powers.as_ref().expect("filtered_spectrum attaches band powers").into(),
        residual_fraction: fs.residual_fraction,
        monotone_trend: fs.is_monotone_trend(),
    };
    out.write_json("peaks.json", &report)?;

    let t = |v: &[f64]| v.iter().enumerate().map(|(n, &y)| (n as f64, y)).collect::<Vec<_>>();
    let trend_name = match s.filter {
        FilterKind::Mfbf => "monotone fit",
        FilterKind::Expfit => "exponential fit",
    };
    let top = Chart::new(format!("{column} and trend"), "step", column)
        .line(Line::new(column, t(&values)))
        .line(Line::new(trend_name, t(&fs.filter.fitted)).stroke(Stroke::Dashed));
    let power: Vec<(f64, f64)> = (1..=half).map(|k| (spec.frequencies[k], spec.power[k])).collect();
    let mut bottom = Chart::new("power spectrum of the residual", "f (cycles per step)", "S(f)").line(Line::new("S", power));
    for p in &spec.peaks {
        bottom = bottom.line(
            Line::new(format!("{:?} peak f = {}", p.band, p.frequency).to_lowercase(), vec![(p.frequency, p.power)])
                .markers(),
        );
    }
    out.write("plot.svg", render(&[top, bottom]).as_bytes())?;
    Ok(())
}
