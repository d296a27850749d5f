use rayon::prelude::*;

use qwalk_nm::experiment::{observe_run, ObserveOptions};
use qwalk_nm::observables::classical_walk_variance;
use qwalk_nm::{CoinState, NoiseModel};

use crate::cli::SweepArgs;
use crate::config::{sweep_walk, Experiment, ExperimentConfig, SweepExperiment};
use crate::error::CliResult;
use crate::manifest::Conventions;
use crate::output::{format_float, OutputDir, Table};
use crate::plot::{render, Chart, Line, Stroke};

pub fn run(args: SweepArgs) -> CliResult<()> {
    let (amplitudes, gammas) = args.grid()?;
    let walk = super::walk_config(args.steps, &args.coin, CoinState::symmetric())?;
    let config = ExperimentConfig::new(Experiment::SweepVariance(SweepExperiment {
        steps: walk.steps,
        coin_angle: walk.coin_angle,
        initial_coin: walk.initial_coin,
        amplitudes,
        gammas,
    }));
    super::execute(config, Conventions::new(None, None), &args.run, emit)
}

fn final_variance(s: &SweepExperiment, noise: Option<NoiseModel>) -> CliResult<f64> {
    let cfg = sweep_walk(s, s.initial_coin);
    let rec = observe_run(&cfg, noise, ObserveOptions::default())?;
    Ok(*rec.variance.values.last().expect("steps + 1 samples"))
}

fn emit(config: &ExperimentConfig, out: &mut OutputDir) -> CliResult<()> {
    let Experiment::SweepVariance(s) = &config.experiment else {
        unreachable!("sweep command builds a sweep experiment")
    };
    let points: Vec<(f64, f64)> = s
        .gammas
        .iter()
        .flat_map(|&g| s.amplitudes.iter().map(move |&a| (a, g)))
        .collect();
    // Index 0 is the noiseless reference; results come back in input order.
    let jobs: Vec<Option<NoiseModel>> = std::iter::once(None)
        .chain(points.iter().map(|&(a, g)| Some(NoiseModel::rtn(a, g))))
        .collect();
    let variances = jobs
        .par_iter()
        .map(|&noise| final_variance(s, noise))
        .collect::<CliResult<Vec<f64>>>()?;
    let noiseless = variances[0];
    let classical = classical_walk_variance(s.steps);

    let mut table = Table::new(["a", "gamma", "variance", "classical", "noiseless"]);
    for (&(a, g), &v) in points.iter().zip(&variances[1..]) {
        table.push_cells(vec![
            format_float(a),
            format_float(g),
            format_float(v),
            format_float(classical),
            format_float(noiseless),
        ]);
    }
    out.write_table("variance_vs_a.csv", &table)?;

    let (a_lo, a_hi) = s
        .amplitudes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| (lo.min(a), hi.max(a)));
    let mut chart = Chart::new(format!("variance after {} steps", s.steps), "a", "σ²").log_y();
    for &g in &s.gammas {
        let curve: Vec<(f64, f64)> = points
            .iter()
            .zip(&variances[1..])
            .filter(|((_, pg), _)| *pg == g)
            .map(|(&(a, _), &v)| (a, v))
            .collect();
        chart = chart.line(Line::new(format!("γ = {}", format_float(g)), curve).markers());
    }
    chart = chart
        .line(Line::new("classical", vec![(a_lo, classical), (a_hi, classical)]).stroke(Stroke::Dashed))
        .line(Line::new("noiseless", vec![(a_lo, noiseless), (a_hi, noiseless)]).stroke(Stroke::Dotted));
    out.write("plot.svg", render(&[chart]).as_bytes())?;
    Ok(())
}
