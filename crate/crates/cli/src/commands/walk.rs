use qwalk_nm::experiment::{observe_run, trace_distance_run, ObserveOptions};
use qwalk_nm::observables::{classical_walk_variance, mean_position};
use qwalk_nm::CoinState;

use crate::cli::WalkArgs;
use crate::config::{Experiment, ExperimentConfig, SeriesKind, WalkExperiment};
use crate::error::CliResult;
use crate::manifest::Conventions;
use crate::output::{format_float, OutputDir, Table};
use crate::plot::{render, Chart, Line, Stroke};

pub fn run(args: WalkArgs) -> CliResult<()> {
    let walk = super::walk_config(args.steps, &args.coin, CoinState::symmetric())?;
    let noise = args.noise.resolve()?;
    let mut series = args.series.clone();
    series.sort_by_key(|s| *s as u8);
    series.dedup();
    let config = ExperimentConfig::new(Experiment::Walk(WalkExperiment {
        walk,
        noise,
        series,
        plots: args.plots,
    }));
    super::execute(config, Conventions::new(None, None), &args.run, emit)
}

fn emit(config: &ExperimentConfig, out: &mut OutputDir) -> CliResult<()> {
    let Experiment::Walk(w) = &config.experiment else {
        unreachable!("walk command builds a walk experiment")
    };
    let cfg = &w.walk;
    let want = |k: SeriesKind| w.series.contains(&k);
    let options = ObserveOptions {
        mutual_information: want(SeriesKind::Mi),
        all_distributions: true,
    };
    let (record, td) = rayon::join(
        || observe_run(cfg, w.noise, options),
        || want(SeriesKind::Td).then(|| trace_distance_run(cfg, w.noise)).transpose(),
    );
    let (record, td) = (record?, td?);
    let lattice = cfg.lattice();
    let reach = cfg.steps as i64 + cfg.initial_position.abs();

    // Wide format: one row per step, one column per site in the light cone.
    let sites: Vec<(usize, i64)> = lattice
        .positions()
        .enumerate()
        .filter(|(_, x)| x.abs() <= reach)
        .collect();
    let mut dist = Table::new(std::iter::once("step".to_string()).chain(sites.iter().map(|(_, x)| x.to_string())));
    for (n, p) in record.distributions.iter().enumerate() {
        let row: Vec<f64> = sites.iter().map(|&(i, _)| p[i]).collect();
        dist.push(n, &row);
    }
    out.write_table("distribution.csv", &dist)?;

    let mut var = Table::new(["step", "variance", "classical"]);
    for (n, v) in record.variance.values.iter().enumerate() {
        var.push(n, &[*v, classical_walk_variance(n)]);
    }
    out.write_table("variance.csv", &var)?;

    let mut header = vec!["step", "mean", "variance", "decoherence"];
    if td.is_some() {
        header.push(SeriesKind::Td.column());
    }
    if record.mutual_information.is_some() {
        header.push(SeriesKind::Mi.column());
    }
    let mut obs = Table::new(header);
    for n in 0..=cfg.steps {
        let mut cells = vec![
            n.to_string(),
            format_float(mean_position(&record.distributions[n], lattice)),
            format_float(record.variance.values[n]),
            format_float(record.decoherence.values[n]),
        ];
        if let Some(td) = &td {
            cells.push(format_float(td.values[n]));
        }
        if let Some(mi) = &record.mutual_information {
            cells.push(format_float(mi.values[n]));
        }
        obs.push_cells(cells);
    }
    out.write_table("observables.csv", &obs)?;

    if w.plots {
        let noise_label = w.noise.map_or("noiseless".to_string(), |n| n.name().to_string());
        let final_p: Vec<(f64, f64)> = sites
            .iter()
            .map(|&(i, x)| (x as f64, record.final_distribution()[i]))
            .collect();
        let chart = Chart::new(format!("P(x) after {} steps", cfg.steps), "x", "P(x)").line(Line::new(noise_label, final_p));
        out.write("distribution.svg", render(&[chart]).as_bytes())?;

        let t = |v: &[f64]| v.iter().enumerate().map(|(n, &y)| (n as f64, y)).collect::<Vec<_>>();
        let classical: Vec<f64> = (0..=cfg.steps).map(classical_walk_variance).collect();
        let chart = Chart::new("variance", "t", "σ²")
            .line(Line::new("walk", t(&record.variance.values)))
            .line(Line::new("classical", t(&classical)).stroke(Stroke::Dashed));
        out.write("variance.svg", render(&[chart]).as_bytes())?;

        let mut charts = Vec::new();
        if let Some(td) = &td {
            charts.push(Chart::new("coin trace distance", "t", "D").line(Line::new("D(t)", t(&td.values))));
        }
        if let Some(mi) = &record.mutual_information {
            charts.push(Chart::new("coin–position mutual information", "t", "I (bits)").line(Line::new("I(t)", t(&mi.values))));
        }
        if !charts.is_empty() {
            out.write("observables.svg", render(&charts).as_bytes())?;
        }
    }
    Ok(())
}
