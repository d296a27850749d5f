//! Whole runs: a paired trace-distance run, and a single run with the
//! position and entropy observables recorded at every step.

use rayon::prelude::*;

use crate::density::{mutual_information, trace_norm_distance, DensityOperator};
use crate::error::Result;
use crate::noise::NoiseModel;
use crate::observables::{
    coin_state, position_distribution, trace_distance_series, variance, PairedRun, RunMetadata,
    TimeSeries,
};
use crate::walk::{CoinState, Evolution, WalkConfig};

/// Snapshots held back at once while entropies are evaluated in parallel.
const ENTROPY_BATCH: usize = 16;

fn metadata(cfg: &WalkConfig, noise: Option<NoiseModel>) -> RunMetadata {
    RunMetadata {
        noise,
        coin: cfg.initial_coin,
        coin_angle: cfg.coin_angle,
        steps: cfg.steps,
    }
}

/// Runs the (|0⟩ ± |1⟩)/√2 pair in lockstep. With `record_full_distance`
/// the trace distance of the complete states is kept as well.
pub fn simulate_pair(
    cfg: &WalkConfig,
    noise: Option<NoiseModel>,
    record_full_distance: bool,
) -> Result<PairedRun> {
    let mut plus = Evolution::new(&cfg.clone().with_coin(CoinState::plus()), noise)?;
    let mut minus = Evolution::new(&cfg.clone().with_coin(CoinState::minus()), noise)?;
    let mut rho_plus = vec![coin_state(plus.state())];
    let mut rho_minus = vec![coin_state(minus.state())];
    let mut full = record_full_distance.then(Vec::new);
    if let Some(f) = full.as_mut() {
        f.push(trace_norm_distance(plus.state(), minus.state())?);
    }
    loop {
        let (a, b) = rayon::join(|| plus.advance(), || minus.advance());
        if !(a? & b?) {
            break;
        }
        rho_plus.push(coin_state(plus.state()));
        rho_minus.push(coin_state(minus.state()));
        if let Some(f) = full.as_mut() {
            f.push(trace_norm_distance(plus.state(), minus.state())?);
        }
    }
    Ok(PairedRun {
        rho_plus,
        rho_minus,
        full_distance: full,
        metadata: Some(metadata(cfg, noise)),
    })
}

/// Convenience: the reduced-coin trace-distance series of a paired run.
pub fn trace_distance_run(cfg: &WalkConfig, noise: Option<NoiseModel>) -> Result<TimeSeries> {
    trace_distance_series(&simulate_pair(cfg, noise, false)?)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ObserveOptions {
    pub mutual_information: bool,
    /// Keep P(x) for every step, not just the last.
    pub all_distributions: bool,
}

/// Observables of a single run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub metadata: RunMetadata,
    /// P(x) per recorded step (every step or only the final one).
    pub distributions: Vec<Vec<f64>>,
    pub variance: TimeSeries,
    pub mutual_information: Option<TimeSeries>,
    /// Λ, p or q applied on each step (1 at step 0 and for noiseless runs).
    pub decoherence: TimeSeries,
}

impl RunRecord {
    pub fn final_distribution(&self) -> &[f64] {
        self.distributions.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

pub fn observe_run(
    cfg: &WalkConfig,
    noise: Option<NoiseModel>,
    options: ObserveOptions,
) -> Result<RunRecord> {
    let lattice = cfg.lattice();
    let mut evolution = Evolution::new(cfg, noise)?;
    let mut distributions = Vec::new();
    let mut variances = Vec::with_capacity(cfg.steps + 1);
    let mut decoherence = vec![1.0];
    let mut mi = Vec::with_capacity(cfg.steps + 1);
    let mut pending: Vec<DensityOperator> = Vec::new();

    let flush = |pending: &mut Vec<DensityOperator>, mi: &mut Vec<f64>| -> Result<()> {
        let values = pending
            .par_iter()
            .map(mutual_information)
            .collect::<Result<Vec<_>>>()?;
        mi.extend(values);
        pending.clear();
        Ok(())
    };

    loop {
        let rho = evolution.state();
        let dist = position_distribution(rho);
        variances.push(variance(&dist, lattice)?);
        if options.all_distributions || evolution.step_index() == cfg.steps {
            distributions.push(dist);
        }
        if options.mutual_information {
            pending.push(rho.clone());
            if pending.len() == ENTROPY_BATCH {
                flush(&mut pending, &mut mi)?;
            }
        }
        if !evolution.advance()? {
            break;
        }
        decoherence.push(match noise {
            Some(n) => n.decoherence(evolution.step_index() as f64)?,
            None => 1.0,
        });
    }
    if options.mutual_information {
        flush(&mut pending, &mut mi)?;
    }

    Ok(RunRecord {
        metadata: metadata(cfg, noise),
        distributions,
        variance: TimeSeries::new("variance", variances)?,
        mutual_information: if options.mutual_information {
            Some(TimeSeries::new("mutual_information", mi)?)
        } else {
            None
        },
        decoherence: TimeSeries::new("decoherence", decoherence)?,
    })
}
