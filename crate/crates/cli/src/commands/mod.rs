mod selftest;
mod spectrum;
mod sweep;
mod walk;

use std::time::Instant;

use qwalk_nm::{CoinState, WalkConfig};

use crate::cli::{CoinArgs, Command, RunArgs};
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::manifest::{clear_previous, Conventions, RunManifest, MANIFEST_FILE};
use crate::output::OutputDir;

pub use selftest::run_checks;

/// Executes one parsed command line.
pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Walk(args) => walk::run(args),
        Command::SweepVariance(args) => sweep::run(args),
        Command::Spectrum(args) => spectrum::run(args),
        Command::Selftest(args) => selftest::run(args),
    }
}

fn walk_config(steps: usize, coin: &CoinArgs, default_coin: CoinState) -> CliResult<WalkConfig> {
    let initial = match coin.coin_init {
        Some(c) => c.resolve()?,
        None => default_coin,
    };
    Ok(WalkConfig::new(steps).with_angle(coin.coin_theta).with_coin(initial))
}

/// Validates the config, runs `body` inside the worker pool and writes the
/// manifest for whatever `body` emitted.
fn execute<F>(config: ExperimentConfig, conventions: Conventions, run: &RunArgs, body: F) -> CliResult<()>
where
    F: FnOnce(&ExperimentConfig, &mut OutputDir) -> CliResult<()> + Send,
{
    config.validate()?;
    let pool = run.pool()?;
    let mut out = OutputDir::create(&run.out)?;
    clear_previous(out.root())?;
    let start = Instant::now();
    pool.install(|| body(&config, &mut out))?;
    let elapsed = start.elapsed().as_secs_f64();
    let manifest = RunManifest::new(
        config,
        conventions,
        pool.current_num_threads(),
        elapsed,
        out.artifacts().to_vec(),
    );
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    std::fs::write(out.root().join(MANIFEST_FILE), bytes)?;
    println!(
        "{}: wrote {} files and {MANIFEST_FILE} to {} in {elapsed:.2}s",
        manifest.config.command(),
        manifest.artifacts.len(),
        out.root().display()
    );
    Ok(())
}
