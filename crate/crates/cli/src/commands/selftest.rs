use std::f64::consts::PI;

use qwalk_nm::noise::kraus_at;
use qwalk_nm::observables::position_distribution;
use qwalk_nm::spectral::{filtered_spectrum, mfbf, BandKind, BandSet, FilterKind};
use qwalk_nm::walk::run_walk_collect;
use qwalk_nm::{hermitian_eigensystem, hermitian_eigenvalues, CoinState, ComplexMatrix, NoiseModel, WalkConfig, C64};

use crate::cli::SelftestArgs;
use crate::error::{CliError, CliResult};
use crate::manifest::audit;

/// One built-in check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, result: qwalk_nm::Result<(bool, String)>) -> Check {
    match result {
        Ok((pass, detail)) => Check { name, pass, detail },
        Err(e) => Check {
            name,
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn two_step_distribution() -> qwalk_nm::Result<(bool, String)> {
    let cfg = WalkConfig::new(2).with_coin(CoinState::up());
    let states = run_walk_collect(&cfg, None)?;
    let p = position_distribution(&states[2]);
    let lattice = cfg.lattice();
    let at = |x: i64| p[lattice.index(x).expect("inside lattice")];
    let got = [at(-2), at(0), at(2)];
    let pass = got.iter().zip([0.25, 0.5, 0.25]).all(|(g, e)| (g - e).abs() < 1e-14);
    Ok((pass, format!("P(-2), P(0), P(2) = {got:?}")))
}

fn kraus_completeness() -> qwalk_nm::Result<(bool, String)> {
    let mut worst = 0.0f64;
    for noise in [NoiseModel::rtn(0.05, 0.001), NoiseModel::oun(0.1, 0.01), NoiseModel::pln(0.1, 0.01)] {
        for t in [0.0, 1.0, 17.0, 100.0] {
            worst = worst.max(kraus_at(&noise, t)?.completeness_residual());
        }
    }
    Ok((worst <= 1e-10, format!("largest residual {worst:.1e}")))
}

fn unitary_walk() -> qwalk_nm::Result<(bool, String)> {
    let states = run_walk_collect(&WalkConfig::new(20), None)?;
    let last = states.last().expect("21 states");
    let purity = last.purity();
    let trace = last.trace();
    Ok((
        (purity - 1.0).abs() < 1e-10 && (trace - 1.0).abs() < 1e-12,
        format!("trace {trace}, purity {purity} after 20 steps"),
    ))
}

fn eigen_routes() -> qwalk_nm::Result<(bool, String)> {
    let n = 12;
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let (a, b) = ((i + 2 * j) as f64, (3 * i + j) as f64);
            let z = C64::new((a * 0.37).sin() + (b * 0.37).sin(), (a * 0.11).cos() - (b * 0.11).cos());
            let z = if i == j { C64::new(z.re, 0.0) } else { z };
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    let ql = hermitian_eigenvalues(&m)?;
    let jacobi = hermitian_eigensystem(&m)?.values;
    let diff = ql.iter().zip(&jacobi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((diff < 1e-10, format!("largest eigenvalue difference {diff:.1e}")))
}

fn spectral_pipeline() -> qwalk_nm::Result<(bool, String)> {
    let pooled = mfbf(&[1.0, 3.0, 2.0]).fitted;
    let signal: Vec<f64> = (0..100)
        .map(|n| (-0.02 * n as f64).exp() + 0.1 * (2.0 * PI * 0.27 * n as f64).cos())
        .collect();
    let fs = filtered_spectrum(&signal, FilterKind::Mfbf, &BandSet::default())?;
    let primary = fs.spectrum.peak_in(BandKind::Primary).map(|p| p.frequency);
    Ok((
        pooled == [2.0, 2.0, 2.0] && primary == Some(0.27),
        format!("PAVA [1,3,2] -> {pooled:?}; primary peak at {primary:?}"),
    ))
}

pub fn run_checks() -> Vec<Check> {
    vec![
        check("two-step distribution", two_step_distribution()),
        check("Kraus completeness", kraus_completeness()),
        check("unitary walk", unitary_walk()),
        check("eigen routes agree", eigen_routes()),
        check("spectral pipeline", spectral_pipeline()),
    ]
}

pub fn run(args: SelftestArgs) -> CliResult<()> {
    let checks = run_checks();
    for c in &checks {
        println!("{} {}: {}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    if let Some(dir) = &args.out {
        let report = audit(dir)?;
        for path in &report.verified {
            println!("ok   checksum {path}");
        }
        println!("audit: {} artifacts in {} verified", report.verified.len(), dir.display());
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::integrity(format!("self-checks failed: {}", failed.join(", "))))
    }
}
