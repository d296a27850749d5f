//! Run manifest and its self-audit.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use qwalk_nm::noise::{classify_regime, Regime};
use qwalk_nm::spectral::{BandSet, FilterKind, MONOTONE_TREND_RESIDUAL_FRACTION, PEAK_MAD_FACTOR, PEAK_RELATIVE_FLOOR};
use qwalk_nm::NoiseModel;

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::{CliError, CliResult};
use crate::output::{sha256_hex, Artifact};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SEED_ENV: &str = "QWALK_NM_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: Tool,
    pub config: ExperimentConfig,
    pub regimes: Vec<NoiseRegime>,
    pub conventions: Conventions,
    pub environment: Environment,
    pub wall_time_seconds: f64,
    pub artifacts: Vec<Artifact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseRegime {
    pub noise: NoiseModel,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub basis: String,
    pub kraus_timing: String,
    pub entropy_units: String,
    pub filter: Option<FilterKind>,
    pub bands: Option<BandSet>,
    pub peak_rule: String,
    pub monotone_trend_residual_fraction: f64,
    pub float_format: String,
}

impl Conventions {
    pub fn new(filter: Option<FilterKind>, bands: Option<BandSet>) -> Self {
        Self {
            basis: "coin-major: index = coin * sites + site".into(),
            kraus_timing: "step n applies W, then the Kraus pair evaluated at t = n".into(),
            entropy_units: "bits".into(),
            filter,
            bands,
            peak_rule: format!(
                "per band: strongest local maximum above median + {PEAK_MAD_FACTOR}·MAD of in-band power and above {PEAK_RELATIVE_FLOOR:e} of the largest power"
            ),
            monotone_trend_residual_fraction: MONOTONE_TREND_RESIDUAL_FRACTION,
            float_format: "shortest round-trip decimal, exponent outside [1e-5, 1e16)".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    /// `QWALK_NM_SEED` as found; no stochastic component reads it.
    pub seed: Option<String>,
    pub threads: usize,
}

impl RunManifest {
    pub fn new(
        config: ExperimentConfig,
        conventions: Conventions,
        threads: usize,
        wall_time_seconds: f64,
        artifacts: Vec<Artifact>,
    ) -> Self {
        let regimes = config
            .noises()
            .into_iter()
            .map(|noise| NoiseRegime {
                noise,
                regime: classify_regime(&noise),
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            tool: Tool {
                name: "qwalk-nm".into(),
                version: env!("CARGO_PKG_VERSION").into(),
            },
            config,
            regimes,
            conventions,
            environment: Environment {
                seed: std::env::var(SEED_ENV).ok(),
                threads,
            },
            wall_time_seconds,
            artifacts,
        }
    }
}

/// Outcome of auditing an output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub verified: Vec<String>,
}

/// Recomputes every checksum listed in `dir/manifest.json` and checks that
/// each file in the directory is listed exactly once.
pub fn audit(dir: &Path) -> CliResult<AuditReport> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&manifest_path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", manifest_path.display())))?;
    let manifest: RunManifest = serde_json::from_str(&text)
        .map_err(|e| CliError::integrity(format!("{} is not a valid manifest: {e}", manifest_path.display())))?;
    manifest.config.validate()?;

    let mut listed = BTreeSet::new();
    let mut verified = Vec::new();
    for a in &manifest.artifacts {
        if a.path.contains(['/', '\\']) || a.path == MANIFEST_FILE {
            return Err(CliError::integrity(format!("manifest lists an invalid path '{}'", a.path)));
        }
        if !listed.insert(a.path.clone()) {
            return Err(CliError::integrity(format!("{} is listed more than once", a.path)));
        }
        let bytes = fs::read(dir.join(&a.path))
            .map_err(|e| CliError::integrity(format!("{} is missing: {e}", a.path)))?;
        if bytes.len() as u64 != a.bytes || sha256_hex(&bytes) != a.sha256 {
            return Err(CliError::integrity(format!("{} does not match its checksum", a.path)));
        }
        verified.push(a.path.clone());
    }
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if entry.file_type()?.is_file() && name != MANIFEST_FILE && !listed.contains(&name) {
            return Err(CliError::integrity(format!("{name} is not listed in the manifest")));
        }
    }
    Ok(AuditReport { verified })
}

/// Removes the artifacts recorded by an earlier run in `dir`, and its
/// manifest. Files the old manifest does not list are left alone.
pub fn clear_previous(dir: &Path) -> CliResult<()> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let Ok(text) = fs::read_to_string(&manifest_path) else {
        return Ok(());
    };
    #[derive(Deserialize)]
    struct Listing {
        artifacts: Vec<Listed>,
    }
    #[derive(Deserialize)]
    struct Listed {
        path: String,
    }
    if let Ok(old) = serde_json::from_str::<Listing>(&text) {
        for a in old.artifacts {
            if a.path.contains(['/', '\\']) || a.path == ".." || a.path == MANIFEST_FILE {
                continue;
            }
            match fs::remove_file(dir.join(&a.path)) {
                Err(e) if e.kind() != std::io::ErrorKind::NotFound => return Err(e.into()),
                _ => {}
            }
        }
    }
    fs::remove_file(&manifest_path)?;
    Ok(())
}
