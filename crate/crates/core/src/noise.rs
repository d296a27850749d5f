//! Dephasing noise models acting on the coin.
//!
//! Three classical noise processes are supported, each reduced to a
//! two-element Kraus pair on the coin whose only effect is to scale the coin
//! coherences by a decoherence factor:
//!
//! | model | factor | Kraus pair |
//! |-------|--------|------------|
//! | random telegraph (RTN) | Λ(ν), ν = γt | `√((1+Λ)/2)·I`, `√((1−Λ)/2)·σ₃` |
//! | Ornstein–Uhlenbeck (OUN) | p(t) | `|0⟩⟨0| + p|1⟩⟨1|`, `√(1−p²)|1⟩⟨1|` |
//! | power law, α = 3 (PLN) | q(t) | as OUN with q |
//!
//! Time is measured in walk steps and every rate is per step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{pauli, ComplexMatrix, C64};

/// Width of the band around `2a/γ = 1` treated as the critically damped case.
pub const MINIMAL_REGIME_TOLERANCE: f64 = 1e-12;
/// Bandwidth below which OUN/PLN are labelled non-Markovian (per unit step).
pub const BANDWIDTH_MEMORY_THRESHOLD: f64 = 0.1;
pub const COMPLETENESS_TOLERANCE: f64 = 1e-10;

/// A dephasing noise process with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseModel {
    /// Random telegraph noise with coupling `amplitude` (a) and switching
    /// rate `gamma` (γ = 1/2τ).
    Rtn { amplitude: f64, gamma: f64 },
    /// Modified Ornstein–Uhlenbeck noise with relaxation rate `relaxation`
    /// (Γ) and bandwidth `gamma` (γ).
    Oun { relaxation: f64, gamma: f64 },
    /// Power-law noise; only the exponent α = 3 has a closed-form factor.
    Pln { relaxation: f64, gamma: f64, alpha: f64 },
}

impl NoiseModel {
    pub fn rtn(amplitude: f64, gamma: f64) -> Self {
        NoiseModel::Rtn { amplitude, gamma }
    }

    pub fn oun(relaxation: f64, gamma: f64) -> Self {
        NoiseModel::Oun { relaxation, gamma }
    }

    pub fn pln(relaxation: f64, gamma: f64) -> Self {
        NoiseModel::Pln {
            relaxation,
            gamma,
            alpha: 3.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::Rtn { .. } => "rtn",
            NoiseModel::Oun { .. } => "oun",
            NoiseModel::Pln { .. } => "pln",
        }
    }

    /// Checks that every rate is finite and strictly positive (the RTN
    /// coupling may be zero) and that PLN uses the supported exponent.
    pub fn validate(&self) -> Result<()> {
        let rates: &[(&str, f64)] = match self {
            NoiseModel::Rtn { amplitude, gamma } => &[("a", *amplitude), ("gamma", *gamma)],
            NoiseModel::Oun { relaxation, gamma } | NoiseModel::Pln { relaxation, gamma, .. } => {
                &[("Gamma", *relaxation), ("gamma", *gamma)]
            }
        };
        for (name, v) in rates {
            // Zero RTN coupling is the identity channel.
            let floor_ok = if *name == "a" { *v >= 0.0 } else { *v > 0.0 };
            if !(v.is_finite() && floor_ok) {
                return Err(Error::Config(format!(
                    "{} rate {name} must be finite and positive, got {v}",
                    self.name()
                )));
            }
        }
        if let NoiseModel::Pln { alpha, .. } = self {
            check_pln_alpha(*alpha)?;
        }
        Ok(())
    }

    /// The scalar multiplying the coin coherences after elapsed time `t`:
    /// Λ(γt) for RTN, p(t) for OUN, q(t) for PLN.
    pub fn decoherence(&self, t: f64) -> Result<f64> {
        match *self {
            NoiseModel::Rtn { amplitude, gamma } => Ok(rtn_lambda(amplitude, gamma, t)),
            NoiseModel::Oun { relaxation, gamma } => Ok(oun_p(relaxation, gamma, t)),
            NoiseModel::Pln {
                relaxation,
                gamma,
                alpha,
            } => pln_q(relaxation, gamma, alpha, t),
        }
    }
}

fn check_pln_alpha(alpha: f64) -> Result<()> {
    if alpha != 3.0 {
        return Err(Error::Unsupported(format!(
            "power-law noise is only implemented for alpha = 3, got {alpha}"
        )));
    }
    Ok(())
}

/// RTN decoherence function Λ(ν) = e^{−ν}[cos(νμ) + sin(νμ)/μ], with
/// μ = √((2a/γ)² − 1) and ν = γt.
///
/// For 2a/γ < 1 the frequency is imaginary and the hyperbolic continuation
/// e^{−ν}[cosh(νμ̃) + sinh(νμ̃)/μ̃], μ̃ = √(1 − (2a/γ)²), is used; at the
/// critical point it reduces to e^{−ν}(1 + ν).
pub fn rtn_lambda(amplitude: f64, gamma: f64, t: f64) -> f64 {
    let nu = gamma * t;
    let ratio = 2.0 * amplitude / gamma;
    if (ratio - 1.0).abs() <= MINIMAL_REGIME_TOLERANCE {
        return (-nu).exp() * (1.0 + nu);
    }
    if ratio > 1.0 {
        let mu = (ratio * ratio - 1.0).sqrt();
        (-nu).exp() * ((nu * mu).cos() + (nu * mu).sin() / mu)
    } else {
        let mu = (1.0 - ratio * ratio).sqrt();
        // e^{−ν}cosh(νμ̃) and e^{−ν}sinh(νμ̃) written without overflow.
        let slow = (-nu * (1.0 - mu)).exp();
        let fast = (-nu * (1.0 + mu)).exp();
        0.5 * (slow + fast) + 0.5 * (slow - fast) / mu
    }
}

/// OUN factor p(t) = exp[−(Γ/2){t + (e^{−γt} − 1)/γ}].
pub fn oun_p(relaxation: f64, gamma: f64, t: f64) -> f64 {
    let bracket = t + (-gamma * t).exp_m1() / gamma;
    (-0.5 * relaxation * bracket).exp()
}

/// PLN factor for α = 3: q(t) = exp(−½ t(tγ + 2)Γγ / (tγ + 1)²).
pub fn pln_q(relaxation: f64, gamma: f64, alpha: f64, t: f64) -> Result<f64> {
    check_pln_alpha(alpha)?;
    let tg = t * gamma;
    Ok((-0.5 * t * (tg + 2.0) * relaxation * gamma / ((tg + 1.0) * (tg + 1.0))).exp())
}

/// Noise autocorrelation M[Ω(t), Ω(s)]. Descriptive only; the evolution
/// uses the closed-form decoherence factors.
pub fn autocorrelation(noise: &NoiseModel, t: f64, s: f64) -> f64 {
    let lag = (t - s).abs();
    match *noise {
        // τ = 1/(2γ)
        NoiseModel::Rtn { amplitude, gamma } => amplitude * amplitude * (-2.0 * gamma * lag).exp(),
        NoiseModel::Oun { relaxation, gamma } => relaxation / gamma * (-gamma * lag).exp(),
        NoiseModel::Pln {
            relaxation,
            gamma,
            alpha,
        } => 0.5 * (alpha - 1.0) * alpha * relaxation / (gamma * lag + 1.0).powf(alpha),
    }
}

/// Two coin-space Kraus operators evaluated at one elapsed time.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausPair {
    pub k1: ComplexMatrix,
    pub k2: ComplexMatrix,
    pub elapsed_time: f64,
}

impl KrausPair {
    pub fn new(k1: ComplexMatrix, k2: ComplexMatrix, elapsed_time: f64) -> Result<Self> {
        if k1.rows() != 2 || k1.cols() != 2 || k2.rows() != 2 || k2.cols() != 2 {
            return Err(Error::Shape("Kraus operators must be 2x2".into()));
        }
        Ok(Self { k1, k2, elapsed_time })
    }

    /// The identity channel (K₁ = I, K₂ = 0).
    pub fn identity() -> Self {
        Self {
            k1: ComplexMatrix::identity(2),
            k2: ComplexMatrix::zeros(2, 2),
            elapsed_time: 0.0,
        }
    }

    /// Largest entry of `|K₁†K₁ + K₂†K₂ − I|`.
    pub fn completeness_residual(&self) -> f64 {
        let sum = &(&self.k1.adjoint() * &self.k1) + &(&self.k2.adjoint() * &self.k2);
        sum.max_abs_diff(&ComplexMatrix::identity(2))
    }

    pub fn check_completeness(&self, tolerance: f64) -> Result<()> {
        let r = self.completeness_residual();
        if r > tolerance || r.is_nan() {
            return Err(Error::Integrity(format!(
                "Kraus completeness residual {r:.3e} exceeds {tolerance:.1e}"
            )));
        }
        Ok(())
    }

    /// `Σᵢ Kᵢ ρ Kᵢ†` for a 2×2 coin state.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let a = &(&self.k1 * rho) * &self.k1.adjoint();
        let b = &(&self.k2 * rho) * &self.k2.adjoint();
        &a + &b
    }
}

/// Kraus pair of `noise` at elapsed time `t` (in steps).
pub fn kraus_at(noise: &NoiseModel, t: f64) -> Result<KrausPair> {
    noise.validate()?;
    let factor = noise.decoherence(t)?;
    let (k1, k2) = match noise {
        NoiseModel::Rtn { .. } => {
            // |Λ| ≤ 1 analytically; max(0) only absorbs roundoff.
            let w1 = (0.5 * (1.0 + factor)).max(0.0).sqrt();
            let w2 = (0.5 * (1.0 - factor)).max(0.0).sqrt();
            (
                ComplexMatrix::identity(2).scale(C64::new(w1, 0.0)),
                pauli::sigma_z().scale(C64::new(w2, 0.0)),
            )
        }
        NoiseModel::Oun { .. } | NoiseModel::Pln { .. } => {
            let damp = (1.0 - factor * factor).max(0.0).sqrt();
            (
                ComplexMatrix::diagonal(&[1.0, factor]),
                ComplexMatrix::diagonal(&[0.0, damp]),
            )
        }
    };
    Ok(KrausPair {
        k1,
        k2,
        elapsed_time: t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeLabel {
    Markovian,
    NonMarkovian,
    Minimal,
}

/// Memory regime of a noise model.
///
/// For RTN the label follows the discriminant 2a/γ exactly. OUN and PLN
/// have no sharp criterion; their label compares the bandwidth γ against
/// [`BANDWIDTH_MEMORY_THRESHOLD`] and is flagged `heuristic`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub label: RegimeLabel,
    pub discriminant: f64,
    pub heuristic: bool,
}

pub fn classify_regime(noise: &NoiseModel) -> Regime {
    match *noise {
        NoiseModel::Rtn { amplitude, gamma } => {
            let d = 2.0 * amplitude / gamma;
            let label = if (d - 1.0).abs() <= MINIMAL_REGIME_TOLERANCE {
                RegimeLabel::Minimal
            } else if d < 1.0 {
                RegimeLabel::Markovian
            } else {
                RegimeLabel::NonMarkovian
            };
            Regime {
                label,
                discriminant: d,
                heuristic: false,
            }
        }
        NoiseModel::Oun { gamma, .. } | NoiseModel::Pln { gamma, .. } => Regime {
            label: if gamma < BANDWIDTH_MEMORY_THRESHOLD {
                RegimeLabel::NonMarkovian
            } else {
                RegimeLabel::Markovian
            },
            discriminant: gamma,
            heuristic: true,
        },
    }
}
