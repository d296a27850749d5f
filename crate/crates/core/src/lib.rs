//! Coined discrete-time quantum walks on a line under dephasing noise, and
//! spectral tools that separate the two sources of non-Markovian backflow
//! seen in the reduced coin dynamics: the walker's own position degree of
//! freedom and the memory of the external noise.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`], [`eigen`], [`density`]: dense complex linear algebra,
//!   density operators, partial traces, trace distance and entropies.
//! * [`noise`]: random telegraph, Ornstein–Uhlenbeck and power-law dephasing
//!   (decoherence functions, Kraus pairs, regime classification).
//! * [`walk`]: coin, shift and walk operators and the stepwise evolution.
//! * [`observables`]: position statistics, trace-distance and mutual
//!   information time series, backflow sums.
//! * [`spectral`]: monotone best-fit subtraction, power spectra, peaks and
//!   band powers.
//! * [`experiment`]: paired and single runs that bundle the above.

pub mod density;
pub mod eigen;
pub mod error;
pub mod experiment;
pub mod matrix;
pub mod noise;
pub mod observables;
pub mod spectral;
pub mod walk;

pub use density::{mutual_information, trace_norm_distance, von_neumann_entropy, DensityOperator, Factor};
pub use eigen::{hermitian_eigensystem, hermitian_eigenvalues, Eigensystem};
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, C64};
pub use noise::{KrausPair, NoiseModel, Regime, RegimeLabel};
pub use observables::TimeSeries;
pub use spectral::{FrequencyBand, MfbfResult, SpectrumResult};
pub use walk::{CoinState, Lattice, WalkConfig, WalkOperators};
