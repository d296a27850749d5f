//! Density operators on the coin ⊗ position space and the information
//! quantities built on their spectra.
//!
//! Basis ordering is coin-major: index `c·P + x` addresses coin state `c`
//! and position slot `x`, where `P` is the position dimension.

use std::str::FromStr;

use crate::eigen::hermitian_eigenvalues;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Eigenvalues above `−POSITIVITY_TOLERANCE` are roundoff; below it a bug.
pub const POSITIVITY_TOLERANCE: f64 = 1e-9;

/// Which tensor factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Coin,
    Position,
}

impl FromStr for Factor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coin" => Ok(Factor::Coin),
            "position" => Ok(Factor::Position),
            other => Err(Error::Usage(format!("unknown factor selector {other:?}"))),
        }
    }
}

/// Hermitian, unit-trace matrix over a bipartite coin ⊗ position space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    coin_dim: usize,
    position_dim: usize,
}

impl DensityOperator {
    /// Wraps `matrix`, checking shape, Hermiticity and trace.
    ///
    /// Positivity needs a spectrum and is checked separately by
    /// [`DensityOperator::check_positive`].
    pub fn new(matrix: ComplexMatrix, coin_dim: usize, position_dim: usize) -> Result<Self> {
        let dim = coin_dim * position_dim;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::Shape(format!(
                "{}x{} matrix does not match factors {coin_dim}x{position_dim}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let rho = Self {
            matrix,
            coin_dim,
            position_dim,
        };
        rho.check_hermitian_unit_trace()?;
        Ok(rho)
    }

    /// Pure state |ψ⟩⟨ψ| for a normalized amplitude vector.
    pub fn pure(amplitudes: &[C64], coin_dim: usize, position_dim: usize) -> Result<Self> {
        Self::new(
            ComplexMatrix::outer(amplitudes, amplitudes),
            coin_dim,
            position_dim,
        )
    }

    /// Single-factor state, e.g. a reduced coin state.
    pub fn single(matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.rows();
        Self::new(matrix, n, 1)
    }

    /// `ρ_coin ⊗ ρ_position`.
    pub fn product(coin: &ComplexMatrix, position: &ComplexMatrix) -> Result<Self> {
        Self::new(coin.kron(position), coin.rows(), position.rows())
    }

    /// Used by the walk kernels, which preserve the invariants by construction.
    pub(crate) fn from_parts_unchecked(
        matrix: ComplexMatrix,
        coin_dim: usize,
        position_dim: usize,
    ) -> Self {
        debug_assert_eq!(matrix.rows(), coin_dim * position_dim);
        Self {
            matrix,
            coin_dim,
            position_dim,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn position_dim(&self) -> usize {
        self.position_dim
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ|ρ_ij|² for Hermitian ρ.
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Diagonal of ρ (populations).
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn check_hermitian_unit_trace(&self) -> Result<()> {
        if !self.matrix.is_finite() {
            return Err(Error::Integrity("non-finite density matrix entry".into()));
        }
        let defect = self.matrix.hermiticity_defect();
        if defect > HERMITIAN_TOLERANCE {
            return Err(Error::Integrity(format!(
                "density matrix not Hermitian (defect {defect:.3e})"
            )));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::Integrity(format!("trace {tr} differs from 1")));
        }
        Ok(())
    }

    /// Eigenvalues (ascending) of ρ, padded with the zeros that lie off the
    /// populated support.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let support = nonzero_rows(&self.matrix);
        let mut values = if support.len() == self.dim() {
            hermitian_eigenvalues(&self.matrix)?
        } else {
            hermitian_eigenvalues(&self.matrix.principal_submatrix(&support))?
        };
        values.resize(self.dim(), 0.0);
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.first().copied().unwrap_or(0.0))
    }

    /// Full integrity check: Hermitian, unit trace and positive semidefinite.
    pub fn check_positive(&self) -> Result<()> {
        self.check_hermitian_unit_trace()?;
        let min = self.min_eigenvalue()?;
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::Integrity(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// Reduced state of the kept factor.
    pub fn partial_trace(&self, keep: Factor) -> DensityOperator {
        let (nc, np) = (self.coin_dim, self.position_dim);
        let m = &self.matrix;
        match keep {
            Factor::Coin => {
                let mut out = ComplexMatrix::zeros(nc, nc);
                for a in 0..nc {
                    for b in 0..nc {
                        out[(a, b)] = (0..np).map(|x| m[(a * np + x, b * np + x)]).sum();
                    }
                }
                Self::from_parts_unchecked(out, nc, 1)
            }
            Factor::Position => {
                let mut out = ComplexMatrix::zeros(np, np);
                for a in 0..nc {
                    for x in 0..np {
                        let row = &m.row(a * np + x)[a * np..(a + 1) * np];
                        for (o, z) in out.as_mut_slice()[x * np..(x + 1) * np].iter_mut().zip(row) {
                            *o += z;
                        }
                    }
                }
                Self::from_parts_unchecked(out, 1, np)
            }
        }
    }
}

/// Rows holding at least one nonzero entry. For a Hermitian matrix the other
/// rows and columns vanish and contribute exact zero eigenvalues, so the
/// spectrum can be taken on this (often much smaller) principal block.
fn nonzero_rows(m: &ComplexMatrix) -> Vec<usize> {
    (0..m.rows())
        .filter(|&i| m.row(i).iter().any(|z| z.re != 0.0 || z.im != 0.0))
        .collect()
}

/// Trace distance `½‖ρ₁ − ρ₂‖₁ = ½ Σ|λᵢ(ρ₁ − ρ₂)|`.
pub fn trace_norm_distance(r1: &DensityOperator, r2: &DensityOperator) -> Result<f64> {
    if r1.dim() != r2.dim() {
        return Err(Error::Shape(format!(
            "trace distance between dimensions {} and {}",
            r1.dim(),
            r2.dim()
        )));
    }
    let diff = r1.matrix() - r2.matrix();
    let support = nonzero_rows(&diff);
    let values = hermitian_eigenvalues(&diff.principal_submatrix(&support))?;
    let d = 0.5 * values.iter().map(|l| l.abs()).sum::<f64>();
    Ok(d.min(1.0))
}

/// Shannon entropy in bits of a spectrum, after clipping roundoff negatives.
pub fn spectral_entropy_bits(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -POSITIVITY_TOLERANCE {
            return Err(Error::Integrity(format!("negative eigenvalue {l:.3e} in entropy")));
        }
        let p = l.clamp(0.0, 1.0);
        if p > 0.0 {
            s -= p * p.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Von Neumann entropy `−Tr ρ log₂ ρ` in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    spectral_entropy_bits(&rho.eigenvalues()?)
}

/// Coin–position mutual information `S(ρ_c) + S(ρ_p) − S(ρ)` in bits.
pub fn mutual_information(rho: &DensityOperator) -> Result<f64> {
    let coin = von_neumann_entropy(&rho.partial_trace(Factor::Coin))?;
    let position = von_neumann_entropy(&rho.partial_trace(Factor::Position))?;
    let joint = von_neumann_entropy(rho)?;
    Ok(coin + position - joint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::hermitian_eigensystem;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    struct Lcg(u64);

    impl Lcg {
        fn next(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        }

        fn state(&mut self, n: usize) -> ComplexMatrix {
            // G G† / Tr for a random Ginibre G.
            let g = ComplexMatrix::from_vec(n, n, (0..n * n).map(|_| c(self.next(), self.next())).collect())
                .unwrap();
            let m = &g * &g.adjoint();
            let tr = m.trace().re;
            m.scale(c(1.0 / tr, 0.0))
        }

        fn pure(&mut self, n: usize) -> Vec<C64> {
            let v: Vec<C64> = (0..n).map(|_| c(self.next(), self.next())).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|z| z / norm).collect()
        }
    }

    #[test]
    fn product_state_reduces_to_factors() {
        let mut rng = Lcg(1);
        let rc = rng.state(2);
        let rp = rng.state(3);
        let rho = DensityOperator::product(&rc, &rp).unwrap();
        assert!(rho.partial_trace(Factor::Coin).matrix().max_abs_diff(&rc) < 1e-14);
        assert!(rho.partial_trace(Factor::Position).matrix().max_abs_diff(&rp) < 1e-14);
    }

    #[test]
    fn entangled_coin_reduces_to_maximally_mixed() {
        // (|0, x=-1⟩ + |1, x=+1⟩)/√2 on a three-site lattice.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = vec![c(0.0, 0.0); 6];
        psi[0] = c(h, 0.0);
        psi[3 + 2] = c(h, 0.0);
        let rho = DensityOperator::pure(&psi, 2, 3).unwrap();
        let coin = rho.partial_trace(Factor::Coin);
        assert!(coin.matrix().max_abs_diff(&ComplexMatrix::diagonal(&[0.5, 0.5])) < 1e-15);
        assert!((mutual_information(&rho).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_spectra_agree() {
        let mut rng = Lcg(5);
        for _ in 0..10 {
            let psi = rng.pure(8);
            let rho = DensityOperator::pure(&psi, 2, 4).unwrap();
            let a = rho.partial_trace(Factor::Coin).eigenvalues().unwrap();
            let b = rho.partial_trace(Factor::Position).eigenvalues().unwrap();
            // Position factor has two extra zero eigenvalues.
            assert!(b[0].abs() < 1e-10 && b[1].abs() < 1e-10);
            assert!((a[0] - b[2]).abs() < 1e-10 && (a[1] - b[3]).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_trace_is_linear_and_trace_preserving() {
        let mut rng = Lcg(11);
        let r1 = DensityOperator::new(rng.state(6), 2, 3).unwrap();
        let r2 = DensityOperator::new(rng.state(6), 2, 3).unwrap();
        let w = 0.3;
        let mix = DensityOperator::new(
            &r1.matrix().scale(c(w, 0.0)) + &r2.matrix().scale(c(1.0 - w, 0.0)),
            2,
            3,
        )
        .unwrap();
        for keep in [Factor::Coin, Factor::Position] {
            let lhs = mix.partial_trace(keep);
            let rhs = &r1.partial_trace(keep).matrix().scale(c(w, 0.0))
                + &r2.partial_trace(keep).matrix().scale(c(1.0 - w, 0.0));
            assert!(lhs.matrix().max_abs_diff(&rhs) < 1e-14);
            assert!((lhs.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_distance_cases() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityOperator::pure(&[c(h, 0.0), c(h, 0.0)], 2, 1).unwrap();
        let minus = DensityOperator::pure(&[c(h, 0.0), c(-h, 0.0)], 2, 1).unwrap();
        assert_eq!(trace_norm_distance(&plus, &plus).unwrap(), 0.0);
        assert!((trace_norm_distance(&plus, &minus).unwrap() - 1.0).abs() < 1e-15);

        let mut rng = Lcg(3);
        for _ in 0..10 {
            let a = DensityOperator::single(rng.state(2)).unwrap();
            let b = DensityOperator::single(rng.state(2)).unwrap();
            let oracle = hermitian_eigensystem(&(a.matrix() - b.matrix()))
                .unwrap()
                .values
                .iter()
                .map(|l| l.abs())
                .sum::<f64>()
                * 0.5;
            assert!((trace_norm_distance(&a, &b).unwrap() - oracle).abs() < 1e-10);
        }
        let big = DensityOperator::single(rng.state(3)).unwrap();
        assert!(matches!(trace_norm_distance(&plus, &big), Err(Error::Shape(_))));
    }

    #[test]
    fn trace_distance_is_a_metric() {
        let mut rng = Lcg(17);
        for _ in 0..50 {
            let a = DensityOperator::single(rng.state(4)).unwrap();
            let b = DensityOperator::single(rng.state(4)).unwrap();
            let d = DensityOperator::single(rng.state(4)).unwrap();
            let ab = trace_norm_distance(&a, &b).unwrap();
            let ba = trace_norm_distance(&b, &a).unwrap();
            let bd = trace_norm_distance(&b, &d).unwrap();
            let ad = trace_norm_distance(&a, &d).unwrap();
            assert!((ab - ba).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&ab));
            assert!(ad <= ab + bd + 1e-9);
        }
    }

    #[test]
    fn entropy_values() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let pure = DensityOperator::pure(&[c(h, 0.0), c(0.0, h)], 2, 1).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let mixed = DensityOperator::single(ComplexMatrix::diagonal(&[0.5, 0.5])).unwrap();
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-15);
        // −(¼ log₂ ¼ + ¾ log₂ ¾)
        let oracle = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
        assert!((oracle - 0.811_278_124_459_132_8).abs() < 1e-15);
        let skewed = DensityOperator::single(ComplexMatrix::diagonal(&[0.25, 0.75])).unwrap();
        assert!((von_neumann_entropy(&skewed).unwrap() - oracle).abs() < 1e-14);
    }

    #[test]
    fn entropy_is_additive_on_products() {
        let mut rng = Lcg(23);
        for _ in 0..10 {
            let a = rng.state(2);
            let b = rng.state(3);
            let sa = von_neumann_entropy(&DensityOperator::single(a.clone()).unwrap()).unwrap();
            let sb = von_neumann_entropy(&DensityOperator::single(b.clone()).unwrap()).unwrap();
            let sab = von_neumann_entropy(&DensityOperator::product(&a, &b).unwrap()).unwrap();
            assert!((sab - sa - sb).abs() < 1e-9);
            assert!(mutual_information(&DensityOperator::product(&a, &b).unwrap()).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn integrity_errors() {
        let not_unit = ComplexMatrix::diagonal(&[0.5, 0.4]);
        assert!(matches!(DensityOperator::single(not_unit), Err(Error::Integrity(_))));
        let negative = DensityOperator::single(ComplexMatrix::diagonal(&[1.5, -0.5])).unwrap();
        assert!(matches!(negative.check_positive(), Err(Error::Integrity(_))));
        assert!(matches!(von_neumann_entropy(&negative), Err(Error::Integrity(_))));
        let tiny = DensityOperator::single(ComplexMatrix::diagonal(&[1.0 + 1e-12, -1e-12])).unwrap();
        assert!(tiny.check_positive().is_ok());
        assert!(von_neumann_entropy(&tiny).unwrap().abs() < 1e-9);
        assert!(matches!("spin".parse::<Factor>(), Err(Error::Usage(_))));
    }
}
