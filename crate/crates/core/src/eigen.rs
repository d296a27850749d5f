//! Hermitian eigenproblems.
//!
//! Two independent routes are provided. [`hermitian_eigensystem`] is a cyclic
//! complex Jacobi iteration and returns eigenvectors; [`hermitian_eigenvalues`]
//! reduces to a real symmetric tridiagonal matrix with Householder reflectors
//! and finishes with implicit-shift QL. The second route is roughly an order of
//! magnitude cheaper and is what entropies, trace norms and positivity checks
//! use on walk-sized matrices; the test suite cross-checks the two.

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

/// Off-diagonal Frobenius norm, relative to the full norm, at which Jacobi stops.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Largest tolerated `|m − m†|` entry, relative to the largest entry of `m`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-8;

const QL_MAX_ITERATIONS: usize = 60;

/// Eigenvalues in ascending order and the matching unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// `V · diag(λ) · V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for i in 0..n {
            for (j, &l) in self.values.iter().enumerate() {
                scaled[(i, j)] *= l;
            }
        }
        &scaled * &self.vectors.adjoint()
    }
}

fn symmetrized(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigenproblem needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::Integrity("non-finite entry in eigenproblem input".into()));
    }
    let scale = m.as_slice().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOLERANCE * scale {
        return Err(Error::Integrity(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    let n = m.rows();
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    Ok(a)
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input is symmetrized as `(m + m†)/2` before iterating.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    let mut a = symmetrized(m)?;
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let total = a.frobenius_norm();

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for sweep in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) <= JACOBI_TOLERANCE * total {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Negligible against both diagonal entries: drop it instead of rotating.
                if sweep > 3 && app.abs() + 100.0 * r == app.abs() && aqq.abs() + 100.0 * r == aqq.abs()
                {
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let s_conj_phase = phase.conj() * s;
                let c_conj_phase = phase.conj() * c;

                // A ← A·J and V ← V·J with J = [[c, s], [−s·ē, c·ē]] on (p, q).
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * s_conj_phase;
                    a[(k, q)] = akp * s + akq * c_conj_phase;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * s_conj_phase;
                    v[(k, q)] = vkp * s + vkq * c_conj_phase;
                }
                // A ← J†·A.
                let s_phase = phase * s;
                let c_phase = phase * c;
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * s_phase;
                    a[(q, k)] = apk * s + aqk * c_phase;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(app - t * r, 0.0);
                a[(q, q)] = C64::new(aqq + t * r, 0.0);
            }
        }
    }
    if !converged && off_norm(&a) > JACOBI_TOLERANCE * total {
        return Err(Error::Integrity(format!(
            "Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    Ok(Eigensystem { values, vectors })
}

/// Eigenvalues (ascending) of a Hermitian matrix via Householder
/// tridiagonalization and implicit QL.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut a = symmetrized(m)?;
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut p = vec![C64::new(0.0, 0.0); n];

    for k in 0..n.saturating_sub(1) {
        diag[k] = a[(k, k)].re;
        let lo = k + 1;
        let len = n - lo;
        let norm = (lo..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let x0 = a[(lo, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        // Reflect x onto −phase·‖x‖·e₁; v = x + phase·‖x‖·e₁ avoids cancellation.
        for (vi, i) in v[..len].iter_mut().zip(lo..n) {
            *vi = a[(i, k)];
        }
        v[0] += phase * norm;
        let v_norm_sqr: f64 = v[..len].iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / v_norm_sqr;
        off[k] = norm;

        // p = τ·B·v on the trailing block B.
        for (pi, i) in p[..len].iter_mut().zip(lo..n) {
            let row = &a.row(i)[lo..n];
            *pi = row.iter().zip(&v[..len]).map(|(b, x)| b * x).sum::<C64>() * tau;
        }
        let vp: C64 = v[..len].iter().zip(&p[..len]).map(|(x, y)| x.conj() * y).sum();
        let kk = 0.5 * tau * vp.re;
        for i in 0..len {
            p[i] -= v[i] * kk;
        }
        // B ← B − v·w† − w·v†.
        for i in 0..len {
            let vi = v[i];
            let wi = p[i];
            let row = &mut a.as_mut_slice()[(lo + i) * n + lo..(lo + i) * n + n];
            for (j, b) in row.iter_mut().enumerate() {
                *b -= vi * p[j].conj() + wi * v[j].conj();
            }
        }
    }
    diag[n - 1] = a[(n - 1, n - 1)].re;
    off[n - 1] = 0.0;

    tridiagonal_ql(&mut diag, &mut off)?;
    diag.sort_by(f64::total_cmp);
    Ok(diag)
}

/// Implicit-shift QL on a real symmetric tridiagonal matrix. `off[i]` couples
/// `i` and `i + 1`; on return `diag` holds the (unsorted) eigenvalues.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    let norm = diag
        .iter()
        .zip(off.iter().chain(std::iter::repeat(&0.0)))
        .fold(0.0f64, |acc, (d, e)| acc.max(d.abs() + 2.0 * e.abs()));
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd.max(norm) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > QL_MAX_ITERATIONS {
                return Err(Error::Integrity("tridiagonal QL did not converge".into()));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}
