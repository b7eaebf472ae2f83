//! Hermitian eigendecomposition by cyclic Jacobi rotations.
//!
//! Each rotation zeroes one off-diagonal pair exactly; cyclic sweeps
//! converge quadratically for the sizes handled here.  The complex pivot
//! `a_pq = g e^{i phi}` is reduced to a real rotation by absorbing the phase
//! into the second column, so the core update is the classic symmetric
//! Jacobi formula.

use super::{C64, ComplexMatrix};
use crate::{Error, Policy, Result};

const MAX_SWEEPS: usize = 64;

/// Convergence and skip thresholds relative to the input magnitude.
const CONVERGE_REL: f64 = 1e-14;
const SKIP_REL: f64 = 1e-16;

/// Eigenvalues (descending) and matching eigenvector columns of a Hermitian
/// matrix.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    /// Real eigenvalues, sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose column `k` is the eigenvector of
    /// `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

/// Diagonalizes a Hermitian matrix.
///
/// Errors when the input deviates from Hermitian by more than
/// `policy.kernel_tol` relative to its largest entry, or when the sweep cap
/// is exhausted.
pub fn hermitian_eig(h: &ComplexMatrix, policy: &Policy) -> Result<HermitianSpectrum> {
    if h.rows() == 0 {
        return Err(Error::EmptyInput("hermitian_eig"));
    }
    if !h.is_square() {
        return Err(Error::DimMismatch(format!(
            "hermitian_eig needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    h.check_finite("hermitian_eig input")?;
    let n = h.rows();
    let scale = h.max_abs().max(1e-300);
    let dev = h.hermitian_deviation();
    if dev > policy.kernel_tol * scale.max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }

    // Work on the exactly Hermitian average (A + A^dag)/2.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| {
        (h.at(i, j) + h.at(j, i).conj()) * C64::new(0.5, 0.0)
    });
    let mut v = ComplexMatrix::identity(n);

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.at(p, q).norm());
            }
        }
        if off <= CONVERGE_REL * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.at(p, q);
                let g = apq.norm();
                if g <= SKIP_REL * scale {
                    continue;
                }
                let app = a.at(p, p).re;
                let aqq = a.at(q, q).re;
                let phase = apq / g; // e^{i phi}
                let tau = (app - aqq) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column rotation J on (p, q):
                //   col_p <- c*col_p + s*conj(phase)*col_q
                //   col_q <- -s*col_p + c*conj(phase)*col_q
                let jp = C64::new(c, 0.0);
                let js = phase.conj() * s;
                let jq = phase.conj() * c;
                for i in 0..n {
                    let aip = a.at(i, p);
                    let aiq = a.at(i, q);
                    a.set(i, p, aip * jp + aiq * js);
                    a.set(i, q, aip * (-s) + aiq * jq);
                    let vip = v.at(i, p);
                    let viq = v.at(i, q);
                    v.set(i, p, vip * jp + viq * js);
                    v.set(i, q, vip * (-s) + viq * jq);
                }
                // Row rotation J^dag on (p, q).
                for j in 0..n {
                    let apj = a.at(p, j);
                    let aqj = a.at(q, j);
                    a.set(p, j, apj * jp + aqj * js.conj());
                    a.set(q, j, apj * (-s) + aqj * jq.conj());
                }
                // The pivot is zero by construction; pin it to avoid drift.
                a.set(p, q, C64::new(0.0, 0.0));
                a.set(q, p, C64::new(0.0, 0.0));
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            kernel: "hermitian_eig",
            sweeps: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.at(j, j)
            .re
            .partial_cmp(&a.at(i, i).re)
            .expect("finite eigenvalues")
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a.at(k, k).re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v.at(i, order[j]));
    eigenvectors.check_finite("hermitian_eig output")?;
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::{kron, vec_norm};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn reconstruct(spec: &HermitianSpectrum) -> ComplexMatrix {
        let n = spec.eigenvalues.len();
        let v = &spec.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let col: Vec<C64> = (0..n).map(|i| v.at(i, k)).collect();
            out = out.add(&ComplexMatrix::outer(&col, &col).scale(c(spec.eigenvalues[k], 0.0)));
        }
        out
    }

    #[test]
    fn pauli_x_spectrum() {
        let policy = Policy::default();
        let mut h = ComplexMatrix::zeros(2, 2);
        h.set(0, 1, c(1.0, 0.0));
        h.set(1, 0, c(1.0, 0.0));
        let spec = hermitian_eig(&h, &policy).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] + 1.0).abs() < 1e-14);
        // Top eigenvector is |+> up to phase.
        let v0: Vec<C64> = (0..2).map(|i| spec.eigenvectors.at(i, 0)).collect();
        assert!((v0[0].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((v0[0] - v0[1]).norm() < 1e-12);
    }

    #[test]
    fn pauli_y_spectrum() {
        let policy = Policy::default();
        let mut h = ComplexMatrix::zeros(2, 2);
        h.set(0, 1, c(0.0, -1.0));
        h.set(1, 0, c(0.0, 1.0));
        let spec = hermitian_eig(&h, &policy).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] + 1.0).abs() < 1e-14);
        assert!(reconstruct(&spec).max_abs_diff(&h) < 1e-13);
    }

    #[test]
    fn diagonal_input_is_immediate() {
        let policy = Policy::default();
        let h = ComplexMatrix::diagonal(&[c(-2.0, 0.0), c(5.0, 0.0), c(0.5, 0.0)]);
        let spec = hermitian_eig(&h, &policy).unwrap();
        assert_eq!(spec.eigenvalues, vec![5.0, 0.5, -2.0]);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let policy = Policy::default();
        // Deterministic pseudo-random Hermitian matrix.
        let n = 12;
        let mut h = ComplexMatrix::zeros(n, n);
        let mut state = 0x243F6A8885A308D3u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..n {
            for j in i..n {
                let z = if i == j {
                    c(next(), 0.0)
                } else {
                    c(next(), next())
                };
                h.set(i, j, z);
                h.set(j, i, z.conj());
            }
        }
        let spec = hermitian_eig(&h, &policy).unwrap();
        assert!(reconstruct(&spec).max_abs_diff(&h) < 1e-12);
        // Eigenvalues descending.
        for w in spec.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
        // Columns orthonormal.
        let v = &spec.eigenvectors;
        let gram = v.adjoint().mul(v);
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-13);
    }

    #[test]
    fn eigenvector_columns_satisfy_eigen_equation() {
        let policy = Policy::default();
        let mut z = ComplexMatrix::zeros(2, 2);
        z.set(0, 0, c(1.0, 0.0));
        z.set(1, 1, c(-1.0, 0.0));
        let mut x = ComplexMatrix::zeros(2, 2);
        x.set(0, 1, c(1.0, 0.0));
        x.set(1, 0, c(1.0, 0.0));
        let h = kron(&z, &x, &policy).unwrap();
        let spec = hermitian_eig(&h, &policy).unwrap();
        for k in 0..4 {
            let col: Vec<C64> = (0..4).map(|i| spec.eigenvectors.at(i, k)).collect();
            let hv = h.matvec(&col);
            let resid: Vec<C64> = hv
                .iter()
                .zip(col.iter())
                .map(|(a, b)| a - b * c(spec.eigenvalues[k], 0.0))
                .collect();
            assert!(vec_norm(&resid) < 1e-13);
        }
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let policy = Policy::default();
        let mut m = ComplexMatrix::identity(2);
        m.set(0, 1, c(0.3, 0.0));
        assert!(matches!(
            hermitian_eig(&m, &policy),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn rejects_non_square_and_empty() {
        let policy = Policy::default();
        assert!(hermitian_eig(&ComplexMatrix::zeros(2, 3), &policy).is_err());
        assert!(hermitian_eig(&ComplexMatrix::zeros(0, 0), &policy).is_err());
    }
}
