//! Singular value decomposition by one-sided Jacobi on columns.
//!
//! Columns are rotated pairwise until they are mutually orthogonal; the
//! surviving column norms are the singular values.  Left vectors for zero
//! singular values are filled in by deterministic Gram-Schmidt against the
//! canonical basis, so `u` always has orthonormal columns.

use super::{C64, ComplexMatrix, vec_inner, vec_norm};
use crate::{Error, Policy, Result};

const MAX_SWEEPS: usize = 64;

/// Relative threshold below which a column pair counts as orthogonal.
/// Late sweeps relax it so dot-product rounding on large matrices cannot
/// stall the loop; ranks are read at 1e-10 so the relaxed phases lose
/// nothing.
fn ortho_rel(sweep: usize) -> f64 {
    if sweep < 24 {
        1e-15
    } else if sweep < 40 {
        1e-13
    } else {
        3e-12
    }
}

/// Thin decomposition `m = u * diag(singular_values) * v^dag` with
/// `min(rows, cols)` columns in both factors.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    /// Singular values, sorted descending; all nonnegative.
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// Number of singular values above `tol` relative to the largest one.
    pub fn rank(&self, tol: f64) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        if top <= 0.0 {
            return 0;
        }
        self.singular_values
            .iter()
            .filter(|&&s| s > tol * top)
            .count()
    }
}

/// Computes the thin SVD of a nonempty matrix.
pub fn svd(m: &ComplexMatrix, policy: &Policy) -> Result<Svd> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::EmptyInput("svd"));
    }
    m.check_finite("svd input")?;
    if m.rows() < m.cols() {
        // Work on the adjoint and swap factors: m^dag = u s v^dag
        // implies m = v s u^dag.
        let t = svd(&m.adjoint(), policy)?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }

    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(cols);

    // Columns reduced to rounding noise (for instance after a rotation
    // annihilates one of two parallel columns) are frozen: they carry no
    // information and re-rotating them never converges.
    let noise_floor_sq = (m.fro_norm() * 1e-15).powi(2);

    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        let tol = ortho_rel(sweep);
        let mut rotated = false;
        for p in 0..cols.saturating_sub(1) {
            for q in (p + 1)..cols {
                let mut app = 0.0f64;
                let mut aqq = 0.0f64;
                let mut apq = C64::new(0.0, 0.0);
                for i in 0..rows {
                    let aip = a.at(i, p);
                    let aiq = a.at(i, q);
                    app += aip.norm_sqr();
                    aqq += aiq.norm_sqr();
                    apq += aip.conj() * aiq;
                }
                if app <= noise_floor_sq || aqq <= noise_floor_sq {
                    continue;
                }
                let g = apq.norm();
                if g <= tol * (app * aqq).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = apq / g;
                let tau = (app - aqq) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let js = phase.conj() * s;
                let jq = phase.conj() * c;
                for i in 0..rows {
                    let aip = a.at(i, p);
                    let aiq = a.at(i, q);
                    a.set(i, p, aip * c + aiq * js);
                    a.set(i, q, aip * (-s) + aiq * jq);
                }
                for i in 0..cols {
                    let vip = v.at(i, p);
                    let viq = v.at(i, q);
                    v.set(i, p, vip * c + viq * js);
                    v.set(i, q, vip * (-s) + viq * jq);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            kernel: "svd",
            sweeps: MAX_SWEEPS,
        });
    }

    let mut sigma: Vec<f64> = (0..cols)
        .map(|j| {
            let col: Vec<C64> = (0..rows).map(|i| a.at(i, j)).collect();
            vec_norm(&col)
        })
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| {
        sigma[j]
            .partial_cmp(&sigma[i])
            .expect("finite singular values")
            .then(i.cmp(&j))
    });
    sigma = order.iter().map(|&k| sigma[k]).collect();
    let v_sorted = ComplexMatrix::from_fn(cols, cols, |i, j| v.at(i, order[j]));

    // Columns this far below the top value are noise; their left vectors
    // are completed orthogonally rather than normalized from noise.  Well
    // under the 1e-10 rank threshold, so rank semantics are unaffected.
    let top = sigma.first().copied().unwrap_or(0.0);
    let zero_floor = top * 1e-12;
    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for (slot, &k) in order.iter().enumerate() {
        if sigma[slot] > zero_floor && sigma[slot] > 0.0 {
            let inv = C64::new(1.0 / sigma[slot], 0.0);
            u_cols.push((0..rows).map(|i| a.at(i, k) * inv).collect());
        } else {
            u_cols.push(complete_column(rows, &u_cols));
        }
    }
    let u = ComplexMatrix::from_fn(rows, cols, |i, j| u_cols[j][i]);
    u.check_finite("svd output")?;
    Ok(Svd {
        u,
        singular_values: sigma,
        v: v_sorted,
    })
}

/// Deterministic unit vector orthogonal to every column in `existing`.
///
/// Scans canonical basis vectors and keeps the first with a residual after
/// projection; two orthogonalization passes keep the result orthonormal to
/// working precision.  `existing.len() < rows` guarantees one exists.
fn complete_column(rows: usize, existing: &[Vec<C64>]) -> Vec<C64> {
    assert!(existing.len() < rows, "no room for another orthogonal column");
    let mut best: Option<(f64, Vec<C64>)> = None;
    for b in 0..rows {
        let mut cand = vec![C64::new(0.0, 0.0); rows];
        cand[b] = C64::new(1.0, 0.0);
        for _pass in 0..2 {
            for col in existing {
                let ip = vec_inner(col, &cand);
                for i in 0..rows {
                    cand[i] -= ip * col[i];
                }
            }
        }
        let norm = vec_norm(&cand);
        if norm > 0.5 {
            for z in cand.iter_mut() {
                *z /= norm;
            }
            return cand;
        }
        if best.as_ref().map_or(true, |(n, _)| norm > *n) {
            best = Some((norm, cand));
        }
    }
    let (norm, mut cand) = best.expect("rows > 0");
    assert!(norm > 1e-8, "orthogonal completion degenerated");
    for z in cand.iter_mut() {
        *z /= norm;
    }
    cand
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn reconstruct(d: &Svd) -> ComplexMatrix {
        let k = d.singular_values.len();
        let s = ComplexMatrix::from_fn(k, k, |i, j| {
            if i == j {
                c(d.singular_values[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        d.u.mul(&s).mul(&d.v.adjoint())
    }

    #[test]
    fn bell_reshape_has_two_equal_values() {
        let policy = Policy::default();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = ComplexMatrix::diagonal(&[c(s, 0.0), c(s, 0.0)]);
        let d = svd(&m, &policy).unwrap();
        assert!((d.singular_values[0] - s).abs() < 1e-15);
        assert!((d.singular_values[1] - s).abs() < 1e-15);
        assert_eq!(d.rank(1e-10), 2);
    }

    #[test]
    fn rank_one_product_state_reshape() {
        let policy = Policy::default();
        // |0><0| pattern: only one nonzero singular value.
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 0, c(1.0, 0.0));
        let d = svd(&m, &policy).unwrap();
        assert_eq!(d.rank(1e-10), 1);
        assert!((d.singular_values[0] - 1.0).abs() < 1e-15);
        assert_eq!(d.singular_values[1], 0.0);
        // u stays orthonormal even with a zero singular value.
        let gram = d.u.adjoint().mul(&d.u);
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn wide_matrix_matches_adjoint_route() {
        let policy = Policy::default();
        let m = ComplexMatrix::from_fn(2, 5, |i, j| c((i + 2 * j) as f64, (j as f64).sin()));
        let d = svd(&m, &policy).unwrap();
        assert_eq!(d.singular_values.len(), 2);
        assert_eq!((d.u.rows(), d.u.cols()), (2, 2));
        assert_eq!((d.v.rows(), d.v.cols()), (5, 2));
        assert!(reconstruct(&d).max_abs_diff(&m) < 1e-12);
        let dt = svd(&m.adjoint(), &policy).unwrap();
        for (a, b) in d.singular_values.iter().zip(dt.singular_values.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn random_tall_matrix_reconstructs() {
        let policy = Policy::default();
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let m = ComplexMatrix::from_fn(9, 6, |_, _| c(next(), next()));
        let d = svd(&m, &policy).unwrap();
        assert!(reconstruct(&d).max_abs_diff(&m) < 1e-12);
        for w in d.singular_values.windows(2) {
            assert!(w[0] >= w[1]);
        }
        let gu = d.u.adjoint().mul(&d.u);
        let gv = d.v.adjoint().mul(&d.v);
        assert!(gu.max_abs_diff(&ComplexMatrix::identity(6)) < 1e-13);
        assert!(gv.max_abs_diff(&ComplexMatrix::identity(6)) < 1e-13);
    }

    #[test]
    fn zero_matrix_yields_zero_values_and_orthonormal_factors() {
        let policy = Policy::default();
        let m = ComplexMatrix::zeros(4, 3);
        let d = svd(&m, &policy).unwrap();
        assert_eq!(d.singular_values, vec![0.0, 0.0, 0.0]);
        assert_eq!(d.rank(1e-10), 0);
        let gu = d.u.adjoint().mul(&d.u);
        assert!(gu.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn rejects_empty_input() {
        let policy = Policy::default();
        assert!(matches!(
            svd(&ComplexMatrix::zeros(0, 2), &policy),
            Err(Error::EmptyInput(_))
        ));
    }
}
