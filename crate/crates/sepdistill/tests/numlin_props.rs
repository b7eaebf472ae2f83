//! Property tests for the dense linear-algebra kernels: decompositions
//! must reconstruct their input and produce orthonormal factors on
//! arbitrary well-scaled matrices, not just the hand-picked fixtures used
//! elsewhere.

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use sepdistill::numlin::{hermitian_eig, svd, ComplexMatrix};
use sepdistill::Policy;

const RECON_TOL: f64 = 1e-10;

fn complex_entries(len: usize) -> impl Strategy<Value = Vec<C64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|pairs| pairs.into_iter().map(|(re, im)| C64::new(re, im)).collect())
}

fn matrices(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(rows, cols)| {
        complex_entries(rows * cols).prop_map(move |entries| {
            ComplexMatrix::from_fn(rows, cols, |i, j| entries[i * cols + j])
        })
    })
}

/// Max entry of `f^dag f - I`, the distance of `f`'s columns from an
/// orthonormal set.
fn ortho_defect(f: &ComplexMatrix) -> f64 {
    let gram = f.adjoint().mul(f);
    let eye = ComplexMatrix::identity(gram.rows());
    gram.sub(&eye).max_abs()
}

proptest! {
    #[test]
    fn svd_reconstructs_and_factors_are_orthonormal(m in matrices(6)) {
        let policy = Policy::default();
        let dec = svd(&m, &policy).expect("svd converges");
        let r = dec.singular_values.len();
        prop_assert_eq!(r, m.rows().min(m.cols()));

        for w in dec.singular_values.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        for &s in &dec.singular_values {
            prop_assert!(s >= 0.0);
        }

        let scale = m.fro_norm().max(1.0);
        let recon = ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| {
            (0..r)
                .map(|k| dec.u.at(i, k) * dec.singular_values[k] * dec.v.at(j, k).conj())
                .sum()
        });
        prop_assert!(recon.sub(&m).max_abs() <= RECON_TOL * scale);

        prop_assert!(ortho_defect(&dec.u) <= RECON_TOL);
        prop_assert!(ortho_defect(&dec.v) <= RECON_TOL);
    }

    #[test]
    fn hermitian_eig_reconstructs_with_real_descending_spectrum(m in matrices(6)) {
        let policy = Policy::default();
        let n = m.rows().min(m.cols());
        let square = ComplexMatrix::from_fn(n, n, |i, j| m.at(i, j));
        let h = square.add(&square.adjoint());

        let spec = hermitian_eig(&h, &policy).expect("eig converges");
        prop_assert_eq!(spec.eigenvalues.len(), n);
        for w in spec.eigenvalues.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }

        let scale = h.fro_norm().max(1.0);
        let recon = ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| {
                    spec.eigenvectors.at(i, k)
                        * spec.eigenvalues[k]
                        * spec.eigenvectors.at(j, k).conj()
                })
                .sum()
        });
        prop_assert!(recon.sub(&h).max_abs() <= RECON_TOL * scale);
        prop_assert!(ortho_defect(&spec.eigenvectors) <= RECON_TOL);
    }
}
