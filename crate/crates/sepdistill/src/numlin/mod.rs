//! Dense complex linear algebra for small multipartite systems.
//!
//! Everything here is deliberately plain: row-major storage over
//! [`num_complex::Complex<f64>`], cyclic Jacobi kernels, no blocking, no
//! threading.  The systems this crate handles stay below a few hundred
//! dimensions, where the simplicity (and bitwise determinism: no
//! data-dependent pivoting, no parallel reduction order) is worth far more
//! than peak throughput.
//!
//! Composite indices follow the convention that the first party varies
//! slowest: for local dimensions `[n1, n2, n3]` the basis ket
//! `|i1, i2, i3>` sits at flat index `i1*n2*n3 + i2*n3 + i3`.

mod eig;
mod svd;

pub use eig::{hermitian_eig, HermitianSpectrum};
pub use svd::{svd, Svd};

use num_complex::Complex;

use crate::{Error, Policy, Result};

/// Complex double-precision scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Square matrix with `diag` on the main diagonal.
    pub fn diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Rank-one matrix `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.at(i, j) + a * rhs.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.at(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(rhs.entries.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(rhs.entries.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.at(i, i)).sum()
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.entries
            .iter()
            .zip(rhs.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from `A = A^dag`; zero for Hermitian matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        assert!(self.is_square(), "hermitian check on a non-square matrix");
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.at(i, j) - self.at(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn check_finite(&self, context: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(context))
        }
    }
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.at(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a (x) b`; errors when either output side would exceed
/// the policy dimension cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix, policy: &Policy) -> Result<ComplexMatrix> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    policy.check_dim(rows)?;
    policy.check_dim(cols)?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let va = a.at(ia, ja);
            if va.norm_sqr() == 0.0 {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out.set(ia * b.rows() + ib, ja * b.cols() + jb, va * b.at(ib, jb));
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&ComplexMatrix], policy: &Policy) -> Result<ComplexMatrix> {
    let mut iter = factors.iter();
    let first = iter.next().ok_or(Error::EmptyInput("kron_all"))?;
    let mut acc = (*first).clone();
    for f in iter {
        acc = kron(&acc, f, policy)?;
    }
    Ok(acc)
}

/// Flat composite index of a multi-index, first party slowest.
pub fn flatten_index(multi: &[usize], dims: &[usize]) -> usize {
    assert_eq!(multi.len(), dims.len());
    let mut idx = 0;
    for (m, d) in multi.iter().zip(dims.iter()) {
        debug_assert!(m < d);
        idx = idx * d + m;
    }
    idx
}

/// Inverse of [`flatten_index`].
pub fn unflatten_index(flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut multi = vec![0; dims.len()];
    let mut rest = flat;
    for k in (0..dims.len()).rev() {
        multi[k] = rest % dims[k];
        rest /= dims[k];
    }
    debug_assert_eq!(rest, 0);
    multi
}

/// Partial trace of `rho` over the parties *not* listed in `keep`.
///
/// `keep` must hold strictly increasing party indices.  An empty `keep`
/// traces out everything and returns the 1x1 matrix holding `trace(rho)`.
pub fn partial_trace(
    rho: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::DimMismatch("party dimensions must be positive".into()));
    }
    if !rho.is_square() || rho.rows() != total {
        return Err(Error::DimMismatch(format!(
            "density matrix is {}x{}, expected {}x{}",
            rho.rows(),
            rho.cols(),
            total,
            total
        )));
    }
    for w in keep.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidCut(
                "keep indices must be strictly increasing".into(),
            ));
        }
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidCut(format!(
            "keep index out of range for {} parties",
            dims.len()
        )));
    }

    let traced: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&p| dims[p]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&p| dims[p]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    let mut out = ComplexMatrix::zeros(kept_total, kept_total);
    let mut full_row = vec![0usize; dims.len()];
    let mut full_col = vec![0usize; dims.len()];
    for ik in 0..kept_total {
        let ik_multi = unflatten_index(ik, &kept_dims);
        for jk in 0..kept_total {
            let jk_multi = unflatten_index(jk, &kept_dims);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..traced_total {
                let t_multi = unflatten_index(t, &traced_dims);
                for (slot, &party) in keep.iter().enumerate() {
                    full_row[party] = ik_multi[slot];
                    full_col[party] = jk_multi[slot];
                }
                for (slot, &party) in traced.iter().enumerate() {
                    full_row[party] = t_multi[slot];
                    full_col[party] = t_multi[slot];
                }
                acc += rho.at(
                    flatten_index(&full_row, dims),
                    flatten_index(&full_col, dims),
                );
            }
            out.set(ik, jk, acc);
        }
    }
    Ok(out)
}

/// Inner product `<a|b>` with conjugation on the first argument.
pub fn vec_inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm.
pub fn vec_norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn index_round_trip() {
        let dims = [3, 5, 4];
        for flat in 0..60 {
            let multi = unflatten_index(flat, &dims);
            assert_eq!(flatten_index(&multi, &dims), flat);
        }
        // First party varies slowest.
        assert_eq!(flatten_index(&[1, 0, 0], &dims), 20);
        assert_eq!(flatten_index(&[0, 1, 0], &dims), 4);
        assert_eq!(flatten_index(&[0, 0, 1], &dims), 1);
    }

    #[test]
    fn product_and_adjoint() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| c((i + j) as f64, i as f64 - j as f64));
        let b = ComplexMatrix::from_fn(3, 2, |i, j| c(1.0, (i * j) as f64));
        let ab = a.mul(&b);
        assert_eq!((ab.rows(), ab.cols()), (2, 2));
        // (AB)^dag = B^dag A^dag.
        let lhs = ab.adjoint();
        let rhs = b.adjoint().mul(&a.adjoint());
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
    }

    #[test]
    fn kron_of_z_with_z() {
        let policy = Policy::default();
        let z = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let zz = kron(&z, &z, &policy).unwrap();
        let want = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(zz.max_abs_diff(&want), 0.0);
    }

    #[test]
    fn kron_respects_dimension_cap() {
        let policy = Policy {
            max_dim: 3,
            ..Policy::default()
        };
        let a = ComplexMatrix::identity(2);
        assert!(matches!(
            kron(&a, &a, &policy),
            Err(Error::DimOverflow { requested: 4, max: 3 })
        ));
    }

    #[test]
    fn kron_mixes_rectangular_blocks() {
        let policy = Policy::default();
        let a = ComplexMatrix::from_fn(1, 2, |_, j| c(j as f64 + 1.0, 0.0));
        let b = ComplexMatrix::from_fn(2, 1, |i, _| c(0.0, i as f64 + 1.0));
        let k = kron(&a, &b, &policy).unwrap();
        assert_eq!((k.rows(), k.cols()), (2, 2));
        assert_eq!(k.at(0, 0), c(0.0, 1.0));
        assert_eq!(k.at(1, 0), c(0.0, 2.0));
        assert_eq!(k.at(0, 1), c(0.0, 2.0));
        assert_eq!(k.at(1, 1), c(0.0, 4.0));
    }

    #[test]
    fn partial_trace_of_maximally_entangled_pair() {
        // |phi+><phi+| reduced to either party is I/2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let amps = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let rho = ComplexMatrix::outer(&amps, &amps);
        for keep in [[0usize], [1usize]] {
            let red = partial_trace(&rho, &[2, 2], &keep).unwrap();
            let want = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
            assert!(red.max_abs_diff(&want) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_three_qubit_ghz() {
        // Tracing one qubit of GHZ leaves the classical mixture
        // (|00><00| + |11><11|)/2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0] = c(s, 0.0);
        amps[7] = c(s, 0.0);
        let rho = ComplexMatrix::outer(&amps, &amps);
        let red = partial_trace(&rho, &[2, 2, 2], &[0, 1]).unwrap();
        let mut want = ComplexMatrix::zeros(4, 4);
        want.set(0, 0, c(0.5, 0.0));
        want.set(3, 3, c(0.5, 0.0));
        assert!(red.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn partial_trace_over_everything_is_the_trace() {
        let rho = ComplexMatrix::from_fn(6, 6, |i, j| c((i * 6 + j) as f64, 0.0));
        let t = partial_trace(&rho, &[2, 3], &[]).unwrap();
        assert_eq!((t.rows(), t.cols()), (1, 1));
        assert!((t.at(0, 0) - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let rho = ComplexMatrix::from_fn(12, 12, |i, j| {
            c((i as f64 - j as f64).sin(), (i + j) as f64 / 10.0)
        });
        let red = partial_trace(&rho, &[3, 4], &[1]).unwrap();
        assert!((red.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_keep_sets() {
        let rho = ComplexMatrix::identity(4);
        assert!(partial_trace(&rho, &[2, 2], &[1, 0]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[2]).is_err());
        assert!(partial_trace(&rho, &[2, 3], &[0]).is_err());
    }

    #[test]
    fn hermitian_deviation_detects_asymmetry() {
        let mut m = ComplexMatrix::identity(3);
        assert_eq!(m.hermitian_deviation(), 0.0);
        m.set(0, 1, c(0.0, 2.0));
        assert!((m.hermitian_deviation() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn vector_helpers() {
        let a = [c(1.0, 1.0), c(0.0, -1.0)];
        let b = [c(2.0, 0.0), c(0.0, 1.0)];
        // <a|b> = conj(1+i)*2 + conj(-i)*(i) = (2-2i) + (-1)... check numerically.
        let ip = vec_inner(&a, &b);
        assert!((ip - c(1.0, -2.0)).norm() < 1e-15);
        assert!((vec_norm(&a) - 3.0f64.sqrt()).abs() < 1e-15);
    }
}
