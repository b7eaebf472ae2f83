//! Entanglement diagnostics: Schmidt decompositions, operator product
//! structure, matrix-pencil rank minimization, and dimension-bound checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::numlin::{svd, unflatten_index, C64, ComplexMatrix};
use crate::states::PureState;
use crate::{Error, Policy, Result};

/// A bipartition of party indices into a left block and its complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    left: Vec<usize>,
    parties: usize,
}

impl Cut {
    /// `left` must be a nonempty, strictly increasing, proper subset of
    /// `0..parties`.
    pub fn new(left: Vec<usize>, parties: usize) -> Result<Self> {
        if parties < 2 {
            return Err(Error::InvalidCut(format!(
                "need at least 2 parties, got {parties}"
            )));
        }
        if left.is_empty() || left.len() >= parties {
            return Err(Error::InvalidCut(format!(
                "left block must be a nonempty proper subset, got {} of {} parties",
                left.len(),
                parties
            )));
        }
        for window in left.windows(2) {
            if window[0] >= window[1] {
                return Err(Error::InvalidCut(format!(
                    "left block must be strictly increasing, got {left:?}"
                )));
            }
        }
        if let Some(&last) = left.last() {
            if last >= parties {
                return Err(Error::InvalidCut(format!(
                    "party {last} out of range for {parties} parties"
                )));
            }
        }
        Ok(Cut { left, parties })
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> Vec<usize> {
        (0..self.parties)
            .filter(|p| !self.left.contains(p))
            .collect()
    }

    pub fn parties(&self) -> usize {
        self.parties
    }
}

/// Schmidt coefficients of a pure state across one cut.
#[derive(Debug, Clone)]
pub struct SchmidtData {
    pub cut: Cut,
    /// Singular values of the cut-reshaped amplitude matrix, descending.
    pub coefficients: Vec<f64>,
    /// Count of coefficients above `threshold` times the largest.
    pub rank: usize,
}

/// Result of sampling the pencil `x psi1 + y psi2` for rank drops.
#[derive(Debug, Clone)]
pub struct PencilResult {
    pub min_rank: usize,
    /// Coefficients achieving the minimum.
    pub witness: (C64, C64),
    /// Number of (x, y) pairs evaluated.
    pub samples: usize,
}

/// Reshapes the amplitude vector into a matrix with the cut's left block
/// indexing rows.
fn reshape_across_cut(psi: &PureState, cut: &Cut) -> Result<ComplexMatrix> {
    let dims = psi.dims();
    if cut.parties() != dims.len() {
        return Err(Error::InvalidCut(format!(
            "cut over {} parties applied to a {}-party state",
            cut.parties(),
            dims.len()
        )));
    }
    let right = cut.right();
    let rows: usize = cut.left().iter().map(|&p| dims[p]).product();
    let cols: usize = right.iter().map(|&p| dims[p]).product();
    let mut m = ComplexMatrix::zeros(rows, cols);
    for (flat, amp) in psi.amplitudes().iter().enumerate() {
        let multi = unflatten_index(flat, dims);
        let row = cut.left().iter().fold(0, |acc, &p| acc * dims[p] + multi[p]);
        let col = right.iter().fold(0, |acc, &p| acc * dims[p] + multi[p]);
        m.set(row, col, *amp);
    }
    Ok(m)
}

/// Schmidt decomposition of `psi` across `cut`; `threshold` is relative to
/// the largest coefficient.
pub fn schmidt(psi: &PureState, cut: &Cut, threshold: f64, policy: &Policy) -> Result<SchmidtData> {
    let m = reshape_across_cut(psi, cut)?;
    let decomposition = svd(&m, policy)?;
    let rank = decomposition.rank(threshold);
    Ok(SchmidtData {
        cut: cut.clone(),
        coefficients: decomposition.singular_values,
        rank,
    })
}

/// Rank of `op` realigned across `cut`; 1 exactly when the operator is a
/// tensor product across the cut.
pub fn operator_schmidt_rank(
    op: &ComplexMatrix,
    dims: &[usize],
    cut: &Cut,
    policy: &Policy,
) -> Result<usize> {
    let total: usize = dims.iter().product();
    if !op.is_square() || op.rows() != total {
        return Err(Error::DimMismatch(format!(
            "operator is {}x{} but dims {:?} give total {}",
            op.rows(),
            op.cols(),
            dims,
            total
        )));
    }
    if cut.parties() != dims.len() {
        return Err(Error::InvalidCut(format!(
            "cut over {} parties applied to dims {:?}",
            cut.parties(),
            dims
        )));
    }
    let right = cut.right();
    let left_dim: usize = cut.left().iter().map(|&p| dims[p]).product();
    let right_dim: usize = right.iter().map(|&p| dims[p]).product();
    let mut realigned = ComplexMatrix::zeros(left_dim * left_dim, right_dim * right_dim);
    for r in 0..total {
        let row_multi = unflatten_index(r, dims);
        for c in 0..total {
            let col_multi = unflatten_index(c, dims);
            let block = |parties: &[usize]| {
                let a = parties.iter().fold(0, |acc, &p| acc * dims[p] + row_multi[p]);
                let b = parties.iter().fold(0, |acc, &p| acc * dims[p] + col_multi[p]);
                (a, b)
            };
            let (lr, lc) = block(cut.left());
            let (rr, rc) = block(&right);
            realigned.set(lr * left_dim + lc, rr * right_dim + rc, op.at(r, c));
        }
    }
    Ok(svd(&realigned, policy)?.rank(policy.kernel_tol))
}

/// Roots of `det(t M1 + M2) = 0` for 2x2 reshapes, as `(x, y)` candidates.
///
/// The determinant is the quadratic `a t^2 + b t + c` with `a = det M1`,
/// `c = det M2`, and `b` the mixed term, so the rank-dropping ratios are
/// available in closed form.
fn quadratic_pencil_roots(m1: &ComplexMatrix, m2: &ComplexMatrix) -> Vec<(C64, C64)> {
    let det = |m: &ComplexMatrix| m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    let a = det(m1);
    let c = det(m2);
    let b = m1.at(0, 0) * m2.at(1, 1) + m2.at(0, 0) * m1.at(1, 1)
        - m1.at(0, 1) * m2.at(1, 0)
        - m2.at(0, 1) * m1.at(1, 0);
    let scale = m1.max_abs().max(m2.max_abs()).powi(2).max(1e-300);
    let one = C64::new(1.0, 0.0);
    let mut roots = Vec::new();
    if a.norm() <= 1e-14 * scale {
        if b.norm() > 1e-14 * scale {
            roots.push((-c / b, one));
        }
        // a = 0 means (1, 0) itself drops rank; the axis candidates cover it.
    } else {
        let disc = (b * b - C64::new(4.0, 0.0) * a * c).sqrt();
        let two_a = C64::new(2.0, 0.0) * a;
        roots.push(((-b + disc) / two_a, one));
        roots.push(((-b - disc) / two_a, one));
    }
    roots
}

/// Minimum Schmidt rank of `x psi1 + y psi2` over a deterministic sample
/// set: closed-form 2x2 roots, both axes, a 64-point unit-circle ratio
/// grid, then seeded random complex pairs up to `samples` evaluations.
pub fn pencil_min_rank(
    psi1: &PureState,
    psi2: &PureState,
    cut: &Cut,
    samples: usize,
    seed: u64,
    policy: &Policy,
) -> Result<PencilResult> {
    if psi1.dims() != psi2.dims() {
        return Err(Error::DimMismatch(format!(
            "pencil states have dims {:?} and {:?}",
            psi1.dims(),
            psi2.dims()
        )));
    }
    if samples == 0 {
        return Err(Error::EmptyInput("pencil sampling needs samples >= 1"));
    }
    let m1 = reshape_across_cut(psi1, cut)?;
    let m2 = reshape_across_cut(psi2, cut)?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);

    let mut candidates: Vec<(C64, C64)> = Vec::new();
    if m1.rows() == 2 && m1.cols() == 2 {
        candidates.extend(quadratic_pencil_roots(&m1, &m2));
    }
    candidates.push((one, zero));
    candidates.push((zero, one));
    for k in 0..64 {
        let angle = 2.0 * std::f64::consts::PI * (k as f64) / 64.0;
        candidates.push((one, C64::from_polar(1.0, angle)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while candidates.len() < samples {
        let mut draw = || {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if z.norm() < 1e-3 {
                C64::new(1.0, 0.0)
            } else {
                z
            }
        };
        let x = draw();
        let y = draw();
        candidates.push((x, y));
    }

    let mut min_rank = usize::MAX;
    let mut witness = (one, zero);
    let mut evaluated = 0usize;
    for (x, y) in candidates {
        let combo = m1.scale(x).add(&m2.scale(y));
        let rank = svd(&combo, policy)?.rank(policy.kernel_tol);
        evaluated += 1;
        if rank < min_rank {
            min_rank = rank;
            witness = (x, y);
        }
    }
    Ok(PencilResult {
        min_rank,
        witness,
        samples: evaluated,
    })
}

/// The dimension-threshold families the bound checker understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    BipartiteSep,
    BipartiteLocc,
    TripartiteSep,
    TripartiteLocc,
    NPartiteSep,
}

impl BoundKind {
    pub const ALL: [BoundKind; 5] = [
        BoundKind::BipartiteSep,
        BoundKind::BipartiteLocc,
        BoundKind::TripartiteSep,
        BoundKind::TripartiteLocc,
        BoundKind::NPartiteSep,
    ];

    pub fn code(self) -> &'static str {
        match self {
            BoundKind::BipartiteSep => "bipartite-sep",
            BoundKind::BipartiteLocc => "bipartite-locc",
            BoundKind::TripartiteSep => "tripartite-sep",
            BoundKind::TripartiteLocc => "tripartite-locc",
            BoundKind::NPartiteSep => "npartite-sep",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.code() == text)
            .ok_or_else(|| Error::InvalidScenario(format!("unknown bound kind '{text}'")))
    }
}

/// Outcome of one dimension-bound query.
#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub kind: BoundKind,
    pub d: usize,
    pub dims: Vec<usize>,
    /// The aggregate inequality (sum or max against the kind's threshold).
    pub aggregate_ok: bool,
    /// Every local dimension is at least `d`.
    pub per_party_ok: bool,
    pub satisfied: bool,
}

/// Checks whether `dims` clear the dimension threshold for distilling a
/// rank-`d` maximally entangled state under the given operation class.
pub fn bound_check(kind: BoundKind, d: usize, dims: &[usize]) -> Result<BoundCheck> {
    if d < 2 {
        return Err(Error::InvalidScenario(format!(
            "bound queries need d >= 2, got {d}"
        )));
    }
    if dims.iter().any(|&x| x == 0) {
        return Err(Error::InvalidScenario("dims must be positive".into()));
    }
    let expect_len = match kind {
        BoundKind::BipartiteSep | BoundKind::BipartiteLocc => Some(2),
        BoundKind::TripartiteSep | BoundKind::TripartiteLocc => Some(3),
        BoundKind::NPartiteSep => None,
    };
    if let Some(n) = expect_len {
        if dims.len() != n {
            return Err(Error::InvalidScenario(format!(
                "{} expects {} dims, got {}",
                kind.code(),
                n,
                dims.len()
            )));
        }
    } else if dims.len() < 2 {
        return Err(Error::InvalidScenario(format!(
            "{} expects at least 2 dims, got {}",
            kind.code(),
            dims.len()
        )));
    }
    let sum: usize = dims.iter().sum();
    let max = dims.iter().copied().max().unwrap_or(0);
    let min = dims.iter().copied().min().unwrap_or(0);
    let aggregate_ok = match kind {
        BoundKind::BipartiteSep => sum >= 3 * d,
        BoundKind::BipartiteLocc => max >= 2 * d,
        BoundKind::TripartiteSep => sum >= 4 * d,
        BoundKind::TripartiteLocc => max >= 2 * d,
        BoundKind::NPartiteSep => sum >= (dims.len() + 1) * d,
    };
    let per_party_ok = min >= d;
    Ok(BoundCheck {
        kind,
        d,
        dims: dims.to_vec(),
        aggregate_ok,
        per_party_ok,
        satisfied: aggregate_ok && per_party_ok,
    })
}
