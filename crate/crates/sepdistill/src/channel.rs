//! Applies instruments to states and issues completeness and distillation
//! verdicts.
//!
//! Verdict vocabulary: an instrument is COMPLETE, SUBNORMALIZED (a valid
//! filter whose deficiency is positive semidefinite), or INVALID (the Kraus
//! sum exceeds the identity somewhere).  A conversion is DETERMINISTIC when
//! all probability arrives at the target, CONDITIONAL when only part of it
//! does but every realized outcome hits the target, and FAILED otherwise.

use crate::analysis::{schmidt, Cut};
use crate::instruments::Instrument;
use crate::locc::{simulate_protocol, ProtocolProgram};
use crate::numlin::{hermitian_eig, vec_inner, vec_norm, C64, ComplexMatrix};
use crate::states::{DensityMatrix, PureState};
use crate::{Error, Policy, Result};

/// One measurement outcome of an applied instrument.
#[derive(Debug, Clone)]
pub struct OutcomeRecord {
    pub outcome: usize,
    /// `trace(E rho E^dag)`, clamped at zero.
    pub probability: f64,
    /// Normalized post-state; absent below the probability floor.
    pub post_state: Option<DensityMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompletenessVerdict {
    Complete,
    Subnormalized,
    Invalid,
}

impl CompletenessVerdict {
    pub fn code(self) -> &'static str {
        match self {
            CompletenessVerdict::Complete => "COMPLETE",
            CompletenessVerdict::Subnormalized => "SUBNORMALIZED",
            CompletenessVerdict::Invalid => "INVALID",
        }
    }
}

/// Classification of the deficiency `D = I - sum E^dag E`.
#[derive(Debug, Clone)]
pub struct CompletenessReport {
    pub verdict: CompletenessVerdict,
    /// Eigenvalues of `D`, descending.
    pub deficiency_spectrum: Vec<f64>,
    /// How far the Kraus sum overshoots the identity: `max(0, -min eig D)`.
    pub max_overshoot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistillationVerdict {
    Deterministic,
    Conditional,
    Failed,
}

impl DistillationVerdict {
    pub fn code(self) -> &'static str {
        match self {
            DistillationVerdict::Deterministic => "DETERMINISTIC",
            DistillationVerdict::Conditional => "CONDITIONAL",
            DistillationVerdict::Failed => "FAILED",
        }
    }
}

/// Outcome statistics of a conversion attempt, judged against a pure
/// target.
#[derive(Debug, Clone)]
pub struct DistillationReport {
    pub outcomes: Vec<OutcomeRecord>,
    /// Total probability over all outcomes.
    pub transferred: f64,
    /// Fidelity `<target|post|target>` per outcome; absent when the outcome
    /// carries no post-state.
    pub fidelities: Vec<Option<f64>>,
    /// Schmidt rank of each realized post-state's dominant eigenvector,
    /// one entry per single-party cut (one for bipartite states, three for
    /// tripartite).
    pub schmidt_ranks: Vec<Option<Vec<usize>>>,
    pub verdict: DistillationVerdict,
}

impl DistillationReport {
    /// Smallest realized fidelity, if any outcome was realized.
    pub fn min_fidelity(&self) -> Option<f64> {
        self.fidelities
            .iter()
            .flatten()
            .copied()
            .fold(None, |acc, f| Some(acc.map_or(f, |a: f64| a.min(f))))
    }
}

/// Applies `rho -> {E_k rho E_k^dag}` outcome by outcome.
pub fn apply_instrument(
    rho: &DensityMatrix,
    inst: &Instrument,
    policy: &Policy,
) -> Result<Vec<OutcomeRecord>> {
    if rho.dims() != inst.dims() {
        return Err(Error::DimMismatch(format!(
            "state dims {:?} do not match instrument dims {:?}",
            rho.dims(),
            inst.dims()
        )));
    }
    let mut records = Vec::with_capacity(inst.kraus().len());
    for (outcome, kraus) in inst.kraus().iter().enumerate() {
        let full = kraus.full(policy)?;
        let image = full.mul(rho.matrix()).mul(&full.adjoint());
        let probability = image.trace().re.max(0.0);
        let post_state = if probability >= policy.prob_floor {
            let normalized = image.scale(C64::new(1.0 / probability, 0.0));
            Some(DensityMatrix::new(
                normalized,
                rho.dims().to_vec(),
                policy,
            )?)
        } else {
            None
        };
        records.push(OutcomeRecord {
            outcome,
            probability,
            post_state,
        });
    }
    Ok(records)
}

/// Diagonalizes the deficiency and classifies the instrument.
pub fn completeness_report(inst: &Instrument, policy: &Policy) -> Result<CompletenessReport> {
    let deficiency = inst.deficiency(policy)?;
    let spectrum = hermitian_eig(&deficiency, policy)?.eigenvalues;
    let min_eig = spectrum.last().copied().unwrap_or(0.0);
    let max_abs = deficiency.max_abs();
    let verdict = if max_abs <= policy.kernel_tol {
        CompletenessVerdict::Complete
    } else if min_eig >= -policy.kernel_tol {
        CompletenessVerdict::Subnormalized
    } else {
        CompletenessVerdict::Invalid
    };
    Ok(CompletenessReport {
        verdict,
        deficiency_spectrum: spectrum,
        max_overshoot: (-min_eig).max(0.0),
    })
}

/// Applies an instrument and judges the outcome statistics against
/// `target`.
pub fn distillation_report(
    rho: &DensityMatrix,
    inst: &Instrument,
    target: &PureState,
    policy: &Policy,
) -> Result<DistillationReport> {
    let outcomes = apply_instrument(rho, inst, policy)?;
    aggregate(outcomes, target, policy)
}

/// Runs a protocol and judges the leaves against the program's declared
/// target.
pub fn distillation_report_for_protocol(
    rho: &DensityMatrix,
    prog: &ProtocolProgram,
    policy: &Policy,
) -> Result<DistillationReport> {
    let leaves = simulate_protocol(rho, prog, policy)?;
    let outcomes = leaves
        .into_iter()
        .enumerate()
        .map(|(outcome, leaf)| OutcomeRecord {
            outcome,
            probability: leaf.probability,
            post_state: leaf.state,
        })
        .collect();
    aggregate(outcomes, prog.target(), policy)
}

fn aggregate(
    outcomes: Vec<OutcomeRecord>,
    target: &PureState,
    policy: &Policy,
) -> Result<DistillationReport> {
    let transferred: f64 = outcomes.iter().map(|r| r.probability).sum();
    let mut fidelities = Vec::with_capacity(outcomes.len());
    let mut schmidt_ranks = Vec::with_capacity(outcomes.len());
    for record in &outcomes {
        match &record.post_state {
            Some(state) => {
                fidelities.push(Some(state.fidelity_to(target)?));
                let dominant = dominant_eigvec(state.matrix(), target.amplitudes(), policy)?;
                let psi = PureState::new(dominant, state.dims().to_vec(), policy)?;
                let mut ranks = Vec::new();
                let cuts = if state.dims().len() == 2 { 1 } else { state.dims().len() };
                for party in 0..cuts {
                    let cut = Cut::new(vec![party], state.dims().len())?;
                    ranks.push(schmidt(&psi, &cut, policy.kernel_tol, policy)?.rank);
                }
                schmidt_ranks.push(Some(ranks));
            }
            None => {
                fidelities.push(None);
                schmidt_ranks.push(None);
            }
        }
    }
    let all_realized_hit = fidelities
        .iter()
        .flatten()
        .all(|&f| f >= 1.0 - policy.kernel_tol);
    let verdict = if (transferred - 1.0).abs() <= policy.kernel_tol && all_realized_hit {
        DistillationVerdict::Deterministic
    } else if transferred < 1.0 && all_realized_hit {
        DistillationVerdict::Conditional
    } else {
        DistillationVerdict::Failed
    };
    Ok(DistillationReport {
        outcomes,
        transferred,
        fidelities,
        schmidt_ranks,
        verdict,
    })
}

/// Unit eigenvector of the largest eigenvalue of a Hermitian PSD matrix.
///
/// Power iteration started at `hint` (the conversion target, which in this
/// crate is always close to the dominant eigenvector); falls back to a full
/// eigendecomposition when the iteration stalls.
fn dominant_eigvec(m: &ComplexMatrix, hint: &[C64], policy: &Policy) -> Result<Vec<C64>> {
    let n = m.rows();
    let mut v: Vec<C64> = if hint.len() == n && vec_norm(hint) > 0.5 {
        hint.to_vec()
    } else {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[0] = C64::new(1.0, 0.0);
        e
    };
    let scale = m.max_abs().max(1e-300);
    for _iter in 0..200 {
        let image = m.matvec(&v);
        let norm = vec_norm(&image);
        if norm <= scale * 1e-14 {
            break; // hint lies in the kernel; fall back
        }
        let inv = C64::new(1.0 / norm, 0.0);
        let next: Vec<C64> = image.iter().map(|z| z * inv).collect();
        let lambda = vec_inner(&next, &m.matvec(&next)).re;
        let residual: Vec<C64> = m
            .matvec(&next)
            .iter()
            .zip(next.iter())
            .map(|(a, b)| a - b * C64::new(lambda, 0.0))
            .collect();
        v = next;
        if vec_norm(&residual) <= 1e-12 * scale.max(lambda.abs()) {
            return Ok(v);
        }
    }
    let spec = hermitian_eig(m, policy)?;
    Ok((0..n).map(|i| spec.eigenvectors.at(i, 0)).collect())
}
