//! LOCC protocol programs: finite outcome trees, simulation, and the
//! branch-survival check.
//!
//! A program is a tree of measurement rounds.  Each round applies a
//! complete local instrument on one party; an arm continues into the next
//! node for that outcome.  Corrections are single-operator rounds (the
//! operator must then be unitary for the round to be complete).  Every leaf
//! applies the program's trace-out set and is judged against the declared
//! target.

use crate::instruments::ProductKraus;
use crate::numlin::{partial_trace, svd, vec_norm, C64, ComplexMatrix};
use crate::states::{DensityMatrix, PureState};
use crate::{Error, Policy, Result};

/// Node of the protocol tree.
#[derive(Debug, Clone)]
pub enum ProtocolNode {
    /// Terminal: apply the program's trace-out set and stop.
    Leaf,
    /// Measurement round on `party`; `arms[k]` follows outcome `k`.
    Round {
        party: usize,
        operators: Vec<ComplexMatrix>,
        arms: Vec<ProtocolNode>,
    },
}

/// A validated LOCC protocol: tree, terminal trace-out set, declared target
/// on the kept parties.
#[derive(Debug, Clone)]
pub struct ProtocolProgram {
    dims: Vec<usize>,
    root: ProtocolNode,
    trace_out: Vec<usize>,
    target: PureState,
}

impl ProtocolProgram {
    /// Validates the tree: arity, operator shapes, and completeness of every
    /// round (`sum K^dag K = I` on the acting party within `kernel_tol`).
    pub fn new(
        dims: Vec<usize>,
        root: ProtocolNode,
        trace_out: Vec<usize>,
        target: PureState,
        policy: &Policy,
    ) -> Result<Self> {
        if dims.len() < 2 || dims.iter().any(|&d| d == 0) {
            return Err(Error::DimMismatch(
                "a protocol needs at least two parties with positive dims".into(),
            ));
        }
        policy.check_dim(dims.iter().product())?;
        for w in trace_out.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidCut(
                    "trace-out indices must be strictly increasing".into(),
                ));
            }
        }
        if trace_out.iter().any(|&p| p >= dims.len()) || trace_out.len() >= dims.len() {
            return Err(Error::InvalidCut(
                "trace-out set must leave at least one party".into(),
            ));
        }
        let kept: Vec<usize> = (0..dims.len())
            .filter(|p| !trace_out.contains(p))
            .map(|p| dims[p])
            .collect();
        if target.dims() != kept.as_slice() {
            return Err(Error::DimMismatch(format!(
                "target dims {:?} do not match kept dims {:?}",
                target.dims(),
                kept
            )));
        }
        let mut round_index = 0usize;
        validate_node(&root, &dims, policy, &mut round_index)?;
        Ok(Self {
            dims,
            root,
            trace_out,
            target,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn root(&self) -> &ProtocolNode {
        &self.root
    }

    pub fn trace_out(&self) -> &[usize] {
        &self.trace_out
    }

    /// Party indices kept after the terminal trace-out.
    pub fn kept_parties(&self) -> Vec<usize> {
        (0..self.dims.len())
            .filter(|p| !self.trace_out.contains(p))
            .collect()
    }

    pub fn target(&self) -> &PureState {
        &self.target
    }

    /// Every measurement operator in the tree, depth-first.
    pub fn all_operators(&self) -> Vec<(usize, ComplexMatrix)> {
        let mut out = Vec::new();
        collect_operators(&self.root, &mut out);
        out
    }
}

fn validate_node(
    node: &ProtocolNode,
    dims: &[usize],
    policy: &Policy,
    round_index: &mut usize,
) -> Result<()> {
    let ProtocolNode::Round {
        party,
        operators,
        arms,
    } = node
    else {
        return Ok(());
    };
    let round = *round_index;
    *round_index += 1;
    if *party >= dims.len() {
        return Err(Error::DimMismatch(format!(
            "round {round} acts on party {party}, but there are {} parties",
            dims.len()
        )));
    }
    if operators.is_empty() {
        return Err(Error::EmptyInput("protocol round operators"));
    }
    if operators.len() != arms.len() {
        return Err(Error::DimMismatch(format!(
            "round {round} has {} operators but {} arms",
            operators.len(),
            arms.len()
        )));
    }
    let n = dims[*party];
    let mut gram = ComplexMatrix::zeros(n, n);
    for op in operators {
        if !op.is_square() || op.rows() != n {
            return Err(Error::DimMismatch(format!(
                "round {round} operator is {}x{}, party {party} has dim {n}",
                op.rows(),
                op.cols()
            )));
        }
        op.check_finite("protocol operator")?;
        gram = gram.add(&op.adjoint().mul(op));
    }
    let dev = gram.max_abs_diff(&ComplexMatrix::identity(n));
    if dev > policy.kernel_tol {
        return Err(Error::IncompleteRound {
            round,
            party: *party,
            deviation: dev,
        });
    }
    for arm in arms {
        validate_node(arm, dims, policy, round_index)?;
    }
    Ok(())
}

fn collect_operators(node: &ProtocolNode, out: &mut Vec<(usize, ComplexMatrix)>) {
    if let ProtocolNode::Round {
        party,
        operators,
        arms,
    } = node
    {
        for op in operators {
            out.push((*party, op.clone()));
        }
        for arm in arms {
            collect_operators(arm, out);
        }
    }
}

/// One completed branch of a protocol run.
#[derive(Debug, Clone)]
pub struct BranchLeaf {
    /// Outcome sequence from the root to this leaf.
    pub label: Vec<usize>,
    /// Ordered product of the branch's local operators, per party.
    pub accumulated: ProductKraus,
    pub probability: f64,
    /// Normalized state on the kept parties; absent below the probability
    /// floor.
    pub state: Option<DensityMatrix>,
}

/// Runs the protocol on `rho`, returning the leaves in depth-first outcome
/// order.
pub fn simulate_protocol(
    rho: &DensityMatrix,
    prog: &ProtocolProgram,
    policy: &Policy,
) -> Result<Vec<BranchLeaf>> {
    if rho.dims() != prog.dims() {
        return Err(Error::DimMismatch(format!(
            "state dims {:?} do not match protocol dims {:?}",
            rho.dims(),
            prog.dims()
        )));
    }
    let acc: Vec<ComplexMatrix> = prog.dims().iter().map(|&n| ComplexMatrix::identity(n)).collect();
    let mut leaves = Vec::new();
    let keep: Vec<usize> = prog.kept_parties();
    let kept_dims: Vec<usize> = keep.iter().map(|&p| prog.dims()[p]).collect();
    descend(
        prog.root(),
        rho,
        prog,
        policy,
        &keep,
        &kept_dims,
        acc,
        &mut Vec::new(),
        &mut leaves,
    )?;
    Ok(leaves)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    node: &ProtocolNode,
    rho: &DensityMatrix,
    prog: &ProtocolProgram,
    policy: &Policy,
    keep: &[usize],
    kept_dims: &[usize],
    acc: Vec<ComplexMatrix>,
    label: &mut Vec<usize>,
    leaves: &mut Vec<BranchLeaf>,
) -> Result<()> {
    match node {
        ProtocolNode::Leaf => {
            let accumulated = ProductKraus::new(acc)?;
            let full = accumulated.full(policy)?;
            let image = full.mul(rho.matrix()).mul(&full.adjoint());
            let probability = image.trace().re.max(0.0);
            let state = if probability >= policy.prob_floor {
                let normalized = image.scale(C64::new(1.0 / probability, 0.0));
                let reduced = partial_trace(&normalized, prog.dims(), keep)?;
                Some(DensityMatrix::new(reduced, kept_dims.to_vec(), policy)?)
            } else {
                None
            };
            leaves.push(BranchLeaf {
                label: label.clone(),
                accumulated,
                probability,
                state,
            });
            Ok(())
        }
        ProtocolNode::Round {
            party,
            operators,
            arms,
        } => {
            for (k, (op, arm)) in operators.iter().zip(arms.iter()).enumerate() {
                let mut next = acc.clone();
                next[*party] = op.mul(&next[*party]);
                label.push(k);
                descend(arm, rho, prog, policy, keep, kept_dims, next, label, leaves)?;
                label.pop();
            }
            Ok(())
        }
    }
}

/// Survival verdicts for the branch-annihilation claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurvivalVerdict {
    /// Every branch prefix keeps or kills both eigenstates together.
    Holds,
    /// Premise satisfied, but some branch separates the eigenstates.
    Flagged,
    /// Some measurement operator has rank below the claimed level.
    NotApplicable,
}

impl SurvivalVerdict {
    pub fn code(self) -> &'static str {
        match self {
            SurvivalVerdict::Holds => "HOLDS",
            SurvivalVerdict::Flagged => "FLAGGED",
            SurvivalVerdict::NotApplicable => "NOT_APPLICABLE",
        }
    }
}

/// Per-prefix survival record.
#[derive(Debug, Clone)]
pub struct BranchCheck {
    pub label: Vec<usize>,
    pub psi1_survives: bool,
    pub psi2_survives: bool,
}

impl BranchCheck {
    /// The claim under test: both eigenstates survive or die together.
    pub fn equivalent(&self) -> bool {
        self.psi1_survives == self.psi2_survives
    }
}

#[derive(Debug, Clone)]
pub struct SurvivalReport {
    pub verdict: SurvivalVerdict,
    /// Smallest rank among the tree's measurement operators.
    pub min_local_rank: usize,
    /// The level `d` the claim's premise demands.
    pub required_rank: usize,
    pub branches: Vec<BranchCheck>,
}

/// Checks, for every branch prefix, that the accumulated operator
/// annihilates `psi1` iff it annihilates `psi2` (norm threshold
/// `kernel_tol` relative to the unit inputs).  The claim's premise demands
/// every measurement operator have rank at least `d`; if any falls short
/// the verdict is [`SurvivalVerdict::NotApplicable`] and the booleans are
/// reported raw.
pub fn branch_survival_check(
    prog: &ProtocolProgram,
    psi1: &PureState,
    psi2: &PureState,
    d: usize,
    policy: &Policy,
) -> Result<SurvivalReport> {
    if psi1.dims() != prog.dims() || psi2.dims() != prog.dims() {
        return Err(Error::DimMismatch(
            "eigenstates must live on the protocol's dims".into(),
        ));
    }
    let mut min_local_rank = usize::MAX;
    for (_, op) in prog.all_operators() {
        let rank = svd(&op, policy)?.rank(policy.kernel_tol);
        min_local_rank = min_local_rank.min(rank);
    }

    let acc: Vec<ComplexMatrix> = prog.dims().iter().map(|&n| ComplexMatrix::identity(n)).collect();
    let mut branches = Vec::new();
    survival_walk(
        prog.root(),
        prog,
        policy,
        psi1,
        psi2,
        acc,
        &mut Vec::new(),
        &mut branches,
    )?;

    let verdict = if min_local_rank < d {
        SurvivalVerdict::NotApplicable
    } else if branches.iter().all(BranchCheck::equivalent) {
        SurvivalVerdict::Holds
    } else {
        SurvivalVerdict::Flagged
    };
    Ok(SurvivalReport {
        verdict,
        min_local_rank,
        required_rank: d,
        branches,
    })
}

#[allow(clippy::too_many_arguments)]
fn survival_walk(
    node: &ProtocolNode,
    prog: &ProtocolProgram,
    policy: &Policy,
    psi1: &PureState,
    psi2: &PureState,
    acc: Vec<ComplexMatrix>,
    label: &mut Vec<usize>,
    out: &mut Vec<BranchCheck>,
) -> Result<()> {
    let ProtocolNode::Round {
        party,
        operators,
        arms,
    } = node
    else {
        return Ok(());
    };
    for (k, (op, arm)) in operators.iter().zip(arms.iter()).enumerate() {
        let mut next = acc.clone();
        next[*party] = op.mul(&next[*party]);
        label.push(k);
        let full = ProductKraus::new(next.clone())?.full(policy)?;
        out.push(BranchCheck {
            label: label.clone(),
            psi1_survives: vec_norm(&full.matvec(psi1.amplitudes())) > policy.kernel_tol,
            psi2_survives: vec_norm(&full.matvec(psi2.amplitudes())) > policy.kernel_tol,
        });
        survival_walk(arm, prog, policy, psi1, psi2, next, label, out)?;
        label.pop();
    }
    Ok(())
}
