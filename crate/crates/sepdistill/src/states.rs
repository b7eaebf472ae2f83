//! State-family constructors and rank-two mixtures.
//!
//! Every family provides two orthogonal pure states on the same composite
//! system: `psi1 = (1/sqrt(d)) sum_i |i,i(,i)>` and a family-specific
//! shifted-index companion `psi2`.  The mixture of interest is always
//! `rho = w |psi1><psi1| + (1-w) |psi2><psi2|` with `w` strictly inside
//! `(0,1)`.
//!
//! Index arithmetic: a slot written `(d+i) mod n` wraps around that party's
//! dimension; plain `k+i` never wraps because the offsets keep it in range.

use crate::numlin::{flatten_index, vec_inner, vec_norm, C64, ComplexMatrix};
use crate::{Error, Policy, Result};

/// The catalogue of constructible state families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Thm1Sep,
    Thm1Locc,
    Ex2x4,
    BellMix,
    Thm2I,
    Thm2II,
    Thm2III,
    ThreeQubit,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Thm1Sep,
        Family::Thm1Locc,
        Family::Ex2x4,
        Family::BellMix,
        Family::Thm2I,
        Family::Thm2II,
        Family::Thm2III,
        Family::ThreeQubit,
    ];

    /// Stable string code used by the CLI and serialized reports.
    pub fn code(self) -> &'static str {
        match self {
            Family::Thm1Sep => "thm1-sep",
            Family::Thm1Locc => "thm1-locc",
            Family::Ex2x4 => "ex-2x4",
            Family::BellMix => "bell-mix",
            Family::Thm2I => "thm2-i",
            Family::Thm2II => "thm2-ii",
            Family::Thm2III => "thm2-iii",
            Family::ThreeQubit => "three-qubit",
        }
    }

    pub fn parse(code: &str) -> Result<Self> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.code() == code)
            .ok_or_else(|| Error::InvalidScenario(format!("unknown family '{code}'")))
    }

    pub fn parties(self) -> usize {
        match self {
            Family::Thm1Sep | Family::Thm1Locc | Family::Ex2x4 | Family::BellMix => 2,
            Family::Thm2I | Family::Thm2II | Family::Thm2III | Family::ThreeQubit => 3,
        }
    }

    /// Families with a printed two-operator instrument.
    pub fn has_instrument(self) -> bool {
        !matches!(self, Family::BellMix | Family::ThreeQubit)
    }

    /// Families with an executable LOCC protocol.
    pub fn has_protocol(self) -> bool {
        matches!(
            self,
            Family::ThreeQubit | Family::Thm1Locc | Family::Ex2x4 | Family::Thm2III
        )
    }

    /// Builds the family's `DimsSpec` from `d` and whichever offsets the
    /// caller supplied, filling free offsets with a balanced default.
    pub fn resolve_spec(
        self,
        d: usize,
        k1: Option<usize>,
        k2: Option<usize>,
        k3: Option<usize>,
    ) -> Result<DimsSpec> {
        let code = self.code();
        let fixed = move |want: &[usize], got: [Option<usize>; 3]| -> Result<()> {
            for (slot, g) in got.iter().enumerate() {
                let Some(g) = g else { continue };
                match want.get(slot) {
                    Some(w) if g == w => {}
                    Some(w) => {
                        return Err(Error::InvalidScenario(format!(
                            "family {code} fixes k{} = {w}, got {g}",
                            slot + 1
                        )))
                    }
                    None => {
                        return Err(Error::InvalidScenario(format!(
                            "family {code} has no offset k{}",
                            slot + 1
                        )))
                    }
                }
            }
            Ok(())
        };
        match self {
            Family::Thm1Sep => {
                if k3.is_some() {
                    return Err(Error::InvalidScenario(
                        "thm1-sep is bipartite: k3 not allowed".into(),
                    ));
                }
                let k1 = k1.unwrap_or_else(|| (d / 2).max(1));
                let k2 = k2.unwrap_or_else(|| d.saturating_sub(k1));
                if k1 < 1 || k2 < 1 || k1 + k2 != d {
                    return Err(Error::InvalidScenario(format!(
                        "thm1-sep needs k1,k2 >= 1 with k1+k2 = d, got k1={k1}, k2={k2}, d={d}"
                    )));
                }
                DimsSpec::new(d, vec![k1, k2])
            }
            Family::Thm1Locc => {
                fixed(&[0, d], [k1, k2, k3])?;
                DimsSpec::new(d, vec![0, d])
            }
            Family::Ex2x4 => {
                require_d(self, d, 2)?;
                fixed(&[0, 2], [k1, k2, k3])?;
                DimsSpec::new(2, vec![0, 2])
            }
            Family::BellMix => {
                require_d(self, d, 2)?;
                fixed(&[0, 0], [k1, k2, k3])?;
                DimsSpec::new(2, vec![0, 0])
            }
            Family::Thm2I => {
                if let Some(k1) = k1 {
                    if k1 != 0 {
                        return Err(Error::InvalidScenario(format!(
                            "thm2-i requires k1 = 0, got {k1}"
                        )));
                    }
                }
                let k2 = k2.unwrap_or_else(|| (d / 2).max(1));
                let k3 = k3.unwrap_or_else(|| d.saturating_sub(k2));
                if k2 < 1 || k3 < 1 || k2 + k3 != d {
                    return Err(Error::InvalidScenario(format!(
                        "thm2-i needs k2,k3 >= 1 with k2+k3 = d, got k2={k2}, k3={k3}, d={d}"
                    )));
                }
                DimsSpec::new(d, vec![0, k2, k3])
            }
            Family::Thm2II => {
                if d < 3 {
                    return Err(Error::InvalidScenario(format!(
                        "thm2-ii needs d >= 3 (three positive offsets summing to d), got d={d}"
                    )));
                }
                let k1 = k1.unwrap_or(1);
                let k2 = k2.unwrap_or_else(|| ((d.saturating_sub(k1)) / 2).max(1));
                let k3 = k3.unwrap_or_else(|| d.saturating_sub(k1 + k2));
                if k1 < 1 || k2 < 1 || k3 < 1 || k1 + k2 + k3 != d {
                    return Err(Error::InvalidScenario(format!(
                        "thm2-ii needs k1,k2,k3 >= 1 with sum d, got ({k1},{k2},{k3}), d={d}"
                    )));
                }
                DimsSpec::new(d, vec![k1, k2, k3])
            }
            Family::Thm2III => {
                fixed(&[0, 0, d], [k1, k2, k3])?;
                DimsSpec::new(d, vec![0, 0, d])
            }
            Family::ThreeQubit => {
                require_d(self, d, 2)?;
                fixed(&[0, 0, 0], [k1, k2, k3])?;
                DimsSpec::new(2, vec![0, 0, 0])
            }
        }
    }

    /// Every valid offset split of this family at level `d`, in
    /// lexicographic offset order.  Families with a fixed shape return the
    /// single spec.
    pub fn splits(self, d: usize) -> Result<Vec<DimsSpec>> {
        match self {
            Family::Thm1Sep => (1..d)
                .map(|k1| self.resolve_spec(d, Some(k1), Some(d - k1), None))
                .collect(),
            Family::Thm2I => (1..d)
                .map(|k2| self.resolve_spec(d, None, Some(k2), Some(d - k2)))
                .collect(),
            Family::Thm2II => {
                let mut out = Vec::new();
                for k1 in 1..d {
                    for k2 in 1..(d - k1) {
                        out.push(self.resolve_spec(d, Some(k1), Some(k2), Some(d - k1 - k2))?);
                    }
                }
                if out.is_empty() {
                    return Err(Error::InvalidScenario(format!(
                        "thm2-ii has no valid split at d={d}"
                    )));
                }
                Ok(out)
            }
            _ => Ok(vec![self.resolve_spec(d, None, None, None)?]),
        }
    }
}

fn require_d(family: Family, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::InvalidScenario(format!(
            "family {} is fixed at d = {want}, got {got}",
            family.code()
        )));
    }
    Ok(())
}

/// Party dimensions of a scenario: each party holds `d + offset` levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimsSpec {
    /// Entanglement level of the target (Schmidt rank of both eigenstates).
    pub d: usize,
    /// Per-party offsets above `d`.
    pub offsets: Vec<usize>,
    /// Per-party dimensions, `dims[p] = d + offsets[p]`.
    pub dims: Vec<usize>,
}

impl DimsSpec {
    pub fn new(d: usize, offsets: Vec<usize>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidScenario(format!(
                "level d must be at least 2, got {d}"
            )));
        }
        if offsets.len() < 2 {
            return Err(Error::InvalidScenario(
                "a scenario needs at least two parties".into(),
            ));
        }
        let dims = offsets.iter().map(|k| d + k).collect();
        Ok(Self { d, offsets, dims })
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }
}

/// Pure state on a composite system, stored as a flat amplitude vector in
/// the first-party-slowest convention.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>, dims: Vec<usize>, policy: &Policy) -> Result<Self> {
        let total: usize = dims.iter().product();
        policy.check_dim(total)?;
        if amplitudes.len() != total {
            return Err(Error::DimMismatch(format!(
                "amplitude vector has length {}, dims {:?} need {}",
                amplitudes.len(),
                dims,
                total
            )));
        }
        if !amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("pure state amplitudes"));
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > policy.state_tol {
            return Err(Error::NotNormalized((norm - 1.0).abs()));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Equal-weight superposition of computational basis kets.
    pub fn basis_superposition(
        dims: Vec<usize>,
        kets: &[Vec<usize>],
        policy: &Policy,
    ) -> Result<Self> {
        if kets.is_empty() {
            return Err(Error::EmptyInput("basis superposition"));
        }
        let total: usize = dims.iter().product();
        policy.check_dim(total)?;
        let weight = 1.0 / (kets.len() as f64).sqrt();
        let mut amplitudes = vec![C64::new(0.0, 0.0); total];
        for ket in kets {
            if ket.len() != dims.len() || ket.iter().zip(dims.iter()).any(|(i, n)| i >= n) {
                return Err(Error::InvalidScenario(format!(
                    "basis ket {ket:?} out of range for dims {dims:?}"
                )));
            }
            amplitudes[flatten_index(ket, &dims)] += C64::new(weight, 0.0);
        }
        Self::new(amplitudes, dims, policy)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::DimMismatch(format!(
                "states live on {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        Ok(vec_inner(&self.amplitudes, &other.amplitudes))
    }

    /// `|self><self|` as a raw matrix.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }
}

/// Density matrix with its party structure.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates shape, Hermiticity, and unit trace.  Positivity is a
    /// separate, eigendecomposition-backed check ([`Self::check_psd`])
    /// because it costs O(n^3); constructors in this crate only build
    /// convex mixtures of projectors, which are positive by construction.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>, policy: &Policy) -> Result<Self> {
        let total: usize = dims.iter().product();
        policy.check_dim(total)?;
        if !matrix.is_square() || matrix.rows() != total {
            return Err(Error::InvalidDensity(format!(
                "matrix is {}x{}, dims {:?} need {}x{}",
                matrix.rows(),
                matrix.cols(),
                dims,
                total,
                total
            )));
        }
        matrix.check_finite("density matrix")?;
        let dev = matrix.hermitian_deviation();
        if dev > policy.state_tol * matrix.max_abs().max(1.0) {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian: max deviation {dev:.3e}"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > policy.state_tol || trace.im.abs() > policy.state_tol {
            return Err(Error::InvalidDensity(format!(
                "trace is {:+.17e}{:+.17e}i, expected 1",
                trace.re, trace.im
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// Errors unless every eigenvalue is at least `-policy.kernel_tol`.
    pub fn check_psd(&self, policy: &Policy) -> Result<()> {
        let spec = crate::numlin::hermitian_eig(&self.matrix, policy)?;
        let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -policy.kernel_tol {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `F(rho, |t>) = <t|rho|t>`.
    pub fn fidelity_to(&self, target: &PureState) -> Result<f64> {
        if target.dims() != self.dims.as_slice() {
            return Err(Error::DimMismatch(format!(
                "state on {:?}, target on {:?}",
                self.dims,
                target.dims()
            )));
        }
        let image = self.matrix.matvec(target.amplitudes());
        Ok(vec_inner(target.amplitudes(), &image).re)
    }
}

/// Constructs the family's eigenstate pair `(psi1, psi2)` on `spec`.
pub fn make_state_pair(
    family: Family,
    spec: &DimsSpec,
    policy: &Policy,
) -> Result<(PureState, PureState)> {
    validate_family_spec(family, spec)?;
    let d = spec.d;
    let dims = spec.dims.clone();
    let psi1_kets: Vec<Vec<usize>> = (0..d).map(|i| vec![i; spec.parties()]).collect();
    let psi2_kets: Vec<Vec<usize>> = match family {
        Family::Thm1Sep => {
            let (k1, n) = (spec.offsets[0], spec.dims[1]);
            (0..d).map(|i| vec![k1 + i, (d + i) % n]).collect()
        }
        Family::Thm1Locc | Family::Ex2x4 => (0..d).map(|i| vec![i, d + i]).collect(),
        Family::BellMix => (0..2).map(|i| vec![i, 1 - i]).collect(),
        Family::Thm2I => {
            let (k2, r) = (spec.offsets[1], spec.dims[2]);
            (0..d).map(|i| vec![i, k2 + i, (d + i) % r]).collect()
        }
        Family::Thm2II => {
            let (k1, k2) = (spec.offsets[0], spec.offsets[1]);
            let (q, r) = (spec.dims[1], spec.dims[2]);
            (0..d)
                .map(|i| vec![k1 + i, (k1 + k2 + i) % q, (d + i) % r])
                .collect()
        }
        Family::Thm2III => (0..d).map(|i| vec![i, i, d + i]).collect(),
        Family::ThreeQubit => (0..2).map(|i| vec![i, i, 1 - i]).collect(),
    };
    let psi1 = PureState::basis_superposition(dims.clone(), &psi1_kets, policy)?;
    let psi2 = PureState::basis_superposition(dims, &psi2_kets, policy)?;
    Ok((psi1, psi2))
}

/// Errors unless `spec` matches the family's shape constraints.
pub fn validate_family_spec(family: Family, spec: &DimsSpec) -> Result<()> {
    if spec.parties() != family.parties() {
        return Err(Error::InvalidScenario(format!(
            "family {} needs {} parties, spec has {}",
            family.code(),
            family.parties(),
            spec.parties()
        )));
    }
    let k = &spec.offsets;
    let d = spec.d;
    let ok = match family {
        Family::Thm1Sep => k[0] >= 1 && k[1] >= 1 && k[0] + k[1] == d,
        Family::Thm1Locc => k == &[0, d],
        Family::Ex2x4 => d == 2 && k == &[0, 2],
        Family::BellMix => d == 2 && k == &[0, 0],
        Family::Thm2I => k[0] == 0 && k[1] >= 1 && k[2] >= 1 && k[1] + k[2] == d,
        Family::Thm2II => k.iter().all(|&x| x >= 1) && k.iter().sum::<usize>() == d,
        Family::Thm2III => k == &[0, 0, d],
        Family::ThreeQubit => d == 2 && k == &[0, 0, 0],
    };
    if !ok {
        return Err(Error::InvalidScenario(format!(
            "offsets {:?} invalid for family {} at d={}",
            k,
            family.code(),
            d
        )));
    }
    Ok(())
}

/// `rho = w |psi1><psi1| + (1-w) |psi2><psi2|`.
pub fn mix_pair(
    psi1: &PureState,
    psi2: &PureState,
    w: f64,
    policy: &Policy,
) -> Result<DensityMatrix> {
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::WeightOutOfRange(w));
    }
    let overlap = psi1.inner(psi2)?.norm();
    if overlap > policy.state_tol {
        return Err(Error::NotOrthogonal(overlap));
    }
    let rho = psi1
        .projector()
        .scale(C64::new(w, 0.0))
        .add(&psi2.projector().scale(C64::new(1.0 - w, 0.0)));
    DensityMatrix::new(rho, psi1.dims().to_vec(), policy)
}

/// `(1/sqrt(d)) sum_i |i>^(x n_parties)`.
pub fn ghz(n_parties: usize, d: usize, policy: &Policy) -> Result<PureState> {
    if n_parties < 2 {
        return Err(Error::InvalidScenario(format!(
            "ghz needs at least 2 parties, got {n_parties}"
        )));
    }
    if d < 2 {
        return Err(Error::InvalidScenario(format!(
            "ghz needs level d >= 2, got {d}"
        )));
    }
    let total = d.checked_pow(n_parties as u32).ok_or(Error::DimOverflow {
        requested: usize::MAX,
        max: policy.max_dim,
    })?;
    policy.check_dim(total)?;
    let kets: Vec<Vec<usize>> = (0..d).map(|i| vec![i; n_parties]).collect();
    PureState::basis_superposition(vec![d; n_parties], &kets, policy)
}
