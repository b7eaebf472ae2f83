//! Operator families: product-Kraus instruments and LOCC protocol programs.
//!
//! A family's two-operator instrument `{E1, E2}` filters its mixture back to
//! `psi1`: the first operator fixes `psi1` (up to the family's scalar), the
//! second maps `psi2` onto `psi1`, and each annihilates the other eigenstate.
//! Coefficient tables are materialized as data so tests can assert them
//! entry-by-entry; every entry is `1` or `1/sqrt(2)`.
//!
//! The separable pairs are returned exactly as specified, deliberately not
//! completed to trace-preserving channels; searching for completions is the
//! `search` module's job.

use crate::locc::{ProtocolNode, ProtocolProgram};
use crate::numlin::{kron_all, C64, ComplexMatrix};
use crate::states::{ghz, validate_family_spec, DimsSpec, Family};
use crate::{Error, Policy, Result};

const HALF_SQRT: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// One Kraus operator factored over the parties; each local operator is
/// square on its party's space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductKraus {
    locals: Vec<ComplexMatrix>,
}

impl ProductKraus {
    pub fn new(locals: Vec<ComplexMatrix>) -> Result<Self> {
        if locals.is_empty() {
            return Err(Error::EmptyInput("product Kraus operator"));
        }
        for (p, m) in locals.iter().enumerate() {
            if !m.is_square() {
                return Err(Error::DimMismatch(format!(
                    "local operator for party {p} is {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
            m.check_finite("product Kraus local")?;
        }
        Ok(Self { locals })
    }

    pub fn locals(&self) -> &[ComplexMatrix] {
        &self.locals
    }

    pub fn dims(&self) -> Vec<usize> {
        self.locals.iter().map(|m| m.rows()).collect()
    }

    /// Materializes the full operator as the Kronecker product of the
    /// locals.
    pub fn full(&self, policy: &Policy) -> Result<ComplexMatrix> {
        let refs: Vec<&ComplexMatrix> = self.locals.iter().collect();
        kron_all(&refs, policy)
    }
}

/// A list of product Kraus operators on a fixed composite system.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    dims: Vec<usize>,
    kraus: Vec<ProductKraus>,
}

impl Instrument {
    pub fn new(dims: Vec<usize>, kraus: Vec<ProductKraus>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::EmptyInput("instrument"));
        }
        for k in &kraus {
            if k.dims() != dims {
                return Err(Error::DimMismatch(format!(
                    "Kraus local dims {:?} do not match instrument dims {:?}",
                    k.dims(),
                    dims
                )));
            }
        }
        Ok(Self { dims, kraus })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn kraus(&self) -> &[ProductKraus] {
        &self.kraus
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// `sum_k E_k^dag E_k` on the full space.
    pub fn gram_sum(&self, policy: &Policy) -> Result<ComplexMatrix> {
        let total = self.total_dim();
        let mut acc = ComplexMatrix::zeros(total, total);
        for k in &self.kraus {
            let full = k.full(policy)?;
            acc = acc.add(&full.adjoint().mul(&full));
        }
        Ok(acc)
    }

    /// Completeness deficiency `D = I - sum_k E_k^dag E_k`.
    pub fn deficiency(&self, policy: &Policy) -> Result<ComplexMatrix> {
        Ok(ComplexMatrix::identity(self.total_dim()).sub(&self.gram_sum(policy)?))
    }
}

/// Named coefficient vector from a family's case table.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub name: &'static str,
    pub values: Vec<f64>,
}

impl CoefficientTable {
    /// True when every entry is `1` or `1/sqrt(2)`, the only values the
    /// case tables use.
    pub fn is_binary_valued(&self) -> bool {
        self.values
            .iter()
            .all(|&v| v == 1.0 || v == HALF_SQRT)
    }
}

/// Step table: `lo` below the threshold index, `hi` from it onward.
fn step(d: usize, threshold: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..d).map(|i| if i < threshold { lo } else { hi }).collect()
}

/// The family's coefficient tables, in the order the operators consume
/// them.  Families whose operators carry no table (the unit-coefficient
/// LOCC families) return an empty list.
pub fn coefficient_tables(family: Family, spec: &DimsSpec) -> Result<Vec<CoefficientTable>> {
    validate_family_spec(family, spec)?;
    let d = spec.d;
    let k = &spec.offsets;
    let t = |name, values| CoefficientTable { name, values };
    Ok(match family {
        Family::Thm1Sep => vec![
            t("eta", step(d, k[0], 1.0, HALF_SQRT)),
            t("nu", step(d, k[0], HALF_SQRT, 1.0)),
            t("eta_prime", step(d, k[1], HALF_SQRT, 1.0)),
            t("nu_prime", step(d, k[1], 1.0, HALF_SQRT)),
        ],
        Family::Thm2I => vec![
            t("eta", step(d, k[1], 1.0, HALF_SQRT)),
            t("nu", step(d, k[1], HALF_SQRT, 1.0)),
            t("eta_prime", step(d, k[2], HALF_SQRT, 1.0)),
            t("nu_prime", step(d, k[2], 1.0, HALF_SQRT)),
        ],
        Family::Thm2II => {
            let (k1, k2, k3) = (k[0], k[1], k[2]);
            let band = |a: usize, b: usize| -> Vec<f64> {
                (0..d)
                    .map(|i| if i >= a && i < b { 1.0 } else { HALF_SQRT })
                    .collect()
            };
            vec![
                t("alpha", step(d, k1, 1.0, HALF_SQRT)),
                t("beta", band(k1, k1 + k2)),
                t("gamma", step(d, k1 + k2, HALF_SQRT, 1.0)),
                t("alpha_prime", step(d, k2 + k3, HALF_SQRT, 1.0)),
                t("beta_prime", band(k3, k2 + k3)),
                t("gamma_prime", step(d, k3, 1.0, HALF_SQRT)),
            ]
        }
        _ => vec![],
    })
}

/// Diagonal local operator `sum_i values[i] |i><i|` on a `dim`-level party.
fn diag_op(dim: usize, values: &[f64]) -> ComplexMatrix {
    assert!(values.len() <= dim);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (i, &v) in values.iter().enumerate() {
        m.set(i, i, C64::new(v, 0.0));
    }
    m
}

/// Shift local operator `sum_i values[i] |i><src(i)|`; every source index
/// must stay inside the party's space.
fn shift_op(
    dim: usize,
    values: &[f64],
    src: impl Fn(usize) -> usize,
) -> Result<ComplexMatrix> {
    assert!(values.len() <= dim);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (i, &v) in values.iter().enumerate() {
        let j = src(i);
        if j >= dim {
            return Err(Error::InvalidScenario(format!(
                "shift source index {j} out of range for a {dim}-level party"
            )));
        }
        m.set(i, j, C64::new(v, 0.0));
    }
    Ok(m)
}

/// Unit-coefficient projector-shift pair `{sum |i><i|, sum |i><d+i|}` used
/// on the doubled party of the LOCC families.
fn locc_pair(d: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let ones = vec![1.0; d];
    Ok((
        shift_op(2 * d, &ones, |i| i)?,
        shift_op(2 * d, &ones, |i| d + i)?,
    ))
}

/// The scalar `s` in the family's filtering identity `E1 psi1 = s psi1`,
/// `E2 psi2 = s psi1`.
pub fn filter_scalar(family: Family) -> Result<f64> {
    match family {
        Family::Thm1Sep => Ok(HALF_SQRT),
        Family::Thm2I | Family::Thm2II => Ok(0.5),
        Family::Thm1Locc | Family::Ex2x4 | Family::Thm2III => Ok(1.0),
        Family::BellMix | Family::ThreeQubit => Err(Error::InvalidScenario(format!(
            "family {} has no printed instrument",
            family.code()
        ))),
    }
}

/// Builds the family's two-operator instrument.
pub fn make_instrument(family: Family, spec: &DimsSpec, policy: &Policy) -> Result<Instrument> {
    validate_family_spec(family, spec)?;
    policy.check_dim(spec.total_dim())?;
    let d = spec.d;
    let dims = spec.dims.clone();
    let kraus = match family {
        Family::Thm1Sep => {
            let tables = coefficient_tables(family, spec)?;
            let (m, n, k1) = (dims[0], dims[1], spec.offsets[0]);
            let e1 = ProductKraus::new(vec![
                diag_op(m, &tables[0].values),
                diag_op(n, &tables[1].values),
            ])?;
            let e2 = ProductKraus::new(vec![
                shift_op(m, &tables[2].values, |i| k1 + i)?,
                shift_op(n, &tables[3].values, |i| (d + i) % n)?,
            ])?;
            vec![e1, e2]
        }
        Family::Thm1Locc | Family::Ex2x4 => {
            let (b1, b2) = locc_pair(d)?;
            let id = ComplexMatrix::identity(dims[0]);
            vec![
                ProductKraus::new(vec![id.clone(), b1])?,
                ProductKraus::new(vec![id, b2])?,
            ]
        }
        Family::Thm2I => {
            let tables = coefficient_tables(family, spec)?;
            let (q, r, k2) = (dims[1], dims[2], spec.offsets[1]);
            let half = ComplexMatrix::identity(dims[0]).scale(C64::new(HALF_SQRT, 0.0));
            let e1 = ProductKraus::new(vec![
                half.clone(),
                diag_op(q, &tables[0].values),
                diag_op(r, &tables[1].values),
            ])?;
            let e2 = ProductKraus::new(vec![
                half,
                shift_op(q, &tables[2].values, |i| k2 + i)?,
                shift_op(r, &tables[3].values, |i| (d + i) % r)?,
            ])?;
            vec![e1, e2]
        }
        Family::Thm2II => {
            let tables = coefficient_tables(family, spec)?;
            let (p, q, r) = (dims[0], dims[1], dims[2]);
            let (k1, k2) = (spec.offsets[0], spec.offsets[1]);
            let e1 = ProductKraus::new(vec![
                diag_op(p, &tables[0].values),
                diag_op(q, &tables[1].values),
                diag_op(r, &tables[2].values),
            ])?;
            let e2 = ProductKraus::new(vec![
                shift_op(p, &tables[3].values, |i| k1 + i)?,
                shift_op(q, &tables[4].values, |i| (k1 + k2 + i) % q)?,
                shift_op(r, &tables[5].values, |i| (d + i) % r)?,
            ])?;
            vec![e1, e2]
        }
        Family::Thm2III => {
            let (c1, c2) = locc_pair(d)?;
            let id = ComplexMatrix::identity(d);
            vec![
                ProductKraus::new(vec![id.clone(), id.clone(), c1])?,
                ProductKraus::new(vec![id.clone(), id, c2])?,
            ]
        }
        Family::BellMix | Family::ThreeQubit => {
            return Err(Error::InvalidScenario(format!(
                "family {} has no printed instrument",
                family.code()
            )))
        }
    };
    Instrument::new(dims, kraus)
}

/// Builds the family's LOCC protocol program.
///
/// The one-round families wrap their instrument on the measured party with
/// no correction; the three-qubit program measures the third party in the
/// `|+>/|->` basis and applies a `sigma_z` correction on the second party
/// after the `-` outcome, then traces the third party out.
pub fn make_protocol(family: Family, spec: &DimsSpec, policy: &Policy) -> Result<ProtocolProgram> {
    validate_family_spec(family, spec)?;
    let d = spec.d;
    match family {
        Family::Thm1Locc | Family::Ex2x4 => {
            let (b1, b2) = locc_pair(d)?;
            let (psi1, _) = crate::states::make_state_pair(family, spec, policy)?;
            ProtocolProgram::new(
                spec.dims.clone(),
                ProtocolNode::Round {
                    party: 1,
                    operators: vec![b1, b2],
                    arms: vec![ProtocolNode::Leaf, ProtocolNode::Leaf],
                },
                vec![],
                psi1,
                policy,
            )
        }
        Family::Thm2III => {
            let (c1, c2) = locc_pair(d)?;
            let (psi1, _) = crate::states::make_state_pair(family, spec, policy)?;
            ProtocolProgram::new(
                spec.dims.clone(),
                ProtocolNode::Round {
                    party: 2,
                    operators: vec![c1, c2],
                    arms: vec![ProtocolNode::Leaf, ProtocolNode::Leaf],
                },
                vec![],
                psi1,
                policy,
            )
        }
        Family::ThreeQubit => {
            let h = C64::new(0.5, 0.0);
            let plus = ComplexMatrix::from_fn(2, 2, |_, _| h);
            let minus = ComplexMatrix::from_fn(2, 2, |i, j| if i == j { h } else { -h });
            let sigma_z = ComplexMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
            ProtocolProgram::new(
                spec.dims.clone(),
                ProtocolNode::Round {
                    party: 2,
                    operators: vec![plus, minus],
                    arms: vec![
                        ProtocolNode::Leaf,
                        ProtocolNode::Round {
                            party: 1,
                            operators: vec![sigma_z],
                            arms: vec![ProtocolNode::Leaf],
                        },
                    ],
                },
                vec![2],
                ghz(2, 2, policy)?,
                policy,
            )
        }
        _ => Err(Error::InvalidScenario(format!(
            "family {} has no LOCC protocol",
            family.code()
        ))),
    }
}
