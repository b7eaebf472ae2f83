//! Derivative-free search for separable instruments that convert a state
//! pair into a target deterministically.
//!
//! Candidates are parameterized by the real and imaginary entries of their
//! per-party operators, so every point of the search space is separable by
//! construction.  A penalty residual combines trace preservation with
//! outcome alignment; restarts of a simplex descent minimize it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{
    completeness_report, distillation_report, CompletenessVerdict, DistillationVerdict,
};
use crate::instruments::{Instrument, ProductKraus};
use crate::numlin::{vec_inner, C64, ComplexMatrix};
use crate::states::{DensityMatrix, PureState};
use crate::{Error, Policy, Result};

/// Penalty weights for the two residual groups.
#[derive(Debug, Clone, Copy)]
pub struct Weights {
    /// Multiplies the trace-preservation defect.
    pub completeness: f64,
    /// Multiplies the outcome-alignment and probability-deficit terms.
    pub determinism: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            completeness: 1.0,
            determinism: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Number of product Kraus operators in a candidate.
    pub num_kraus: usize,
    pub restarts: usize,
    /// Simplex iteration cap per restart.
    pub max_iters: usize,
    pub seed: u64,
    pub weights: Weights,
    /// Residual level below which a candidate is checked for feasibility.
    pub tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            num_kraus: 2,
            restarts: 8,
            max_iters: 20000,
            seed: 0,
            weights: Weights::default(),
            tol: 1e-12,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_kraus == 0 {
            return Err(Error::Config("search needs at least one Kraus operator".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("search needs at least one restart".into()));
        }
        if self.weights.completeness <= 0.0 || self.weights.determinism <= 0.0 {
            return Err(Error::Config("penalty weights must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchVerdict {
    Feasible,
    Inconclusive,
}

impl SearchVerdict {
    pub fn code(self) -> &'static str {
        match self {
            SearchVerdict::Feasible => "FEASIBLE",
            SearchVerdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best_residual: f64,
    pub best_candidate: Instrument,
    /// Per restart, the incumbent-best residual at each improvement.
    pub residual_traces: Vec<Vec<f64>>,
    /// FEASIBLE only after the candidate re-verifies as a complete
    /// instrument that converts deterministically.
    pub verdict: SearchVerdict,
}

/// Penalty residual of a candidate instrument for converting `psi1` and
/// `psi2` into `target`.
///
/// Zero exactly when the candidate is trace preserving and every operator
/// maps both states onto the target ray with total probability one.
pub fn residual(
    candidate: &Instrument,
    psi1: &PureState,
    psi2: &PureState,
    target: &PureState,
    weights: Weights,
    policy: &Policy,
) -> Result<f64> {
    if psi1.dims() != psi2.dims()
        || psi1.dims() != target.dims()
        || candidate.dims() != psi1.dims()
    {
        return Err(Error::DimMismatch(format!(
            "residual needs matching dims, got instrument {:?}, states {:?}/{:?}, target {:?}",
            candidate.dims(),
            psi1.dims(),
            psi2.dims(),
            target.dims()
        )));
    }
    Ok(residual_value(candidate, psi1, psi2, target, weights, policy))
}

fn residual_value(
    candidate: &Instrument,
    psi1: &PureState,
    psi2: &PureState,
    target: &PureState,
    weights: Weights,
    policy: &Policy,
) -> f64 {
    let total = candidate.total_dim();
    let mut gram = ComplexMatrix::zeros(total, total);
    let mut alignment = 0.0f64;
    let mut weight1 = 0.0f64;
    let mut weight2 = 0.0f64;
    for kraus in candidate.kraus() {
        let full = match kraus.full(policy) {
            Ok(f) => f,
            Err(_) => return f64::INFINITY,
        };
        gram = gram.add(&full.adjoint().mul(&full));
        for (psi, weight_sum) in [(psi1, &mut weight1), (psi2, &mut weight2)] {
            let image = full.matvec(psi.amplitudes());
            let coeff = vec_inner(target.amplitudes(), &image);
            // Residual against the best multiple of the target, summed
            // directly so floating point cannot push it negative.
            let misfit: f64 = image
                .iter()
                .zip(target.amplitudes().iter())
                .map(|(a, t)| (a - coeff * t).norm_sqr())
                .sum();
            alignment += misfit;
            *weight_sum += coeff.norm_sqr();
        }
    }
    let deficiency = ComplexMatrix::identity(total).sub(&gram);
    let complete_term = deficiency.fro_norm().powi(2);
    let deficit = (1.0 - weight1).powi(2) + (1.0 - weight2).powi(2);
    let value =
        weights.completeness * complete_term + weights.determinism * (alignment + deficit);
    if value.is_finite() {
        value
    } else {
        f64::INFINITY
    }
}

fn pack(candidate: &Instrument) -> Vec<f64> {
    let mut params = Vec::new();
    for kraus in candidate.kraus() {
        for local in kraus.locals() {
            for z in local.entries() {
                params.push(z.re);
                params.push(z.im);
            }
        }
    }
    params
}

fn unpack(params: &[f64], dims: &[usize], num_kraus: usize) -> Instrument {
    let mut cursor = 0;
    let mut kraus = Vec::with_capacity(num_kraus);
    for _ in 0..num_kraus {
        let mut locals = Vec::with_capacity(dims.len());
        for &dim in dims {
            let mut local = ComplexMatrix::zeros(dim, dim);
            for r in 0..dim {
                for c in 0..dim {
                    local.set(r, c, C64::new(params[cursor], params[cursor + 1]));
                    cursor += 2;
                }
            }
            locals.push(local);
        }
        kraus.push(ProductKraus::new(locals).expect("square finite locals"));
    }
    Instrument::new(dims.to_vec(), kraus).expect("consistent dims")
}

fn param_count(dims: &[usize], num_kraus: usize) -> usize {
    2 * num_kraus * dims.iter().map(|d| d * d).sum::<usize>()
}

/// Deterministic Nelder-Mead descent.  Returns the best vertex, its value,
/// and the incumbent trace (recorded at each improvement).
fn nelder_mead(
    f: &mut impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    max_iters: usize,
    stop_below: f64,
) -> (Vec<f64>, f64, Vec<f64>) {
    let n = x0.len();
    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    vertices.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        if v[i] != 0.0 {
            v[i] *= 1.05;
        } else {
            v[i] = 0.00025;
        }
        vertices.push(v);
    }
    let mut values: Vec<f64> = vertices.iter().map(|v| f(v)).collect();

    let mut trace = Vec::new();
    let mut incumbent = f64::INFINITY;
    let mut note_best = |best: f64, trace: &mut Vec<f64>| {
        if best < incumbent {
            incumbent = best;
            trace.push(best);
        }
    };

    let mut order: Vec<usize> = (0..=n).collect();
    for _iter in 0..max_iters {
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];
        note_best(values[best], &mut trace);
        if values[best] <= stop_below {
            break;
        }
        let spread = values[worst] - values[best];
        if spread <= 1e-16 * values[best].abs().max(1e-30) {
            break;
        }

        let mut centroid = vec![0.0f64; n];
        for &idx in order.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(vertices[idx].iter()) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }

        let blend = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
            from.iter()
                .zip(to.iter())
                .map(|(a, b)| a + t * (b - a))
                .collect()
        };
        // Reflection coefficient 1, expansion 2, contraction 1/2.
        let reflected = blend(&centroid, &vertices[worst], -1.0);
        let fr = f(&reflected);
        if fr < values[best] {
            let expanded = blend(&centroid, &vertices[worst], -2.0);
            let fe = f(&expanded);
            if fe < fr {
                vertices[worst] = expanded;
                values[worst] = fe;
            } else {
                vertices[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            vertices[worst] = reflected;
            values[worst] = fr;
        } else {
            let (contracted, fc) = if fr < values[worst] {
                let outside = blend(&centroid, &reflected, 0.5);
                let v = f(&outside);
                (outside, v)
            } else {
                let inside = blend(&centroid, &vertices[worst], 0.5);
                let v = f(&inside);
                (inside, v)
            };
            if fc < values[worst].min(fr) {
                vertices[worst] = contracted;
                values[worst] = fc;
            } else {
                // Shrink toward the best vertex, coefficient 1/2.
                let anchor = vertices[best].clone();
                for idx in 0..=n {
                    if idx == best {
                        continue;
                    }
                    vertices[idx] = blend(&anchor, &vertices[idx], 0.5);
                    values[idx] = f(&vertices[idx]);
                }
            }
        }
    }
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let best = order[0];
    note_best(values[best], &mut trace);
    (vertices[best].clone(), values[best], trace)
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    seed.wrapping_add((restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Searches for a separable instrument converting both states into
/// `target`, restarting the descent from seeded random parameter vectors.
/// The warm start, when given, seeds restart 0.
pub fn sep_feasibility_search(
    psi1: &PureState,
    psi2: &PureState,
    target: &PureState,
    cfg: &SearchConfig,
    warm_start: Option<&Instrument>,
    policy: &Policy,
) -> Result<SearchResult> {
    cfg.validate()?;
    if psi1.dims() != psi2.dims() || psi1.dims() != target.dims() {
        return Err(Error::DimMismatch(format!(
            "search states have dims {:?}/{:?}, target {:?}",
            psi1.dims(),
            psi2.dims(),
            target.dims()
        )));
    }
    let dims = psi1.dims().to_vec();
    if let Some(warm) = warm_start {
        if warm.dims() != dims {
            return Err(Error::DimMismatch(format!(
                "warm start dims {:?} do not match scenario dims {:?}",
                warm.dims(),
                dims
            )));
        }
        if warm.kraus().len() != cfg.num_kraus {
            return Err(Error::Config(format!(
                "warm start has {} operators but the search is configured for {}",
                warm.kraus().len(),
                cfg.num_kraus
            )));
        }
    }

    let n = param_count(&dims, cfg.num_kraus);
    let mut objective = |params: &[f64]| -> f64 {
        let candidate = unpack(params, &dims, cfg.num_kraus);
        residual_value(&candidate, psi1, psi2, target, cfg.weights, policy)
    };
    let stop_below = cfg.tol * 1e-8;

    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut traces = Vec::with_capacity(cfg.restarts);
    for restart in 0..cfg.restarts {
        let x0 = match (restart, warm_start) {
            (0, Some(warm)) => pack(warm),
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(cfg.seed, restart));
                (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect()
            }
        };
        let (params, value, trace) = nelder_mead(&mut objective, &x0, cfg.max_iters, stop_below);
        traces.push(trace);
        let improves = match &best {
            None => true,
            Some((incumbent, _, _)) => value < *incumbent,
        };
        if improves {
            best = Some((value, restart, params));
        }
    }
    let (best_residual, _, best_params) = best.expect("restarts >= 1");
    let best_candidate = unpack(&best_params, &dims, cfg.num_kraus);

    let verdict = if best_residual <= cfg.tol
        && reverifies(&best_candidate, psi1, psi2, target, policy)?
    {
        SearchVerdict::Feasible
    } else {
        SearchVerdict::Inconclusive
    };
    Ok(SearchResult {
        best_residual,
        best_candidate,
        residual_traces: traces,
        verdict,
    })
}

/// Independent feasibility check through the channel module: the candidate
/// must be COMPLETE and convert the even mixture DETERMINISTICALLY.
fn reverifies(
    candidate: &Instrument,
    psi1: &PureState,
    psi2: &PureState,
    target: &PureState,
    policy: &Policy,
) -> Result<bool> {
    let completeness = completeness_report(candidate, policy)?;
    if completeness.verdict != CompletenessVerdict::Complete {
        return Ok(false);
    }
    let half = C64::new(0.5, 0.0);
    let mixed = psi1.projector().scale(half).add(&psi2.projector().scale(half));
    let rho = DensityMatrix::new(mixed, psi1.dims().to_vec(), policy)?;
    let report = distillation_report(&rho, candidate, target, policy)?;
    Ok(report.verdict == DistillationVerdict::Deterministic)
}
