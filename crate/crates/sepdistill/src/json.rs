//! Deterministic JSON construction and rendering.
//!
//! Reports must be byte-identical across runs, so this module renders JSON
//! itself: insertion-ordered objects, floats at 17 significant digits
//! (round-trip exact for doubles), and scalar-only arrays inlined on one
//! line to keep amplitude lists readable.

use crate::analysis::{BoundCheck, PencilResult, SchmidtData};
use crate::channel::{CompletenessReport, DistillationReport, OutcomeRecord};
use crate::instruments::{CoefficientTable, Instrument};
use crate::locc::{BranchLeaf, ProtocolNode, ProtocolProgram, SurvivalReport};
use crate::numlin::{C64, ComplexMatrix};
use crate::search::{SearchConfig, SearchResult};
use crate::states::{DensityMatrix, PureState};
use crate::Policy;

#[derive(Debug, Clone, PartialEq)]
pub enum JsonValue {
    Null,
    Bool(bool),
    Int(i64),
    Uint(u64),
    Float(f64),
    Str(String),
    Array(Vec<JsonValue>),
    Object(Vec<(String, JsonValue)>),
}

impl JsonValue {
    pub fn object() -> Self {
        JsonValue::Object(Vec::new())
    }

    /// Appends a key to an object; panics on non-objects, which is a
    /// programming error in report assembly.
    pub fn push(&mut self, key: &str, value: JsonValue) {
        match self {
            JsonValue::Object(entries) => entries.push((key.to_string(), value)),
            _ => panic!("push on a non-object JSON value"),
        }
    }

    pub fn str(text: &str) -> Self {
        JsonValue::Str(text.to_string())
    }

    pub fn usize(n: usize) -> Self {
        JsonValue::Uint(n as u64)
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, JsonValue::Array(_) | JsonValue::Object(_))
    }
}

/// Formats a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // Reports never contain non-finite values; guard for JSON validity.
        "null".to_string()
    }
}

fn escape_into(out: &mut String, text: &str) {
    out.push('"');
    for ch in text.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_value(out: &mut String, value: &JsonValue, indent: usize) {
    const STEP: &str = "  ";
    match value {
        JsonValue::Null => out.push_str("null"),
        JsonValue::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        JsonValue::Int(i) => out.push_str(&i.to_string()),
        JsonValue::Uint(u) => out.push_str(&u.to_string()),
        JsonValue::Float(x) => out.push_str(&format_float(*x)),
        JsonValue::Str(s) => escape_into(out, s),
        JsonValue::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
            } else if items.iter().all(JsonValue::is_scalar) {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, item, indent);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    for _ in 0..=indent {
                        out.push_str(STEP);
                    }
                    write_value(out, item, indent + 1);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                for _ in 0..indent {
                    out.push_str(STEP);
                }
                out.push(']');
            }
        }
        JsonValue::Object(entries) => {
            if entries.is_empty() {
                out.push_str("{}");
            } else {
                out.push_str("{\n");
                for (i, (key, item)) in entries.iter().enumerate() {
                    for _ in 0..=indent {
                        out.push_str(STEP);
                    }
                    escape_into(out, key);
                    out.push_str(": ");
                    write_value(out, item, indent + 1);
                    if i + 1 < entries.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                for _ in 0..indent {
                    out.push_str(STEP);
                }
                out.push('}');
            }
        }
    }
}

/// Renders a value as a pretty-printed document with a trailing newline.
pub fn render(value: &JsonValue) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

pub fn complex_json(z: C64) -> JsonValue {
    JsonValue::Array(vec![JsonValue::Float(z.re), JsonValue::Float(z.im)])
}

pub fn dims_json(dims: &[usize]) -> JsonValue {
    JsonValue::Array(dims.iter().map(|&d| JsonValue::usize(d)).collect())
}

pub fn matrix_json(m: &ComplexMatrix) -> JsonValue {
    JsonValue::Array(
        (0..m.rows())
            .map(|i| {
                JsonValue::Array((0..m.cols()).map(|j| complex_json(m.at(i, j))).collect())
            })
            .collect(),
    )
}

pub fn state_json(psi: &PureState) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("dims", dims_json(psi.dims()));
    obj.push(
        "amplitudes",
        JsonValue::Array(psi.amplitudes().iter().map(|&z| complex_json(z)).collect()),
    );
    obj
}

pub fn density_json(rho: &DensityMatrix) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("dims", dims_json(rho.dims()));
    obj.push("matrix", matrix_json(rho.matrix()));
    obj
}

pub fn instrument_json(inst: &Instrument) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("dims", dims_json(inst.dims()));
    obj.push(
        "kraus",
        JsonValue::Array(
            inst.kraus()
                .iter()
                .map(|k| JsonValue::Array(k.locals().iter().map(matrix_json).collect()))
                .collect(),
        ),
    );
    obj
}

pub fn coefficient_tables_json(tables: &[CoefficientTable]) -> JsonValue {
    JsonValue::Array(
        tables
            .iter()
            .map(|t| {
                let mut obj = JsonValue::object();
                obj.push("name", JsonValue::str(t.name));
                obj.push(
                    "values",
                    JsonValue::Array(t.values.iter().map(|&x| JsonValue::Float(x)).collect()),
                );
                obj
            })
            .collect(),
    )
}

fn node_json(node: &ProtocolNode) -> JsonValue {
    match node {
        ProtocolNode::Leaf => JsonValue::str("leaf"),
        ProtocolNode::Round {
            party,
            operators,
            arms,
        } => {
            let mut obj = JsonValue::object();
            obj.push("party", JsonValue::usize(*party));
            obj.push(
                "operators",
                JsonValue::Array(operators.iter().map(matrix_json).collect()),
            );
            obj.push("arms", JsonValue::Array(arms.iter().map(node_json).collect()));
            obj
        }
    }
}

pub fn protocol_json(prog: &ProtocolProgram) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("dims", dims_json(prog.dims()));
    obj.push("tree", node_json(prog.root()));
    obj.push("trace_out", dims_json(prog.trace_out()));
    obj.push("target", state_json(prog.target()));
    obj
}

pub fn policy_json(policy: &Policy) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("kernel_tol", JsonValue::Float(policy.kernel_tol));
    obj.push("state_tol", JsonValue::Float(policy.state_tol));
    obj.push("prob_floor", JsonValue::Float(policy.prob_floor));
    obj.push("max_dim", JsonValue::usize(policy.max_dim));
    obj
}

pub fn completeness_json(report: &CompletenessReport) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("verdict", JsonValue::str(report.verdict.code()));
    obj.push(
        "deficiency_spectrum",
        JsonValue::Array(
            report
                .deficiency_spectrum
                .iter()
                .map(|&x| JsonValue::Float(x))
                .collect(),
        ),
    );
    obj.push("max_overshoot", JsonValue::Float(report.max_overshoot));
    obj
}

fn outcome_json(record: &OutcomeRecord, include_states: bool) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("outcome", JsonValue::usize(record.outcome));
    obj.push("probability", JsonValue::Float(record.probability));
    if include_states {
        obj.push(
            "post_state",
            record
                .post_state
                .as_ref()
                .map_or(JsonValue::Null, density_json),
        );
    } else {
        obj.push(
            "post_state_present",
            JsonValue::Bool(record.post_state.is_some()),
        );
    }
    obj
}

/// Serializes a distillation report; post-states are included only when
/// `include_states` (they dominate the output size).
pub fn distillation_json(report: &DistillationReport, include_states: bool) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("verdict", JsonValue::str(report.verdict.code()));
    obj.push("transferred", JsonValue::Float(report.transferred));
    obj.push(
        "outcomes",
        JsonValue::Array(
            report
                .outcomes
                .iter()
                .map(|r| outcome_json(r, include_states))
                .collect(),
        ),
    );
    obj.push(
        "fidelities",
        JsonValue::Array(
            report
                .fidelities
                .iter()
                .map(|f| f.map_or(JsonValue::Null, JsonValue::Float))
                .collect(),
        ),
    );
    obj.push(
        "schmidt_ranks",
        JsonValue::Array(
            report
                .schmidt_ranks
                .iter()
                .map(|ranks| match ranks {
                    Some(rs) => {
                        JsonValue::Array(rs.iter().map(|&r| JsonValue::usize(r)).collect())
                    }
                    None => JsonValue::Null,
                })
                .collect(),
        ),
    );
    obj
}

pub fn schmidt_json(data: &SchmidtData) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("cut_left", dims_json(data.cut.left()));
    obj.push(
        "coefficients",
        JsonValue::Array(data.coefficients.iter().map(|&x| JsonValue::Float(x)).collect()),
    );
    obj.push("rank", JsonValue::usize(data.rank));
    obj
}

pub fn pencil_json(result: &PencilResult) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("min_rank", JsonValue::usize(result.min_rank));
    let mut witness = JsonValue::object();
    witness.push("x", complex_json(result.witness.0));
    witness.push("y", complex_json(result.witness.1));
    obj.push("witness", witness);
    obj.push("samples", JsonValue::usize(result.samples));
    obj
}

pub fn bound_json(check: &BoundCheck) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("kind", JsonValue::str(check.kind.code()));
    obj.push("d", JsonValue::usize(check.d));
    obj.push("dims", dims_json(&check.dims));
    obj.push("aggregate_ok", JsonValue::Bool(check.aggregate_ok));
    obj.push("per_party_ok", JsonValue::Bool(check.per_party_ok));
    obj.push("satisfied", JsonValue::Bool(check.satisfied));
    obj
}

pub fn leaves_json(leaves: &[BranchLeaf], include_states: bool) -> JsonValue {
    JsonValue::Array(
        leaves
            .iter()
            .map(|leaf| {
                let mut obj = JsonValue::object();
                obj.push("label", dims_json(&leaf.label));
                obj.push("probability", JsonValue::Float(leaf.probability));
                if include_states {
                    obj.push(
                        "state",
                        leaf.state.as_ref().map_or(JsonValue::Null, density_json),
                    );
                } else {
                    obj.push("state_present", JsonValue::Bool(leaf.state.is_some()));
                }
                obj
            })
            .collect(),
    )
}

pub fn survival_json(report: &SurvivalReport) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("verdict", JsonValue::str(report.verdict.code()));
    obj.push("min_local_rank", JsonValue::usize(report.min_local_rank));
    obj.push("required_rank", JsonValue::usize(report.required_rank));
    obj.push(
        "branches",
        JsonValue::Array(
            report
                .branches
                .iter()
                .map(|b| {
                    let mut obj = JsonValue::object();
                    obj.push("label", dims_json(&b.label));
                    obj.push("psi1_survives", JsonValue::Bool(b.psi1_survives));
                    obj.push("psi2_survives", JsonValue::Bool(b.psi2_survives));
                    obj
                })
                .collect(),
        ),
    );
    obj
}

pub fn search_config_json(cfg: &SearchConfig) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("num_kraus", JsonValue::usize(cfg.num_kraus));
    obj.push("restarts", JsonValue::usize(cfg.restarts));
    obj.push("max_iters", JsonValue::usize(cfg.max_iters));
    obj.push("seed", JsonValue::Uint(cfg.seed));
    obj.push("lambda_complete", JsonValue::Float(cfg.weights.completeness));
    obj.push("lambda_determinism", JsonValue::Float(cfg.weights.determinism));
    obj.push("tol", JsonValue::Float(cfg.tol));
    obj
}

pub fn search_json(result: &SearchResult) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("verdict", JsonValue::str(result.verdict.code()));
    obj.push("best_residual", JsonValue::Float(result.best_residual));
    obj.push("best_candidate", instrument_json(&result.best_candidate));
    obj.push(
        "residual_traces",
        JsonValue::Array(
            result
                .residual_traces
                .iter()
                .map(|t| JsonValue::Array(t.iter().map(|&x| JsonValue::Float(x)).collect()))
                .collect(),
        ),
    );
    obj
}
