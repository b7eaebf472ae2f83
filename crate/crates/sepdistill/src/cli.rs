//! Command-line front end.
//!
//! Every command writes a single JSON document (or CSV for `sweep
//! --format csv`) to standard output with the fixed top-level shape
//! `{command, scenario, report, numeric_policy, seed}`.  Exit codes: 0 when
//! everything ran and held, 1 when a verification verdict failed, 2 for
//! bad arguments.  Flags are long-form only; a JSON file passed via
//! `--config` supplies defaults that explicit flags override.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{bound_check, pencil_min_rank, schmidt, BoundKind, Cut};
use crate::channel::{
    completeness_report, distillation_report, distillation_report_for_protocol,
    CompletenessVerdict, DistillationVerdict,
};
use crate::instruments::{
    coefficient_tables, make_instrument, make_protocol, Instrument, ProductKraus,
};
use crate::json::{
    bound_json, coefficient_tables_json, completeness_json, density_json, dims_json,
    distillation_json, format_float, instrument_json, leaves_json, pencil_json, policy_json,
    protocol_json, render, schmidt_json, search_config_json, search_json, state_json,
    survival_json, JsonValue,
};
use crate::locc::{branch_survival_check, simulate_protocol};
use crate::numlin::ComplexMatrix;
use crate::search::{sep_feasibility_search, SearchConfig, Weights};
use crate::states::{make_state_pair, mix_pair, DimsSpec, Family, PureState};
use crate::Policy;

#[derive(Parser)]
#[command(
    name = "sepdistill",
    version,
    about = "Constructs single-copy distillation scenarios and verifies them numerically",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the scenario's states, mixture, and operator catalogue.
    Construct(ConstructArgs),
    /// Apply the scenario instrument; report completeness and conversion.
    Verify(VerifyArgs),
    /// Simulate the scenario's LOCC protocol and check branch survival.
    Protocol(ProtocolArgs),
    /// Sample the state-pair pencil for Schmidt rank drops across a cut.
    Pencil(PencilArgs),
    /// Evaluate a dimension-threshold query.
    Bounds(BoundsArgs),
    /// Search for a separable instrument completing the conversion.
    Search(SearchArgs),
    /// Verify a grid of scenarios; one row per (family, split, weight).
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Scenario family: thm1-sep, thm1-locc, ex-2x4, bell-mix, thm2-i,
    /// thm2-ii, thm2-iii, or three-qubit.
    #[arg(long)]
    family: Option<String>,
    /// Entanglement level of the target.
    #[arg(long)]
    d: Option<usize>,
    /// First dimension offset (meaning depends on the family).
    #[arg(long)]
    k1: Option<usize>,
    /// Second dimension offset.
    #[arg(long)]
    k2: Option<usize>,
    /// Third dimension offset (tripartite families).
    #[arg(long)]
    k3: Option<usize>,
    /// Mixing weight of the first eigenstate, strictly between 0 and 1.
    #[arg(long)]
    w: Option<f64>,
    /// Conversion target: psi1 (default) or psi2.
    #[arg(long)]
    target: Option<String>,
    /// Seed for any randomized sampling in the command.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON object of flag defaults; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Tolerance for iterative kernels, ranks, and verdicts.
    #[arg(long)]
    kernel_tol: Option<f64>,
    /// Tolerance for directly summed state invariants.
    #[arg(long)]
    state_tol: Option<f64>,
    /// Probability below which outcomes are reported without post-states.
    #[arg(long)]
    prob_floor: Option<f64>,
    /// Cap on composite dimension.
    #[arg(long)]
    max_dim: Option<usize>,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Include full post-state matrices in the report.
    #[arg(long)]
    include_states: bool,
}

#[derive(Args)]
struct ProtocolArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Rank premise for the branch-survival check; defaults to d.
    #[arg(long)]
    level: Option<usize>,
    /// Include full leaf-state matrices in the report.
    #[arg(long)]
    include_states: bool,
}

#[derive(Args)]
struct PencilArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Left block of the cut as comma-separated party indices.
    #[arg(long)]
    cut: Option<String>,
    /// Total number of pencil coefficient pairs to evaluate.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Bound kind: bipartite-sep, bipartite-locc, tripartite-sep,
    /// tripartite-locc, or npartite-sep.
    #[arg(long)]
    kind: Option<String>,
    /// Local dimensions as a comma-separated list.
    #[arg(long)]
    dims: Option<String>,
    /// Entanglement level of the target.
    #[arg(long)]
    d: Option<usize>,
    /// JSON object of flag defaults; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of product Kraus operators in a candidate.
    #[arg(long)]
    t: Option<usize>,
    /// Number of descent restarts.
    #[arg(long)]
    restarts: Option<usize>,
    /// Simplex iteration cap per restart.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Residual level below which feasibility is re-verified.
    #[arg(long)]
    tol: Option<f64>,
    /// Weight of the trace-preservation penalty.
    #[arg(long)]
    lambda_complete: Option<f64>,
    /// Weight of the alignment and deficit penalties.
    #[arg(long)]
    lambda_determinism: Option<f64>,
    /// Seed restart 0 with the family's own instrument (zero-padded to t).
    #[arg(long)]
    warm_start: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Restrict the sweep to one family.
    #[arg(long)]
    family: Option<String>,
    /// Largest d in the grid.
    #[arg(long)]
    d_max: Option<usize>,
    /// Output format: json (default) or csv.
    #[arg(long)]
    format: Option<String>,
    /// JSON object of flag defaults; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kernel_tol: Option<f64>,
    #[arg(long)]
    state_tol: Option<f64>,
    #[arg(long)]
    prob_floor: Option<f64>,
    #[arg(long)]
    max_dim: Option<usize>,
}

/// Errors split by exit code: bad arguments (2) versus failures while
/// running (1).
enum CliError {
    Usage(String),
    Run(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<crate::Error> for CliError {
    fn from(err: crate::Error) -> Self {
        CliError::Run(err.to_string())
    }
}

struct Outcome {
    stdout: String,
    failed: bool,
}

/// Parses argv, executes, prints, and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if outcome.failed {
                1
            } else {
                0
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn execute(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Construct(args) => construct_cmd(args),
        Command::Verify(args) => verify_cmd(args),
        Command::Protocol(args) => protocol_cmd(args),
        Command::Pencil(args) => pencil_cmd(args),
        Command::Bounds(args) => bounds_cmd(args),
        Command::Search(args) => search_cmd(args),
        Command::Sweep(args) => sweep_cmd(args),
    }
}

/// A parsed `--config` JSON object; keys are removed as they are consumed
/// so leftovers can be reported as unknown.
struct ConfigMap(serde_json::Map<String, serde_json::Value>);

impl ConfigMap {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigMap(serde_json::Map::new()));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| usage(format!("config {} is not valid JSON: {e}", path.display())))?;
        match value {
            serde_json::Value::Object(map) => Ok(ConfigMap(map)),
            _ => Err(usage(format!(
                "config {} must be a JSON object of flag defaults",
                path.display()
            ))),
        }
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>, CliError> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(serde_json::Value::Number(n)) => n
                .as_u64()
                .map(|v| Some(v as usize))
                .ok_or_else(|| usage(format!("config key '{key}' must be a nonnegative integer"))),
            Some(_) => Err(usage(format!("config key '{key}' must be a number"))),
        }
    }

    fn take_u64(&mut self, key: &str) -> Result<Option<u64>, CliError> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(serde_json::Value::Number(n)) => n
                .as_u64()
                .map(Some)
                .ok_or_else(|| usage(format!("config key '{key}' must be a nonnegative integer"))),
            Some(_) => Err(usage(format!("config key '{key}' must be a number"))),
        }
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(serde_json::Value::Number(n)) => Ok(n.as_f64()),
            Some(_) => Err(usage(format!("config key '{key}' must be a number"))),
        }
    }

    fn take_str(&mut self, key: &str) -> Result<Option<String>, CliError> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(serde_json::Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(usage(format!("config key '{key}' must be a string"))),
        }
    }

    fn take_bool(&mut self, key: &str) -> Result<Option<bool>, CliError> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(serde_json::Value::Bool(b)) => Ok(Some(b)),
            Some(_) => Err(usage(format!("config key '{key}' must be a boolean"))),
        }
    }

    fn finish(self) -> Result<(), CliError> {
        if self.0.is_empty() {
            Ok(())
        } else {
            let mut keys: Vec<&String> = self.0.keys().collect();
            keys.sort();
            Err(usage(format!(
                "unknown config keys: {}",
                keys.iter()
                    .map(|k| k.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            )))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum TargetSel {
    Psi1,
    Psi2,
}

impl TargetSel {
    fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "psi1" => Ok(TargetSel::Psi1),
            "psi2" => Ok(TargetSel::Psi2),
            other => Err(usage(format!("unknown target '{other}'; use psi1 or psi2"))),
        }
    }

    fn code(self) -> &'static str {
        match self {
            TargetSel::Psi1 => "psi1",
            TargetSel::Psi2 => "psi2",
        }
    }
}

/// Fully resolved family scenario shared by most commands.
struct Scenario {
    family: Family,
    spec: DimsSpec,
    w: f64,
    target: TargetSel,
    seed: u64,
    policy: Policy,
}

impl Scenario {
    fn json(&self) -> JsonValue {
        let mut obj = JsonValue::object();
        obj.push("family", JsonValue::str(self.family.code()));
        obj.push("d", JsonValue::usize(self.spec.d));
        obj.push("offsets", dims_json(&self.spec.offsets));
        obj.push("dims", dims_json(&self.spec.dims));
        obj.push("w", JsonValue::Float(self.w));
        obj.push("target", JsonValue::str(self.target.code()));
        obj
    }

    fn states(&self) -> Result<(PureState, PureState), CliError> {
        make_state_pair(self.family, &self.spec, &self.policy).map_err(scenario_err)
    }

    fn target_state<'a>(&self, psi1: &'a PureState, psi2: &'a PureState) -> &'a PureState {
        match self.target {
            TargetSel::Psi1 => psi1,
            TargetSel::Psi2 => psi2,
        }
    }
}

/// Errors while building the scenario itself are argument problems.
fn scenario_err(err: crate::Error) -> CliError {
    usage(err.to_string())
}

fn resolve_policy_fields(
    cfg: &mut ConfigMap,
    kernel_tol: Option<f64>,
    state_tol: Option<f64>,
    prob_floor: Option<f64>,
    max_dim: Option<usize>,
) -> Result<Policy, CliError> {
    let mut policy = Policy::default();
    if let Some(v) = kernel_tol.or(cfg.take_f64("kernel-tol")?) {
        policy.kernel_tol = v;
    }
    if let Some(v) = state_tol.or(cfg.take_f64("state-tol")?) {
        policy.state_tol = v;
    }
    if let Some(v) = prob_floor.or(cfg.take_f64("prob-floor")?) {
        policy.prob_floor = v;
    }
    if let Some(v) = max_dim.or(cfg.take_usize("max-dim")?) {
        policy.max_dim = v;
    }
    if !(policy.kernel_tol > 0.0) || !(policy.state_tol > 0.0) || !(policy.prob_floor > 0.0) {
        return Err(usage("numeric tolerances must be positive"));
    }
    if policy.max_dim == 0 {
        return Err(usage("--max-dim must be positive"));
    }
    Ok(policy)
}

fn resolve_scenario(common: &CommonArgs) -> Result<(Scenario, ConfigMap), CliError> {
    let mut cfg = ConfigMap::load(common.config.as_deref())?;
    let family_code = common
        .family
        .clone()
        .or(cfg.take_str("family")?)
        .ok_or_else(|| usage("--family is required"))?;
    let family = Family::parse(&family_code).map_err(scenario_err)?;
    let d = common
        .d
        .or(cfg.take_usize("d")?)
        .ok_or_else(|| usage("--d is required"))?;
    let k1 = match common.k1 {
        Some(v) => Some(v),
        None => cfg.take_usize("k1")?,
    };
    let k2 = match common.k2 {
        Some(v) => Some(v),
        None => cfg.take_usize("k2")?,
    };
    let k3 = match common.k3 {
        Some(v) => Some(v),
        None => cfg.take_usize("k3")?,
    };
    let spec = family.resolve_spec(d, k1, k2, k3).map_err(scenario_err)?;
    let w = common.w.or(cfg.take_f64("w")?).unwrap_or(0.5);
    let target = match common.target.clone().or(cfg.take_str("target")?) {
        Some(text) => TargetSel::parse(&text)?,
        None => TargetSel::Psi1,
    };
    let seed = common.seed.or(cfg.take_u64("seed")?).unwrap_or(0);
    let policy = resolve_policy_fields(
        &mut cfg,
        common.kernel_tol,
        common.state_tol,
        common.prob_floor,
        common.max_dim,
    )?;
    Ok((
        Scenario {
            family,
            spec,
            w,
            target,
            seed,
            policy,
        },
        cfg,
    ))
}

fn envelope(command: &str, scenario: JsonValue, report: JsonValue, policy: &Policy, seed: u64) -> String {
    let mut root = JsonValue::object();
    root.push("command", JsonValue::str(command));
    root.push("scenario", scenario);
    root.push("report", report);
    root.push("numeric_policy", policy_json(policy));
    root.push("seed", JsonValue::Uint(seed));
    render(&root)
}

fn construct_cmd(args: ConstructArgs) -> Result<Outcome, CliError> {
    let (scenario, cfg) = resolve_scenario(&args.common)?;
    cfg.finish()?;
    let (psi1, psi2) = scenario.states()?;
    let rho = mix_pair(&psi1, &psi2, scenario.w, &scenario.policy).map_err(scenario_err)?;

    let mut report = JsonValue::object();
    report.push("psi1", state_json(&psi1));
    report.push("psi2", state_json(&psi2));
    report.push("mixed", density_json(&rho));
    if scenario.family.has_instrument() {
        let inst =
            make_instrument(scenario.family, &scenario.spec, &scenario.policy).map_err(scenario_err)?;
        report.push("instrument", instrument_json(&inst));
        let tables = coefficient_tables(scenario.family, &scenario.spec).map_err(scenario_err)?;
        report.push("coefficient_tables", coefficient_tables_json(&tables));
    } else {
        report.push("instrument", JsonValue::Null);
        report.push("coefficient_tables", JsonValue::Array(vec![]));
    }
    if scenario.family.has_protocol() {
        let prog =
            make_protocol(scenario.family, &scenario.spec, &scenario.policy).map_err(scenario_err)?;
        report.push("protocol", protocol_json(&prog));
    } else {
        report.push("protocol", JsonValue::Null);
    }
    Ok(Outcome {
        stdout: envelope(
            "construct",
            scenario.json(),
            report,
            &scenario.policy,
            scenario.seed,
        ),
        failed: false,
    })
}

fn verify_cmd(args: VerifyArgs) -> Result<Outcome, CliError> {
    let (scenario, mut cfg) = resolve_scenario(&args.common)?;
    let include_states = args.include_states || cfg.take_bool("include-states")?.unwrap_or(false);
    cfg.finish()?;
    if !scenario.family.has_instrument() {
        return Err(usage(format!(
            "family {} has no instrument; use the protocol command",
            scenario.family.code()
        )));
    }
    let (psi1, psi2) = scenario.states()?;
    let rho = mix_pair(&psi1, &psi2, scenario.w, &scenario.policy).map_err(scenario_err)?;
    let inst =
        make_instrument(scenario.family, &scenario.spec, &scenario.policy).map_err(scenario_err)?;

    let completeness = completeness_report(&inst, &scenario.policy)?;
    let target = scenario.target_state(&psi1, &psi2);
    let distillation = distillation_report(&rho, &inst, target, &scenario.policy)?;
    let failed = completeness.verdict == CompletenessVerdict::Invalid
        || distillation.verdict == DistillationVerdict::Failed;

    let mut report = JsonValue::object();
    report.push("completeness", completeness_json(&completeness));
    report.push("distillation", distillation_json(&distillation, include_states));
    Ok(Outcome {
        stdout: envelope(
            "verify",
            scenario.json(),
            report,
            &scenario.policy,
            scenario.seed,
        ),
        failed,
    })
}

fn protocol_cmd(args: ProtocolArgs) -> Result<Outcome, CliError> {
    let (scenario, mut cfg) = resolve_scenario(&args.common)?;
    let level = args
        .level
        .or(cfg.take_usize("level")?)
        .unwrap_or(scenario.spec.d);
    let include_states = args.include_states || cfg.take_bool("include-states")?.unwrap_or(false);
    cfg.finish()?;
    if !scenario.family.has_protocol() {
        return Err(usage(format!(
            "family {} has no protocol; use the verify command",
            scenario.family.code()
        )));
    }
    let (psi1, psi2) = scenario.states()?;
    let rho = mix_pair(&psi1, &psi2, scenario.w, &scenario.policy).map_err(scenario_err)?;
    let prog =
        make_protocol(scenario.family, &scenario.spec, &scenario.policy).map_err(scenario_err)?;

    let leaves = simulate_protocol(&rho, &prog, &scenario.policy)?;
    let distillation = distillation_report_for_protocol(&rho, &prog, &scenario.policy)?;
    let survival = branch_survival_check(&prog, &psi1, &psi2, level, &scenario.policy)?;
    let failed = distillation.verdict == DistillationVerdict::Failed;

    let mut scenario_obj = scenario.json();
    scenario_obj.push("level", JsonValue::usize(level));
    let mut report = JsonValue::object();
    report.push("leaves", leaves_json(&leaves, include_states));
    report.push("distillation", distillation_json(&distillation, include_states));
    report.push("survival", survival_json(&survival));
    Ok(Outcome {
        stdout: envelope(
            "protocol",
            scenario_obj,
            report,
            &scenario.policy,
            scenario.seed,
        ),
        failed,
    })
}

fn parse_cut(text: &str, parties: usize) -> Result<Cut, CliError> {
    let mut left = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let idx: usize = token
            .parse()
            .map_err(|_| usage(format!("cut entry '{token}' is not a party index")))?;
        left.push(idx);
    }
    Cut::new(left, parties).map_err(scenario_err)
}

fn pencil_cmd(args: PencilArgs) -> Result<Outcome, CliError> {
    let (scenario, mut cfg) = resolve_scenario(&args.common)?;
    let cut_text = args
        .cut
        .clone()
        .or(cfg.take_str("cut")?)
        .unwrap_or_else(|| "0".to_string());
    let samples = args.samples.or(cfg.take_usize("samples")?).unwrap_or(1024);
    cfg.finish()?;
    let (psi1, psi2) = scenario.states()?;
    let cut = parse_cut(&cut_text, scenario.spec.parties())?;

    let schmidt1 = schmidt(&psi1, &cut, scenario.policy.kernel_tol, &scenario.policy)?;
    let schmidt2 = schmidt(&psi2, &cut, scenario.policy.kernel_tol, &scenario.policy)?;
    let pencil = pencil_min_rank(&psi1, &psi2, &cut, samples, scenario.seed, &scenario.policy)?;

    let mut scenario_obj = scenario.json();
    scenario_obj.push("cut_left", dims_json(cut.left()));
    scenario_obj.push("samples", JsonValue::usize(samples));
    let mut report = JsonValue::object();
    report.push("schmidt_psi1", schmidt_json(&schmidt1));
    report.push("schmidt_psi2", schmidt_json(&schmidt2));
    report.push("pencil", pencil_json(&pencil));
    Ok(Outcome {
        stdout: envelope(
            "pencil",
            scenario_obj,
            report,
            &scenario.policy,
            scenario.seed,
        ),
        failed: false,
    })
}

fn bounds_cmd(args: BoundsArgs) -> Result<Outcome, CliError> {
    let mut cfg = ConfigMap::load(args.config.as_deref())?;
    let kind_code = args
        .kind
        .clone()
        .or(cfg.take_str("kind")?)
        .ok_or_else(|| usage("--kind is required"))?;
    let dims_text = args
        .dims
        .clone()
        .or(cfg.take_str("dims")?)
        .ok_or_else(|| usage("--dims is required"))?;
    let d = args
        .d
        .or(cfg.take_usize("d")?)
        .ok_or_else(|| usage("--d is required"))?;
    cfg.finish()?;

    let kind = BoundKind::parse(&kind_code).map_err(scenario_err)?;
    let mut dims = Vec::new();
    for token in dims_text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        dims.push(
            token
                .parse::<usize>()
                .map_err(|_| usage(format!("dims entry '{token}' is not a dimension")))?,
        );
    }
    let check = bound_check(kind, d, &dims).map_err(scenario_err)?;

    let mut scenario_obj = JsonValue::object();
    scenario_obj.push("kind", JsonValue::str(kind.code()));
    scenario_obj.push("dims", dims_json(&dims));
    scenario_obj.push("d", JsonValue::usize(d));
    let policy = Policy::default();
    Ok(Outcome {
        stdout: envelope("bounds", scenario_obj, bound_json(&check), &policy, 0),
        failed: false,
    })
}

fn search_cmd(args: SearchArgs) -> Result<Outcome, CliError> {
    let (scenario, mut cfg) = resolve_scenario(&args.common)?;
    let num_kraus = args.t.or(cfg.take_usize("t")?).unwrap_or(2);
    let restarts = args.restarts.or(cfg.take_usize("restarts")?).unwrap_or(8);
    let max_iters = args
        .max_iters
        .or(cfg.take_usize("max-iters")?)
        .unwrap_or(20000);
    let tol = args.tol.or(cfg.take_f64("tol")?).unwrap_or(1e-12);
    let lambda_complete = args
        .lambda_complete
        .or(cfg.take_f64("lambda-complete")?)
        .unwrap_or(1.0);
    let lambda_determinism = args
        .lambda_determinism
        .or(cfg.take_f64("lambda-determinism")?)
        .unwrap_or(1.0);
    let warm = args.warm_start || cfg.take_bool("warm-start")?.unwrap_or(false);
    cfg.finish()?;

    let search_cfg = SearchConfig {
        num_kraus,
        restarts,
        max_iters,
        seed: scenario.seed,
        weights: Weights {
            completeness: lambda_complete,
            determinism: lambda_determinism,
        },
        tol,
    };
    let (psi1, psi2) = scenario.states()?;
    let target = scenario.target_state(&psi1, &psi2).clone();

    let warm_start = if warm {
        if !scenario.family.has_instrument() {
            return Err(usage(format!(
                "family {} has no instrument to warm start from",
                scenario.family.code()
            )));
        }
        let inst = make_instrument(scenario.family, &scenario.spec, &scenario.policy)
            .map_err(scenario_err)?;
        if num_kraus < inst.kraus().len() {
            return Err(usage(format!(
                "--t {} is smaller than the warm-start instrument ({} operators)",
                num_kraus,
                inst.kraus().len()
            )));
        }
        Some(pad_with_zero_operators(&inst, num_kraus).map_err(scenario_err)?)
    } else {
        None
    };

    let result = sep_feasibility_search(
        &psi1,
        &psi2,
        &target,
        &search_cfg,
        warm_start.as_ref(),
        &scenario.policy,
    )
    .map_err(|e| match e {
        crate::Error::Config(_) | crate::Error::DimMismatch(_) => usage(e.to_string()),
        other => CliError::Run(other.to_string()),
    })?;

    let mut scenario_obj = scenario.json();
    scenario_obj.push("search", search_config_json(&search_cfg));
    scenario_obj.push("warm_start", JsonValue::Bool(warm));
    Ok(Outcome {
        stdout: envelope(
            "search",
            scenario_obj,
            search_json(&result),
            &scenario.policy,
            scenario.seed,
        ),
        failed: false,
    })
}

fn pad_with_zero_operators(inst: &Instrument, count: usize) -> crate::Result<Instrument> {
    let dims = inst.dims().to_vec();
    let mut kraus = inst.kraus().to_vec();
    while kraus.len() < count {
        kraus.push(ProductKraus::new(
            dims.iter().map(|&d| ComplexMatrix::zeros(d, d)).collect(),
        )?);
    }
    Instrument::new(dims, kraus)
}

struct SweepRow {
    family: Family,
    spec: DimsSpec,
    w: f64,
    verdict: DistillationVerdict,
    transferred: f64,
    min_fidelity: Option<f64>,
    completeness_ok: bool,
    outcomes_ok: bool,
}

fn sweep_cmd(args: SweepArgs) -> Result<Outcome, CliError> {
    let mut cfg = ConfigMap::load(args.config.as_deref())?;
    let family_filter = match args.family.clone().or(cfg.take_str("family")?) {
        Some(code) => Some(Family::parse(&code).map_err(scenario_err)?),
        None => None,
    };
    let d_max = args.d_max.or(cfg.take_usize("d-max")?).unwrap_or(4);
    let format = args
        .format
        .clone()
        .or(cfg.take_str("format")?)
        .unwrap_or_else(|| "json".to_string());
    if format != "json" && format != "csv" {
        return Err(usage(format!("unknown format '{format}'; use json or csv")));
    }
    let policy = resolve_policy_fields(
        &mut cfg,
        args.kernel_tol,
        args.state_tol,
        args.prob_floor,
        args.max_dim,
    )?;
    cfg.finish()?;

    let families: Vec<Family> = match family_filter {
        Some(f) => {
            if !f.has_instrument() {
                return Err(usage(format!(
                    "family {} has no instrument and cannot be swept",
                    f.code()
                )));
            }
            vec![f]
        }
        None => Family::ALL
            .into_iter()
            .filter(|f| f.has_instrument())
            .collect(),
    };

    let mut rows = Vec::new();
    for family in families {
        for d in 2..=d_max {
            let specs = match family.splits(d) {
                Ok(specs) => specs,
                // Families with no valid split at this d contribute no rows.
                Err(_) => continue,
            };
            for spec in specs {
                let (psi1, psi2) = make_state_pair(family, &spec, &policy)?;
                let inst = make_instrument(family, &spec, &policy)?;
                let completeness = completeness_report(&inst, &policy)?;
                let completeness_ok = completeness.verdict != CompletenessVerdict::Invalid;
                for tenths in 1..=9u32 {
                    let w = f64::from(tenths) / 10.0;
                    let rho = mix_pair(&psi1, &psi2, w, &policy)?;
                    let report = distillation_report(&rho, &inst, &psi1, &policy)?;
                    rows.push(SweepRow {
                        family,
                        spec: spec.clone(),
                        w,
                        verdict: report.verdict,
                        transferred: report.transferred,
                        min_fidelity: report.min_fidelity(),
                        completeness_ok,
                        outcomes_ok: report.verdict != DistillationVerdict::Failed,
                    });
                }
            }
        }
    }

    let failed = rows.iter().any(|r| !r.completeness_ok || !r.outcomes_ok);
    let stdout = if format == "csv" {
        sweep_csv(&rows)
    } else {
        let mut scenario_obj = JsonValue::object();
        scenario_obj.push(
            "family",
            family_filter.map_or(JsonValue::Null, |f| JsonValue::str(f.code())),
        );
        scenario_obj.push("d_max", JsonValue::usize(d_max));
        let mut report = JsonValue::object();
        report.push(
            "rows",
            JsonValue::Array(rows.iter().map(sweep_row_json).collect()),
        );
        envelope("sweep", scenario_obj, report, &policy, 0)
    };
    Ok(Outcome { stdout, failed })
}

fn offset_or_empty(spec: &DimsSpec, idx: usize) -> String {
    spec.offsets
        .get(idx)
        .map(|k| k.to_string())
        .unwrap_or_default()
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "family,d,k1,k2,k3,w,verdict,transferred,min_fidelity,completeness_ok,outcomes_ok\n",
    );
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.family.code(),
            row.spec.d,
            offset_or_empty(&row.spec, 0),
            offset_or_empty(&row.spec, 1),
            offset_or_empty(&row.spec, 2),
            format_float(row.w),
            row.verdict.code(),
            format_float(row.transferred),
            row.min_fidelity.map(format_float).unwrap_or_default(),
            row.completeness_ok,
            row.outcomes_ok,
        ));
    }
    out
}

fn sweep_row_json(row: &SweepRow) -> JsonValue {
    let mut obj = JsonValue::object();
    obj.push("family", JsonValue::str(row.family.code()));
    obj.push("d", JsonValue::usize(row.spec.d));
    obj.push(
        "k1",
        row.spec
            .offsets
            .first()
            .map_or(JsonValue::Null, |&k| JsonValue::usize(k)),
    );
    obj.push(
        "k2",
        row.spec
            .offsets
            .get(1)
            .map_or(JsonValue::Null, |&k| JsonValue::usize(k)),
    );
    obj.push(
        "k3",
        row.spec
            .offsets
            .get(2)
            .map_or(JsonValue::Null, |&k| JsonValue::usize(k)),
    );
    obj.push("w", JsonValue::Float(row.w));
    obj.push("verdict", JsonValue::str(row.verdict.code()));
    obj.push("transferred", JsonValue::Float(row.transferred));
    obj.push(
        "min_fidelity",
        row.min_fidelity.map_or(JsonValue::Null, JsonValue::Float),
    );
    obj.push("completeness_ok", JsonValue::Bool(row.completeness_ok));
    obj.push("outcomes_ok", JsonValue::Bool(row.outcomes_ok));
    obj
}
