//! Command-line front end for the hpnet workbench.
//!
//! [`run_cli`] is the whole program minus process plumbing, so tests can
//! drive it directly.

pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use hpnet_core::dsl::{parse_net_with, parse_pattern, serialize_net, Diagnostic, ParseOptions, SourceDocument};
use hpnet_core::hierarchy::HierarchicalNet;
use hpnet_core::net::{validate_structure_with, Net, ValidationOptions};
use hpnet_core::pattern::{check_bounds_against_oracle, teb_eval, BoundsRelation, PatternExpr};
use hpnet_core::timed::{check_schedulability, TimingViolationKind};
use hpnet_core::untimed::{check_boundedness, check_deadlock_freedom, check_proper_completion, check_wellformed_workflow};
use hpnet_core::ExploreLimits;

pub use report::{CheckResult, CheckVerdict, Report, WitnessStep};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Source of the bundled healthcare scenario.
pub const HEALTHCARE_HPN: &str = include_str!("../fixtures/healthcare.hpn");

/// The healthcare orchestration with its refined HealthService transition.
pub fn healthcare_fixture() -> HierarchicalNet {
    let doc = SourceDocument::new(HEALTHCARE_HPN, "healthcare.hpn");
    parse_net_with(&doc, ParseOptions::default()).expect("bundled fixture parses").value
}

#[derive(Parser, Debug)]
#[command(name = "hpnet", version, about = "Verification workbench for hierarchical timed Petri nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit the machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = ExploreLimits::default().max_states)]
    max_states: usize,
    /// Per-place token cap beyond which exploration stops expanding a state.
    #[arg(long, global = true, default_value_t = ExploreLimits::default().max_token_bound)]
    max_token_bound: u32,
    /// Reject intervals with lo = hi or an unbounded upper end.
    #[arg(long, global = true)]
    strict_intervals: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a net document and check hierarchy invariants.
    Validate { file: PathBuf },
    /// Print the canonical flat net.
    Flatten { file: PathBuf },
    /// Structure, workflow shape, boundedness, deadlock freedom and proper completion.
    Analyze {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Schedulability and time consistency.
    Schedule {
        file: PathBuf,
        #[arg(long)]
        deadline: Option<u64>,
    },
    /// Evaluate the interval calculus on a pattern document.
    Teb { file: PathBuf },
    /// Compare the calculus with the state space of the generated net.
    OracleCheck { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Outcome {
    Report(Report),
    /// Plain text for commands whose human output is not a verdict list.
    Text { report: Report, text: String },
}

struct Failure(String);

impl From<hpnet_core::net::NetError> for Failure {
    fn from(e: hpnet_core::net::NetError) -> Self {
        Failure(format!("error[{}]: {e}", e.code()))
    }
}

fn render_diagnostics(origin: &str, diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{origin}:{d}\n")).collect()
}

struct Ctx {
    json: bool,
    limits: ExploreLimits,
    strict: bool,
    warnings: String,
}

impl Ctx {
    fn read(&self, path: &Path) -> Result<SourceDocument, Failure> {
        let origin = path.display().to_string();
        let bytes = std::fs::read(path).map_err(|e| Failure(format!("{origin}: error[IO]: {e}\n")))?;
        SourceDocument::from_bytes(&bytes, origin.clone()).map_err(|d| Failure(render_diagnostics(&origin, &[d])))
    }

    fn net(&mut self, path: &Path) -> Result<HierarchicalNet, Failure> {
        let doc = self.read(path)?;
        let parsed = parse_net_with(&doc, ParseOptions { strict_intervals: self.strict })
            .map_err(|d| Failure(render_diagnostics(&doc.origin, &d)))?;
        self.warnings += &render_diagnostics(&doc.origin, &parsed.warnings);
        Ok(parsed.value)
    }

    fn flat(&mut self, path: &Path) -> Result<Net, Failure> {
        let h = self.net(path)?;
        let flat = h.flatten().map_err(|e| Failure(format!("{}: error[{}]: {e}\n", path.display(), e.code())))?;
        for w in &flat.warnings {
            self.warnings += &format!("{}: warning[{}]: {}\n", path.display(), w.code.as_str(), w.message);
        }
        Ok(flat.net)
    }

    fn pattern(&mut self, path: &Path) -> Result<PatternExpr, Failure> {
        let doc = self.read(path)?;
        let parsed = parse_pattern(&doc).map_err(|d| Failure(render_diagnostics(&doc.origin, &d)))?;
        self.warnings += &render_diagnostics(&doc.origin, &parsed.warnings);
        Ok(parsed.value)
    }
}

fn verdict(check: &str, result: CheckResult, witness: Option<Vec<WitnessStep>>, details: Value) -> CheckVerdict {
    CheckVerdict { check: check.to_string(), result, witness, details }
}

fn validate(ctx: &mut Ctx, file: &Path) -> Result<Vec<CheckVerdict>, Failure> {
    let h = ctx.net(file)?;
    let opts = ValidationOptions { strict_intervals: ctx.strict };
    let violations: Vec<Value> = h
        .nets()
        .flat_map(|n| {
            validate_structure_with(n, opts).violations.into_iter().map(|v| json!({"net": n.name, "code": v.code.as_str(), "location": v.location}))
        })
        .collect();
    let mut out = vec![verdict(
        "validate_structure",
        CheckResult::from_bool(violations.is_empty()),
        None,
        json!({"nets": h.nets().count(), "violations": violations}),
    )];
    let errors: Vec<Value> = h.check_invariants().iter().map(|e| json!({"code": e.code(), "message": e.to_string()})).collect();
    out.push(verdict(
        "hierarchy_invariants",
        CheckResult::from_bool(errors.is_empty()),
        None,
        json!({"bindings": h.bindings.len(), "errors": errors}),
    ));
    for t in h.bindings.keys() {
        let r = h.check_condition_alteration(t).map_err(|e| Failure(format!("{}: error[{}]: {e}\n", file.display(), e.code())))?;
        out.push(verdict(
            &format!("condition_alteration:{}.{}", t.net, t.transition),
            CheckResult::from_bool(r.passed),
            None,
            json!({"subnet": r.subnet, "vacuous": r.vacuous, "failures": r.failures}),
        ));
    }
    Ok(out)
}

fn analyze(ctx: &mut Ctx, file: &Path, k: u32) -> Result<Vec<CheckVerdict>, Failure> {
    let net = ctx.flat(file)?;
    let structure = validate_structure_with(&net, ValidationOptions { strict_intervals: ctx.strict });
    let violations: Vec<Value> = structure.violations.iter().map(|v| json!({"code": v.code.as_str(), "location": v.location})).collect();
    let workflow = check_wellformed_workflow(&net);
    let issues: Vec<Value> = workflow.issues.iter().map(|i| json!({"code": i.code.as_str(), "node": i.node})).collect();
    let m0 = net.initial_marking();
    let bounded = check_boundedness(&net, &m0, k, ctx.limits)?;
    let deadlock = check_deadlock_freedom(&net, &m0, ctx.limits)?;
    let completion = check_proper_completion(&net, ctx.limits)?;
    let marking = |w: &Option<hpnet_core::untimed::Witness>| w.as_ref().map(|w| w.marking.to_string());
    Ok(vec![
        verdict("validate_structure", CheckResult::from_bool(structure.is_valid()), None, json!({"violations": violations})),
        verdict("wellformed_workflow", CheckResult::from_bool(workflow.passed()), None, json!({"issues": issues})),
        verdict(
            "boundedness",
            bounded.bounded.into(),
            bounded.witness.as_ref().map(|w| WitnessStep::untimed(&w.trace)),
            json!({"k": k, "marking": marking(&bounded.witness), "states_explored": bounded.states_explored}),
        ),
        verdict(
            "deadlock_freedom",
            deadlock.deadlock_free.into(),
            deadlock.witness.as_ref().map(|w| WitnessStep::untimed(&w.trace)),
            json!({"marking": marking(&deadlock.witness), "states_explored": deadlock.states_explored}),
        ),
        verdict(
            "proper_completion",
            completion.proper_completion.into(),
            completion.witness.as_ref().map(|w| WitnessStep::untimed(&w.trace)),
            json!({"failed_clause": completion.failed_clause, "marking": marking(&completion.witness), "states_explored": completion.states_explored}),
        ),
    ])
}

fn schedule(ctx: &mut Ctx, file: &Path, deadline: Option<u64>) -> Result<Vec<CheckVerdict>, Failure> {
    let net = ctx.flat(file)?;
    let r = check_schedulability(&net, deadline, ctx.limits)?;
    let (consistency, missed): (Vec<_>, Vec<_>) =
        r.violations.iter().partition(|v| v.kind != TimingViolationKind::DeadlineMissed);
    let listed = |vs: &[&hpnet_core::timed::TimingViolation]| -> Vec<Value> {
        vs.iter()
            .map(|v| json!({"kind": v.kind.as_str(), "transition": v.transition, "place": v.place, "message": v.message}))
            .collect()
    };
    let consistency_result = if consistency.is_empty() && r.truncated {
        CheckResult::Unknown
    } else {
        CheckResult::from_bool(consistency.is_empty())
    };
    Ok(vec![
        verdict(
            "schedulability",
            r.schedulable.into(),
            r.earliest_witness.as_deref().map(WitnessStep::timed),
            json!({
                "completion": r.completion.map(|c| c.to_string()),
                "deadline": deadline,
                "latest_witness": r.latest_witness.as_deref().map(WitnessStep::timed),
                "violations": listed(&missed),
                "states_explored": r.states_explored,
                "truncated": r.truncated,
            }),
        ),
        verdict(
            "time_consistency",
            consistency_result,
            consistency.first().map(|v| WitnessStep::timed(&v.witness)),
            json!({"violations": listed(&consistency)}),
        ),
    ])
}

fn run(cli: Cli, ctx: &mut Ctx) -> Result<Outcome, Failure> {
    let report = |command: &str, file: &Path, verdicts| Report {
        tool_version: TOOL_VERSION.to_string(),
        command: command.to_string(),
        input: file.display().to_string(),
        verdicts,
    };
    Ok(match cli.command {
        Command::Validate { file } => Outcome::Report(report("validate", &file, validate(ctx, &file)?)),
        Command::Flatten { file } => {
            let net = ctx.flat(&file)?;
            let text = serialize_net(&net);
            let v = verdict("flatten", CheckResult::Pass, None, json!({"net": text}));
            Outcome::Text { report: report("flatten", &file, vec![v]), text }
        }
        Command::Analyze { file, k } => Outcome::Report(report("analyze", &file, analyze(ctx, &file, k)?)),
        Command::Schedule { file, deadline } => Outcome::Report(report("schedule", &file, schedule(ctx, &file, deadline)?)),
        Command::Teb { file } => {
            let e = ctx.pattern(&file)?;
            let teb = teb_eval(&e);
            let v = verdict("teb", CheckResult::Pass, None, json!({"pattern": e.to_string(), "teb": teb.to_string()}));
            Outcome::Text { report: report("teb", &file, vec![v]), text: format!("{teb}\n") }
        }
        Command::OracleCheck { file } => {
            let e = ctx.pattern(&file)?;
            let r = check_bounds_against_oracle(&e, ctx.limits);
            let result = match r.relation {
                BoundsRelation::Equal | BoundsRelation::CalculusContainsStatespace => CheckResult::Pass,
                BoundsRelation::Mismatch => CheckResult::Fail,
                BoundsRelation::Unknown => CheckResult::Unknown,
            };
            let details = json!({
                "pattern": e.to_string(),
                "calculus": r.calculus.to_string(),
                "statespace": r.statespace.map(|s| s.to_string()),
                "relation": r.relation.as_str(),
            });
            Outcome::Report(report("oracle-check", &file, vec![verdict("bounds_oracle", result, None, details)]))
        }
    })
}

/// Runs one invocation. Exit codes: 0 when every check passes, 1 when a
/// check fails or is undecided, 2 on usage, input or parse errors.
pub fn run_cli<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                CliOutput { code, stdout: text, stderr: String::new() }
            } else {
                CliOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut ctx = Ctx {
        json: cli.json,
        limits: ExploreLimits::new(cli.max_states, cli.max_token_bound),
        strict: cli.strict_intervals,
        warnings: String::new(),
    };
    match run(cli, &mut ctx) {
        Err(Failure(msg)) => CliOutput { code: 2, stdout: String::new(), stderr: ctx.warnings + &msg },
        Ok(outcome) => {
            let (report, text) = match outcome {
                Outcome::Report(r) => {
                    let t = r.to_human();
                    (r, t)
                }
                Outcome::Text { report, text } => (report, text),
            };
            let code = if report.passed() { 0 } else { 1 };
            let stdout = if ctx.json { report.to_json() } else { text };
            CliOutput { code, stdout, stderr: ctx.warnings }
        }
    }
}
