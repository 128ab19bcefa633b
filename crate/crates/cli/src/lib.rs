//! Command-line front end: reads a DSL document, runs one command, prints JSON.

pub mod report;
#[cfg(test)]
mod tests;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ggp_core::component::{component_group, packet_side};
use ggp_core::dsl::{self, ast::CharMode, ast::Step, ast::TaskKind, DslError, Workspace};
use ggp_core::epsilon::{EpsBackend, EpsError, Oracle};
use ggp_core::param::{LParameter, StandardCharacters};
use ggp_core::recipe::{main_multiplicity, GgpSetup, RecipeError};
use ggp_core::theta::{contains_chi_v, theta_up1_char, theta_up1_param, theta_up2_char, theta_up2_eps_prime, theta_up2_param, ThetaError};
use ggp_core::verify::seesaw::{transport, Faults};
use ggp_core::verify::suite::{run_property_suite, BackendKind, SuiteConfig};
use ggp_core::Sign;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTIC: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// The environment variable that overrides the default seed.
pub const SEED_ENV: &str = "GGP_SEED";

#[derive(Parser, Debug)]
#[command(name = "ggp", version, about = "Packets, theta lifts and GGP branching for p-adic unitary groups")]
struct Cli {
    /// DSL document with the parameters the command refers to.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Seed for the hashed epsilon backend and for `verify`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Use chi_V = chi^(n+2), chi_W = chi^n.
    #[arg(long, global = true)]
    identify_chi: bool,
    /// Compact JSON (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Epsilon backend. Defaults to the document's table when it has one, else hashed.
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Hashed,
    One,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StepArg {
    Up1,
    Up2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the members of the packet with their sides.
    Packet { param: String },
    /// Lift a parameter and tabulate the character map.
    Theta {
        #[arg(value_enum)]
        step: StepArg,
        param: String,
    },
    /// Multiplicity for theta(phi_1) x phi, with the distinguished pair.
    Ggp {
        phi1: String,
        phi: String,
        /// Vouch for irreducibility of the theta lifts back to U(W_n).
        #[arg(long)]
        certified: bool,
        /// Include the see-saw trace.
        #[arg(long)]
        trace: bool,
    },
    /// Run the randomized property suite.
    Verify {
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, default_value_t = 3)]
        max_rank: u32,
    },
    /// Run the document's `task` directives in order.
    Run,
}

/// Everything a run produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Diagnostic(String, Option<dsl::Pos>),
    Hypothesis(String),
}

impl From<DslError> for Failure {
    fn from(e: DslError) -> Failure {
        let pos = e.pos();
        Failure::Diagnostic(e.to_string(), Some(pos))
    }
}

impl From<RecipeError> for Failure {
    fn from(e: RecipeError) -> Failure {
        match e {
            RecipeError::Eps(e) => e.into(),
            RecipeError::Theta(e) => e.into(),
            other => Failure::Hypothesis(other.to_string()),
        }
    }
}

impl From<ThetaError> for Failure {
    fn from(e: ThetaError) -> Failure {
        match e {
            ThetaError::Eps(e) => e.into(),
            other => Failure::Hypothesis(other.to_string()),
        }
    }
}

impl From<EpsError> for Failure {
    fn from(e: EpsError) -> Failure {
        Failure::Diagnostic(e.to_string(), None)
    }
}

struct Env {
    workspace: Workspace,
    seed: u64,
    backend: Option<BackendArg>,
    identify_chi: bool,
}

impl Env {
    fn param(&self, name: &str) -> Result<&LParameter, Failure> {
        self.workspace.param(name).map_err(|e| Failure::Diagnostic(e.to_string(), None))
    }

    fn backend(&self) -> Result<EpsBackend, Failure> {
        let kind = self.backend.unwrap_or(if self.workspace.table.is_some() { BackendArg::Table } else { BackendArg::Hashed });
        Ok(match kind {
            BackendArg::Hashed => EpsBackend::Hashed { seed: self.seed },
            BackendArg::One => EpsBackend::ConstantOne,
            BackendArg::Table => EpsBackend::Table(
                self.workspace.table.clone().ok_or_else(|| Failure::Diagnostic("--backend table needs an `epsilon` block".into(), None))?,
            ),
        })
    }

    /// The setup for rank `n`: the document's characters when it has them,
    /// otherwise fresh generators.
    fn setup(&self, n: u32, certified: bool) -> Result<GgpSetup, Failure> {
        let mut s = match self.workspace.setup(certified) {
            Some(s) => s,
            None => {
                let chars = if self.identify_chi { StandardCharacters::identified(n) } else { StandardCharacters::independent(n) };
                let mut s = GgpSetup::new(n, chars);
                s.base = self.workspace.base;
                s.irreducibility_certified = certified;
                s
            }
        };
        if s.n != n {
            return Err(Failure::Hypothesis(format!("the characters block is for n = {}, the parameter needs n = {n}", s.n)));
        }
        s.base = self.workspace.base;
        Ok(s)
    }
}

fn packet(phi: &LParameter) -> Result<Value, Failure> {
    let s = component_group(phi);
    let mut members = Vec::new();
    let (mut plus, mut minus) = (0, 0);
    for eta in s.characters() {
        let side = packet_side(&eta, phi).map_err(|e| Failure::Diagnostic(e.to_string(), None))?;
        if side.is_plus() {
            plus += 1;
        } else {
            minus += 1;
        }
        members.push(json!({ "character": report::character(phi, &eta), "side": side }));
    }
    Ok(json!({
        "parameter": report::parameter(phi),
        "component_rank": s.rank(),
        "central_element": s.central_element().to_string(),
        "members": members,
        "per_side": { "+1": plus, "-1": minus },
    }))
}

fn theta(env: &Env, step: Step, phi: &LParameter) -> Result<Value, Failure> {
    let setup = env.setup(phi.rank(), false)?;
    let backend = env.backend()?;
    let oracle = Oracle::new(&backend);
    let mut rows = Vec::new();
    let body = match step {
        Step::Up1 => {
            let ctx = setup.lift_one();
            let target = theta_up1_param(phi, &ctx)?;
            for eta in component_group(phi).characters() {
                for eps in [Sign::Plus, Sign::Minus] {
                    let (lifted, side) = theta_up1_char(phi, &eta, eps, &ctx)?;
                    rows.push(json!({
                        "eta": report::character(phi, &eta),
                        "requested_side": eps,
                        "lifted": report::character(&target, &lifted),
                        "side": side,
                    }));
                }
            }
            json!({
                "step": "up1",
                "context": report::context(&ctx),
                "case": if contains_chi_v(phi, &ctx) { "identified" } else { "extended" },
                "source": report::parameter(phi),
                "target": report::parameter(&target),
                "map": rows,
            })
        }
        Step::Up2 => {
            let ctx = setup.lift_two();
            let target = theta_up2_param(phi, &ctx)?;
            for eta in component_group(phi).characters() {
                let eps_prime = packet_side(&eta, phi).map_err(|e| Failure::Diagnostic(e.to_string(), None))?;
                let lifted = theta_up2_char(&eta, phi, &ctx, &oracle)?;
                rows.push(json!({
                    "eta": report::character(phi, &eta),
                    "side": eps_prime,
                    "lifted": report::character(&target, &lifted),
                    "lifted_side": theta_up2_eps_prime(eps_prime, phi, &ctx, &oracle)?,
                }));
            }
            json!({
                "step": "up2",
                "context": report::context(&ctx),
                "source": report::parameter(phi),
                "target": report::parameter(&target),
                "map": rows,
                "audit": report::audit(&oracle.calls()),
            })
        }
    };
    Ok(body)
}

fn ggp(env: &Env, phi1: &LParameter, phi: &LParameter, certified: bool, with_trace: bool) -> Result<Value, Failure> {
    let setup = env.setup(phi1.rank(), certified)?;
    let backend = env.backend()?;
    let r = main_multiplicity(phi1, phi, &setup, &backend)?;
    let mut body = report::multiplicity(&r);
    body["backend"] = json!(backend.name());
    if with_trace {
        let t = transport(phi1, phi, &setup, &Oracle::new(&backend), &Faults::none())?;
        body["trace"] = t.as_ref().map_or(Value::Null, report::trace);
    }
    Ok(body)
}

fn run_tasks(env: &Env) -> Result<Value, Failure> {
    let mut out = Vec::new();
    for t in &env.workspace.tasks {
        let (name, result) = match &t.kind {
            TaskKind::Packet { param } => ("packet", packet(env.param(param)?)?),
            TaskKind::Theta { step, param } => ("theta", theta(env, *step, env.param(param)?)?),
            TaskKind::Ggp { phi1, phi, certified } => ("ggp", ggp(env, env.param(phi1)?, env.param(phi)?, *certified, false)?),
        };
        out.push(json!({ "task": name, "line": t.pos.line, "result": result }));
    }
    Ok(json!({ "tasks": out }))
}

fn load(input: Option<&PathBuf>, identify_chi: bool) -> Result<Workspace, Failure> {
    let text = match input {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::Diagnostic(format!("{}: {e}", p.display()), None))?,
        None => String::new(),
    };
    let mut doc = dsl::parse(&text)?;
    if identify_chi {
        if let Some(c) = doc.characters.as_mut() {
            c.mode = CharMode::Identified;
        }
    }
    Ok(dsl::resolve(&doc)?)
}

fn render(v: &Value, pretty: bool) -> String {
    let mut s = if pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) }.expect("values serialize");
    s.push('\n');
    s
}

fn execute(cli: &Cli, seed: u64) -> Result<(String, Value, bool), Failure> {
    if let Command::Verify { seeds, max_rank } = cli.command {
        let kind = match cli.backend.unwrap_or(BackendArg::Hashed) {
            BackendArg::Hashed => BackendKind::Hashed,
            BackendArg::One => BackendKind::One,
            BackendArg::Table => BackendKind::Table,
        };
        let mut config = SuiteConfig::new(seed, seeds, max_rank, vec![kind]);
        config.identify_chi = cli.identify_chi;
        let r = run_property_suite(&config);
        return Ok(("verify".into(), report::suite(&config, &r), r.all_pass()));
    }
    let env = Env { workspace: load(cli.input.as_ref(), cli.identify_chi)?, seed, backend: cli.backend, identify_chi: cli.identify_chi };
    let (name, body) = match &cli.command {
        Command::Packet { param } => ("packet", packet(env.param(param)?)?),
        Command::Theta { step, param } => {
            let step = if *step == StepArg::Up1 { Step::Up1 } else { Step::Up2 };
            ("theta", theta(&env, step, env.param(param)?)?)
        }
        Command::Ggp { phi1, phi, certified, trace } => ("ggp", ggp(&env, env.param(phi1)?, env.param(phi)?, *certified, *trace)?),
        Command::Run => ("run", run_tasks(&env)?),
        Command::Verify { .. } => unreachable!("handled above"),
    };
    Ok((name.into(), body, true))
}

/// Run with an explicit seed override, as if it came from the environment.
pub fn run_with_env<I, T>(args: I, env_seed: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // --help and --version are not errors.
            if !e.use_stderr() {
                return Outcome { code: EXIT_OK, stdout: e.to_string(), stderr: String::new() };
            }
            return Outcome { code: EXIT_DIAGNOSTIC, stdout: String::new(), stderr: e.to_string() };
        }
    };
    let seed = match (cli.seed, env_seed) {
        (Some(s), _) => s,
        (None, Some(v)) => match v.trim().parse() {
            Ok(s) => s,
            Err(_) => {
                let msg = format!("{SEED_ENV}={v} is not an unsigned integer");
                return failure_outcome(EXIT_DIAGNOSTIC, "diagnostic", &msg, None, cli.pretty);
            }
        },
        (None, None) => 0,
    };
    match execute(&cli, seed) {
        Ok((name, body, ok)) => Outcome {
            code: if ok { EXIT_OK } else { EXIT_VERIFY },
            stdout: render(&report::envelope(&name, body), cli.pretty),
            stderr: String::new(),
        },
        Err(Failure::Diagnostic(msg, pos)) => failure_outcome(EXIT_DIAGNOSTIC, "diagnostic", &msg, pos, cli.pretty),
        Err(Failure::Hypothesis(msg)) => failure_outcome(EXIT_HYPOTHESIS, "hypothesis", &msg, None, cli.pretty),
    }
}

fn failure_outcome(code: i32, kind: &str, msg: &str, pos: Option<dsl::Pos>, pretty: bool) -> Outcome {
    let mut err = json!({ "kind": kind, "message": msg });
    if let Some(p) = pos {
        err["line"] = json!(p.line);
        err["column"] = json!(p.col);
    }
    Outcome { code, stdout: render(&json!({ "schema": report::SCHEMA, "error": err }), pretty), stderr: format!("error: {msg}\n") }
}

/// Run with `GGP_SEED` taken from the process environment.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    run_with_env(args, env_seed.as_deref())
}
