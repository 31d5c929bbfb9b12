//! Batch front end for the chevring library.
//!
//! Every subcommand prints one JSON report to stdout (or `--out`), with
//! sorted keys and no timing data inside, so a fixed configuration gives a
//! byte-identical report on re-run. Timing goes to stderr. Exit codes:
//! 0 pass, 1 property failure, 2 usage or parse error, 3 undecided or
//! out of budget.

mod report;
mod ringspec;

use chevring::genalg::{self, RecoveryMode};
use chevring::groupcore::{ChevalleyGroup, ClosureOutcome, SamplePolicy, SubgroupKind};
use chevring::ring::{DiagonalEmbedding, RingAut};
use chevring::weights::ambient_to_fund;
use chevring::{autos, ChevalleyBasis, Error, Mat, Representation, Ring, RootSystem};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};
use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

const PASS: i32 = 0;
const FAIL: i32 = 1;
const USAGE: i32 = 2;
const UNDECIDED: i32 = 3;

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError { code: USAGE, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::Parse { pos, ref msg } => {
                CliError { code: USAGE, message: format!("parse error at byte {pos}: {msg}") }
            }
            Error::Budget(msg) => CliError { code: UNDECIDED, message: msg },
            other => CliError { code: USAGE, message: other.to_string() },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError { code: USAGE, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "chevring", version, about = "Chevalley groups over commutative rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Root system data: roots, simple roots, Cartan matrix
    Rootsys(RootsysArgs),
    /// Structure constants of the Chevalley basis
    Basis(BasisArgs),
    /// Representation data: dimension, weights, generator matrices
    Rep(RepArgs),
    /// Verify the defining relations of the elementary group
    Relations(RelationsArgs),
    /// Commutator-formula constants for a pair of roots
    Constants(ConstantsArgs),
    /// Group-level computations
    #[command(subcommand)]
    Group(GroupCmd),
    /// Matrix-ring generation and path certificates
    #[command(subcommand)]
    Generate(GenerateCmd),
    /// Standard automorphisms and their decomposition
    #[command(subcommand)]
    Auto(AutoCmd),
    /// Ring inspection
    #[command(subcommand)]
    Ring(RingCmd),
}

/// Options shared by most verbs. A config file with key=value lines can
/// supply any of them; explicit flags win.
#[derive(Args, Clone, Default)]
struct Common {
    /// Root system name, e.g. A2, B2, D4
    #[arg(long)]
    system: Option<String>,
    /// Representation name: adjoint, standard, universal, sc, or w<k>
    #[arg(long)]
    rep: Option<String>,
    /// Weight lattice shorthand for --rep: sc or ad
    #[arg(long)]
    lattice: Option<String>,
    /// Ring spec, e.g. Z/6, GF(4), Z/5[y]/(y^2-2), loc(Z/12, 2)
    #[arg(long)]
    ring: Option<String>,
    /// Seed for all sampled randomness
    #[arg(long)]
    seed: Option<u64>,
    /// Config file with key=value defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RootsysArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BasisArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RepArgs {
    #[command(flatten)]
    common: Common,
    /// Include the integer generator matrices
    #[arg(long)]
    matrices: bool,
}

#[derive(Args)]
struct RelationsArgs {
    #[command(flatten)]
    common: Common,
    /// Check every parameter combination instead of sampling
    #[arg(long)]
    exhaustive: bool,
    /// Sample count per relation when not exhaustive
    #[arg(long)]
    cases: Option<u32>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[command(flatten)]
    common: Common,
    /// Root pair "a1,a2" in simple-root coordinates
    #[arg(long)]
    pair: String,
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Center of the elementary group
    Center(CenterArgs),
    /// Breadth-first closure of a generating set
    Closure(ClosureArgs),
    /// Seeded check of the torus action on the unipotent generators
    Diagonal(DiagonalArgs),
}

#[derive(Args)]
struct CenterArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ClosureArgs {
    #[command(flatten)]
    common: Common,
    /// Generating set: elementary, upper, lower, torus, or weyl
    #[arg(long, default_value = "elementary")]
    kind: String,
    /// Element budget before giving up
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args)]
struct DiagonalArgs {
    #[command(flatten)]
    common: Common,
    /// Sampled case count
    #[arg(long)]
    cases: Option<u32>,
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// Whether the unipotent generators generate the full matrix ring
    CheckMn(CheckMnArgs),
    /// Find or check a unique-path certificate in the weight diagram
    Path(PathArgs),
    /// Recover the Lie generators from the unipotents and compare
    Recover(RecoverArgs),
}

#[derive(Args)]
struct CheckMnArgs {
    #[command(flatten)]
    common: Common,
    /// Closure round budget
    #[arg(long)]
    rounds: Option<usize>,
}

#[derive(Args)]
struct PathArgs {
    #[command(flatten)]
    common: Common,
    /// Fundamental weight name for the representation, e.g. w2
    #[arg(long)]
    weight: Option<String>,
    /// Start vertex: g<k> (1-based basis index) or a weight like e7+e8
    #[arg(long)]
    from: Option<String>,
    /// First edge label, 1-based simple root index
    #[arg(long)]
    label: Option<usize>,
    /// Longest path searched
    #[arg(long)]
    max_len: Option<usize>,
    /// Check this certificate JSON file instead of searching
    #[arg(long)]
    check: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[command(flatten)]
    common: Common,
    /// Recovery mode: auto, square-zero, half, or series
    #[arg(long, default_value = "auto")]
    mode: String,
}

#[derive(Subcommand)]
enum AutoCmd {
    /// Write the generator images of the identity automorphism
    Identity(IdentityArgs),
    /// Sample a random standard automorphism and write its images
    Sample(SampleArgs),
    /// Decompose a presented automorphism into standard factors
    Decompose(DecomposeArgs),
}

#[derive(Args)]
struct IdentityArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    common: Common,
    /// Generator-image file produced by `auto identity` or `auto sample`
    #[arg(long)]
    input: PathBuf,
    /// Proceed even when the small-prime invertibility hypotheses fail
    #[arg(long)]
    override_hypotheses: bool,
    /// Do not retry over ring extensions
    #[arg(long)]
    no_extensions: bool,
}

#[derive(Subcommand)]
enum RingCmd {
    /// Size, units, idempotents, maximal ideals, automorphisms
    Info(RingInfoArgs),
    /// Embedding into the product of localizations at maximal ideals
    Embed(RingEmbedArgs),
}

#[derive(Args)]
struct RingInfoArgs {
    #[command(flatten)]
    common: Common,
    /// Ring spec; alias for --ring
    #[arg(long)]
    spec: Option<String>,
}

#[derive(Args)]
struct RingEmbedArgs {
    #[command(flatten)]
    common: Common,
    /// Ring spec; alias for --ring
    #[arg(long)]
    spec: Option<String>,
}

/// Resolved configuration: config-file defaults under explicit flags.
struct Ctx {
    common: Common,
    cfg: HashMap<String, String>,
}

impl Ctx {
    fn new(common: &Common) -> Result<Ctx, CliError> {
        let mut cfg = HashMap::new();
        if let Some(path) = &common.config {
            let text = std::fs::read_to_string(path)?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(CliError::usage(format!(
                        "config line {}: expected key=value",
                        lineno + 1
                    )));
                };
                cfg.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Ctx { common: common.clone(), cfg })
    }

    fn lookup(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.cfg.get(key).cloned())
    }

    fn system(&self) -> Result<String, CliError> {
        self.lookup(&self.common.system, "system")
            .ok_or_else(|| CliError::usage("--system is required"))
    }

    fn ring_spec(&self) -> Result<String, CliError> {
        self.lookup(&self.common.ring, "ring")
            .ok_or_else(|| CliError::usage("--ring is required"))
    }

    fn ring(&self) -> Result<Ring, CliError> {
        Ok(ringspec::parse_ring_spec(&self.ring_spec()?)?)
    }

    /// Representation name: --rep, else the --lattice shorthand, else the
    /// adjoint representation.
    fn rep_name(&self) -> Result<String, CliError> {
        if let Some(rep) = self.lookup(&self.common.rep, "rep") {
            return Ok(rep);
        }
        match self.lookup(&self.common.lattice, "lattice").as_deref() {
            None => Ok("adjoint".into()),
            Some("sc") => Ok("sc".into()),
            Some("ad") | Some("adjoint") => Ok("adjoint".into()),
            Some(other) => Err(CliError::usage(format!(
                "unknown lattice {other}; expected sc or ad"
            ))),
        }
    }

    fn seed(&self) -> Result<u64, CliError> {
        match self.common.seed {
            Some(s) => Ok(s),
            None => match self.cfg.get("seed") {
                Some(text) => {
                    text.parse().map_err(|_| CliError::usage("seed must be an integer"))
                }
                None => Ok(0),
            },
        }
    }

    fn number<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.cfg.get(key) {
            Some(text) => {
                text.parse().map_err(|_| CliError::usage(format!("{key} must be a number")))
            }
            None => Ok(default),
        }
    }

    fn out(&self) -> Option<PathBuf> {
        self.common
            .out
            .clone()
            .or_else(|| self.cfg.get("out").map(PathBuf::from))
    }
}

fn build_basis(system: &str) -> Result<Arc<ChevalleyBasis>, CliError> {
    let rs = Arc::new(RootSystem::parse_name(system)?);
    Ok(Arc::new(ChevalleyBasis::new(rs)?))
}

fn build_rep(cb: &Arc<ChevalleyBasis>, name: &str) -> Result<Arc<Representation>, CliError> {
    Ok(Arc::new(Representation::by_name(cb, name)?))
}

fn main() {
    let started = std::time::Instant::now();
    let cli = Cli::parse();
    let outcome = run(cli.command);
    eprintln!("timing: {} ms", started.elapsed().as_millis());
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn run(command: Command) -> Result<i32, CliError> {
    let (common, value, code) = match command {
        Command::Rootsys(a) => {
            let (v, c) = cmd_rootsys(&Ctx::new(&a.common)?)?;
            (a.common, v, c)
        }
        Command::Basis(a) => {
            let (v, c) = cmd_basis(&Ctx::new(&a.common)?)?;
            (a.common, v, c)
        }
        Command::Rep(a) => {
            let (v, c) = cmd_rep(&Ctx::new(&a.common)?, a.matrices)?;
            (a.common, v, c)
        }
        Command::Relations(a) => {
            let (v, c) = cmd_relations(&Ctx::new(&a.common)?, a.exhaustive, a.cases)?;
            (a.common, v, c)
        }
        Command::Constants(a) => {
            let (v, c) = cmd_constants(&Ctx::new(&a.common)?, &a.pair)?;
            (a.common, v, c)
        }
        Command::Group(GroupCmd::Center(a)) => {
            let (v, c) = cmd_center(&Ctx::new(&a.common)?)?;
            (a.common, v, c)
        }
        Command::Group(GroupCmd::Closure(a)) => {
            let (v, c) = cmd_closure(&Ctx::new(&a.common)?, &a.kind, a.budget)?;
            (a.common, v, c)
        }
        Command::Group(GroupCmd::Diagonal(a)) => {
            let (v, c) = cmd_diagonal(&Ctx::new(&a.common)?, a.cases)?;
            (a.common, v, c)
        }
        Command::Generate(GenerateCmd::CheckMn(a)) => {
            let (v, c) = cmd_check_mn(&Ctx::new(&a.common)?, a.rounds)?;
            (a.common, v, c)
        }
        Command::Generate(GenerateCmd::Path(a)) => {
            let ctx = Ctx::new(&a.common)?;
            let (v, c) = cmd_path(&ctx, &a)?;
            (a.common, v, c)
        }
        Command::Generate(GenerateCmd::Recover(a)) => {
            let (v, c) = cmd_recover(&Ctx::new(&a.common)?, &a.mode)?;
            (a.common, v, c)
        }
        Command::Auto(AutoCmd::Identity(a)) => {
            let (v, c) = cmd_auto_identity(&Ctx::new(&a.common)?)?;
            (a.common, v, c)
        }
        Command::Auto(AutoCmd::Sample(a)) => {
            let (v, c) = cmd_auto_sample(&Ctx::new(&a.common)?)?;
            (a.common, v, c)
        }
        Command::Auto(AutoCmd::Decompose(a)) => {
            let ctx = Ctx::new(&a.common)?;
            let (v, c) = cmd_auto_decompose(&ctx, &a)?;
            (a.common, v, c)
        }
        Command::Ring(RingCmd::Info(a)) => {
            let ctx = Ctx::new(&a.common)?;
            let (v, c) = cmd_ring_info(&ctx, &a.spec)?;
            (a.common, v, c)
        }
        Command::Ring(RingCmd::Embed(a)) => {
            let ctx = Ctx::new(&a.common)?;
            let (v, c) = cmd_ring_embed(&ctx, &a.spec)?;
            (a.common, v, c)
        }
    };
    let ctx = Ctx::new(&common)?;
    report::emit(ctx.out().as_deref(), &value)?;
    Ok(code)
}

fn cmd_rootsys(ctx: &Ctx) -> Result<(Value, i32), CliError> {
    let system = ctx.system()?;
    let rs = RootSystem::parse_name(&system)?;
    let roots: Vec<Value> = (0..rs.num_roots())
        .map(|i| {
            json!({
                "coords": rs.root(i),
                "height": rs.height(i),
                "index": i,
                "name": rs.format_root(i),
                "positive": rs.is_positive(i),
            })
        })
        .collect();
    let simple: Vec<String> =
        rs.simple_indices().iter().map(|&i| rs.format_root(i)).collect();
    let value = json!({
        "cartan": rs.cartan_matrix(),
        "command": "rootsys",
        "num_positive": rs.num_positive(),
        "num_roots": rs.num_roots(),
        "rank": rs.rank,
        "roots": roots,
        "simple": simple,
        "system": rs.name(),
    });
    Ok((value, PASS))
}

fn cmd_basis(ctx: &Ctx) -> Result<(Value, i32), CliError> {
    let system = ctx.system()?;
    let cb = build_basis(&system)?;
    let rs = cb.rootsys();
    let mut constants = Vec::new();
    for a in 0..rs.num_roots() {
        for b in 0..rs.num_roots() {
            if a == b || b == rs.neg(a) {
                continue;
            }
            if let Some(s) = rs.sum(a, b) {
                constants.push(json!({
                    "a": rs.format_root(a),
                    "b": rs.format_root(b),
                    "n": cb.n_const(a, b),
                    "sum": rs.format_root(s),
                }));
            }
        }
    }
    let value = json!({
        "command": "basis",
        "constants": constants,
        "dim": rs.rank + rs.num_roots(),
        "system": rs.name(),
    });
    Ok((value, PASS))
}

fn cmd_rep(ctx: &Ctx, matrices: bool) -> Result<(Value, i32), CliError> {
    let system = ctx.system()?;
    let cb = build_basis(&system)?;
    let rep = build_rep(&cb, &ctx.rep_name()?)?;
    let rs = cb.rootsys();
    let mut value = json!({
        "command": "rep",
        "dim": rep.dim(),
        "rep": rep.label(),
        "square_zero": rep.square_zero(),
        "system": rs.name(),
        "weights": rep.weights(),
    });
    if matrices {
        let mats: Vec<Value> = (0..rs.num_roots())
            .map(|a| {
                json!({
                    "matrix": report::int_mat_value(rep.dim(), rep.root_matrix(a).entries()),
                    "root": rs.format_root(a),
                })
            })
            .collect();
        value["matrices"] = Value::Array(mats);
    }
    Ok((value, PASS))
}

fn cmd_relations(
    ctx: &Ctx,
    exhaustive: bool,
    cases: Option<u32>,
) -> Result<(Value, i32), CliError> {
    let cb = build_basis(&ctx.system()?)?;
    let rep = build_rep(&cb, &ctx.rep_name()?)?;
    let ring = ctx.ring()?;
    let group = ChevalleyGroup::new(rep, ring)?;
    let policy = if exhaustive {
        SamplePolicy::Exhaustive
    } else {
        SamplePolicy::Seeded { seed: ctx.seed()?, cases: ctx.number(cases, "cases", 64)? }
    };
    let report = group.verify_relations(policy)?;
    let pass = report.all_pass();
    let value = json!({
        "command": "relations",
        "pass": pass,
        "report": serde_json::to_value(&report).expect("report serializes"),
    });
    Ok((value, if pass { PASS } else { FAIL }))
}

fn cmd_constants(ctx: &Ctx, pair: &str) -> Result<(Value, i32), CliError> {
    let cb = build_basis(&ctx.system()?)?;
    let rep = build_rep(&cb, &ctx.rep_name()?)?;
    let rs = cb.rootsys();
    let Some((left, right)) = pair.split_once(',') else {
        return Err(CliError::usage("--pair expects two roots separated by a comma"));
    };
    let a = rs.parse_root(left.trim())?;
    let b = rs.parse_root(right.trim())?;
    let terms: Vec<Value> = chevring::groupcore::commutator_constants(&rep, a, b)?
        .iter()
        .map(|t| {
            json!({
                "coefficient": t.coefficient,
                "i": t.i,
                "j": t.j,
                "root": rs.format_root(t.root),
            })
        })
        .collect();
    let value = json!({
        "command": "constants",
        "pair": [rs.format_root(a), rs.format_root(b)],
        "system": rs.name(),
        "terms": terms,
    });
    Ok((value, PASS))
}

fn cmd_center(ctx: &Ctx) -> Result<(Value, i32), CliError> {
    let cb = build_basis(&ctx.system()?)?;
    let rep = build_rep(&cb, &ctx.rep_name()?)?;
    let ring = ctx.ring()?;
    let group = ChevalleyGroup::new(rep, ring.clone())?;
    let center = group.center_of_elementary()?;
    let value = json!({
        "command": "group center",
        "elements": center.iter().map(|m| report::mat_value(&ring, m)).collect::<Vec<_>>(),
        "order": center.len(),
        "rep": group.rep().label(),
        "ring": ring.spec_string(),
        "system": cb.rootsys().name(),
    });
    Ok((value, PASS))
}

fn cmd_closure(ctx: &Ctx, kind: &str, budget: Option<usize>) -> Result<(Value, i32), CliError> {
    let cb = build_basis(&ctx.system()?)?;
    let rep = build_rep(&cb, &ctx.rep_name()?)?;
    let ring = ctx.ring()?;
    let group = ChevalleyGroup::new(rep, ring.clone())?;
    let kind = match kind {
        "elementary" => SubgroupKind::Elementary,
        "upper" => SubgroupKind::UpperUnipotent,
        "lower" => SubgroupKind::LowerUnipotent,
        "torus" => SubgroupKind::Torus,
        "weyl" => SubgroupKind::WeylLift,
        other => {
            return Err(CliError::usage(format!(
                "unknown kind {other}; expected elementary, upper, lower, torus, or weyl"
            )))
        }
    };
    let budget = ctx.number(budget, "budget", 200_000)?;
    let (value, code) = match group.closure(kind, budget)? {
        ClosureOutcome::Complete(elements) => (
            json!({
                "budget": budget,
                "command": "group closure",
                "complete": true,
                "order": elements.len(),
                "ring": ring.spec_string(),
                "system": cb.rootsys().name(),
            }),
            PASS,
        ),
        ClosureOutcome::BudgetExceeded { explored } => (
            json!({
                "budget": budget,
                "command": "group closure",
                "complete": false,
                "explored": explored,
                "ring": ring.spec_string(),
                "system": cb.rootsys().name(),
            }),
            UNDECIDED,
        ),
    };
    Ok((value, code))
}

fn cmd_diagonal(ctx: &Ctx, cases: Option<u32>) -> Result<(Value, i32), CliError> {
    let cb = build_basis(&ctx.system()?)?;
    let rep = build_rep(&cb, &ctx.rep_name()?)?;
    let ring = ctx.ring()?;
    let group = ChevalleyGroup::new(rep, ring)?;
    let seed = ctx.seed()?;
    let cases = ctx.number(cases, "cases", 200)?;
    let report = group.verify_diagonal_action(seed, cases)?;
    let pass = report.all_pass();
    let value = json!({
        "command": "group diagonal",
        "pass": pass,
        "report": serde_json::to_value(&report).expect("report serializes"),
    });
    Ok((value, if pass { PASS } else { FAIL }))
}

fn cmd_check_mn(ctx: &Ctx, rounds: Option<usize>) -> Result<(Value, i32), CliError> {
    let cb = build_basis(&ctx.system()?)?;
    let rep = build_rep(&cb, &ctx.rep_name()?)?;
    let ring = ctx.ring()?;
    let rounds = ctx.number(rounds, "rounds", 64)?;
    let closure = genalg::algebra_closure(&rep, &ring, rounds)?;
    let (verdict, reason, code) = match &closure.verdict {
        genalg::ClosureVerdict::FullMatrixAlgebra => ("full-matrix-algebra", None, PASS),
        genalg::ClosureVerdict::ProperSubalgebra => ("proper-subalgebra", None, FAIL),
        genalg::ClosureVerdict::Undecided(why) => ("undecided", Some(why.clone()), UNDECIDED),
    };
    let value = json!({
        "command": "generate check-mn",
        "module_size": closure.module_size.map(|s| s.to_string()),
        "reason": reason,
        "rep": rep.label(),
        "ring": ring.spec_string(),
        "rounds": closure.rounds,
        "span_generators": closure.span_generators,
        "system": cb.rootsys().name(),
        "verdict": verdict,
    });
    Ok((value, code))
}

/// Start vertex for a path search: g<k> is the 1-based basis index;
/// otherwise a weight in ambient coordinates like e7+e8.
fn resolve_vertex(rep: &Representation, text: &str) -> Result<usize, CliError> {
    let text = text.trim();
    if let Some(k) = text
        .strip_prefix(['g', 'G'])
        .and_then(|t| t.parse::<usize>().ok())
    {
        if k >= 1 && k <= rep.dim() {
            return Ok(k - 1);
        }
        return Err(CliError::usage(format!(
            "vertex g{k} out of range 1..={}",
            rep.dim()
        )));
    }
    let rs = rep.basis().rootsys();
    let ambient = parse_ambient(rs.root(0).len(), text)?;
    let fund = ambient_to_fund(rs, &ambient)?;
    rep.weights()
        .iter()
        .position(|w| *w == fund)
        .ok_or_else(|| CliError::usage(format!("{text} is not a weight of this representation")))
}

/// Sum of signed terms c*e<i> over the ambient coordinates.
fn parse_ambient(dim: usize, text: &str) -> Result<Vec<i64>, CliError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::usage(format!("cannot read weight {text}; expected e.g. e7+e8"));
    let mut v = vec![0i64; dim];
    let mut chars = compact.chars().peekable();
    if chars.peek().is_none() {
        return Err(bad());
    }
    while chars.peek().is_some() {
        let mut sign = 1i64;
        if *chars.peek().expect("peeked") == '+' {
            chars.next();
        } else if *chars.peek().expect("peeked") == '-' {
            sign = -1;
            chars.next();
        }
        let mut coef = String::new();
        while chars.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            coef.push(chars.next().expect("digit"));
        }
        let coef: i64 = if coef.is_empty() { 1 } else { coef.parse().map_err(|_| bad())? };
        if !coef.is_positive() {
            return Err(bad());
        }
        if chars.peek() == Some(&'*') {
            chars.next();
        }
        if chars.next() != Some('e') {
            return Err(bad());
        }
        let mut idx = String::new();
        while chars.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            idx.push(chars.next().expect("digit"));
        }
        let idx: usize = idx.parse().map_err(|_| bad())?;
        if idx < 1 || idx > dim {
            return Err(bad());
        }
        v[idx - 1] += sign * coef;
    }
    Ok(v)
}

fn cmd_path(ctx: &Ctx, args: &PathArgs) -> Result<(Value, i32), CliError> {
    let cb = build_basis(&ctx.system()?)?;
    let rep_name = match ctx.lookup(&args.weight, "weight") {
        Some(w) => w,
        None => ctx.rep_name()?,
    };
    let rep = build_rep(&cb, &rep_name)?;
    let diagram = rep.weight_diagram()?;
    let rs = cb.rootsys();
    if let Some(path) = &args.check {
        let text = std::fs::read_to_string(path)?;
        let cert: genalg::PathCertificate = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let unit = genalg::matrix_unit_from_certificate(&rep, &cert)?;
        let value = json!({
            "accepted": true,
            "certificate": serde_json::to_value(&cert).expect("certificate serializes"),
            "command": "generate path",
            "rep": rep.label(),
            "system": rs.name(),
            "unit": serde_json::to_value(&unit).expect("unit serializes"),
        });
        return Ok((value, PASS));
    }
    let from = args
        .from
        .clone()
        .or_else(|| ctx.cfg.get("from").cloned())
        .ok_or_else(|| CliError::usage("--from is required when not using --check"))?;
    let start = resolve_vertex(&rep, &from)?;
    let label = ctx
        .number(args.label, "label", 0)
        .and_then(|l: usize| if l >= 1 { Ok(l) } else { Err(CliError::usage("--label is required (1-based simple index)")) })?;
    if label > rs.rank {
        return Err(CliError::usage(format!("label {label} out of range 1..={}", rs.rank)));
    }
    let max_len = ctx.number(args.max_len, "max-len", 8)?;
    match genalg::find_path_certificate(&diagram, start, label - 1, max_len) {
        Some(cert) => {
            let unit = genalg::matrix_unit_from_certificate(&rep, &cert)?;
            let value = json!({
                "certificate": serde_json::to_value(&cert).expect("certificate serializes"),
                "command": "generate path",
                "found": true,
                "from": from,
                "label": label,
                "rep": rep.label(),
                "system": rs.name(),
                "unit": serde_json::to_value(&unit).expect("unit serializes"),
            });
            Ok((value, PASS))
        }
        None => {
            let value = json!({
                "command": "generate path",
                "found": false,
                "from": from,
                "label": label,
                "max_len": max_len,
                "rep": rep.label(),
                "system": rs.name(),
            });
            Ok((value, FAIL))
        }
    }
}

fn cmd_recover(ctx: &Ctx, mode: &str) -> Result<(Value, i32), CliError> {
    let cb = build_basis(&ctx.system()?)?;
    let rep = build_rep(&cb, &ctx.rep_name()?)?;
    let ring = ctx.ring()?;
    let rs = cb.rootsys();
    let mode = if mode == "auto" {
        genalg::auto_recovery_mode(&rep, &ring)?
    } else {
        RecoveryMode::parse(mode)?
    };
    let mut roots = Vec::new();
    let mut pass = true;
    for a in 0..rs.num_roots() {
        let recovered = genalg::recover_lie_generator(&rep, &ring, a, mode)?;
        let expected = rep.root_matrix(a).to_ring(&ring);
        let ok = recovered == expected;
        pass &= ok;
        roots.push(json!({"match": ok, "root": rs.format_root(a)}));
    }
    let value = json!({
        "command": "generate recover",
        "mode": mode.name(),
        "pass": pass,
        "rep": rep.label(),
        "ring": ring.spec_string(),
        "roots": roots,
        "system": rs.name(),
    });
    Ok((value, if pass { PASS } else { FAIL }))
}

fn phi_value(
    command: &str,
    rep: &Representation,
    ring: &Ring,
    presentation: &autos::AutomorphismPresentation,
    extra: Vec<(&str, Value)>,
) -> Value {
    let rs = rep.basis().rootsys();
    let images: Vec<Value> = presentation
        .images
        .iter()
        .map(|(root, param, image)| {
            json!({
                "image": report::mat_value(ring, image),
                "param": ring.fmt_elem(param),
                "root": rs.format_root(*root),
            })
        })
        .collect();
    let mut value = json!({
        "command": command,
        "images": images,
        "rep": rep.label(),
        "ring": ring.spec_string(),
        "system": rs.name(),
    });
    for (key, v) in extra {
        value[key] = v;
    }
    value
}

fn cmd_auto_identity(ctx: &Ctx) -> Result<(Value, i32), CliError> {
    let cb = build_basis(&ctx.system()?)?;
    let rep = build_rep(&cb, &ctx.rep_name()?)?;
    let ring = ctx.ring()?;
    let tuple = autos::StandardTuple {
        ring_auto: RingAut::identity(&ring),
        graph: autos::GraphFactor::identity(&cb, &ring),
        inner: Mat::identity(&ring, rep.dim()),
        inner_word: vec![],
    };
    let presentation = autos::presentation_of_tuple(&rep, &ring, &tuple)?;
    let value = phi_value("auto identity", &rep, &ring, &presentation, vec![]);
    Ok((value, PASS))
}

fn cmd_auto_sample(ctx: &Ctx) -> Result<(Value, i32), CliError> {
    let cb = build_basis(&ctx.system()?)?;
    let rep = build_rep(&cb, &ctx.rep_name()?)?;
    let ring = ctx.ring()?;
    let seed = ctx.seed()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let tuple = autos::random_standard_tuple(&rep, &ring, &mut rng)?;
    let presentation = autos::presentation_of_tuple(&rep, &ring, &tuple)?;
    let rs = cb.rootsys();
    let factors = json!({
        "graph": tuple.graph.label(&ring),
        "inner_word": tuple
            .inner_word
            .iter()
            .map(|(root, t)| json!({"param": ring.fmt_elem(t), "root": rs.format_root(*root)}))
            .collect::<Vec<_>>(),
        "ring": tuple.ring_auto.label,
    });
    let value = phi_value(
        "auto sample",
        &rep,
        &ring,
        &presentation,
        vec![("factors", factors), ("seed", json!(seed))],
    );
    Ok((value, PASS))
}

#[derive(serde::Deserialize)]
struct PhiFile {
    system: Option<String>,
    rep: Option<String>,
    ring: Option<String>,
    images: Vec<PhiImage>,
}

#[derive(serde::Deserialize)]
struct PhiImage {
    root: String,
    param: String,
    image: Vec<Vec<String>>,
}

fn cmd_auto_decompose(ctx: &Ctx, args: &DecomposeArgs) -> Result<(Value, i32), CliError> {
    let cb = build_basis(&ctx.system()?)?;
    let rep = build_rep(&cb, &ctx.rep_name()?)?;
    let ring = ctx.ring()?;
    let rs = cb.rootsys();
    let text = std::fs::read_to_string(&args.input)?;
    let phi: PhiFile = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", args.input.display())))?;
    for (given, expected, what) in [
        (&phi.system, rs.name(), "system"),
        (&phi.rep, rep.label().to_string(), "rep"),
        (&phi.ring, ring.spec_string(), "ring"),
    ] {
        if let Some(given) = given {
            if *given != expected {
                return Err(CliError::usage(format!(
                    "input file was generated for {what} {given}, not {expected}"
                )));
            }
        }
    }
    let mut images = Vec::new();
    for entry in &phi.images {
        let root = rs.parse_root(&entry.root)?;
        let param = ring.parse_elem(&entry.param)?;
        let n = entry.image.len();
        if n != rep.dim() || entry.image.iter().any(|row| row.len() != n) {
            return Err(CliError::usage(format!(
                "image of {} at {} is not a {} x {} matrix",
                entry.root,
                entry.param,
                rep.dim(),
                rep.dim()
            )));
        }
        let mut rows = Vec::with_capacity(n);
        for row in &entry.image {
            let mut out = Vec::with_capacity(n);
            for cell in row {
                out.push(ring.parse_elem(cell)?);
            }
            rows.push(out);
        }
        images.push((root, param, Mat::from_rows(&ring, rows)));
    }
    let presentation = autos::AutomorphismPresentation { images };
    let options = autos::DecomposeOptions {
        hypothesis_override: args.override_hypotheses,
        try_extensions: !args.no_extensions,
        ..Default::default()
    };
    let result = autos::decompose(&rep, &ring, &presentation, options)?;
    let (outcome, code) = match result.outcome {
        autos::DecompositionOutcome::Decomposed => ("decomposed", PASS),
        autos::DecompositionOutcome::NonStandardWitness => ("non-standard-witness", FAIL),
        autos::DecompositionOutcome::OutOfTheoremScope => ("out-of-theorem-scope", UNDECIDED),
        autos::DecompositionOutcome::Undecided => ("undecided", UNDECIDED),
    };
    let value = json!({
        "central_trivial": result.central_trivial,
        "command": "auto decompose",
        "extension": result.extension,
        "graph_factor": result.graph_factor,
        "inner_conjugator": result
            .inner_conjugator
            .as_ref()
            .map(|m| report::mat_value(&m.ring, m)),
        "outcome": outcome,
        "reason": result.reason,
        "rep": rep.label(),
        "ring": ring.spec_string(),
        "ring_factor": result.ring_factor,
        "system": rs.name(),
        "transcript": result.transcript,
        "verified": result.verified,
    });
    Ok((value, code))
}

fn cmd_ring_info(ctx: &Ctx, spec: &Option<String>) -> Result<(Value, i32), CliError> {
    let spec = ctx
        .lookup(spec, "spec")
        .map(Ok)
        .unwrap_or_else(|| ctx.ring_spec())?;
    let ring = ringspec::parse_ring_spec(&spec)?;
    let autos: Vec<String> = chevring::ring::automorphisms(&ring)?
        .iter()
        .map(|a| a.label.clone())
        .collect();
    let ideals: Vec<Value> = ring
        .maximal_ideals()?
        .iter()
        .map(|m| {
            json!({
                "gens": m.gens.iter().map(|g| ring.fmt_elem(g)).collect::<Vec<_>>(),
                "size": m.elems.len(),
            })
        })
        .collect();
    let value = json!({
        "automorphisms": autos,
        "command": "ring info",
        "idempotents": ring
            .idempotents()?
            .iter()
            .map(|e| ring.fmt_elem(e))
            .collect::<Vec<_>>(),
        "is_local": ring.is_local()?,
        "maximal_ideals": ideals,
        "ring": ring.spec_string(),
        "size": ring.size().map(|s| s.to_string()),
        "units": ring.units().len(),
    });
    Ok((value, PASS))
}

fn cmd_ring_embed(ctx: &Ctx, spec: &Option<String>) -> Result<(Value, i32), CliError> {
    let spec = ctx
        .lookup(spec, "spec")
        .map(Ok)
        .unwrap_or_else(|| ctx.ring_spec())?;
    let ring = ringspec::parse_ring_spec(&spec)?;
    let embedding = DiagonalEmbedding::new(ring.clone())?;
    let injective = embedding.verify_injective()?;
    let value = json!({
        "command": "ring embed",
        "injective": injective,
        "maximal_ideals": embedding.primes.len(),
        "ring": ring.spec_string(),
        "target": embedding.target.spec_string(),
        "target_size": embedding.target.size().map(|s| s.to_string()),
    });
    Ok((value, if injective { PASS } else { FAIL }))
}
