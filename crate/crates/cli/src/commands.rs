//! Command preparation, execution, and report rendering.
//!
//! Running a command happens in three phases: load the algebra description,
//! parse every operand expression (nothing is computed until all operands
//! parse), then execute and render. Batch suites follow the same phases for
//! every record before any record is executed, and aggregate deterministically
//! in record order.
//!
//! Exit codes: 0 when a check holds or a value is computed, 1 when any check
//! reports a violation, 2 on input or usage errors. Nothing is written to
//! standard output on an error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value as Json};

use gva_core::engine::{
    check_associativity, check_borcherds, check_jacobi_window, check_locality,
    check_skew_symmetry, check_translation_covariance, field_apply, locality_order, mode,
    AlgebraInstance,
};
use gva_core::fock::FockState;
use gva_core::io::{parse_spec, AlgebraSpec};
use gva_core::lattice::{
    canonical_invariant, construct_cocycle, dual_group, extend_cocycle, omega_superalgebra,
    vec_render, verify_cocycle, GroupVector,
};
use gva_core::modules::{
    build_twisted_view, check_module_borcherds, check_twisted_borcherds, module_mode, CosetModule,
};
use gva_core::report::{CheckReport, CheckStatus};
use gva_core::{Error, Rat, Result};

use crate::parse::{parse_rational, parse_state};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Exact checker for lattice-type generalized vertex algebras.
#[derive(Parser, Debug)]
#[command(name = "gva", version, disable_help_subcommand = true)]
pub struct Cli {
    /// Path to the algebra description (JSON).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,

    /// Exponent window for series computations (rational, default 4).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Run a batch of independent commands from a JSON file.
    #[arg(long, global = true)]
    pub suite: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// First state expression.
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// Second state expression.
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
}

#[derive(Args, Debug, Clone)]
pub struct TripleArgs {
    /// Acting state expression.
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// Middle state expression.
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    /// Target state expression.
    #[arg(long, allow_hyphen_values = true)]
    pub c: String,
}

#[derive(Args, Debug, Clone)]
pub struct IndexedTripleArgs {
    #[command(flatten)]
    pub states: TripleArgs,
    /// Mode index paired with the target (rational).
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
    /// Mode index paired with the operand pair (rational).
    #[arg(long, allow_hyphen_values = true)]
    pub n: String,
    /// Mode index paired with the second operand and target (rational).
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Apply one mode of a state's field to another state.
    Mode {
        /// Acting state expression.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Mode index (rational).
        #[arg(long, allow_hyphen_values = true)]
        n: String,
        /// Target state expression.
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Expand a field action as a series up to the window.
    Apply {
        /// Acting state expression.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Target state expression.
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Print the minimal weighted-commutation order of a pair.
    LocalityOrder(PairArgs),
    /// Verify a structural identity.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Construct, verify, or transform cocycles.
    #[command(subcommand)]
    Cocycle(CocycleCmd),
    /// Print a generating set of the dual group.
    DualGroup,
    /// Print the commutation-phase table of the cocycle-twisted algebra.
    Twist,
    /// Module-side computations.
    #[command(subcommand)]
    Module(ModuleCmd),
    /// Twisted-module computations.
    #[command(subcommand)]
    Twisted(TwistedCmd),
}

#[derive(Subcommand, Debug, Clone)]
pub enum CheckCmd {
    /// Compare the two weighted double products at a given order.
    Locality {
        #[command(flatten)]
        states: TripleArgs,
        /// Weight exponent; defaults to the minimal order of the pair.
        #[arg(long, allow_hyphen_values = true)]
        n: Option<String>,
    },
    /// Compare a field product with its reversed, rotated form.
    Skew(PairArgs),
    /// Verify the three-index mode-product identity.
    Borcherds(IndexedTripleArgs),
    /// Verify the two-variable commutator identity with delta corrections.
    Jacobi {
        #[command(flatten)]
        states: TripleArgs,
        /// Mode exponent for the correction sum; defaults to the
        /// canonical representative of the pair's coset.
        #[arg(long, allow_hyphen_values = true)]
        n: Option<String>,
    },
    /// Verify the composition identity at a fixed exponent.
    Assoc {
        #[command(flatten)]
        states: TripleArgs,
        /// Composition exponent (rational).
        #[arg(long, allow_hyphen_values = true)]
        l: String,
    },
    /// Verify that translation acts as the derivative of fields.
    Translation {
        /// Acting state expression.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Target states; defaults to the vacuum and the generator charges.
        #[arg(long, allow_hyphen_values = true)]
        c: Vec<String>,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum CocycleCmd {
    /// Construct a cocycle realizing the canonical sign invariant.
    Construct,
    /// Check the cocycle law and normalization on generator triples.
    Verify,
    /// Print the invariant classifying the algebra's cocycle.
    Invariant,
    /// Extend the cocycle to the dual group and print its matrix.
    Extend,
}

#[derive(Subcommand, Debug, Clone)]
pub enum ModuleCmd {
    /// Apply one mode with the target drawn from the module.
    Mode {
        /// Acting state expression.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Mode index (rational).
        #[arg(long, allow_hyphen_values = true)]
        n: String,
        /// Module state expression.
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Verify the mode-product identity on the module.
    Check(IndexedTripleArgs),
}

#[derive(Subcommand, Debug, Clone)]
pub enum TwistedCmd {
    /// Verify the mode-product identity through the twisted-module view.
    Check(IndexedTripleArgs),
}

/// A loaded algebra description.
struct Context {
    algebra: AlgebraInstance,
    module: Option<CosetModule>,
}

fn load_context(path: &Path) -> Result<Context> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::InvalidSpec(format!("cannot read {}: {e}", path.display()))
    })?;
    let spec: AlgebraSpec = parse_spec(&text)?;
    let (algebra, module) = spec.build()?;
    Ok(Context { algebra, module })
}

/// A command with every operand parsed, ready to execute.
struct PreparedCommand {
    action: Action,
    operands: BTreeMap<String, String>,
    window: Rat,
}

enum Action {
    Mode {
        a: FockState,
        n: Rat,
        c: FockState,
    },
    Apply {
        a: FockState,
        c: FockState,
    },
    LocalityOrder {
        a: FockState,
        b: FockState,
    },
    CheckLocality {
        a: FockState,
        b: FockState,
        c: FockState,
        n: Option<Rat>,
    },
    CheckSkew {
        a: FockState,
        b: FockState,
    },
    CheckBorcherds {
        a: FockState,
        b: FockState,
        c: FockState,
        m: Rat,
        n: Rat,
        k: Rat,
    },
    CheckJacobi {
        a: FockState,
        b: FockState,
        c: FockState,
        n: Option<Rat>,
    },
    CheckAssoc {
        a: FockState,
        b: FockState,
        c: FockState,
        l: Rat,
    },
    CheckTranslation {
        a: FockState,
        samples: Vec<FockState>,
    },
    CocycleConstruct,
    CocycleVerify,
    CocycleInvariant,
    CocycleExtend,
    DualGroup,
    Twist,
    ModuleMode {
        a: FockState,
        n: Rat,
        c: FockState,
    },
    ModuleCheck {
        a: FockState,
        b: FockState,
        c: FockState,
        m: Rat,
        n: Rat,
        k: Rat,
    },
    TwistedCheck {
        a: FockState,
        b: FockState,
        c: FockState,
        m: Rat,
        n: Rat,
        k: Rat,
    },
}

/// What a command produces.
enum Payload {
    Report(CheckReport),
    State(String),
    Series(Vec<(Rat, String)>),
    Rational(Rat),
    Table(Vec<Vec<String>>),
}

struct Prepare<'a> {
    ctx: &'a Context,
    operands: BTreeMap<String, String>,
}

impl<'a> Prepare<'a> {
    fn new(ctx: &'a Context) -> Self {
        Prepare {
            ctx,
            operands: BTreeMap::new(),
        }
    }

    fn state(&mut self, flag: &str, text: &str) -> Result<FockState> {
        let space = &self.ctx.algebra.lattice.space;
        let v = parse_state(text, space)?;
        self.operands.insert(flag.to_string(), v.render(space));
        Ok(v)
    }

    fn rational(&mut self, flag: &str, text: &str) -> Result<Rat> {
        let r = parse_rational(text)?;
        self.operands.insert(flag.to_string(), r.to_string());
        Ok(r)
    }
}

fn prepare(ctx: &Context, command: &Command, window_flag: Option<&str>) -> Result<PreparedCommand> {
    let mut p = Prepare::new(ctx);
    let window = match window_flag {
        Some(text) => parse_rational(text)?,
        None => Rat::from_int(4),
    };
    let action = match command {
        Command::Mode { a, n, c } => Action::Mode {
            a: p.state("a", a)?,
            n: p.rational("n", n)?,
            c: p.state("c", c)?,
        },
        Command::Apply { a, c } => Action::Apply {
            a: p.state("a", a)?,
            c: p.state("c", c)?,
        },
        Command::LocalityOrder(args) => Action::LocalityOrder {
            a: p.state("a", &args.a)?,
            b: p.state("b", &args.b)?,
        },
        Command::Check(check) => match check {
            CheckCmd::Locality { states, n } => Action::CheckLocality {
                a: p.state("a", &states.a)?,
                b: p.state("b", &states.b)?,
                c: p.state("c", &states.c)?,
                n: match n {
                    Some(text) => Some(p.rational("n", text)?),
                    None => None,
                },
            },
            CheckCmd::Skew(args) => Action::CheckSkew {
                a: p.state("a", &args.a)?,
                b: p.state("b", &args.b)?,
            },
            CheckCmd::Borcherds(args) => Action::CheckBorcherds {
                a: p.state("a", &args.states.a)?,
                b: p.state("b", &args.states.b)?,
                c: p.state("c", &args.states.c)?,
                m: p.rational("m", &args.m)?,
                n: p.rational("n", &args.n)?,
                k: p.rational("k", &args.k)?,
            },
            CheckCmd::Jacobi { states, n } => Action::CheckJacobi {
                a: p.state("a", &states.a)?,
                b: p.state("b", &states.b)?,
                c: p.state("c", &states.c)?,
                n: match n {
                    Some(text) => Some(p.rational("n", text)?),
                    None => None,
                },
            },
            CheckCmd::Assoc { states, l } => Action::CheckAssoc {
                a: p.state("a", &states.a)?,
                b: p.state("b", &states.b)?,
                c: p.state("c", &states.c)?,
                l: p.rational("l", l)?,
            },
            CheckCmd::Translation { a, c } => {
                let a = p.state("a", a)?;
                let samples = if c.is_empty() {
                    default_samples(&ctx.algebra)
                } else {
                    let mut out = Vec::with_capacity(c.len());
                    for (i, text) in c.iter().enumerate() {
                        out.push(p.state(&format!("c{i}"), text)?);
                    }
                    out
                };
                Action::CheckTranslation { a, samples }
            }
        },
        Command::Cocycle(cmd) => match cmd {
            CocycleCmd::Construct => Action::CocycleConstruct,
            CocycleCmd::Verify => Action::CocycleVerify,
            CocycleCmd::Invariant => Action::CocycleInvariant,
            CocycleCmd::Extend => Action::CocycleExtend,
        },
        Command::DualGroup => Action::DualGroup,
        Command::Twist => Action::Twist,
        Command::Module(cmd) => match cmd {
            ModuleCmd::Mode { a, n, c } => Action::ModuleMode {
                a: p.state("a", a)?,
                n: p.rational("n", n)?,
                c: p.state("c", c)?,
            },
            ModuleCmd::Check(args) => Action::ModuleCheck {
                a: p.state("a", &args.states.a)?,
                b: p.state("b", &args.states.b)?,
                c: p.state("c", &args.states.c)?,
                m: p.rational("m", &args.m)?,
                n: p.rational("n", &args.n)?,
                k: p.rational("k", &args.k)?,
            },
        },
        Command::Twisted(cmd) => match cmd {
            TwistedCmd::Check(args) => Action::TwistedCheck {
                a: p.state("a", &args.states.a)?,
                b: p.state("b", &args.states.b)?,
                c: p.state("c", &args.states.c)?,
                m: p.rational("m", &args.m)?,
                n: p.rational("n", &args.n)?,
                k: p.rational("k", &args.k)?,
            },
        },
    };
    Ok(PreparedCommand {
        action,
        operands: p.operands,
        window,
    })
}

/// Vacuum plus the charge states of the generators and their negatives.
fn default_samples(alg: &AlgebraInstance) -> Vec<FockState> {
    let mut out = vec![alg.vacuum()];
    for b in &alg.lattice.subgroup.basis {
        out.push(FockState::charge_state(b.clone()));
        out.push(FockState::charge_state(
            b.iter().map(|x| -x).collect::<Vec<_>>(),
        ));
    }
    out
}

fn require_cocycle(ctx: &Context) -> Result<&gva_core::lattice::Cocycle> {
    ctx.algebra
        .cocycle
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec("the description carries no cocycle".into()))
}

fn require_module(ctx: &Context) -> Result<&CosetModule> {
    ctx.module
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec("the description carries no module".into()))
}

fn matrix_table(rows: &[Vec<Rat>]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|row| row.iter().map(|x| x.to_string()).collect())
        .collect()
}

/// Triples of signed generators for checking the cocycle law.
fn generator_triples(basis: &[GroupVector]) -> Vec<(GroupVector, GroupVector, GroupVector)> {
    let mut signed: Vec<GroupVector> = Vec::new();
    for b in basis {
        signed.push(b.clone());
        signed.push(b.iter().map(|x| -x).collect());
    }
    let mut out = Vec::new();
    for x in &signed {
        for y in &signed {
            for z in &signed {
                out.push((x.clone(), y.clone(), z.clone()));
            }
        }
    }
    out
}

fn execute(ctx: &Context, prepared: &PreparedCommand) -> Result<Payload> {
    let alg = &ctx.algebra;
    let space = &alg.lattice.space;
    let w = &prepared.window;
    Ok(match &prepared.action {
        Action::Mode { a, n, c } => Payload::State(mode(alg, a, n, c)?.render(space)),
        Action::Apply { a, c } => {
            let series = field_apply(alg, a, c, w)?;
            Payload::Series(
                series
                    .terms()
                    .map(|(e, v)| (e.clone(), v.render(space)))
                    .collect(),
            )
        }
        Action::LocalityOrder { a, b } => Payload::Rational(locality_order(alg, a, b)?),
        Action::CheckLocality { a, b, c, n } => {
            let n = match n {
                Some(n) => n.clone(),
                None => locality_order(alg, a, b)?,
            };
            Payload::Report(check_locality(alg, a, b, c, &n, w, w)?)
        }
        Action::CheckSkew { a, b } => Payload::Report(check_skew_symmetry(alg, a, b, w)?),
        Action::CheckBorcherds { a, b, c, m, n, k } => {
            Payload::Report(check_borcherds(alg, a, b, c, m, n, k)?)
        }
        Action::CheckJacobi { a, b, c, n } => {
            let n = match n {
                Some(n) => n.clone(),
                None => -alg.form(&a.degree_of()?, &b.degree_of()?),
            };
            Payload::Report(check_jacobi_window(alg, a, b, c, &n, w, w)?)
        }
        Action::CheckAssoc { a, b, c, l } => {
            Payload::Report(check_associativity(alg, a, b, c, l, w, w)?)
        }
        Action::CheckTranslation { a, samples } => {
            Payload::Report(check_translation_covariance(alg, a, samples, w)?)
        }
        Action::CocycleConstruct => {
            let omega = omega_superalgebra(&alg.lattice)?;
            let eps = construct_cocycle(&omega)?;
            Payload::Table(matrix_table(&eps.exponents))
        }
        Action::CocycleVerify => {
            let eps = require_cocycle(ctx)?;
            let triples = generator_triples(&alg.lattice.subgroup.basis);
            Payload::Report(verify_cocycle(
                alg.dim(),
                |x, y| eps.value(x, y),
                &triples,
            ))
        }
        Action::CocycleInvariant => {
            let eps = require_cocycle(ctx)?;
            let invariant = canonical_invariant(&alg.lattice, eps)?;
            Payload::Table(matrix_table(&invariant.exponents))
        }
        Action::CocycleExtend => {
            let eps = require_cocycle(ctx)?;
            let dual = dual_group(&alg.lattice)?;
            let extended =
                extend_cocycle(&alg.lattice.subgroup, eps, &dual, &dual.basis)?;
            Payload::Table(matrix_table(&extended.exponents))
        }
        Action::DualGroup => {
            let dual = dual_group(&alg.lattice)?;
            Payload::Table(matrix_table(&dual.basis))
        }
        Action::Twist => {
            require_cocycle(ctx)?;
            let basis = &alg.lattice.subgroup.basis;
            let table = basis
                .iter()
                .map(|x| basis.iter().map(|y| alg.eta(x, y).to_string()).collect())
                .collect();
            Payload::Table(table)
        }
        Action::ModuleMode { a, n, c } => {
            let module = require_module(ctx)?;
            Payload::State(module_mode(module, a, n, c)?.render(space))
        }
        Action::ModuleCheck { a, b, c, m, n, k } => {
            let module = require_module(ctx)?;
            Payload::Report(check_module_borcherds(module, a, b, c, m, n, k)?)
        }
        Action::TwistedCheck { a, b, c, m, n, k } => {
            let module = require_module(ctx)?;
            let view = build_twisted_view(&ctx.algebra, module)?;
            Payload::Report(check_twisted_borcherds(&view, a, b, c, m, n, k)?)
        }
    })
}

fn render_series_text(terms: &[(Rat, String)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    terms
        .iter()
        .map(|(e, c)| format!("({c})*z^{e}"))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn payload_text(payload: &Payload) -> String {
    match payload {
        Payload::Report(report) => match report.status {
            CheckStatus::Holds => format!("holds (checked {})", report.checked),
            CheckStatus::Violated => {
                let mut out = format!("violated (checked {})", report.checked);
                if let Some(witness) = &report.witness {
                    out.push_str(&format!(
                        "\nat: {}\ndifference: {}",
                        vec_render(&witness.location),
                        witness.difference
                    ));
                }
                out
            }
        },
        Payload::State(text) => text.clone(),
        Payload::Series(terms) => render_series_text(terms),
        Payload::Rational(r) => r.to_string(),
        Payload::Table(rows) => rows
            .iter()
            .map(|row| row.join(" "))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn payload_json(payload: &Payload, operands: &BTreeMap<String, String>, elapsed_ms: u128) -> Json {
    let operands: Json = operands
        .iter()
        .map(|(k, v)| (k.clone(), Json::String(v.clone())))
        .collect::<serde_json::Map<_, _>>()
        .into();
    match payload {
        Payload::Report(report) => {
            let mut obj = json!({
                "status": match report.status {
                    CheckStatus::Holds => "holds",
                    CheckStatus::Violated => "violated",
                },
                "checked": report.checked,
                "operands": operands,
                "elapsed_ms": elapsed_ms as u64,
            });
            if let Some(witness) = &report.witness {
                obj["witness"] = json!({
                    "exponents": witness
                        .location
                        .iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>(),
                    "difference": witness.difference,
                });
            }
            obj
        }
        Payload::State(text) => json!({
            "status": "computed",
            "value": text,
            "operands": operands,
            "elapsed_ms": elapsed_ms as u64,
        }),
        Payload::Series(terms) => json!({
            "status": "computed",
            "value": terms
                .iter()
                .map(|(e, c)| json!({"exp": e.to_string(), "coeff": c}))
                .collect::<Vec<_>>(),
            "operands": operands,
            "elapsed_ms": elapsed_ms as u64,
        }),
        Payload::Rational(r) => json!({
            "status": "computed",
            "value": r.to_string(),
            "operands": operands,
            "elapsed_ms": elapsed_ms as u64,
        }),
        Payload::Table(rows) => json!({
            "status": "computed",
            "value": rows,
            "operands": operands,
            "elapsed_ms": elapsed_ms as u64,
        }),
    }
}

fn payload_exit(payload: &Payload) -> i32 {
    match payload {
        Payload::Report(report) if report.status == CheckStatus::Violated => 1,
        _ => 0,
    }
}

/// One record of a batch suite: a command name, its operands, and optional
/// overrides for the description path and window.
#[derive(Debug, Deserialize)]
struct SuiteRecord {
    #[serde(default)]
    spec: Option<String>,
    command: String,
    #[serde(default)]
    args: BTreeMap<String, Json>,
    #[serde(default)]
    window: Option<String>,
}

fn record_argv(record: &SuiteRecord, default_spec: Option<&Path>) -> Result<Vec<String>> {
    let mut argv = vec!["gva".to_string()];
    match (&record.spec, default_spec) {
        (Some(s), _) => {
            argv.push("--spec".into());
            argv.push(s.clone());
        }
        (None, Some(p)) => {
            argv.push("--spec".into());
            argv.push(p.display().to_string());
        }
        (None, None) => {
            return Err(Error::InvalidSpec(
                "suite record names no description and no default was given".into(),
            ))
        }
    }
    if let Some(w) = &record.window {
        argv.push("--window".into());
        argv.push(w.clone());
    }
    for part in record.command.split_whitespace() {
        argv.push(part.to_string());
    }
    for (flag, value) in &record.args {
        let values: Vec<String> = match value {
            Json::String(s) => vec![s.clone()],
            Json::Array(items) => items
                .iter()
                .map(|v| match v {
                    Json::String(s) => Ok(s.clone()),
                    _ => Err(Error::InvalidSpec(format!(
                        "suite argument {flag} must hold strings"
                    ))),
                })
                .collect::<Result<_>>()?,
            _ => {
                return Err(Error::InvalidSpec(format!(
                    "suite argument {flag} must be a string or list of strings"
                )))
            }
        };
        for v in values {
            argv.push(format!("--{flag}"));
            argv.push(v);
        }
    }
    Ok(argv)
}

fn run_suite(cli: &Cli, path: &Path) -> Result<(String, i32)> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::InvalidSpec(format!("cannot read {}: {e}", path.display()))
    })?;
    let records: Vec<SuiteRecord> = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidSpec(format!("malformed suite file: {e}")))?;
    // Phase one: load and parse everything before computing anything.
    let mut staged = Vec::with_capacity(records.len());
    for record in &records {
        let argv = record_argv(record, cli.spec.as_deref())?;
        let parsed = Cli::try_parse_from(&argv)
            .map_err(|e| Error::InvalidSpec(format!("suite record rejected: {e}")))?;
        let command = parsed
            .command
            .ok_or_else(|| Error::InvalidSpec("suite record names no command".into()))?;
        let spec_path = parsed
            .spec
            .ok_or_else(|| Error::InvalidSpec("suite record names no description".into()))?;
        let ctx = load_context(&spec_path)?;
        let window = parsed.window.as_deref().or(cli.window.as_deref());
        let prepared = prepare(&ctx, &command, window)?;
        staged.push((ctx, prepared));
    }
    // Phase two: execute in record order.
    let mut lines = Vec::new();
    let mut entries = Vec::new();
    let mut any_violation = false;
    for (index, (ctx, prepared)) in staged.iter().enumerate() {
        let started = Instant::now();
        let payload = execute(ctx, prepared)?;
        let elapsed = started.elapsed().as_millis();
        if payload_exit(&payload) == 1 {
            any_violation = true;
        }
        lines.push(format!(
            "[{index}] {}",
            payload_text(&payload).replace('\n', "; ")
        ));
        let mut obj = payload_json(&payload, &prepared.operands, elapsed);
        obj["index"] = json!(index);
        entries.push(obj);
    }
    let out = match cli.format {
        Format::Text => format!("{}\n", lines.join("\n")),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&entries).unwrap()),
    };
    Ok((out, if any_violation { 1 } else { 0 }))
}

/// Runs the parsed invocation; returns the full standard-output text and the
/// exit code. Any error means exit code 2 with nothing on standard output.
pub fn run(cli: Cli) -> Result<(String, i32)> {
    if let Some(suite) = cli.suite.clone() {
        if cli.command.is_some() {
            return Err(Error::InvalidSpec(
                "give either a command or --suite, not both".into(),
            ));
        }
        return run_suite(&cli, &suite);
    }
    let command = cli
        .command
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec("no command given (see --help)".into()))?;
    let spec_path = cli
        .spec
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec("--spec is required".into()))?;
    let ctx = load_context(spec_path)?;
    let prepared = prepare(&ctx, command, cli.window.as_deref())?;
    let started = Instant::now();
    let payload = execute(&ctx, &prepared)?;
    let elapsed = started.elapsed().as_millis();
    let out = match cli.format {
        Format::Text => format!("{}\n", payload_text(&payload)),
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&payload_json(&payload, &prepared.operands, elapsed))
                .unwrap()
        ),
    };
    Ok((out, payload_exit(&payload)))
}
