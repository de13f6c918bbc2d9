//! Command-line driver for `impsynth-core`: file formats, subcommands and
//! their human and JSON output.

pub mod formats;
pub mod output;
pub mod sexp;
mod selfcheck;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use impsynth_core::binform::{embed, strip};
use impsynth_core::codec::{
    decode_seq, decode_state, decode_term, encode_seq, encode_seq_compact, encode_state, encode_term, heap_order,
    BetaPair, EncodedTree,
};
use impsynth_core::parse::free_identifiers;
use impsynth_core::semantics::eval_counted;
use impsynth_core::synthesis::{
    cegis_with, classify, largest_constant, synthesize_loop_free_with, synthesize_pbe_with, Domain, ExhaustReason,
    PbeConfig, SynthStats, SynthesisProblem, SynthesisResult, Variant,
};
use impsynth_core::value_tree::{build_value_tree, decode_value_tree, encode_value_tree, validate, ValueTreeError, Verdict};
use impsynth_core::{parse_term, print_term, EvalOutcome, Op, Rtg, Sort, State, Term, VarUniverse};
use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use formats::FormatError;
use output::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNREALIZABLE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_FILE: i32 = 66;
pub const EXIT_INTERNAL: i32 = 70;

/// IMP programs, regular tree grammars, value-tree certificates and synthesis.
#[derive(Parser, Debug)]
#[command(name = "impsynth", version, propagate_version = true)]
pub struct Cli {
    /// Print one JSON object per result instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Print only the primary result line.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Seed: a number for `selfcheck`, an initial example state such as
    /// "x=0,y=0" for `cegis` (repeatable).
    #[arg(long = "seed", global = true)]
    pub seeds: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a program and print its canonical and prefix forms.
    Parse(ProgramArgs),
    /// Evaluate a program on a state with bounded fuel.
    Run {
        #[command(flatten)]
        program: ProgramArgs,
        /// Input state, e.g. "x=3,y=0".
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
    },
    /// Encode a term, a state or a sequence of naturals as integers.
    Encode(EncodeArgs),
    /// Decode integers produced by `encode`.
    Decode(DecodeArgs),
    /// Print the complete binary form of a grammar and optionally embed a term.
    Binform {
        /// Grammar file.
        #[arg(long)]
        grammar: PathBuf,
        /// Print the grammar file format instead of BNF.
        #[arg(long)]
        rtg: bool,
        /// Term of the grammar (concrete syntax) to embed into its complete binary form.
        #[arg(long)]
        term: Option<String>,
    },
    /// Evaluate a program and print its encoded value tree.
    Certify {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        /// Also list every node's payload.
        #[arg(long)]
        show: bool,
    },
    /// Check an encoded value tree against a program and input state.
    CheckCert {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long)]
        state: String,
        /// Certificate file holding `a b len`.
        #[arg(long)]
        cert: PathBuf,
    },
    /// Search a grammar for a program meeting a specification.
    Synth {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        size_budget: usize,
        /// Largest per-run fuel (total mode) or the fixed fuel (partial mode).
        #[arg(long)]
        fuel: Option<u64>,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
    },
    /// Counterexample-guided synthesis over the problem's domain.
    ///
    /// `--seed` gives the initial examples; the default is the domain's first state.
    Cegis {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 10)]
        rounds: usize,
        #[arg(long)]
        size_budget: usize,
        /// Fuel for verifying candidates and the largest fuel of the inner search.
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
    },
    /// Place a synthesis variant in the arithmetical hierarchy.
    Classify {
        /// general, finite-examples, loop-free, partial-correctness, generalization or spec-sigma-N.
        #[arg(long, required_unless_present = "all")]
        variant: Option<String>,
        /// Print every variant.
        #[arg(long, conflicts_with = "variant")]
        all: bool,
    },
    /// Run randomized round-trip and certificate checks seeded by `--seed`.
    Selfcheck {
        /// Cases per check.
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false, id = "source")]
pub struct ProgramSource {
    /// Program file, in concrete syntax or prefix form.
    #[arg(long)]
    pub program: Option<PathBuf>,
    /// Program text, in concrete syntax or prefix form.
    #[arg(long)]
    pub text: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct ProgramArgs {
    #[command(flatten)]
    pub source: ProgramSource,
    /// Variables in order, e.g. "x,y". Defaults to the state's variables, then the program's.
    #[arg(long)]
    pub vars: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Codec {
    Term,
    State,
    Seq,
}

impl Codec {
    fn name(self) -> &'static str {
        match self {
            Codec::Term => "term",
            Codec::State => "state",
            Codec::Seq => "seq",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Auto,
    Pbe,
    LoopFree,
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[arg(long = "as", value_enum)]
    pub kind: Codec,
    /// Program file (for `--as term`).
    #[arg(long)]
    pub program: Option<PathBuf>,
    /// Program text (for `--as term`).
    #[arg(long)]
    pub text: Option<String>,
    /// State (for `--as state`).
    #[arg(long)]
    pub state: Option<String>,
    /// Comma-separated naturals (for `--as seq`).
    #[arg(long)]
    pub values: Option<String>,
    /// Use the least modulus base rather than the factorial one (for `--as seq`).
    #[arg(long)]
    pub compact: bool,
    #[arg(long)]
    pub vars: Option<String>,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    #[arg(long = "as", value_enum)]
    pub kind: Codec,
    /// `a b len` for terms and sequences, a single natural for states.
    #[arg(long)]
    pub code: String,
    /// Variables in order; required for terms and states.
    #[arg(long)]
    pub vars: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    File(String),
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::File(_) => EXIT_FILE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::File(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::File(e.to_string())
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    code: i32,
    human: String,
    json: String,
}

fn report<T: Serialize>(code: i32, human: String, record: &T) -> Result<Report, CliError> {
    let json = serde_json::to_string(record).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(Report { code, human, json })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Output { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let name = command_name(&cli.command);
    match dispatch(&cli) {
        Ok(r) => {
            let mut stdout = if cli.json { r.json } else { r.human };
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            Output { code: r.code, stdout, stderr: String::new() }
        }
        Err(e) => {
            let stderr = format!("error: {}\n", e.message());
            let stdout = if cli.json {
                let rec = ErrorReport { command: name.into(), error: e.message().into(), exit_code: e.code() };
                serde_json::to_string(&rec).unwrap_or_default() + "\n"
            } else {
                String::new()
            };
            Output { code: e.code(), stdout, stderr }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Parse(_) => "parse",
        Command::Run { .. } => "run",
        Command::Encode(_) => "encode",
        Command::Decode(_) => "decode",
        Command::Binform { .. } => "binform",
        Command::Certify { .. } => "certify",
        Command::CheckCert { .. } => "check-cert",
        Command::Synth { .. } => "synth",
        Command::Cegis { .. } => "cegis",
        Command::Classify { .. } => "classify",
        Command::Selfcheck { .. } => "selfcheck",
    }
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let quiet = cli.quiet;
    match &cli.command {
        Command::Parse(p) => cmd_parse(p, quiet),
        Command::Run { program, state, fuel } => cmd_run(program, state, *fuel),
        Command::Encode(a) => cmd_encode(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Binform { grammar, rtg, term } => cmd_binform(grammar, *rtg, term.as_deref(), quiet),
        Command::Certify { program, state, fuel, show } => cmd_certify(program, state, *fuel, *show),
        Command::CheckCert { program, state, cert } => cmd_check_cert(program, state, cert),
        Command::Synth { problem, size_budget, fuel, engine } => cmd_synth(problem, *size_budget, *fuel, *engine, quiet),
        Command::Cegis { problem, rounds, size_budget, fuel } => {
            cmd_cegis(problem, *rounds, *size_budget, *fuel, &cli.seeds, quiet)
        }
        Command::Classify { variant, all } => cmd_classify(variant.as_deref(), *all, quiet),
        Command::Selfcheck { cases } => {
            let seed = match cli.seeds.as_slice() {
                [] => 0,
                [s] => s.trim().parse::<u64>().map_err(|_| usage(format!("selfcheck seed `{s}` is not a number")))?,
                _ => return Err(usage("selfcheck takes a single --seed")),
            };
            let rec = selfcheck::run(seed, *cases);
            let mut human = String::new();
            for c in &rec.checks {
                let verdict = if c.failures == 0 { "ok" } else { "FAILED" };
                let _ = writeln!(human, "{}: {verdict} ({} cases, {} failures)", c.name, c.cases, c.failures);
            }
            let code = if rec.checks.iter().all(|c| c.failures == 0) { EXIT_OK } else { EXIT_INTERNAL };
            report(code, human, &rec)
        }
    }
}

/// A program with its text, its origin, and the universe it was read with.
struct Program {
    term: Term,
    universe: VarUniverse,
}

fn state_names(state: &str) -> Vec<String> {
    state.split(',').filter_map(|b| b.split_once('=')).map(|(n, _)| n.trim().to_string()).collect()
}

fn prefix_identifiers(s: &sexp::Sexp, out: &mut Vec<String>) {
    match s {
        sexp::Sexp::Atom(a) => {
            if Op::from_prefix_name(a).is_none()
                && a != "•"
                && impsynth_core::syntax::is_identifier(a)
                && !impsynth_core::syntax::RESERVED.contains(&a.as_str())
                && !out.contains(a)
            {
                out.push(a.clone());
            }
        }
        sexp::Sexp::List(items) => items.iter().for_each(|i| prefix_identifiers(i, out)),
    }
}

fn universe_for(vars: Option<&str>, state: Option<&str>, text: &str) -> Result<VarUniverse, CliError> {
    let names: Vec<String> = match vars {
        Some(v) => v.split(',').map(str::trim).filter(|n| !n.is_empty()).map(String::from).collect(),
        None => {
            let mut names = state.map(state_names).unwrap_or_default();
            let mut found = free_identifiers(text);
            if text.trim_start().starts_with('(') {
                if let Ok(s) = sexp::parse(text) {
                    prefix_identifiers(&s, &mut found);
                }
            }
            for n in found {
                if !names.contains(&n) {
                    names.push(n);
                }
            }
            names
        }
    };
    VarUniverse::new(names).map_err(usage)
}

/// Concrete syntax, or the prefix form when the text does not parse as concrete syntax.
fn parse_program_text(text: &str, u: &VarUniverse) -> Result<Term, String> {
    match parse_term(text.trim(), u) {
        Ok(t) => Ok(t),
        Err(e) if text.trim_start().starts_with('(') => {
            formats::parse_prefix_term(text, u).map_err(|p| format!("{e}; as prefix form: {p}"))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn load_source(source: &ProgramSource) -> Result<(String, Option<PathBuf>), CliError> {
    match (&source.program, &source.text) {
        (Some(path), _) => Ok((formats::read_file(path)?, Some(path.clone()))),
        (None, Some(text)) => Ok((text.clone(), None)),
        (None, None) => Err(usage("give --program FILE or --text PROGRAM")),
    }
}

fn load_program(source: &ProgramSource, vars: Option<&str>, state: Option<&str>) -> Result<Program, CliError> {
    let (text, path) = load_source(source)?;
    let universe = universe_for(vars, state, &text)?;
    let term = parse_program_text(&text, &universe).map_err(|e| match &path {
        Some(p) => CliError::File(format!("{}: {e}", p.display())),
        None => CliError::Usage(e),
    })?;
    Ok(Program { term, universe })
}

fn load_state(text: &str, u: &VarUniverse) -> Result<State, CliError> {
    State::parse(text, u).map_err(|e| usage(format!("state `{text}`: {e}")))
}

fn bindings(s: &State, u: &VarUniverse) -> Option<Vec<Binding>> {
    let vals = s.values()?;
    Some(u.names().iter().zip(vals).map(|(n, v)| Binding { var: n.clone(), value: v.to_string() }).collect())
}

fn sort_name(s: Sort) -> String {
    s.to_string().to_lowercase()
}

fn cmd_parse(p: &ProgramArgs, quiet: bool) -> Result<Report, CliError> {
    let prog = load_program(&p.source, p.vars.as_deref(), None)?;
    let (t, u) = (&prog.term, &prog.universe);
    let rec = ParseReport {
        command: "parse".into(),
        term: print_term(t, u),
        prefix: t.prefix(u).to_string(),
        sort: sort_name(t.sort()),
        size: t.size(),
        height: t.height(),
    };
    let human = if quiet {
        rec.prefix.clone()
    } else {
        format!(
            "term: {}\nprefix: {}\nsort: {}\nsize: {}\nheight: {}",
            rec.term, rec.prefix, rec.sort, rec.size, rec.height
        )
    };
    report(EXIT_OK, human, &rec)
}

fn cmd_run(p: &ProgramArgs, state: &str, fuel: u64) -> Result<Report, CliError> {
    let prog = load_program(&p.source, p.vars.as_deref(), Some(state))?;
    let sigma = load_state(state, &prog.universe)?;
    let (out, used) = eval_counted(&prog.term, &sigma, fuel);
    let mut rec = RunReport { command: "run".into(), outcome: String::new(), state: None, value: None, fault: None, fuel_used: used };
    rec.outcome = match &out {
        EvalOutcome::StateOut(s) => {
            rec.state = bindings(s, &prog.universe);
            "state"
        }
        EvalOutcome::Value(v) => {
            rec.value = Some(v.to_string());
            "value"
        }
        EvalOutcome::Bool(b) => {
            rec.value = Some(b.to_string());
            "value"
        }
        EvalOutcome::Dummy => "dummy",
        EvalOutcome::FuelExhausted => "fuel-exhausted",
        EvalOutcome::Fault(f) => {
            rec.fault = Some(f.to_string());
            "fault"
        }
    }
    .into();
    report(EXIT_OK, out.display(&prog.universe).to_string(), &rec)
}

fn triple(p: &BetaPair) -> (String, String, usize) {
    (p.a.to_string(), p.b.to_string(), p.len)
}

fn code_report(kind: Codec) -> CodeReport {
    CodeReport {
        command: String::new(),
        kind: kind.name().into(),
        code: None,
        a: None,
        b: None,
        len: None,
        term: None,
        state: None,
        values: None,
    }
}

fn with_pair(mut rec: CodeReport, p: &BetaPair) -> CodeReport {
    let (a, b, len) = triple(p);
    rec.a = Some(a);
    rec.b = Some(b);
    rec.len = Some(len);
    rec
}

/// Complete binary form of `t`; terms already complete binary are kept.
fn complete_binary(t: &Term) -> Result<Term, CliError> {
    if t.is_complete_binary() {
        Ok(t.clone())
    } else {
        embed(t).map_err(usage)
    }
}

fn cmd_encode(a: &EncodeArgs) -> Result<Report, CliError> {
    let mut rec = CodeReport { command: "encode".into(), ..code_report(a.kind) };
    match a.kind {
        Codec::Term => {
            let source = ProgramSource { program: a.program.clone(), text: a.text.clone() };
            let prog = load_program(&source, a.vars.as_deref(), None)?;
            let t = complete_binary(&prog.term)?;
            let enc = encode_term(&t).map_err(|e| CliError::Internal(e.to_string()))?;
            rec.term = Some(t.prefix(&prog.universe).to_string());
            rec = with_pair(rec, &enc.pair);
            report(EXIT_OK, enc.to_string(), &rec)
        }
        Codec::State => {
            let text = a.state.as_deref().ok_or_else(|| usage("--as state needs --state"))?;
            let u = universe_for(a.vars.as_deref(), Some(text), "")?;
            let code = encode_state(&load_state(text, &u)?).to_string();
            rec.code = Some(code.clone());
            report(EXIT_OK, code, &rec)
        }
        Codec::Seq => {
            let text = a.values.as_deref().ok_or_else(|| usage("--as seq needs --values"))?;
            let vals = text
                .split(',')
                .map(|v| v.trim().parse::<BigUint>().map_err(|_| usage(format!("`{v}` is not a natural number"))))
                .collect::<Result<Vec<_>, _>>()?;
            let p = if a.compact { encode_seq_compact(&vals) } else { encode_seq(&vals) }.map_err(usage)?;
            rec = with_pair(rec, &p);
            report(EXIT_OK, p.to_string(), &rec)
        }
    }
}

fn parse_triple(text: &str) -> Result<BetaPair, CliError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    let [a, b, len] = parts[..] else { return Err(usage("code must be `a b len`")) };
    let nat = |s: &str| s.parse::<BigUint>().map_err(|_| usage(format!("`{s}` is not a natural number")));
    Ok(BetaPair { a: nat(a)?, b: nat(b)?, len: len.parse().map_err(|_| usage(format!("`{len}` is not a length")))? })
}

fn cmd_decode(a: &DecodeArgs) -> Result<Report, CliError> {
    let mut rec = CodeReport { command: "decode".into(), ..code_report(a.kind) };
    let universe = || universe_for(Some(a.vars.as_deref().unwrap_or("")), None, "");
    match a.kind {
        Codec::Term => {
            let u = universe()?;
            let enc = EncodedTree::from_pair(parse_triple(&a.code)?).map_err(usage)?;
            let t = decode_term(&enc, &u).map_err(usage)?;
            rec.term = Some(t.prefix(&u).to_string());
            let human = rec.term.clone().unwrap_or_default();
            report(EXIT_OK, human, &rec)
        }
        Codec::State => {
            let u = universe()?;
            let code: BigUint = a.code.trim().parse().map_err(|_| usage("state code must be a natural number"))?;
            let s = decode_state(&code, &u);
            rec.state = bindings(&s, &u);
            report(EXIT_OK, s.display(&u).to_string(), &rec)
        }
        Codec::Seq => {
            let vals: Vec<String> = decode_seq(&parse_triple(&a.code)?).iter().map(|v| v.to_string()).collect();
            let human = vals.join(",");
            rec.values = Some(vals);
            report(EXIT_OK, human, &rec)
        }
    }
}

fn load_grammar(path: &Path) -> Result<Rtg, CliError> {
    formats::parse_grammar(&formats::read_file(path)?).map_err(|e| CliError::File(format!("{}: {e}", path.display())))
}

fn cmd_binform(path: &Path, rtg: bool, term: Option<&str>, quiet: bool) -> Result<Report, CliError> {
    let g = load_grammar(path)?;
    let bin = if g.is_binform() { g.clone() } else { g.to_bin_form().map_err(|e| CliError::File(e.to_string()))? };
    let u = g.universe();
    let mut rec = BinformReport {
        command: "binform".into(),
        bnf: bin.bnf().to_string(),
        grammar: formats::write_grammar(&bin),
        term: None,
        prefix: None,
        stripped: None,
    };
    let mut human = if rtg { rec.grammar.clone() } else { rec.bnf.clone() };
    if let Some(text) = term {
        let t = parse_program_text(text, u).map_err(usage)?;
        let t = if t.has_dummy_syntax() { strip(&t).map_err(usage)? } else { t };
        if !g.member(&t) && !bin.member(&t) {
            return Err(usage(format!("`{}` is not in the grammar's language", print_term(&t, u))));
        }
        let e = embed(&t).map_err(usage)?;
        if !bin.member(&e) {
            return Err(CliError::Internal("embedded term is not in the complete binary grammar".into()));
        }
        let back = strip(&e).map_err(|err| CliError::Internal(err.to_string()))?;
        if back != t {
            return Err(CliError::Internal("stripping the embedded term does not give the term back".into()));
        }
        rec.term = Some(e.applicative(u).to_string());
        rec.prefix = Some(e.prefix(u).to_string());
        rec.stripped = Some(print_term(&back, u));
        human = if quiet {
            rec.term.clone().unwrap()
        } else {
            format!(
                "{human}term: {}\nprefix: {}\nstrip: {}",
                rec.term.as_deref().unwrap(),
                rec.prefix.as_deref().unwrap(),
                rec.stripped.as_deref().unwrap()
            )
        };
    }
    report(EXIT_OK, human, &rec)
}

fn op_label(t: &Term, u: &VarUniverse) -> String {
    match t.op() {
        Op::Var(v) => u.name(v).to_string(),
        op => op.prefix_name().unwrap_or("?").to_string(),
    }
}

fn cmd_certify(p: &ProgramArgs, state: &str, fuel: u64, show: bool) -> Result<Report, CliError> {
    let prog = load_program(&p.source, p.vars.as_deref(), Some(state))?;
    let u = &prog.universe;
    let sigma = load_state(state, u)?;
    let f = complete_binary(&prog.term)?;
    let v = match build_value_tree(&f, &sigma, fuel) {
        Ok(v) => v,
        Err(e @ (ValueTreeError::FuelExhausted | ValueTreeError::Fault(_))) => {
            let rec = CheckReport { command: "certify".into(), valid: false, node: None };
            return report(EXIT_INVALID, format!("no certificate: {e}"), &rec);
        }
        Err(e) => return Err(CliError::Internal(e.to_string())),
    };
    let enc = encode_value_tree(&v).map_err(|e| CliError::Internal(e.to_string()))?;
    let (a, b, len) = triple(&enc.pair);
    let output = v.output().map(|o| o.display(u).to_string()).unwrap_or_default();
    let nodes = show.then(|| {
        heap_order(&f)
            .unwrap_or_default()
            .iter()
            .zip(&v.nodes)
            .enumerate()
            .map(|(index, (t, payload))| NodeReport { index, op: op_label(t, u), payload: payload.display(u).to_string() })
            .collect::<Vec<_>>()
    });
    let mut human = enc.to_string();
    if let Some(nodes) = &nodes {
        let _ = write!(human, "\nterm: {}", f.prefix(u));
        for n in nodes {
            let _ = write!(human, "\nnode {} {}: {}", n.index, n.op, n.payload);
        }
        let _ = write!(human, "\noutput: {output}");
    }
    let rec = CertReport { command: "certify".into(), a, b, len, height: enc.height, output, nodes };
    report(EXIT_OK, human, &rec)
}

fn cmd_check_cert(p: &ProgramArgs, state: &str, cert: &Path) -> Result<Report, CliError> {
    let prog = load_program(&p.source, p.vars.as_deref(), Some(state))?;
    let u = &prog.universe;
    let sigma = load_state(state, u)?;
    let f = complete_binary(&prog.term)?;
    let enc = formats::parse_cert(&formats::read_file(cert)?).map_err(|e| CliError::File(format!("{}: {e}", cert.display())))?;
    let invalid = |node: Option<usize>, why: String| {
        let rec = CheckReport { command: "check-cert".into(), valid: false, node };
        report(EXIT_INVALID, format!("invalid: {why}"), &rec)
    };
    let v = match decode_value_tree(&enc, sigma.clone(), u) {
        Ok(v) => v,
        Err(e) => return invalid(None, e.to_string()),
    };
    match validate(&f, &sigma, &v) {
        Ok(Verdict::Valid) => report(EXIT_OK, "valid".into(), &CheckReport { command: "check-cert".into(), valid: true, node: None }),
        Ok(Verdict::Invalid { node }) => invalid(Some(node), format!("node {node}")),
        Err(e) => invalid(None, e.to_string()),
    }
}

fn load_problem(path: &Path) -> Result<SynthesisProblem, CliError> {
    let base = path.parent().unwrap_or(Path::new("."));
    formats::parse_problem(&formats::read_file(path)?, base).map_err(|e| match e {
        FormatError::Io { .. } => CliError::File(e.to_string()),
        e => CliError::File(format!("{}: {e}", path.display())),
    })
}

/// Box domains small enough to list are turned into example lists for the
/// dovetailed engine.
const LISTABLE: u32 = 100_000;

fn finite_problem(p: &SynthesisProblem) -> Result<SynthesisProblem, CliError> {
    match &p.domain {
        Domain::Finite(_) => Ok(p.clone()),
        Domain::BoundedBox(_) if p.domain.cardinality() <= BigUint::from(LISTABLE) => {
            let states: Vec<State> = p.domain.states().collect();
            let domain = Domain::finite(states, p.universe()).map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(SynthesisProblem { domain, ..p.clone() })
        }
        Domain::BoundedBox(_) => Err(usage(format!(
            "the search over examples needs a finite domain; this box has more than {LISTABLE} states"
        ))),
    }
}

fn stats(s: &SynthStats) -> Stats {
    Stats {
        candidates: s.candidates,
        evaluations: s.evaluations,
        rounds: s.rounds,
        max_fuel: s.max_fuel,
        completed_size: s.completed_size,
    }
}

fn stats_line(s: &Stats) -> String {
    format!(
        "stats: candidates={} evaluations={} rounds={} max-fuel={} completed-size={}",
        s.candidates, s.evaluations, s.rounds, s.max_fuel, s.completed_size
    )
}

fn exit_for(r: &SynthesisResult) -> i32 {
    match r {
        SynthesisResult::Realized { .. } => EXIT_OK,
        SynthesisResult::Unrealizable { .. } => EXIT_UNREALIZABLE,
        SynthesisResult::BudgetExhausted { .. } => EXIT_BUDGET,
    }
}

fn headline(r: &SynthesisResult, u: &VarUniverse) -> String {
    match r {
        SynthesisResult::Realized { term, .. } => format!("realized: {}", print_term(term, u)),
        SynthesisResult::Unrealizable { language_size, .. } => {
            format!("unrealizable: all {language_size} programs of the grammar fail")
        }
        SynthesisResult::BudgetExhausted { reason, .. } => format!("budget-exhausted: {}", reason.name()),
    }
}

fn cmd_synth(path: &Path, size_budget: usize, fuel: Option<u64>, engine: Engine, quiet: bool) -> Result<Report, CliError> {
    let problem = load_problem(path)?;
    let u = problem.universe().clone();
    let mut cfg = PbeConfig::new(size_budget);
    if let Some(f) = fuel {
        cfg.max_fuel = f.max(1);
        cfg.partial_fuel = f;
    }
    let loops = problem.grammar.uses_op(|o| o == Op::While);
    let engine = match engine {
        Engine::Auto if loops => Engine::Pbe,
        Engine::Auto => Engine::LoopFree,
        e => e,
    };
    let (name, result) = match engine {
        Engine::LoopFree => ("loop-free", synthesize_loop_free_with(&problem, &cfg).map_err(usage)?),
        _ => ("pbe", synthesize_pbe_with(&finite_problem(&problem)?, &cfg).map_err(usage)?),
    };
    let st = stats(result.stats());
    let rec = SynthReport {
        command: "synth".into(),
        engine: name.into(),
        status: result.status().into(),
        term: result.term().map(|t| print_term(t, &u)),
        prefix: result.term().map(|t| t.prefix(&u).to_string()),
        size: result.term().map(Term::size),
        language_size: match &result {
            SynthesisResult::Unrealizable { language_size, .. } => Some(*language_size),
            _ => None,
        },
        reason: match &result {
            SynthesisResult::BudgetExhausted { reason, .. } => Some(reason.name().into()),
            _ => None,
        },
        stats: st.clone(),
    };
    let mut human = headline(&result, &u);
    if !quiet {
        if let Some(size) = rec.size {
            let _ = write!(human, "\nsize: {size}");
        }
        let _ = write!(human, "\nengine: {name}\n{}", stats_line(&st));
    }
    report(exit_for(&result), human, &rec)
}

fn cmd_cegis(
    path: &Path,
    rounds: usize,
    size_budget: usize,
    fuel: u64,
    seeds: &[String],
    quiet: bool,
) -> Result<Report, CliError> {
    let problem = load_problem(path)?;
    let u = problem.universe().clone();
    let mut examples = Vec::new();
    for s in seeds {
        let st = load_state(s, &u)?;
        if !problem.domain.contains(&st) {
            return Err(usage(format!("seed `{s}` is outside the domain")));
        }
        if !examples.contains(&st) {
            examples.push(st);
        }
    }
    if examples.is_empty() {
        examples.extend(problem.domain.states().next());
    }
    let mut cfg = PbeConfig::new(size_budget);
    cfg.max_fuel = fuel.max(1);
    cfg.partial_fuel = fuel;
    let out = cegis_with(&problem, examples, rounds, &cfg, fuel).map_err(usage)?;
    let history: Vec<RoundReport> = out
        .state
        .history
        .iter()
        .enumerate()
        .map(|(i, r)| RoundReport {
            round: i + 1,
            candidate: print_term(&r.candidate, &u),
            counterexample: r.counterexample.display(&u).to_string(),
            max_constant: largest_constant(&r.candidate).map(|c: BigInt| c.to_string()),
        })
        .collect();
    let st = stats(out.result.stats());
    let rec = CegisReport {
        command: "cegis".into(),
        status: out.result.status().into(),
        term: out.result.term().map(|t| print_term(t, &u)),
        reason: match &out.result {
            SynthesisResult::BudgetExhausted { reason, .. } => Some(reason.name().into()),
            _ => None,
        },
        history: history.clone(),
        examples: out.state.examples.iter().map(|s| s.display(&u).to_string()).collect(),
        stats: st.clone(),
    };
    let mut human = String::new();
    if !quiet {
        for r in &history {
            let _ = writeln!(human, "round {}: candidate {} ; counterexample {}", r.round, r.candidate, r.counterexample);
        }
    }
    human.push_str(&headline(&out.result, &u));
    if let SynthesisResult::BudgetExhausted { reason: ExhaustReason::Rounds, .. } = out.result {
        let _ = write!(human, " after {} rounds", history.len());
    }
    if !quiet {
        let _ = write!(human, "\n{}", stats_line(&st));
    }
    report(exit_for(&out.result), human, &rec)
}

const ALL_VARIANTS: [&str; 5] = ["general", "finite-examples", "generalization", "loop-free", "partial-correctness"];

fn cmd_classify(variant: Option<&str>, all: bool, quiet: bool) -> Result<Report, CliError> {
    let one = |tag: &str| -> Result<ClassifyReport, CliError> {
        let v: Variant = tag.parse().map_err(usage)?;
        let c = classify(v);
        Ok(ClassifyReport { command: "classify".into(), variant: v.tag(), label: c.label, rationale: c.rationale })
    };
    if all {
        let recs = ALL_VARIANTS.iter().map(|t| one(t)).collect::<Result<Vec<_>, _>>()?;
        let human = recs.iter().map(|r| format!("{}: {}", r.variant, r.label)).collect::<Vec<_>>().join("\n");
        let json = recs.iter().map(|r| serde_json::to_string(r).unwrap_or_default()).collect::<Vec<_>>().join("\n");
        return Ok(Report { code: EXIT_OK, human, json });
    }
    let rec = one(variant.unwrap_or_default())?;
    let human = if quiet { rec.label.clone() } else { format!("{}\n{}", rec.label, rec.rationale) };
    report(EXIT_OK, human, &rec)
}
