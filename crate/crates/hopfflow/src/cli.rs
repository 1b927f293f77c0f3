//! Command-line surface: `hopfflow {expand|verify|solve} <topic> [flags]`.
//!
//! `expand` prints exact expansions (Eulerian idempotents, the CBHD series,
//! Faa di Bruno data) as JSON; `verify` runs seeded identity-verification
//! suites and emits a machine-readable report; `solve` integrates linear
//! matrix ODEs and scalar Riccati equations, emitting CSV or JSON
//! trajectories.
//!
//! Numeric flags that feed exact identities accept rationals as "p/q".
//! Reports carry the schema {command, config, checks, elapsed_ms} with
//! checks sorted by name; a check's `ref` names the library routine it
//! exercises. Exit code 0 means all checks passed, 1 means a check failed,
//! 2 means a usage error. The env var HOPFFLOW_THREADS caps parallelism
//! (checks currently run sequentially; the value is validated and recorded
//! in the report config).

use crate::cbhd;
use crate::faadibruno as fdb;
use crate::freetensor::Word;
use crate::idempotents::{self, HopfSide};
use crate::magnus::{
    self, dyson_solve, magnus_solve, matrix_max_abs, rk4_flow, FlowResult, SampledMatrixFn,
};
use crate::rat::{q_to_f64, Q};
use crate::rotabaxter::{
    random_ratmat, JacksonKind, JacksonRB, ProjectionRB, RiemannRB,
    RotaBaxter, SeriesRB,
};
use crate::scheffers::{riccati_general_curve, solve_u_system, RiccatiCoeffs};
use crate::spitzer;
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::str::FromStr;
use std::time::Instant;

// ---------------------------------------------------------------------------
// Report schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// Library routine the check exercises, as a module path.
    #[serde(rename = "ref")]
    pub reference: String,
    pub status: String,
    pub residual: f64,
}

impl Check {
    pub fn exact(name: &str, reference: &str, residual: f64) -> Self {
        let residual = residual + 0.0; // normalize -0.0
        Check {
            name: name.into(),
            reference: reference.into(),
            status: if residual == 0.0 { "pass" } else { "fail" }.into(),
            residual,
        }
    }

    pub fn tol(name: &str, reference: &str, residual: f64, tol: f64) -> Self {
        let residual = residual + 0.0;
        Check {
            name: name.into(),
            reference: reference.into(),
            status: if residual.is_finite() && residual <= tol { "pass" } else { "fail" }.into(),
            residual,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: serde_json::Value,
    pub checks: Vec<Check>,
    pub elapsed_ms: u128,
}

impl Report {
    fn assemble(
        command: &str,
        config: serde_json::Value,
        mut checks: Vec<Check>,
        start: Instant,
    ) -> (Report, i32) {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let ok = checks.iter().all(|c| c.status == "pass");
        let report = Report {
            command: command.into(),
            config,
            checks,
            elapsed_ms: start.elapsed().as_millis(),
        };
        (report, if ok { 0 } else { 1 })
    }
}

// ---------------------------------------------------------------------------
// Argument grammar
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(name = "hopfflow", version, about = "Hopf-algebraic expansions, Rota-Baxter identity \
suites, and Magnus/Dyson/Riccati solvers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print exact expansions as JSON.
    Expand {
        #[command(subcommand)]
        topic: ExpandTopic,
    },
    /// Run seeded identity-verification suites.
    Verify {
        #[command(subcommand)]
        topic: VerifyTopic,
    },
    /// Integrate linear matrix ODEs or scalar Riccati equations.
    Solve {
        #[command(subcommand)]
        topic: SolveTopic,
    },
}

#[derive(Subcommand)]
enum ExpandTopic {
    /// Eulerian idempotent π_n applied to the standard multilinear word.
    Eulerian(EulerianArgs),
    /// Homogeneous CBHD term Φ_m for log(e^X e^Y ...).
    Cbhd(CbhdArgs),
    /// Faa di Bruno data: Bell polynomials, coproduct, dual bracket, primitives.
    Faadibruno(FdbArgs),
}

#[derive(Args)]
struct EulerianArgs {
    /// Idempotent index n (π_n).
    #[arg(long)]
    n: usize,
    /// Word length (= grading degree).
    #[arg(long)]
    degree: usize,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct CbhdArgs {
    /// Number of exponential factors.
    #[arg(long, default_value_t = 2)]
    letters: usize,
    /// Homogeneous order m of the term Φ_m.
    #[arg(long)]
    order: usize,
    /// Emit nested commutators instead of the word expansion.
    #[arg(long)]
    commutators: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct FdbArgs {
    #[arg(long)]
    op: FdbOp,
    #[arg(long)]
    n: usize,
    /// Second index (Bell k, or m in the bracket [b'_n, b'_m]).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FdbOp {
    Bell,
    Coproduct,
    Bracket,
    Primitives,
}

#[derive(Subcommand)]
enum VerifyTopic {
    /// Rota-Baxter axiom residuals on a concrete carrier.
    Rb(RbArgs),
    /// Spitzer-type and Bohnenblust-Spitzer identities.
    Spitzer(SpitzerArgs),
    /// The full identity battery across all modules.
    All(AllArgs),
}

#[derive(Args)]
struct RbArgs {
    #[arg(long)]
    instance: RbInstance,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weight θ as "p/q" (for jackson: the deformation parameter q in (0,1)).
    #[arg(long, default_value = "1")]
    theta: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, ValueEnum, Debug)]
enum RbInstance {
    Riemann,
    Summation,
    Jackson,
    Projection,
}

#[derive(Args)]
struct SpitzerArgs {
    #[arg(long)]
    variant: SpitzerVariant,
    /// Weight θ as "p/q".
    #[arg(long, default_value = "1")]
    theta: String,
    /// Truncation order of the series carrier.
    #[arg(long, default_value_t = 5)]
    order: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, ValueEnum, Debug)]
enum SpitzerVariant {
    Classical,
    Nc,
    Bohnenblust,
    NcBohnenblust,
    Lam,
}

#[derive(Args)]
struct AllArgs {
    #[arg(long, default_value_t = 4)]
    order: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum SolveTopic {
    /// Fundamental flow of Ḟ = A(t)F.
    LinearOde(LinearOdeArgs),
    /// Scalar Riccati equation via the sl(2) superposition rule.
    Riccati(RiccatiArgs),
}

#[derive(Args)]
struct LinearOdeArgs {
    /// "airy", "preset:<name>", or "coeffs:<json>" (matrix of expressions in t).
    #[arg(long)]
    system: String,
    /// "magnus4", "magnus2", or "dyson:<depth>".
    #[arg(long, default_value = "magnus4")]
    method: String,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long, default_value_t = 1.0)]
    t1: f64,
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    /// "csv" or "json" for stdout, or a file path (format from extension).
    #[arg(long, default_value = "csv")]
    out: String,
    /// Append a per-node error column against a fine RK4 oracle.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct RiccatiArgs {
    /// Coefficient a₀(t): polynomial in t with sin/cos/exp, e.g. "1+t^2*sin(t)".
    #[arg(long)]
    a0: String,
    #[arg(long)]
    a1: String,
    #[arg(long)]
    a2: String,
    /// Comma-separated initial values; "inf" selects the point at infinity.
    #[arg(long, default_value = "0")]
    x0: String,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long, default_value_t = 0.5)]
    t1: f64,
    #[arg(long, default_value_t = 0.001)]
    h: f64,
    /// "csv" or "json" for stdout, or a file path (format from extension).
    #[arg(long, default_value = "csv")]
    out: String,
}

// ---------------------------------------------------------------------------
// Expression micro-grammar: polynomials in t with sin, cos, exp
// ---------------------------------------------------------------------------

/// expr := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*;
/// unary := '-' unary | power; power := atom ('^' uint)?;
/// atom := number | 't' | ('sin'|'cos'|'exp') '(' expr ')' | '(' expr ')'
#[derive(Debug, Clone)]
pub enum Expr {
    Num(f64),
    T,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Num(c) => *c,
            Expr::T => t,
            Expr::Neg(a) => -a.eval(t),
            Expr::Add(a, b) => a.eval(t) + b.eval(t),
            Expr::Sub(a, b) => a.eval(t) - b.eval(t),
            Expr::Mul(a, b) => a.eval(t) * b.eval(t),
            Expr::Div(a, b) => a.eval(t) / b.eval(t),
            Expr::Pow(a, k) => a.eval(t).powi(*k as i32),
            Expr::Sin(a) => a.eval(t).sin(),
            Expr::Cos(a) => a.eval(t).cos(),
            Expr::Exp(a) => a.eval(t).exp(),
        }
    }
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, String> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, String> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, String> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, String> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err("expected integer exponent after '^'".into());
            }
            let k: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| "exponent out of range".to_string())?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err("missing ')'".into());
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse()
                    .map(Expr::Num)
                    .map_err(|_| "bad number".to_string())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match name {
                    "t" => Ok(Expr::T),
                    "sin" | "cos" | "exp" => {
                        if self.peek() != Some(b'(') {
                            return Err(format!("expected '(' after {name}"));
                        }
                        self.pos += 1;
                        let inner = Box::new(self.expr()?);
                        if self.peek() != Some(b')') {
                            return Err("missing ')'".into());
                        }
                        self.pos += 1;
                        Ok(match name {
                            "sin" => Expr::Sin(inner),
                            "cos" => Expr::Cos(inner),
                            _ => Expr::Exp(inner),
                        })
                    }
                    other => Err(format!("unknown identifier '{other}'")),
                }
            }
            _ => Err("unexpected end of expression".into()),
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr, String> {
    let mut p = ExprParser { src: s.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(format!("trailing input at byte {} of '{s}'", p.pos));
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Runs the CLI on the given argv (including the program name) and returns
/// the process exit code (0 ok, 1 check failed, 2 usage error).
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let threads = match read_threads() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    match dispatch(cli.cmd, threads) {
        Ok(code) => code,
        Err(CliFailure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliFailure::Check(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

enum CliFailure {
    Usage(String),
    Check(String),
}

fn usage(msg: impl Into<String>) -> CliFailure {
    CliFailure::Usage(msg.into())
}

fn read_threads() -> Result<usize, String> {
    match std::env::var("HOPFFLOW_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| format!("HOPFFLOW_THREADS must be a positive integer, got '{v}'")),
        Err(_) => Ok(1),
    }
}

fn parse_q(s: &str) -> Result<Q, CliFailure> {
    Q::from_str(s).map_err(|_| usage(format!("expected a rational 'p/q', got '{s}'")))
}

fn emit(text: &str, out: Option<&str>) -> Result<(), CliFailure> {
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| usage(format!("cannot write {path}: {e}"))),
    }
}

fn emit_report(report: &Report, out: Option<&str>) -> Result<(), CliFailure> {
    emit(&serde_json::to_string_pretty(report).unwrap(), out)
}

fn dispatch(cmd: Cmd, threads: usize) -> Result<i32, CliFailure> {
    match cmd {
        Cmd::Expand { topic } => match topic {
            ExpandTopic::Eulerian(a) => expand_eulerian(a),
            ExpandTopic::Cbhd(a) => expand_cbhd(a),
            ExpandTopic::Faadibruno(a) => expand_faadibruno(a),
        },
        Cmd::Verify { topic } => match topic {
            VerifyTopic::Rb(a) => verify_rb(a, threads),
            VerifyTopic::Spitzer(a) => verify_spitzer(a, threads),
            VerifyTopic::All(a) => verify_all(a, threads),
        },
        Cmd::Solve { topic } => match topic {
            SolveTopic::LinearOde(a) => solve_linear_ode(a),
            SolveTopic::Riccati(a) => solve_riccati(a),
        },
    }
}

// ---------------------------------------------------------------------------
// expand
// ---------------------------------------------------------------------------

fn rational_string(c: &Q) -> String {
    format!("{c}")
}

fn expand_eulerian(a: EulerianArgs) -> Result<i32, CliFailure> {
    if a.n == 0 || a.degree == 0 || a.n > a.degree {
        return Err(usage("require 1 <= n <= degree"));
    }
    if a.degree > 8 {
        return Err(usage("degree capped at 8"));
    }
    let endo = idempotents::eulerian(a.n, HopfSide::ConcatUnshuffle, a.degree, a.degree)
        .map_err(|e| usage(format!("{e}")))?;
    let word = Word((0..a.degree).collect());
    let poly = endo.apply_word(&word);
    let doc = serde_json::json!({
        "op": "eulerian",
        "n": a.n,
        "degree": a.degree,
        "text": poly.canonical_text(),
        "terms": poly.to_json_terms(),
    });
    emit(&serde_json::to_string_pretty(&doc).unwrap(), a.out.as_deref())?;
    Ok(0)
}

fn bracket_text(tree: &cbhd::BracketTree, names: &[char]) -> String {
    match tree {
        cbhd::BracketTree::Leaf(i) => names[*i].to_string(),
        cbhd::BracketTree::Node(l, r) => {
            format!("[{},{}]", bracket_text(l, names), bracket_text(r, names))
        }
    }
}

/// Merges bracket terms that are equal as Lie elements (by comparing their
/// free-algebra expansions up to sign) and drops the ones expanding to zero.
fn simplify_brackets(terms: Vec<cbhd::BracketTerm>) -> Vec<cbhd::BracketTerm> {
    // key, representative tree, its sign vs the key polynomial, Σ cᵢsᵢ
    struct Group {
        key: String,
        tree: cbhd::BracketTree,
        rep_sign: Q,
        acc: Q,
    }
    let mut groups: Vec<Group> = Vec::new();
    for t in terms {
        let expansion = t.tree.expand();
        let lead_negative = match expansion.terms().next() {
            None => continue, // the tree is zero as a Lie element
            Some((_, c)) => c < &Q::zero(),
        };
        let (key_poly, sign) = if lead_negative {
            (expansion.scale(&-Q::one()), -Q::one())
        } else {
            (expansion, Q::one())
        };
        let key = key_poly.canonical_text();
        match groups.iter_mut().find(|g| g.key == key) {
            Some(g) => g.acc += t.coefficient * &sign,
            None => groups.push(Group {
                key,
                tree: t.tree,
                rep_sign: sign.clone(),
                acc: t.coefficient * &sign,
            }),
        }
    }
    groups
        .into_iter()
        .map(|g| cbhd::BracketTerm { coefficient: &g.rep_sign * g.acc, tree: g.tree })
        .filter(|t| !t.coefficient.is_zero())
        .collect()
}

fn expand_cbhd(a: CbhdArgs) -> Result<i32, CliFailure> {
    if a.letters < 2 || a.letters > 4 {
        return Err(usage("letters must be 2..4"));
    }
    if a.order == 0 || a.order > 8 {
        return Err(usage("order must be 1..8"));
    }
    let poly = cbhd::phi_m(a.letters, a.order);
    let names: Vec<char> = "XYZW".chars().take(a.letters).collect();
    let doc = if a.commutators {
        let terms =
            simplify_brackets(cbhd::to_nested_commutators(&poly).map_err(|e| usage(format!("{e}")))?);
        let items: Vec<serde_json::Value> = terms
            .iter()
            .map(|t| {
                serde_json::json!({
                    "coefficient": rational_string(&t.coefficient),
                    "bracket": bracket_text(&t.tree, &names),
                })
            })
            .collect();
        serde_json::json!({
            "op": "cbhd",
            "letters": a.letters,
            "order": a.order,
            "form": "commutators",
            "terms": items,
        })
    } else {
        serde_json::json!({
            "op": "cbhd",
            "letters": a.letters,
            "order": a.order,
            "form": "words",
            "text": poly.canonical_text(),
            "terms": poly.to_json_terms(),
        })
    };
    emit(&serde_json::to_string_pretty(&doc).unwrap(), a.out.as_deref())?;
    Ok(0)
}

fn mono_text(m: &fdb::Mono) -> String {
    if m.is_empty() {
        return "1".into();
    }
    m.iter()
        .map(|&(n, e)| if e == 1 { format!("a{n}") } else { format!("a{n}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

fn poly_json(p: &fdb::FdBPoly) -> Vec<serde_json::Value> {
    p.terms
        .iter()
        .map(|(m, c)| {
            serde_json::json!({"monomial": mono_text(m), "coefficient": rational_string(c)})
        })
        .collect()
}

fn expand_faadibruno(a: FdbArgs) -> Result<i32, CliFailure> {
    if a.n == 0 || a.n > 10 {
        return Err(usage("n must be 1..10"));
    }
    let doc = match a.op {
        FdbOp::Bell => {
            let k = a.k.ok_or_else(|| usage("--k required for --op bell"))?;
            let p = fdb::bell_poly_reduced(a.n, k).map_err(|e| usage(format!("{e}")))?;
            serde_json::json!({
                "op": "bell",
                "n": a.n,
                "k": k,
                "terms": poly_json(&p),
            })
        }
        FdbOp::Coproduct => {
            let t = fdb::fdb_coproduct(a.n);
            let items: Vec<serde_json::Value> = t
                .terms
                .iter()
                .map(|((l, r), c)| {
                    serde_json::json!({
                        "left": mono_text(l),
                        "right": mono_text(r),
                        "coefficient": rational_string(c),
                    })
                })
                .collect();
            serde_json::json!({"op": "coproduct", "n": a.n, "terms": items})
        }
        FdbOp::Bracket => {
            let m = a.k.ok_or_else(|| usage("--k required for --op bracket"))?;
            if m == 0 || a.n + m > 10 {
                return Err(usage("require 1 <= k and n + k <= 10"));
            }
            let br = fdb::dual_bracket(a.n, m);
            let items: Vec<serde_json::Value> = br
                .values
                .iter()
                .map(|(mono, c)| {
                    serde_json::json!({
                        "monomial": mono_text(mono),
                        "value": rational_string(c),
                    })
                })
                .collect();
            serde_json::json!({
                "op": "bracket",
                "n": a.n,
                "m": m,
                "identity": format!("[b'_{}, b'_{}] = {}*b'_{}", a.n, m, m as i64 - a.n as i64, a.n + m),
                "values": items,
            })
        }
        FdbOp::Primitives => {
            let basis = fdb::primitive_space(a.n);
            let items: Vec<serde_json::Value> =
                basis.iter().map(|p| serde_json::json!(poly_json(p))).collect();
            serde_json::json!({
                "op": "primitives",
                "degree": a.n,
                "dimension": basis.len(),
                "basis": items,
            })
        }
    };
    emit(&serde_json::to_string_pretty(&doc).unwrap(), a.out.as_deref())?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn random_q(rng: &mut ChaCha8Rng, bound: i64) -> Q {
    crate::rat::q(rng.gen_range(-bound..=bound), rng.gen_range(1..=3))
}

fn rb_checks(instance: RbInstance, trials: usize, seed: u64, theta: &Q) -> Result<Vec<Check>, CliFailure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    match instance {
        RbInstance::Projection => {
            let inst = ProjectionRB::new(2, theta.clone())
                .map_err(|e| usage(format!("{e}")))?;
            let mut worst = 0.0f64;
            let mut worst_lie = 0.0f64;
            for _ in 0..trials {
                let a = (random_ratmat(&mut rng, 2, 5), random_ratmat(&mut rng, 2, 5));
                let b = (random_ratmat(&mut rng, 2, 5), random_ratmat(&mut rng, 2, 5));
                worst = worst.max(inst.magnitude(&inst.rb_residual(&a, &b)));
                worst_lie = worst_lie.max(inst.magnitude(&inst.rb_lie_residual(&a, &b)));
            }
            checks.push(Check::exact("rb-residual-projection", "rotabaxter::rb_residual", worst));
            checks.push(Check::exact(
                "rb-lie-residual-projection",
                "rotabaxter::rb_lie_residual",
                worst_lie,
            ));
        }
        RbInstance::Summation => {
            let inst = crate::rotabaxter::SummationRB::new(theta.clone())
                .map_err(|e| usage(format!("{e}")))?;
            let mut worst = 0.0f64;
            for _ in 0..trials {
                let ga = inst
                    .geom(random_q(&mut rng, 4), crate::rat::q(1, rng.gen_range(2..=7)))
                    .unwrap();
                let gb = inst
                    .geom(random_q(&mut rng, 4), crate::rat::q(1, rng.gen_range(2..=7)))
                    .unwrap();
                worst = worst.max(inst.magnitude(&inst.rb_residual(&ga, &gb)));
            }
            checks.push(Check::exact("rb-residual-summation", "rotabaxter::rb_residual", worst));
        }
        RbInstance::Jackson => {
            if *theta <= Q::zero() || *theta >= Q::one() {
                return Err(usage("jackson requires --theta (the q parameter) in (0,1)"));
            }
            for (label, kind) in [("pq", JacksonKind::Pq), ("modified", JacksonKind::Modified)] {
                let inst = JacksonRB::new(theta.clone(), kind)
                    .map_err(|e| usage(format!("{e}")))?;
                let mut worst = 0.0f64;
                for _ in 0..trials {
                    let pa = inst.monomial(random_q(&mut rng, 4), rng.gen_range(1..=5)).unwrap();
                    let pb = inst.monomial(random_q(&mut rng, 4), rng.gen_range(1..=5)).unwrap();
                    worst = worst.max(inst.magnitude(&inst.rb_residual(&pa, &pb)));
                }
                checks.push(Check::exact(
                    &format!("rb-residual-jackson-{label}"),
                    "rotabaxter::rb_residual",
                    worst,
                ));
            }
        }
        RbInstance::Riemann => {
            let inst = RiemannRB::uniform(1.0, 201, 1).map_err(|e| usage(format!("{e}")))?;
            let mut worst = 0.0f64;
            for _ in 0..trials {
                let ca: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let cb: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let pa = inst.sample_scalar(|t| ca.iter().rev().fold(0.0, |acc, c| acc * t + c));
                let pb = inst.sample_scalar(|t| cb.iter().rev().fold(0.0, |acc, c| acc * t + c));
                worst = worst.max(inst.magnitude(&inst.rb_residual(&pa, &pb)));
            }
            checks.push(Check::tol(
                "rb-residual-riemann",
                "rotabaxter::rb_residual",
                worst,
                1e-12,
            ));
        }
    }
    Ok(checks)
}

fn verify_rb(a: RbArgs, threads: usize) -> Result<i32, CliFailure> {
    let start = Instant::now();
    let theta = parse_q(&a.theta)?;
    let checks = rb_checks(a.instance, a.trials, a.seed, &theta)?;
    let config = serde_json::json!({
        "instance": format!("{:?}", a.instance).to_lowercase(),
        "trials": a.trials,
        "seed": a.seed,
        "theta": a.theta,
        "threads": threads,
    });
    let (report, code) = Report::assemble("verify rb", config, checks, start);
    emit_report(&report, a.out.as_deref())?;
    Ok(code)
}

fn spitzer_checks(
    variant: SpitzerVariant,
    theta: &Q,
    order: usize,
    seed: u64,
) -> Result<Vec<Check>, CliFailure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let fail = |e: spitzer::SpitzerError| usage(format!("{e}"));
    match variant {
        SpitzerVariant::Classical => {
            if theta.is_zero() {
                return Err(usage("classical variant requires nonzero theta"));
            }
            let base = ProjectionRB::new(1, theta.clone()).map_err(|e| usage(format!("{e}")))?;
            let inst = SeriesRB::new(base, order.min(6));
            let mut worst = 0.0f64;
            for _ in 0..5 {
                let x = (random_ratmat(&mut rng, 1, 5), random_ratmat(&mut rng, 1, 5));
                let a = inst.monomial(x, 1);
                let r = spitzer::classical_spitzer_residual(&inst, &a).map_err(fail)?;
                worst = worst.max(inst.magnitude(&r));
            }
            checks.push(Check::exact(
                "spitzer-classical",
                "spitzer::classical_spitzer_residual",
                worst,
            ));
        }
        SpitzerVariant::Nc => {
            if theta.is_zero() {
                return Err(usage("nc variant requires nonzero theta"));
            }
            let base = ProjectionRB::new(2, theta.clone()).map_err(|e| usage(format!("{e}")))?;
            let inst = SeriesRB::new(base, order.min(5));
            let mut worst_id = 0.0f64;
            let mut worst_fac = 0.0f64;
            for _ in 0..5 {
                let x = (random_ratmat(&mut rng, 2, 4), random_ratmat(&mut rng, 2, 4));
                let a = inst.monomial(x, 1);
                let r = spitzer::nc_spitzer_residual(&inst, &a).map_err(fail)?;
                worst_id = worst_id.max(inst.magnitude(&r));
                let f = spitzer::chi_theta_factorization_residual(&inst, &a).map_err(fail)?;
                worst_fac = worst_fac.max(inst.magnitude(&f));
            }
            checks.push(Check::exact("spitzer-nc", "spitzer::nc_spitzer_residual", worst_id));
            checks.push(Check::exact(
                "spitzer-nc-factorization",
                "spitzer::chi_theta_factorization_residual",
                worst_fac,
            ));
        }
        SpitzerVariant::Bohnenblust => {
            let inst = crate::rotabaxter::SummationRB::new(theta.clone())
                .map_err(|e| usage(format!("{e}")))?;
            for n in 1..=order.min(5) {
                let mut worst = 0.0f64;
                for _ in 0..10 {
                    let xs: Vec<_> = (0..n)
                        .map(|_| {
                            inst.geom(random_q(&mut rng, 3), crate::rat::q(1, rng.gen_range(2..=6)))
                                .unwrap()
                        })
                        .collect();
                    let (lhs, rhs) = spitzer::bohnenblust_commutative(&inst, &xs).map_err(fail)?;
                    worst = worst.max(inst.magnitude(&inst.sub(&lhs, &rhs)));
                }
                checks.push(Check::exact(
                    &format!("bohnenblust-commutative-n{n}"),
                    "spitzer::bohnenblust_commutative",
                    worst,
                ));
            }
        }
        SpitzerVariant::NcBohnenblust => {
            if theta.is_zero() {
                return Err(usage("nc-bohnenblust requires nonzero theta"));
            }
            let inst = ProjectionRB::new(2, theta.clone()).map_err(|e| usage(format!("{e}")))?;
            for n in 1..=order.min(4) {
                let mut worst = 0.0f64;
                for _ in 0..15 {
                    let xs: Vec<_> = (0..n)
                        .map(|_| (random_ratmat(&mut rng, 2, 4), random_ratmat(&mut rng, 2, 4)))
                        .collect();
                    let (lhs, rhs) = spitzer::nc_bohnenblust(&inst, &xs).map_err(fail)?;
                    worst = worst.max(inst.magnitude(&inst.sub(&lhs, &rhs)));
                }
                checks.push(Check::exact(
                    &format!("bohnenblust-nc-n{n}"),
                    "spitzer::nc_bohnenblust",
                    worst,
                ));
            }
        }
        SpitzerVariant::Lam => {
            if theta.is_zero() {
                return Err(usage("lam variant requires nonzero theta"));
            }
            let base = ProjectionRB::new(2, theta.clone()).map_err(|e| usage(format!("{e}")))?;
            let inst = SeriesRB::new(base, order.min(5));
            let mut worst_level = 0.0f64;
            let mut worst_comp = 0.0f64;
            for _ in 0..5 {
                let x = (random_ratmat(&mut rng, 2, 4), random_ratmat(&mut rng, 2, 4));
                let report = spitzer::lam_expansion(&inst, &x).map_err(fail)?;
                worst_level = report
                    .rb_level_magnitudes
                    .iter()
                    .fold(worst_level, |acc, &m| acc.max(m));
                worst_comp = worst_comp.max(report.composition_magnitude);
            }
            checks.push(Check::exact("lam-rb-level", "spitzer::rb_level_residual", worst_level));
            checks.push(Check::exact("lam-composition", "spitzer::lam_expansion", worst_comp));
        }
    }
    Ok(checks)
}

fn verify_spitzer(a: SpitzerArgs, threads: usize) -> Result<i32, CliFailure> {
    let start = Instant::now();
    let theta = parse_q(&a.theta)?;
    if a.order == 0 || a.order > 6 {
        return Err(usage("order must be 1..6"));
    }
    let checks = spitzer_checks(a.variant, &theta, a.order, a.seed)?;
    let config = serde_json::json!({
        "variant": format!("{:?}", a.variant),
        "theta": a.theta,
        "order": a.order,
        "seed": a.seed,
        "threads": threads,
    });
    let (report, code) = Report::assemble("verify spitzer", config, checks, start);
    emit_report(&report, a.out.as_deref())?;
    Ok(code)
}

fn verify_all(a: AllArgs, threads: usize) -> Result<i32, CliFailure> {
    let start = Instant::now();
    if a.order == 0 || a.order > 6 {
        return Err(usage("order must be 1..6"));
    }
    let order = a.order;
    let mut checks = Vec::new();

    // Rota-Baxter carriers
    for instance in [
        RbInstance::Projection,
        RbInstance::Summation,
        RbInstance::Riemann,
    ] {
        checks.extend(rb_checks(instance, 25, a.seed, &Q::one())?);
    }
    checks.extend(rb_checks(RbInstance::Jackson, 25, a.seed, &crate::rat::q(1, 3))?);

    // Spitzer-type identities
    for variant in [
        SpitzerVariant::Classical,
        SpitzerVariant::Nc,
        SpitzerVariant::Bohnenblust,
        SpitzerVariant::NcBohnenblust,
        SpitzerVariant::Lam,
    ] {
        checks.extend(spitzer_checks(variant, &Q::one(), order, a.seed)?);
    }

    // CBHD: the homogeneous-term route agrees with the formal logarithm
    {
        let direct = cbhd::cbhd_log(order.min(5));
        let mut via_phi = crate::freetensor::FreePoly::zero();
        for m in 1..=order.min(5) {
            via_phi = via_phi.add(&cbhd::phi_m(2, m));
        }
        let diff = direct.sub(&via_phi);
        let residual = diff
            .terms()
            .map(|(_, c)| q_to_f64(c).abs())
            .fold(0.0, f64::max);
        checks.push(Check::exact("cbhd-phi-consistency", "cbhd::cbhd_via_phi", residual));
    }

    // Eulerian idempotents: orthogonality and partition of unity
    {
        let deg = order.min(4);
        let id = idempotents::GradedEndo::identity(HopfSide::ConcatUnshuffle, deg, deg);
        let mut total = id.zero_like();
        let mut worst = 0.0f64;
        let projectors: Vec<_> = (1..=deg)
            .map(|n| idempotents::eulerian(n, HopfSide::ConcatUnshuffle, deg, deg).unwrap())
            .collect();
        for (i, p) in projectors.iter().enumerate() {
            total = total.add(p).unwrap();
            for (j, r) in projectors.iter().enumerate() {
                let prod = p.compose(r).unwrap();
                let expected = if i == j { p.clone() } else { p.zero_like() };
                let diff = prod.sub(&expected).unwrap();
                if !diff.is_zero() {
                    worst = worst.max(1.0);
                }
            }
        }
        // Σπ_n = id on degrees 1..deg: compare via difference of actions
        let diff = total.sub(&id).unwrap();
        let mut id_residual = 0.0;
        for d in 1..=deg {
            let w = Word((0..d).collect());
            let p = diff.apply_word(&w);
            id_residual = p
                .terms()
                .map(|(_, c)| q_to_f64(c).abs())
                .fold(id_residual, f64::max);
        }
        checks.push(Check::exact("eulerian-orthogonality", "idempotents::eulerian", worst));
        checks.push(Check::exact("eulerian-partition-of-unity", "idempotents::eulerian", id_residual));
    }

    // Magnus: symbolic Ω = R(χ⁰) on the integration-series carrier
    {
        let inst = crate::rotabaxter::IntSeriesRB::new(2, order.min(4));
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let x = random_ratmat(&mut rng, 2, 3);
        let elem = inst.monomial(x, 0);
        let omegas = magnus::omega_terms(order.min(4));
        let chi = spitzer::chi_zero(&inst, &elem).map_err(|e| usage(format!("{e}")))?;
        let direct = inst.apply_r(&chi);
        let mut symbolic = inst.zero();
        for om in &omegas {
            symbolic = inst.add(&symbolic, &magnus::eval_sym_comb(&inst, om, &elem));
        }
        let residual = inst.magnitude(&inst.sub(&direct, &symbolic));
        checks.push(Check::exact("magnus-pre-magnus-bridge", "magnus::omega_terms", residual));
    }

    // Chen <-> Magnus coefficient tables are mutually inverse
    {
        let n = order.min(6);
        let c2m = magnus::chen_to_magnus(n);
        let m2c = magnus::magnus_to_chen(n);
        let mut worst = 0.0f64;
        for k in 1..=n {
            let round = magnus::substitute(&c2m[k - 1], &m2c, n);
            let mut expect = magnus::CompPoly::zero();
            expect.add_term(vec![k], Q::one());
            let mut diff = round;
            diff.add_term(vec![k], -Q::one());
            for (_, c) in diff.terms.iter() {
                worst = worst.max(q_to_f64(c).abs());
            }
        }
        checks.push(Check::exact("magnus-chen-roundtrip", "magnus::chen_to_magnus", worst));
    }

    // Numeric Magnus order-4 spot check on the Airy-type system
    {
        let airy = SampledMatrixFn::airy();
        let flow = magnus_solve(&airy, 0.0, 1.0, 0.125, 4).map_err(|e| usage(format!("{e}")))?;
        let oracle = rk4_flow(&airy, 0.0, 1.0, 20000);
        let err = matrix_max_abs(&(flow.flows.last().unwrap() - oracle));
        checks.push(Check::tol("magnus4-airy-error", "magnus::magnus_solve", err, 1e-4));
        let det_defect = flow
            .dets
            .iter()
            .map(|d| (d - 1.0).abs())
            .fold(0.0, f64::max);
        checks.push(Check::tol("magnus4-det-defect", "magnus::magnus_solve", det_defect, 1e-10));
    }

    // Riccati: ẋ = 1 + x² from 0 reaches tan(t)
    {
        let c = RiccatiCoeffs::constant(1.0, 0.0, 1.0);
        let x = crate::scheffers::riccati_general(&c, 0.0, 0.0, 0.5, 0.001)
            .map_err(|e| usage(format!("{e}")))?;
        let err = (x - 0.5f64.tan()).abs();
        checks.push(Check::tol("riccati-tangent", "scheffers::riccati_general", err, 1e-8));
    }

    // Faa di Bruno: composition vs the chain-rule oracle; b' bracket table
    {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed ^ 0x5eed);
        let nmax = (order + 2).min(8);
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let f = fdb::ExpSeries::new((0..nmax).map(|_| random_q(&mut rng, 4)).collect());
            let g = fdb::ExpSeries::new((0..nmax).map(|_| random_q(&mut rng, 4)).collect());
            let lhs = fdb::compose_series(&f, &g, nmax);
            let rhs = fdb::compose_series_oracle(&f, &g, nmax);
            for n in 1..=nmax {
                worst = worst.max(q_to_f64(&(lhs.coeff(n) - rhs.coeff(n))).abs());
            }
        }
        checks.push(Check::exact("faadibruno-compose", "faadibruno::compose_series", worst));
        let mut worst_br = 0.0f64;
        for n in 1..=3usize {
            for m in 1..=3usize {
                let br = fdb::dual_bracket(n, m);
                let expect =
                    fdb::Functional::b_prime(n + m).scale(&crate::rat::qi(m as i64 - n as i64));
                let diff = br.sub(&expect);
                for (_, v) in diff.values.iter() {
                    worst_br = worst_br.max(q_to_f64(v).abs());
                }
            }
        }
        checks.push(Check::exact("faadibruno-bracket", "faadibruno::dual_bracket", worst_br));
    }

    let config = serde_json::json!({
        "order": order,
        "seed": a.seed,
        "threads": threads,
    });
    let (report, code) = Report::assemble("verify all", config, checks, start);
    emit_report(&report, a.out.as_deref())?;
    Ok(code)
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

enum SolveOutput<'a> {
    StdoutCsv,
    StdoutJson,
    File(&'a str, bool), // path, json?
}

fn parse_out(out: &str) -> SolveOutput<'_> {
    match out {
        "csv" => SolveOutput::StdoutCsv,
        "json" => SolveOutput::StdoutJson,
        path => SolveOutput::File(path, path.ends_with(".json")),
    }
}

fn write_solve_output(csv: String, json: serde_json::Value, out: &str) -> Result<(), CliFailure> {
    match parse_out(out) {
        SolveOutput::StdoutCsv => {
            print!("{csv}");
            Ok(())
        }
        SolveOutput::StdoutJson => {
            println!("{}", serde_json::to_string_pretty(&json).unwrap());
            Ok(())
        }
        SolveOutput::File(path, as_json) => {
            let body = if as_json {
                format!("{}\n", serde_json::to_string_pretty(&json).unwrap())
            } else {
                csv
            };
            std::fs::write(path, body).map_err(|e| usage(format!("cannot write {path}: {e}")))
        }
    }
}

fn build_system(sys: &str) -> Result<SampledMatrixFn, CliFailure> {
    if sys == "airy" {
        return Ok(SampledMatrixFn::airy());
    }
    if let Some(name) = sys.strip_prefix("preset:") {
        return SampledMatrixFn::preset(name)
            .ok_or_else(|| usage(format!("unknown preset '{name}'")));
    }
    if let Some(body) = sys.strip_prefix("coeffs:") {
        let rows: Vec<Vec<serde_json::Value>> = serde_json::from_str(body)
            .map_err(|e| usage(format!("coeffs must be a JSON matrix: {e}")))?;
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(usage("coeffs must be a nonempty square matrix"));
        }
        let mut exprs = Vec::with_capacity(dim * dim);
        for row in &rows {
            for cell in row {
                let text = match cell {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Number(n) => n.to_string(),
                    other => return Err(usage(format!("bad matrix entry {other}"))),
                };
                exprs.push(parse_expr(&text).map_err(usage)?);
            }
        }
        return Ok(SampledMatrixFn::new(dim, move |t| {
            DMatrix::from_fn(dim, dim, |i, j| exprs[i * dim + j].eval(t))
        }));
    }
    Err(usage(format!(
        "system must be 'airy', 'preset:<name>', or 'coeffs:<json>', got '{sys}'"
    )))
}

fn run_flow(
    a: &SampledMatrixFn,
    method: &str,
    t0: f64,
    t1: f64,
    h: f64,
) -> Result<FlowResult, CliFailure> {
    let fail = |e: magnus::MagnusError| CliFailure::Check(format!("{e}"));
    match method {
        "magnus4" => magnus_solve(a, t0, t1, h, 4).map_err(fail),
        "magnus2" => magnus_solve(a, t0, t1, h, 2).map_err(fail),
        other => {
            if let Some(d) = other.strip_prefix("dyson:") {
                let depth: usize = d
                    .parse()
                    .ok()
                    .filter(|&d| d >= 1)
                    .ok_or_else(|| usage(format!("bad dyson depth '{d}'")))?;
                dyson_solve(a, t0, t1, h, depth).map_err(fail)
            } else {
                Err(usage(format!(
                    "method must be magnus4, magnus2, or dyson:<depth>, got '{other}'"
                )))
            }
        }
    }
}

/// RK4 oracle flow evaluated at every node of the output grid.
fn oracle_flows(a: &SampledMatrixFn, times: &[f64], substeps: usize) -> Vec<DMatrix<f64>> {
    let k = a.dim;
    let mut f = DMatrix::<f64>::identity(k, k);
    let mut out = vec![f.clone()];
    for w in times.windows(2) {
        let h = (w[1] - w[0]) / substeps as f64;
        for i in 0..substeps {
            let t = w[0] + i as f64 * h;
            let k1 = a.eval(t) * &f;
            let k2 = a.eval(t + h / 2.0) * (&f + &k1 * (h / 2.0));
            let k3 = a.eval(t + h / 2.0) * (&f + &k2 * (h / 2.0));
            let k4 = a.eval(t + h) * (&f + &k3 * h);
            f += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        out.push(f.clone());
    }
    out
}

fn solve_linear_ode(a: LinearOdeArgs) -> Result<i32, CliFailure> {
    if !(a.h > 0.0) || a.t1 <= a.t0 {
        return Err(usage("require h > 0 and t1 > t0"));
    }
    let system = build_system(&a.system)?;
    let flow = run_flow(&system, &a.method, a.t0, a.t1, a.h)?;
    let k = system.dim;
    let errs: Option<Vec<f64>> = if a.oracle {
        let oracle = oracle_flows(&system, &flow.times, 64);
        Some(
            flow.flows
                .iter()
                .zip(&oracle)
                .map(|(f, o)| matrix_max_abs(&(f - o)))
                .collect(),
        )
    } else {
        None
    };

    let mut csv = String::from("t");
    for i in 0..k {
        for j in 0..k {
            csv.push_str(&format!(",f{i}{j}"));
        }
    }
    csv.push_str(",det");
    if errs.is_some() {
        csv.push_str(",err");
    }
    csv.push('\n');
    for (idx, t) in flow.times.iter().enumerate() {
        csv.push_str(&format!("{t:.12}"));
        let f = &flow.flows[idx];
        for i in 0..k {
            for j in 0..k {
                csv.push_str(&format!(",{:.12e}", f[(i, j)]));
            }
        }
        csv.push_str(&format!(",{:.12e}", flow.dets[idx]));
        if let Some(e) = &errs {
            csv.push_str(&format!(",{:.12e}", e[idx]));
        }
        csv.push('\n');
    }

    let json = serde_json::json!({
        "command": "solve linear-ode",
        "method": flow.method,
        "times": flow.times,
        "flows": flow.flows.iter().map(|f| {
            (0..k).map(|i| (0..k).map(|j| f[(i, j)]).collect::<Vec<_>>()).collect::<Vec<_>>()
        }).collect::<Vec<_>>(),
        "dets": flow.dets,
        "err": errs,
    });
    write_solve_output(csv, json, &a.out)?;
    Ok(0)
}

fn solve_riccati(a: RiccatiArgs) -> Result<i32, CliFailure> {
    if !(a.h > 0.0) || a.t1 <= a.t0 {
        return Err(usage("require h > 0 and t1 > t0"));
    }
    let e0 = parse_expr(&a.a0).map_err(usage)?;
    let e1 = parse_expr(&a.a1).map_err(usage)?;
    let e2 = parse_expr(&a.a2).map_err(usage)?;
    let coeffs = RiccatiCoeffs::new(
        move |t| e0.eval(t),
        move |t| e1.eval(t),
        move |t| e2.eval(t),
    );
    let x0s: Vec<f64> = a
        .x0
        .split(',')
        .map(|s| {
            let s = s.trim();
            if s.eq_ignore_ascii_case("inf") {
                Ok(f64::INFINITY)
            } else {
                s.parse::<f64>()
                    .map_err(|_| usage(format!("bad initial value '{s}'")))
            }
        })
        .collect::<Result<_, _>>()?;
    if x0s.is_empty() {
        return Err(usage("--x0 must list at least one initial value"));
    }
    let u = solve_u_system(&coeffs, a.t0, a.t1, a.h)
        .map_err(|e| CliFailure::Check(format!("{e}")))?;
    let mut curves = Vec::with_capacity(x0s.len());
    for &x0 in &x0s {
        curves.push(
            riccati_general_curve(&u, x0).map_err(|e| CliFailure::Check(format!("{e}")))?,
        );
    }

    let mut csv = String::from("t");
    for &x0 in &x0s {
        csv.push_str(&format!(",x[x0={x0}]"));
    }
    csv.push('\n');
    for (i, t) in u.times.iter().enumerate() {
        csv.push_str(&format!("{t:.12}"));
        for c in &curves {
            csv.push_str(&format!(",{:.12e}", c[i]));
        }
        csv.push('\n');
    }
    let json = serde_json::json!({
        "command": "solve riccati",
        "times": u.times,
        "x0": x0s,
        "curves": curves,
    });
    write_solve_output(csv, json, &a.out)?;
    Ok(0)
}
