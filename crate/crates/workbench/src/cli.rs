//! Command dispatch. Exit codes: 0 success or zero verdict, 1 nonzero or
//! negative verdict, 2 usage, input or precondition errors.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use jetcalc_core::diffops::{pairing, DiffOperator};
use jetcalc_core::poisson::{HamiltonianVerdict, PoissonSetup, Verdict};
use jetcalc_core::variational::{euler, is_divergence};
use jetcalc_core::{DiffFunction, Signature};

use crate::assess::{assess, jacobi_verdict_name, verdict_name};
use crate::parse::{parse_expression, parse_operator, parse_tuple, ParseError};
use crate::report::{Check, Report, SetupDigest, SCHEMA_VERSION};
use crate::setup::{load_setup, Setup};
use crate::{corpus, validate};

#[derive(Parser, Debug)]
#[command(name = "jetcalc", version, about = "Differential polynomials, Lagrange adjoints and Hamiltonian-operator checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// A .setup file declaring variables and named operators.
    #[arg(long, global = true, value_name = "PATH")]
    pub setup: Option<PathBuf>,
    /// A differential function; repeat for several.
    #[arg(long = "expr", global = true, value_name = "STR")]
    pub exprs: Vec<String>,
    /// An operator expression or a name from the setup; repeat for several.
    #[arg(long = "op", global = true, value_name = "STR|NAME")]
    pub ops: Vec<String>,
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for sampled checks; defaults to the setup's `seed` option.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Witness-search monomial degree.
    #[arg(long, global = true, value_name = "N")]
    pub max_degree: Option<u32>,
    /// Witness-search jet order.
    #[arg(long, global = true, value_name = "N")]
    pub max_order: Option<u32>,
    /// Search for a violating triple when the universal check fails.
    #[arg(long, global = true)]
    pub search: bool,
    /// Include wall-clock timings (reports are then no longer reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Samples per facet for `validate`.
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Variational derivative of each --expr.
    Euler,
    /// Lagrange adjoint of each --op.
    Adjoint,
    /// Composition of the --op operators, left to right.
    Compose,
    /// Green current for --op P, --expr f, --expr g.
    Green,
    /// Fréchet derivative of each --expr.
    Frechet,
    /// Bracket representative for --op Λ, --expr K, --expr L.
    Bracket,
    /// Jacobi residuals for --op Λ and three --expr, or the universal check.
    Jacobi,
    /// Full Hamiltonian assessment of each --op.
    Hamiltonian,
    /// Sampled checks of the structural assumptions.
    Validate,
    /// Runs the shipped corpus against its locked verdicts.
    Corpus,
}

pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

#[derive(Debug)]
struct Failure(String);

impl Failure {
    fn parse(what: &str, text: &str, e: &ParseError) -> Self {
        let caret = " ".repeat(text[..e.position.min(text.len())].chars().count());
        Failure(format!("{what}: {e}\n  {text}\n  {caret}^"))
    }
}

struct Context {
    cli: Cli,
    setup: Setup,
    argv: Vec<String>,
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output { stdout: text, stderr: String::new(), code }
            } else {
                Output { stdout: String::new(), stderr: text, code }
            };
        }
    };
    let argv = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let setup = match &cli.setup {
        Some(path) => match load_setup(path) {
            Ok(s) => s,
            Err(e) => return fail(format!("setup {}: {e}", path.display())),
        },
        None => Setup::bare(Signature::scalar()),
    };
    let json = cli.json;
    let ctx = Context { cli, setup, argv };
    match execute(&ctx) {
        Ok(report) => {
            let stdout = if json { report.to_json() + "\n" } else { report.to_text() };
            Output { stdout, stderr: String::new(), code: report.exit_code }
        }
        Err(Failure(msg)) => fail(msg),
    }
}

fn fail(msg: String) -> Output {
    Output { stdout: String::new(), stderr: format!("error: {msg}\n"), code: 2 }
}

impl Context {
    fn sig(&self) -> &Signature {
        &self.setup.signature
    }

    fn seed(&self) -> u64 {
        self.cli.seed.unwrap_or(self.setup.options.seed)
    }

    fn max_degree(&self) -> u32 {
        self.cli.max_degree.unwrap_or(self.setup.options.max_degree)
    }

    fn max_order(&self) -> u32 {
        self.cli.max_order.unwrap_or(self.setup.options.max_order)
    }

    fn show(&self, f: &DiffFunction) -> String {
        f.display(self.sig()).to_string()
    }

    fn show_op(&self, op: &DiffOperator) -> String {
        op.display(self.sig()).to_string()
    }

    fn expr(&self, k: usize) -> Result<DiffFunction, Failure> {
        let text = self.cli.exprs.get(k).ok_or_else(|| Failure(format!("missing --expr number {}", k + 1)))?;
        parse_expression(text, self.sig()).map_err(|e| Failure::parse("--expr", text, &e))
    }

    fn tuple(&self, k: usize) -> Result<Vec<DiffFunction>, Failure> {
        let text = self.cli.exprs.get(k).ok_or_else(|| Failure(format!("missing --expr number {}", k + 1)))?;
        parse_tuple(text, self.sig()).map_err(|e| Failure::parse("--expr", text, &e))
    }

    fn op(&self, k: usize) -> Result<(String, DiffOperator), Failure> {
        let text = self.cli.ops.get(k).ok_or_else(|| Failure(format!("missing --op number {}", k + 1)))?;
        if let Some(op) = self.setup.operators.get(text) {
            return Ok((text.clone(), op.clone()));
        }
        parse_operator(text, self.sig()).map(|op| (text.clone(), op)).map_err(|e| Failure::parse("--op", text, &e))
    }

    fn ops(&self) -> Result<Vec<(String, DiffOperator)>, Failure> {
        if self.cli.ops.is_empty() {
            return Err(Failure("at least one --op is required".into()));
        }
        (0..self.cli.ops.len()).map(|k| self.op(k)).collect()
    }

    fn poisson(&self, k: usize) -> Result<(String, PoissonSetup), Failure> {
        let (name, op) = self.op(k)?;
        PoissonSetup::new(self.sig().clone(), op).map(|p| (name.clone(), p)).map_err(|e| Failure(format!("--op {name}: {e}")))
    }

    fn timed<T>(&self, check: impl FnOnce() -> T) -> (T, Option<f64>) {
        let start = Instant::now();
        let out = check();
        (out, self.cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3))
    }
}

fn execute(ctx: &Context) -> Result<Report, Failure> {
    let (checks, code) = match ctx.cli.command {
        Command::Euler => euler_cmd(ctx)?,
        Command::Adjoint => adjoint_cmd(ctx)?,
        Command::Compose => compose_cmd(ctx)?,
        Command::Green => green_cmd(ctx)?,
        Command::Frechet => frechet_cmd(ctx)?,
        Command::Bracket => bracket_cmd(ctx)?,
        Command::Jacobi => jacobi_cmd(ctx)?,
        Command::Hamiltonian => hamiltonian_cmd(ctx)?,
        Command::Validate => validate_cmd(ctx),
        Command::Corpus => corpus_cmd(ctx)?,
    };
    let setup = ctx.cli.setup.as_ref().map(|_| SetupDigest::of(&ctx.setup));
    Ok(Report { schema_version: SCHEMA_VERSION, command: ctx.argv.clone(), setup, checks, exit_code: code })
}

type Checks = (Vec<Check>, i32);

fn require_exprs(ctx: &Context, n: usize) -> Result<(), Failure> {
    if ctx.cli.exprs.len() < n {
        return Err(Failure(format!("expected {n} --expr argument(s), got {}", ctx.cli.exprs.len())));
    }
    Ok(())
}

fn euler_cmd(ctx: &Context) -> Result<Checks, Failure> {
    require_exprs(ctx, 1)?;
    let mut checks = Vec::new();
    for k in 0..ctx.cli.exprs.len() {
        let l = ctx.expr(k)?;
        let (delta, t) = ctx.timed(|| euler(&l, ctx.sig()));
        let mut c = Check::new("euler").value("L", ctx.show(&l));
        for (a, d) in delta.iter().enumerate() {
            c = c.value(format!("δ{}", ctx.sig().dependent()[a]), ctx.show(d));
        }
        c.timing_ms = t;
        checks.push(c);
    }
    Ok((checks, 0))
}

fn adjoint_cmd(ctx: &Context) -> Result<Checks, Failure> {
    let checks = ctx
        .ops()?
        .into_iter()
        .map(|(name, op)| {
            let (adj, t) = ctx.timed(|| op.adjoint());
            let mut c = Check::new("adjoint")
                .value("P", ctx.show_op(&op))
                .value("P*", ctx.show_op(&adj))
                .value("skew_adjoint", adj == -&op);
            c.detail = Some(serde_json::json!({ "source": name }));
            c.timing_ms = t;
            c
        })
        .collect();
    Ok((checks, 0))
}

fn compose_cmd(ctx: &Context) -> Result<Checks, Failure> {
    let ops = ctx.ops()?;
    let mut it = ops.iter();
    let (_, first) = it.next().expect("nonempty");
    let mut acc = first.clone();
    for (name, op) in it {
        acc = acc.compose(op).map_err(|e| Failure(format!("--op {name}: {e}")))?;
    }
    let c = Check::new("compose").value("result", ctx.show_op(&acc));
    Ok((vec![c], 0))
}

fn green_cmd(ctx: &Context) -> Result<Checks, Failure> {
    require_exprs(ctx, 2)?;
    let (_, p) = ctx.op(0)?;
    let (f, g) = (ctx.tuple(0)?, ctx.tuple(1)?);
    let bad = |e: jetcalc_core::Error| Failure(format!("green: {e}"));
    let (result, t) = ctx.timed(|| -> Result<_, Failure> {
        let psi = p.green_current(&f, &g, ctx.sig().m()).map_err(bad)?;
        let lhs = pairing(&f, &p.apply(&g).map_err(bad)?) - pairing(&p.adjoint().apply(&f).map_err(bad)?, &g);
        let residual = lhs - psi.divergence();
        Ok((psi, residual))
    });
    let (psi, residual) = result?;
    let verdict = if residual.is_zero() { Verdict::Zero } else { Verdict::Nonzero };
    let mut c = Check::new("green").verdict(jacobi_verdict_name(verdict)).value("P*", ctx.show_op(&p.adjoint()));
    for (mu, comp) in psi.0.iter().enumerate() {
        let label = ctx.sig().independent().get(mu).cloned().unwrap_or_else(|| mu.to_string());
        c = c.value(format!("ψ^{label}"), ctx.show(comp));
    }
    c.residual = Some(ctx.show(&residual));
    c.timing_ms = t;
    Ok((vec![c], i32::from(verdict == Verdict::Nonzero)))
}

fn frechet_cmd(ctx: &Context) -> Result<Checks, Failure> {
    require_exprs(ctx, 1)?;
    let n = ctx.sig().base_dep_count();
    let mut checks = Vec::new();
    for k in 0..ctx.cli.exprs.len() {
        let l = ctx.expr(k)?;
        let (op, t) = ctx.timed(|| DiffOperator::frechet(&l, n));
        let mut c = Check::new("frechet").value("L", ctx.show(&l)).value("ℓ_L", ctx.show_op(&op));
        c.timing_ms = t;
        checks.push(c);
    }
    Ok((checks, 0))
}

fn bracket_cmd(ctx: &Context) -> Result<Checks, Failure> {
    require_exprs(ctx, 2)?;
    let (_, p) = ctx.poisson(0)?;
    let (k, l) = (ctx.expr(0)?, ctx.expr(1)?);
    let (rep, t) = ctx.timed(|| p.bracket_rep(&k, &l));
    let zero = is_divergence(&rep, ctx.sig());
    let mut c = Check::new("bracket")
        .value("representative", ctx.show(&rep))
        .value("functional_is_zero", zero);
    c.timing_ms = t;
    Ok((vec![c], 0))
}

fn witness_strings(ctx: &Context, w: &Option<[DiffFunction; 3]>) -> Option<Vec<String>> {
    w.as_ref().map(|w| w.iter().map(|f| ctx.show(f)).collect())
}

fn jacobi_cmd(ctx: &Context) -> Result<Checks, Failure> {
    let (_, p) = ctx.poisson(0)?;
    if ctx.cli.exprs.len() >= 3 {
        let (k, l, m) = (ctx.expr(0)?, ctx.expr(1)?, ctx.expr(2)?);
        let (direct, t1) = ctx.timed(|| p.jacobi_direct(&k, &l, &m));
        let (mt, t2) = ctx.timed(|| p.jacobi_commutator(&k, &l, &m));
        let mut checks = Vec::new();
        for (name, r, t) in [("jacobi_direct", &direct, t1), ("jacobi_commutator", &mt, t2)] {
            let mut c = Check::new(name).verdict(jacobi_verdict_name(r.verdict));
            c.residual = Some(ctx.show(&r.residual));
            c.timing_ms = t;
            checks.push(c);
        }
        let agree = is_divergence(&(&direct.residual - &mt.residual), ctx.sig());
        checks.push(Check::new("residuals_differ_by_divergence").verdict(if agree { "yes" } else { "no" }));
        let code = i32::from(direct.verdict == Verdict::Nonzero || !agree);
        return Ok((checks, code));
    }
    if !ctx.cli.exprs.is_empty() {
        return Err(Failure("jacobi takes three --expr (K, L, M) or none".into()));
    }
    let (a, t) = ctx.timed(|| assess(&p, ctx.max_degree(), ctx.max_order(), ctx.cli.search));
    let mut c = Check::new("universal").verdict(jacobi_verdict_name(a.universal));
    c.residual = Some(ctx.show(&a.universal_residual));
    c.timing_ms = t;
    let mut v = Check::new("verdict").verdict(verdict_name(&a.verdict));
    v.witness = witness_strings(ctx, &a.witness);
    let code = i32::from(a.verdict != HamiltonianVerdict::Hamiltonian);
    Ok((vec![c, v], code))
}

fn hamiltonian_cmd(ctx: &Context) -> Result<Checks, Failure> {
    let mut checks = Vec::new();
    let mut code = 0;
    for k in 0..ctx.cli.ops.len().max(1) {
        let (name, p) = ctx.poisson(k)?;
        let (a, t) = ctx.timed(|| assess(&p, ctx.max_degree(), ctx.max_order(), true));
        checks.push(
            Check::new(format!("{name}: sufficient"))
                .verdict(if a.sufficient { "hamiltonian" } else { "inconclusive" }),
        );
        let mut u = Check::new(format!("{name}: universal")).verdict(jacobi_verdict_name(a.universal));
        u.residual = Some(ctx.show(&a.universal_residual));
        checks.push(u);
        let mut v = Check::new(format!("{name}: verdict")).verdict(verdict_name(&a.verdict));
        v.witness = witness_strings(ctx, &a.witness);
        v.timing_ms = t;
        checks.push(v);
        if a.verdict != HamiltonianVerdict::Hamiltonian {
            code = 1;
        }
    }
    Ok((checks, code))
}

fn validate_cmd(ctx: &Context) -> Checks {
    let samples = ctx.cli.samples.unwrap_or(50);
    let (v, t) = ctx.timed(|| validate::validate_setup(ctx.sig(), ctx.seed(), samples));
    let mut checks: Vec<Check> = v
        .assumptions
        .iter()
        .map(|a| {
            let mut c = Check::new(format!("assumption {}", a.assumption)).verdict(if a.passed { "pass" } else { "fail" });
            for f in &a.facets {
                c = c.value(f.name, if f.passed { "pass".to_string() } else { format!("fail: {}", f.failure.clone().unwrap_or_default()) });
            }
            if let Some(note) = a.note {
                c = c.value("note", note);
            }
            c
        })
        .collect();
    if let Some(last) = checks.last_mut() {
        last.timing_ms = t;
    }
    (checks, i32::from(!v.passed()))
}

fn corpus_cmd(ctx: &Context) -> Result<Checks, Failure> {
    let (outcomes, t) = ctx.timed(corpus::run_all);
    let outcomes = outcomes.map_err(|e| Failure(e.to_string()))?;
    let mut code = 0;
    let mut checks = outcomes
        .into_iter()
        .map(|o| {
            if !o.matches {
                code = 1;
            }
            let mut c = Check::new(o.name.clone()).verdict(o.found.verdict.clone());
            c.witness = o.witness.clone();
            c.detail = Some(serde_json::to_value(&o).expect("serializable"));
            c
        })
        .collect::<Vec<_>>();
    if let Some(last) = checks.last_mut() {
        last.timing_ms = t;
    }
    Ok((checks, code))
}
