use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tracemap::bench::{parse_grid, run_bench, write_csv};
use tracemap::oracle::suite::{run_suite, SuiteConfig};
use tracemap::oracle::{brute_solve, linalg_solve};
use tracemap::solver::{ambient_degree, classify, kernel_tlk_in, solve_tlk, DEFAULT_ENUM_CAP};
use tracemap::{make_ctx, BitPoly, Elt, FieldCtx, Instance, SolutionSet};

/// Solve partial-trace equations T_l^k(x) = a over GF(2^n).
#[derive(Parser)]
#[command(name = "tracemap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve T_l^k(x) = a in GF(2^n)
    Solve(SolveArgs),
    /// Basis of the kernel of T_l^k on GF(2^n)
    Kernel(MapArgs),
    /// Is T_l^k a permutation, 2-to-1, or neither on GF(2^n)
    Classify(MapArgs),
    /// Run the verification suite
    Verify(VerifyArgs),
    /// Print a random element of GF(2^n)
    Sample(SampleArgs),
    /// Describe the ambient field used for (n, k)
    FieldInfo(FieldArgs),
    /// Time the solvers and write CSV
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Coords {
    /// Polynomial basis of GF(2^n) modulo the smallest irreducible of degree n
    Subfield,
    /// Polynomial basis of the ambient field GF(2^(2 lcm(n,k)))
    Ambient,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Closed,
    Linalg,
    Brute,
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Ambient modulus override, hex
    #[arg(long)]
    modulus: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct MapArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, default_value_t = 1)]
    l: usize,
    #[arg(long, value_enum, default_value_t = Coords::Subfield)]
    coords: Coords,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Right-hand side, hex
    #[arg(long)]
    a: String,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    method: Method,
    /// Largest solution set listed in full
    #[arg(long, default_value_t = 4096)]
    limit: u128,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, value_enum, default_value_t = Coords::Subfield)]
    coords: Coords,
}

#[derive(Args)]
struct BenchArgs {
    /// Grid points "n,k,l;n,k,l;..."
    #[arg(long, default_value = "8,4,1;16,8,1;32,16,1;64,32,1")]
    grid: String,
    #[arg(long, default_value_t = 100)]
    iters: usize,
    /// Also time with context construction inside each iteration
    #[arg(long)]
    include_setup: bool,
    /// CSV destination; standard output when absent
    #[arg(long)]
    out: Option<String>,
}

/// An error that maps to an exit code.
enum Fail {
    Usage(String),
    Check(String),
}

impl From<tracemap::Error> for Fail {
    fn from(e: tracemap::Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

type Outcome = Result<(), Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Kernel(a) => kernel(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Sample(a) => sample(a),
        Command::FieldInfo(a) => field_info(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Check(msg)) => {
            if !msg.is_empty() {
                eprintln!("{msg}");
            }
            ExitCode::from(1)
        }
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn ambient_ctx(f: &FieldArgs) -> Result<Arc<FieldCtx>, Fail> {
    if f.n == 0 || f.k == 0 {
        return Err(Fail::Usage("--n and --k must be positive".into()));
    }
    let modulus = f.modulus.as_deref().map(BitPoly::from_hex).transpose()?;
    Ok(make_ctx(ambient_degree(f.n, f.k), modulus)?)
}

/// Converts between ambient elements and the coordinates the user chose.
struct Codec {
    ctx: Arc<FieldCtx>,
    n: usize,
    poly: Option<tracemap::field::SubfieldPolyBasis>,
}

impl Codec {
    fn new(ctx: &Arc<FieldCtx>, n: usize, coords: Coords) -> Result<Codec, Fail> {
        let poly = match coords {
            Coords::Ambient => None,
            Coords::Subfield => Some(
                ctx.subfield_poly_basis(n)
                    .map_err(|e| Fail::Usage(format!("{e}; pass --coords ambient for large n")))?,
            ),
        };
        Ok(Codec {
            ctx: ctx.clone(),
            n,
            poly,
        })
    }

    fn parse(&self, s: &str) -> Result<Elt, Fail> {
        let p = BitPoly::from_hex(s)?;
        match &self.poly {
            Some(pb) => {
                if p.deg().is_some_and(|d| d >= self.n) {
                    return Err(Fail::Usage(format!(
                        "{s} has degree >= {} in GF(2^{}) coordinates (modulus {})",
                        self.n,
                        self.n,
                        pb.modulus.to_hex()
                    )));
                }
                Ok(pb.to_ambient(&p)?)
            }
            None => {
                let x = self.ctx.elt(&p)?;
                if !x.in_subfield(self.n)? {
                    return Err(tracemap::Error::NotInSubfield {
                        elt: x.to_hex(),
                        n: self.n,
                        modulus: self.ctx.modulus().to_hex(),
                    }
                    .into());
                }
                Ok(x)
            }
        }
    }

    fn show(&self, x: &Elt) -> String {
        match &self.poly {
            Some(pb) => pb
                .from_ambient(x)
                .map(|p| p.to_hex())
                .unwrap_or_else(|| format!("{} (ambient)", x.to_hex())),
            None => x.to_hex(),
        }
    }
}

fn print_json(v: &Value) -> Outcome {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn solve(args: SolveArgs) -> Outcome {
    let MapArgs { field, l, coords } = &args.map;
    let (n, k, l) = (field.n, field.k, *l);
    if l == 0 {
        return Err(Fail::Usage("--l must be positive".into()));
    }
    let ctx = ambient_ctx(field)?;
    let codec = Codec::new(&ctx, n, *coords)?;
    let a = codec.parse(&args.a)?;
    let set = match args.method {
        Method::Closed => solve_tlk(&Instance::new(n, k, l, a.clone())?).map_err(|e| match e {
            tracemap::Error::KExceedsN { n, k } => Fail::Usage(format!(
                "the closed form needs k <= n (got n={n}, k={k}); pass --method linalg or --method brute"
            )),
            e => e.into(),
        })?,
        Method::Linalg => linalg_solve(n, k, l, &a)?,
        Method::Brute => SolutionSet::from_elements(&ctx, &brute_solve(n, k, l, &a)?)?,
    };
    let listed = if set.count() <= args.limit.min(DEFAULT_ENUM_CAP) {
        Some(set.enumerate()?)
    } else {
        None
    };
    if field.json {
        let mut v = serde_json::to_value(set.to_record()).map_err(io::Error::from)?;
        v["equation"] = json!({ "n": n, "k": k, "l": l, "a": a.to_hex() });
        v["solutions"] = match &listed {
            Some(xs) => xs.iter().map(|x| Value::from(x.to_hex())).collect(),
            None => Value::Null,
        };
        print_json(&v)?;
    } else {
        let mut out = io::stdout().lock();
        writeln!(
            out,
            "equation: T_{l}^{k}(x) = {} over GF(2^{n})",
            codec.show(&a)
        )?;
        writeln!(
            out,
            "ambient: GF(2^{}) modulo {}",
            ctx.m(),
            ctx.modulus().to_hex()
        )?;
        if set.solvable {
            let c = set.count();
            writeln!(
                out,
                "solvable: {c} solution{}",
                if c == 1 { "" } else { "s" }
            )?;
            match &listed {
                Some(xs) => {
                    for x in xs {
                        writeln!(out, "{}", codec.show(x))?;
                    }
                }
                None => {
                    let x0 = set.particular.as_ref().expect("solvable");
                    writeln!(out, "particular: {}", codec.show(x0))?;
                    for z in &set.kernel_basis {
                        writeln!(out, "kernel: {}", codec.show(z))?;
                    }
                }
            }
        } else {
            writeln!(out, "unsolvable")?;
        }
    }
    if set.solvable {
        Ok(())
    } else {
        Err(Fail::Check(String::new()))
    }
}

fn kernel(args: MapArgs) -> Outcome {
    let (n, k, l) = (args.field.n, args.field.k, args.l);
    let ctx = ambient_ctx(&args.field)?;
    let codec = Codec::new(&ctx, n, args.coords)?;
    let basis = if k <= n {
        kernel_tlk_in(&ctx, n, k, l)?
    } else {
        linalg_solve(n, k, l, &ctx.zero())?.kernel_basis
    };
    if args.field.json {
        let hex: Vec<String> = basis.iter().map(Elt::to_hex).collect();
        return print_json(&json!({
            "equation": { "n": n, "k": k, "l": l },
            "dimension": basis.len(),
            "kernel_basis": hex,
            "ambient": ctx.info(),
        }));
    }
    let mut out = io::stdout().lock();
    writeln!(out, "dimension: {}", basis.len())?;
    for z in &basis {
        writeln!(out, "{}", codec.show(z))?;
    }
    Ok(())
}

fn classify_cmd(args: MapArgs) -> Outcome {
    let (n, k, l) = (args.field.n, args.field.k, args.l);
    let c = classify(n, k, l)?;
    if args.field.json {
        print_json(&json!({
            "equation": { "n": n, "k": k, "l": l },
            "class": c.tag.to_string(),
            "kernel_dim": c.kernel_dim,
        }))
    } else {
        println!("{}", c.tag);
        Ok(())
    }
}

fn verify(args: VerifyArgs) -> Outcome {
    let report = run_suite(SuiteConfig {
        max_n: args.max_n,
        samples: args.samples,
        seed: args.seed,
        jobs: args.jobs,
    })?;
    if args.json {
        print_json(&serde_json::to_value(&report).map_err(io::Error::from)?)?;
    } else {
        let mut out = io::stdout().lock();
        for c in &report.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(
                out,
                "{status} {:<22} trials={:<8} failures={:<4} {}",
                c.name, c.trials, c.failures, c.statement
            )?;
            if let Some(w) = &c.counterexample {
                writeln!(out, "     counterexample: {}", w.join(" "))?;
            }
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Fail::Check(format!("{} failures", report.failures())))
    }
}

fn sample(args: SampleArgs) -> Outcome {
    let n = args.field.n;
    let ctx = ambient_ctx(&args.field)?;
    let codec = Codec::new(&ctx, n, args.coords)?;
    let xs: Vec<Elt> = (0..args.count as u64)
        .map(|i| ctx.sample_subfield(n, args.seed.wrapping_add(i)))
        .collect::<Result<_, _>>()?;
    if args.field.json {
        let shown: Vec<String> = xs.iter().map(|x| codec.show(x)).collect();
        return print_json(&json!({ "n": n, "elements": shown, "ambient": ctx.info() }));
    }
    for x in &xs {
        println!("{}", codec.show(x));
    }
    Ok(())
}

fn field_info(args: FieldArgs) -> Outcome {
    let n = args.n;
    let ctx = ambient_ctx(&args)?;
    let basis: Vec<String> = ctx
        .subfield_basis(n)?
        .elems
        .iter()
        .map(Elt::to_hex)
        .collect();
    let poly = ctx.subfield_poly_basis(n).ok();
    if args.json {
        return print_json(&json!({
            "n": n,
            "k": args.k,
            "m": ctx.m(),
            "modulus": ctx.modulus().to_hex(),
            "subfield_basis": basis,
            "subfield_modulus": poly.as_ref().map(|p| p.modulus.to_hex()),
            "subfield_generator": poly.as_ref().map(|p| p.root().to_hex()),
        }));
    }
    let mut out = io::stdout().lock();
    writeln!(out, "m = {}", ctx.m())?;
    writeln!(out, "modulus = {}", ctx.modulus().to_hex())?;
    writeln!(out, "GF(2^{n}) basis (ambient hex):")?;
    for b in &basis {
        writeln!(out, "  {b}")?;
    }
    if let Some(p) = &poly {
        writeln!(
            out,
            "GF(2^{n}) coordinates: modulo {}, X = {} in the ambient field",
            p.modulus.to_hex(),
            p.root().to_hex()
        )?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Outcome {
    let grid = parse_grid(&args.grid)?;
    let rows = run_bench(&grid, args.iters, args.include_setup)?;
    match &args.out {
        Some(path) => write_csv(&rows, BufWriter::new(File::create(path)?))?,
        None => write_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}
