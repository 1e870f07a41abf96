use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use gapmoments::geometry::{cos_phi_e4, make_set};
use gapmoments::moments::{moment_with, MomentOptions};
use gapmoments::{Error, Method, MomentQuery, QuadratureSpec, SetKind};
use gapmoments_cli::output::{self, Record};
use gapmoments_cli::verify::{self, linspace, Perturbation};

/// Number of worker threads for sweeps and tables. Unset means sequential.
const THREADS_ENV: &str = "GAPMOMENTS_THREADS";

const EXIT_DOMAIN: u8 = 1;
const EXIT_CONVERGENCE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gapmoments",
    version,
    about = "Ultraspherical moments on sets with gaps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single moment.
    Moment(MomentArgs),
    /// Evaluate a moment over a grid of gap parameters.
    Sweep(SweepArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Tabulate moments for n = 0..=n-max.
    Table(TableArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SetArg {
    Full,
    Half,
    E2,
    E4,
}

impl From<SetArg> for SetKind {
    fn from(s: SetArg) -> Self {
        match s {
            SetArg::Full => SetKind::FullRange,
            SetArg::Half => SetKind::HalfRange,
            SetArg::E2 => SetKind::E2,
            SetArg::E4 => SetKind::E4,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Closed,
    Series,
    Quad,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Closed => Method::ClosedForm,
            MethodArg::Series => Method::Series,
            MethodArg::Quad => Method::Quadrature,
        }
    }
}

#[derive(Args)]
struct MomentArgs {
    #[arg(long, value_enum)]
    set: SetArg,
    /// Power of cos φ.
    #[arg(long)]
    n: u32,
    #[arg(long, allow_negative_numbers = true)]
    mu: f64,
    /// Gap parameter; required for e2 and e4.
    #[arg(long)]
    b: Option<f64>,
    #[arg(long, value_enum, default_value = "closed")]
    method: MethodArg,
    /// Relative tolerance for series, ₂F₁ and quadrature.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// One row per grid point and method, standard header.
    Long,
    /// One row per grid point, one value column per method.
    Wide,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Profile {
    /// x and cos φ on E₄ for each --b.
    Cosphi,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    set: Option<SetArg>,
    /// With a parity, --n is the half-order and the power is 2n or 2n+1.
    #[arg(long, value_enum)]
    parity: Option<Parity>,
    #[arg(long, default_value_t = 0)]
    n: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long)]
    b_start: Option<f64>,
    #[arg(long)]
    b_stop: Option<f64>,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "closed")]
    methods: Vec<MethodArg>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "long")]
    format: Format,
    /// Emit a profile instead of moments.
    #[arg(long, value_enum)]
    profile: Option<Profile>,
    /// Gap parameters for --profile.
    #[arg(long)]
    b: Vec<f64>,
    /// Points per interval for --profile.
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Reduced grids; skips the slowest checks.
    #[arg(long)]
    quick: bool,
    #[arg(long, value_enum, hide = true)]
    perturb: Option<PerturbArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PerturbArg {
    Q4,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum)]
    set: SetArg,
    #[arg(long, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long)]
    n_max: u32,
    #[arg(long)]
    b: Option<f64>,
    /// Add quadrature rows and report the largest disagreement.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    json: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Convergence { .. } => EXIT_CONVERGENCE,
        _ => EXIT_DOMAIN,
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e))
}

fn options(tol: Option<f64>) -> Result<MomentOptions, Error> {
    let mut opts = MomentOptions::default();
    if let Some(t) = tol {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::Domain(format!(
                "tolerance must be positive, got {t}"
            )));
        }
        opts.tol = t;
        opts.quadrature = QuadratureSpec::with_tolerance(t);
    }
    Ok(opts)
}

fn gap(kind: SetKind, b: Option<f64>) -> Result<f64, Error> {
    match (kind, b) {
        (SetKind::FullRange | SetKind::HalfRange, _) => Ok(0.0),
        (_, Some(b)) => Ok(b),
        (_, None) => Err(Error::Domain(format!("--b is required for {kind}"))),
    }
}

/// Maps `f` over `items` in order, on a thread pool when requested.
fn ordered_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(1);
    if threads <= 1 {
        return items.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}

fn print_records(records: &[Record], json: bool) {
    if json {
        println!(
            "{}",
            serde_json::to_string(records).expect("records serialize")
        );
    } else {
        print!("{}", output::csv(records));
    }
}

fn cmd_moment(a: MomentArgs) -> ExitCode {
    let run = || -> Result<Record, Error> {
        let kind = SetKind::from(a.set);
        let b = gap(kind, a.b)?;
        let q = MomentQuery::new(kind, a.n, a.mu, b);
        let v = moment_with(&q, a.method.into(), &options(a.tol)?)?;
        Ok(Record::new(b, a.n, a.mu, &v))
    };
    match run() {
        Ok(r) if a.json => {
            println!("{}", serde_json::to_string(&r).expect("record serializes"));
            ExitCode::SUCCESS
        }
        Ok(r) => {
            print_records(&[r], false);
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn cmd_sweep(a: SweepArgs) -> ExitCode {
    if a.profile == Some(Profile::Cosphi) {
        return profile_cosphi(&a);
    }
    let Some(set) = a.set else {
        return fail(&Error::Domain(
            "--set is required unless --profile is given".into(),
        ));
    };
    let kind = SetKind::from(set);
    let n = match a.parity {
        None => a.n,
        Some(Parity::Even) => 2 * a.n,
        Some(Parity::Odd) => 2 * a.n + 1,
    };
    let opts = match options(a.tol) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    if a.count < 2 {
        return fail(&Error::Domain(format!(
            "--count must be at least 2, got {}",
            a.count
        )));
    }
    let grid = match kind {
        SetKind::FullRange | SetKind::HalfRange => vec![0.0; a.count],
        _ => {
            let (Some(lo), Some(hi)) = (a.b_start, a.b_stop) else {
                return fail(&Error::Domain(format!(
                    "--b-start and --b-stop are required for {kind}"
                )));
            };
            for b in [lo, hi] {
                if let Err(e) = kind.check_gap(b) {
                    return fail(&e);
                }
            }
            linspace(lo, hi, a.count)
        }
    };
    let methods: Vec<Method> = a.methods.iter().map(|&m| m.into()).collect();
    let rows = ordered_map(&grid, |&b| {
        let q = MomentQuery::new(kind, n, a.mu, b);
        methods
            .iter()
            .map(|&m| moment_with(&q, m, &opts))
            .collect::<Vec<_>>()
    });

    let total = rows.len() * methods.len();
    let failures: Vec<&Error> = rows
        .iter()
        .flatten()
        .filter_map(|r| r.as_ref().err())
        .collect();
    if a.format == Format::Wide && !a.json {
        let mut out = String::from("b");
        for m in &methods {
            out.push(',');
            out.push_str(m.name());
        }
        out.push_str(",error\n");
        for (b, row) in grid.iter().zip(&rows) {
            out.push_str(&output::real(*b));
            let mut errors = Vec::new();
            for (m, r) in methods.iter().zip(row) {
                out.push(',');
                match r {
                    Ok(v) => out.push_str(&output::real(v.value)),
                    Err(e) => errors.push(format!("{m}: {e}").replace(',', ";")),
                }
            }
            out.push(',');
            out.push_str(&errors.join(" | "));
            out.push('\n');
        }
        print!("{out}");
    } else {
        let mut records = Vec::with_capacity(total);
        for (b, row) in grid.iter().zip(&rows) {
            for (m, r) in methods.iter().zip(row) {
                records.push(match r {
                    Ok(v) => Record::new(*b, n, a.mu, v),
                    Err(Error::Convergence { partial, count }) => {
                        Record::failed(*b, n, a.mu, *m, *partial, *count)
                    }
                    Err(_) => Record::failed(*b, n, a.mu, *m, f64::NAN, 0),
                });
            }
        }
        print_records(&records, a.json);
        for e in &failures {
            eprintln!("warning: {e}");
        }
    }
    match failures.first() {
        Some(e) if failures.len() == total => ExitCode::from(exit_code(e)),
        _ => ExitCode::SUCCESS,
    }
}

fn profile_cosphi(a: &SweepArgs) -> ExitCode {
    if a.b.is_empty() {
        return fail(&Error::Domain(
            "--profile cosphi needs at least one --b".into(),
        ));
    }
    if a.points < 2 {
        return fail(&Error::Domain(format!(
            "--points must be at least 2, got {}",
            a.points
        )));
    }
    let mut rows = Vec::new();
    for &b in &a.b {
        let set = match make_set(SetKind::E4, b) {
            Ok(s) => s,
            Err(e) => return fail(&e),
        };
        for iv in &set.intervals {
            for x in linspace(iv.lo, iv.hi, a.points) {
                match cos_phi_e4(x, b) {
                    Ok(c) => rows.push((b, x, c)),
                    Err(e) => return fail(&e),
                }
            }
        }
    }
    if a.json {
        let objs: Vec<_> = rows
            .iter()
            .map(|&(b, x, c)| serde_json::json!({ "b": b, "x": x, "cosphi": c }))
            .collect();
        println!("{}", serde_json::Value::Array(objs));
    } else {
        let mut out = String::from("b,x,cosphi\n");
        for (b, x, c) in rows {
            out.push_str(&format!(
                "{},{},{}\n",
                output::real(b),
                output::real(x),
                output::real(c)
            ));
        }
        print!("{out}");
    }
    ExitCode::SUCCESS
}

fn cmd_verify(a: VerifyArgs) -> ExitCode {
    let opts = verify::Options {
        quick: a.quick,
        perturb: a.perturb.map(|PerturbArg::Q4| Perturbation::Q4),
    };
    let reports = verify::run(&opts);
    let mut ok = true;
    for r in &reports {
        println!("{}", r.line());
        ok &= r.passed();
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!("{} checks, {} failed", reports.len(), failed);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    }
}

fn cmd_table(a: TableArgs) -> ExitCode {
    let kind = SetKind::from(a.set);
    let (b, opts) = match (gap(kind, a.b), options(a.tol)) {
        (Ok(b), Ok(o)) => (b, o),
        (Err(e), _) | (_, Err(e)) => return fail(&e),
    };
    let ns: Vec<u32> = (0..=a.n_max).collect();
    let rows = ordered_map(&ns, |&n| {
        let q = MomentQuery::new(kind, n, a.mu, b);
        let closed = moment_with(&q, Method::ClosedForm, &opts);
        let quad = a.check.then(|| moment_with(&q, Method::Quadrature, &opts));
        (closed, quad)
    });
    let mut records = Vec::new();
    let mut worst: f64 = 0.0;
    for (&n, (closed, quad)) in ns.iter().zip(&rows) {
        let c = match closed {
            Ok(v) => v,
            Err(e) => return fail(e),
        };
        records.push(Record::new(b, n, a.mu, c));
        if let Some(q) = quad {
            let q = match q {
                Ok(v) => v,
                Err(e) => return fail(e),
            };
            worst = worst.max((c.value - q.value).abs());
            records.push(Record::new(b, n, a.mu, q));
        }
    }
    print_records(&records, a.json);
    if a.check {
        eprintln!("max |closed - quad| = {}", output::real(worst));
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DOMAIN } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Moment(a) => cmd_moment(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Table(a) => cmd_table(a),
    }
}
