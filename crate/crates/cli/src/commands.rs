//! Subcommands. Every command writes its report to a `String` so the binary
//! and the tests share one code path.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use pdk_core::kernel::roundtrip_converse;
use pdk_core::wavefront::{check_wf_inclusion, replay_certificate, replay_witness};
use pdk_core::{is_smooth_at, CycScalar, Distribution, Kernel, MicrolocalQuery, Polydisc, SBFunction};
use pdk_verify::acceptance::{criteria, run_criterion, SuiteConfig, DEFAULT_SEED};
use serde_json::{json, Value};

use crate::format::{
    ball_json, emit, parse, parse_point_arg, point_json, scalar_json, sb_json, verdict_json, ExprFile, Payload,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "pdk", version, about = "Exact Schwartz-Bruhat functions, distributions, kernels and wave front sets on Q_p^m")]
pub struct Cli {
    /// Also print a floating-point rendering of scalar results.
    #[arg(long, global = true)]
    pub approx: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the coarsest disjoint form of a function.
    Canon { file: PathBuf },
    /// Evaluate a function at a point given as comma-separated rationals.
    Eval {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Haar integral of a function.
    Integrate { file: PathBuf },
    /// Fourier transform of a function.
    Fourier { file: PathBuf },
    /// Convolution of two functions.
    Convolve { a: PathBuf, b: PathBuf },
    /// Tensor product `(x, y) ↦ f(x)g(y)`.
    Tensor { a: PathBuf, b: PathBuf },
    /// Write a function on Q_p^{m+n} as a sum of products of polydiscs.
    TensorDecompose {
        file: PathBuf,
        #[arg(long)]
        split: usize,
    },
    /// Pair a distribution with a function.
    Pair { dist: PathBuf, function: PathBuf },
    /// Pair a distribution with `φ·Ψ(⟨·, η⟩)`.
    ModulatedPair {
        dist: PathBuf,
        function: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
    },
    /// Apply the kernel of a distribution to a function.
    KernelApply {
        #[command(flatten)]
        kernel: KernelArg,
        psi: PathBuf,
        /// Print the pairing with this function instead of the distribution.
        #[arg(long)]
        phi: Option<PathBuf>,
    },
    /// Rebuild the distribution from its kernel and compare on basis balls.
    KernelRoundtrip {
        #[command(flatten)]
        kernel: KernelArg,
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        depth: i64,
        /// Radius of the region around the origin that is compared.
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        region: i64,
    },
    /// Pair a function through random re-decompositions into product balls.
    Independence {
        #[command(flatten)]
        kernel: KernelArg,
        phi: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Wave front computations.
    #[command(subcommand)]
    Wf(WfCommand),
    /// Run the acceptance suite.
    VerifyAll {
        /// Basis depth for the kernel criteria.
        #[arg(long, allow_hyphen_values = true)]
        depth: Option<i64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum WfCommand {
    /// Decide microlocal smoothness for a query file.
    Check { query: PathBuf },
    /// Decide smoothness of a distribution at every point of a grid file.
    Grid { dist: PathBuf, grid: PathBuf },
    /// Check the wave front inclusion for `𝒦ψ` on a grid.
    KernelInclusion {
        #[command(flatten)]
        kernel: KernelArg,
        psi: PathBuf,
        grid: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct KernelArg {
    /// A kernel file, or a distribution file together with `--split`.
    pub kernel: PathBuf,
    /// Dimension of the first factor when the file holds a distribution.
    #[arg(long)]
    pub split: Option<usize>,
}

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Violation(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Violation(_) => EXIT_VIOLATION,
        }
    }
}

impl From<pdk_core::Error> for Failure {
    fn from(e: pdk_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Output and exit code of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(cli: &Cli) -> Outcome {
    let mut out = String::new();
    match dispatch(cli, &mut out) {
        Ok(code) => Outcome { code, stdout: out, stderr: String::new() },
        Err(f) => {
            let code = f.code();
            let stderr = match f {
                Failure::Input(m) => format!("error: {m}\n"),
                Failure::Violation(m) => format!("violation: {m}\n"),
            };
            Outcome { code, stdout: out, stderr }
        }
    }
}

/// Seed from the command line, then `PDK_SEED`, then the default.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("PDK_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Failure::Input(format!("PDK_SEED={s:?} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn load(path: &Path) -> Result<ExprFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn wrong_kind(path: &Path, want: &str, got: &Payload) -> Failure {
    Failure::Input(format!("{}: expected a {want} payload, found {}", path.display(), got.kind()))
}

fn same_prime(files: &[(&Path, u64)]) -> Result<(), Failure> {
    let (first, p) = files[0];
    for (path, q) in &files[1..] {
        if *q != p {
            return Err(Failure::Input(format!(
                "mixed primes: {} has p = {p}, {} has p = {q}",
                first.display(),
                path.display()
            )));
        }
    }
    Ok(())
}

fn load_sb(path: &Path) -> Result<SBFunction, Failure> {
    match load(path)?.payload {
        Payload::Sb(f) => Ok(f),
        other => Err(wrong_kind(path, "sb", &other)),
    }
}

fn load_distribution(path: &Path) -> Result<Distribution, Failure> {
    match load(path)?.payload {
        Payload::Distribution(u) => Ok(u),
        other => Err(wrong_kind(path, "distribution", &other)),
    }
}

fn load_kernel(arg: &KernelArg) -> Result<Kernel, Failure> {
    let path = &arg.kernel;
    match (load(path)?.payload, arg.split) {
        (Payload::Kernel(k), None) => Ok(k),
        (Payload::Kernel(k), Some(n1)) => Ok(Kernel::new(k.u().clone(), n1, k.u().dim().saturating_sub(n1))?),
        (Payload::Distribution(u), Some(n1)) => {
            let n2 = u.dim().checked_sub(n1).filter(|n| *n > 0).ok_or_else(|| {
                Failure::Input(format!("--split {n1} leaves no second factor in dimension {}", u.dim()))
            })?;
            Ok(Kernel::new(u, n1, n2)?)
        }
        (Payload::Distribution(_), None) => {
            Err(Failure::Input(format!("{}: a distribution file needs --split", path.display())))
        }
        (other, _) => Err(wrong_kind(path, "kernel", &other)),
    }
}

fn print_scalar(out: &mut String, c: &CycScalar, approx: bool) {
    if approx {
        let z = c.to_complex();
        let _ = writeln!(out, "{c}  ≈ {:.12} {} {:.12}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs());
    } else {
        let _ = writeln!(out, "{c}");
    }
}

fn print_json(out: &mut String, v: &Value) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn print_file(out: &mut String, p: u64, payload: Payload) -> Result<(), Failure> {
    let v = emit(&ExprFile { p, payload }).map_err(|e| Failure::Input(e.to_string()))?;
    print_json(out, &v);
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut String) -> Result<u8, Failure> {
    let approx = cli.approx;
    match &cli.command {
        Command::Canon { file } => {
            let f = load_sb(file)?;
            print_file(out, f.p(), Payload::Sb(f))?;
        }
        Command::Eval { file, at } => {
            let f = load_sb(file)?;
            let x = parse_point_arg(f.p(), at).map_err(Failure::Input)?;
            print_scalar(out, &f.eval(&x)?, approx);
        }
        Command::Integrate { file } => {
            let f = load_sb(file)?;
            print_scalar(out, &f.integrate(), approx);
        }
        Command::Fourier { file } => {
            let f = load_sb(file)?;
            print_file(out, f.p(), Payload::Sb(f.fourier()?))?;
        }
        Command::Convolve { a, b } => {
            let (f, g) = (load_sb(a)?, load_sb(b)?);
            same_prime(&[(a, f.p()), (b, g.p())])?;
            print_file(out, f.p(), Payload::Sb(f.convolve(&g)?))?;
        }
        Command::Tensor { a, b } => {
            let (f, g) = (load_sb(a)?, load_sb(b)?);
            same_prime(&[(a, f.p()), (b, g.p())])?;
            print_file(out, f.p(), Payload::Sb(f.tensor(&g)?))?;
        }
        Command::TensorDecompose { file, split } => {
            let f = load_sb(file)?;
            let pieces = f.tensor_decompose(*split)?;
            let v = json!({
                "p": f.p(),
                "split": [split, f.dim() - split],
                "pieces": pieces.iter().map(|(c, l, r)| json!({
                    "coef": scalar_json(c), "left": ball_json(l), "right": ball_json(r),
                })).collect::<Vec<_>>(),
            });
            print_json(out, &v);
        }
        Command::Pair { dist, function } => {
            let (u, f) = (load_distribution(dist)?, load_sb(function)?);
            same_prime(&[(dist, u.p()), (function, f.p())])?;
            print_scalar(out, &u.pair(&f)?, approx);
        }
        Command::ModulatedPair { dist, function, eta } => {
            let (u, f) = (load_distribution(dist)?, load_sb(function)?);
            same_prime(&[(dist, u.p()), (function, f.p())])?;
            let eta = parse_point_arg(u.p(), eta).map_err(Failure::Input)?;
            print_scalar(out, &u.modulated_pair(&f, &eta)?, approx);
        }
        Command::KernelApply { kernel, psi, phi } => {
            let k = load_kernel(kernel)?;
            let g = load_sb(psi)?;
            same_prime(&[(&kernel.kernel, k.u().p()), (psi, g.p())])?;
            match phi {
                Some(phi_path) => {
                    let f = load_sb(phi_path)?;
                    same_prime(&[(&kernel.kernel, k.u().p()), (phi_path, f.p())])?;
                    print_scalar(out, &k.pairing(&f, &g)?, approx);
                }
                None => print_file(out, k.u().p(), Payload::Distribution(k.apply(&g)?))?,
            }
        }
        Command::KernelRoundtrip { kernel, depth, region } => {
            let k = load_kernel(kernel)?;
            return kernel_roundtrip(&k, *depth, *region, out);
        }
        Command::Independence { kernel, phi, trials, seed } => {
            let k = load_kernel(kernel)?;
            let f = load_sb(phi)?;
            same_prime(&[(&kernel.kernel, k.u().p()), (phi, f.p())])?;
            let seed = resolve_seed(*seed)?;
            let report = k.independence_check(&f, *trials, seed)?;
            let _ = writeln!(out, "seed {seed}: {} trials, {} product pieces", report.trials, report.total_pieces);
            let _ = write!(out, "value ");
            print_scalar(out, &report.value, approx);
            if let Some((trial, v)) = &report.mismatch {
                return Err(Failure::Violation(format!("trial {trial} produced {v} instead of {}", report.value)));
            }
        }
        Command::Wf(wf) => return wf_command(wf, out),
        Command::VerifyAll { depth, seed, only } => {
            let seed = resolve_seed(*seed)?;
            let cfg = SuiteConfig { seed, depth: *depth };
            let _ = writeln!(out, "acceptance suite, seed {seed}");
            let mut failed = Vec::new();
            for c in criteria().iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
                let r = run_criterion(c, &cfg);
                let _ = writeln!(out, "{r}");
                if !r.passed {
                    failed.push(r.id);
                }
            }
            if !failed.is_empty() {
                return Err(Failure::Violation(format!("criteria {failed:?} failed")));
            }
        }
    }
    Ok(EXIT_OK)
}

fn kernel_roundtrip(k: &Kernel, depth: i64, region: i64, out: &mut String) -> Result<u8, Failure> {
    let p = k.u().p();
    let (n1, n2) = k.split();
    if region > depth {
        return Err(Failure::Input(format!("region radius {region} is finer than depth {depth}")));
    }
    let whole = Polydisc::origin(p, n1 + n2, region);
    if let Some(m) = k.roundtrip_existence(&whole, depth)? {
        let _ = writeln!(out, "{}", json!({ "ball": ball_json(&m.ball), "u": scalar_json(&m.left), "rebuilt": scalar_json(&m.right) }));
        return Err(Failure::Violation(format!("rebuilt distribution differs on {}", m.ball)));
    }
    let _ = writeln!(out, "existence: u agrees with the rebuilt distribution on every ball of radius {region}..={depth} in {whole}");
    let regions = (Polydisc::origin(p, n1, region), Polydisc::origin(p, n2, region));
    if let Some((c, d, want, got)) = roundtrip_converse(k.as_oracle(), n1, n2, depth, (&regions.0, &regions.1))? {
        let _ = writeln!(out, "{}", json!({ "c": ball_json(&c), "d": ball_json(&d), "kernel": scalar_json(&want), "rebuilt": scalar_json(&got) }));
        return Err(Failure::Violation(format!("kernel of the rebuilt distribution differs on ({c}, {d})")));
    }
    let _ = writeln!(out, "converse: kernel of the rebuilt distribution agrees on every indicator pair");
    Ok(EXIT_OK)
}

fn check_replay(q: &MicrolocalQuery, v: &pdk_core::SmoothnessVerdict) -> Result<(), Failure> {
    if v.is_not_smooth() {
        if let Some(value) = replay_witness(&q.u, v)? {
            if value.is_zero() {
                return Err(Failure::Violation("witness replays to zero".into()));
            }
        }
    } else if let Some(f) = replay_certificate(q, v)? {
        return Err(Failure::Violation(format!("certificate fails at λ = {}, ξ = {}: {}", f.lambda, f.xi, f.value)));
    }
    Ok(())
}

fn wf_command(cmd: &WfCommand, out: &mut String) -> Result<u8, Failure> {
    match cmd {
        WfCommand::Check { query } => {
            let q = match load(query)?.payload {
                Payload::Query(q) => q,
                other => return Err(wrong_kind(query, "query", &other)),
            };
            let v = is_smooth_at(&q)?;
            check_replay(&q, &v)?;
            print_json(out, &verdict_json(&v));
        }
        WfCommand::Grid { dist, grid } => {
            let u = load_distribution(dist)?;
            let g = match load(grid)?.payload {
                Payload::Grid(g) => g,
                other => return Err(wrong_kind(grid, "grid", &other)),
            };
            same_prime(&[(dist, u.p()), (grid, g.lambda.p())])?;
            let mut rows = Vec::new();
            for (x0, xi0) in &g.points {
                let q = MicrolocalQuery {
                    u: u.clone(),
                    x0: x0.clone(),
                    xi0: xi0.clone(),
                    lambda: g.lambda.clone(),
                    nbhd_radius: g.params.nbhd_radius,
                    probe_depth: g.params.probe_depth,
                    ord_floor: g.params.ord_floor,
                };
                q.validate()?;
                let v = is_smooth_at(&q)?;
                check_replay(&q, &v)?;
                rows.push(json!({ "x0": point_json(x0), "xi0": point_json(xi0), "result": verdict_json(&v) }));
            }
            print_json(out, &Value::Array(rows));
        }
        WfCommand::KernelInclusion { kernel, psi, grid } => {
            let k = load_kernel(kernel)?;
            let g_psi = load_sb(psi)?;
            let g = match load(grid)?.payload {
                Payload::Grid(g) => g,
                other => return Err(wrong_kind(grid, "grid", &other)),
            };
            same_prime(&[(&kernel.kernel, k.u().p()), (psi, g_psi.p()), (grid, g.lambda.p())])?;
            let report = check_wf_inclusion(&k, &g_psi, &g.points, &g.lambda, g.params)?;
            let rows: Vec<Value> = report
                .points
                .iter()
                .map(|pt| {
                    json!({
                        "x0": point_json(&pt.x0),
                        "xi0": point_json(&pt.xi0),
                        "lhs": verdict_json(&pt.lhs),
                        "rhs_witness": pt.rhs_witness.as_ref().map(point_json),
                        "rhs_inconclusive": pt.rhs_inconclusive,
                        "violation": pt.violation,
                    })
                })
                .collect();
            print_json(out, &json!({ "psi": sb_json(&g_psi), "points": rows, "violations": report.violations() }));
            if report.violations() > 0 {
                return Err(Failure::Violation(format!("{} grid points violate the inclusion", report.violations())));
            }
        }
    }
    Ok(EXIT_OK)
}
