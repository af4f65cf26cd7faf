use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use heightlab::asymptotics::{gelfand_sequence, local_gelfand_sequence, ConvergenceTrace};
use heightlab::exec::Exec;
use heightlab::heights::{
    approximation_ratio, comparison_constant, distance, distance_via_span, height_matrix, height_operator,
    height_spectral, height_subspace, height_vector, remark_demo, OperatorHeight, OperatorOptions, TwistSpec,
};
use heightlab::io::{parse_matrix, parse_subspace, parse_vector};
use heightlab::linalg::bits_budget;
use heightlab::local::{operator_norm, spectral_radius, vector_norm, LocalNormReport, ReportKind};
use heightlab::northcott::{
    enum_invertible_endos, enum_projective_points, enum_rank1_endos, rank1_unbounded_demo, scan_middle_rank,
    to_json_lines,
};
use heightlab::verify::{run_suite, VerifyConfig};
use heightlab::{Error, Field, HeightValue, Place};

#[derive(Parser)]
#[command(name = "heightlab", version, about = "Heights over Q and quadratic fields")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Q, Q(i), Q(sqrt-5), Q(sqrt2), ...
    #[arg(long, global = true)]
    field: Option<String>,
    /// Largest acceptable relative error on archimedean factors.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    jmax: Option<u32>,
    /// Height bound for enumerations and searches.
    #[arg(long, global = true)]
    bound: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// 1 runs sequentially, 0 uses every core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file with defaults for the flags above and a [verify] table.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Height of a vector, matrix or subspace.
    Height {
        #[arg(long, group = "input")]
        vec: Option<String>,
        #[arg(long, group = "input")]
        mat: Option<String>,
        /// Spanning vectors, e.g. "[[1,0,0],[0,1,0]]".
        #[arg(long, group = "input")]
        subspace: Option<String>,
        /// Operator height of the matrix.
        #[arg(long, requires = "mat", conflicts_with = "spectral")]
        op: bool,
        /// Spectral height of the matrix.
        #[arg(long, requires = "mat")]
        spectral: bool,
        /// Report the local norm (or spectral radius) at one place instead.
        #[arg(long)]
        local: Option<String>,
    },
    /// Trace of H(T^k)^(1/k), or of a local norm, for k = 2^j.
    Gelfand {
        #[arg(long)]
        mat: String,
        #[arg(long)]
        local: Option<String>,
    },
    /// Bounded-height enumeration over Q.
    Enum {
        #[arg(long, value_name = "N", group = "what")]
        points: Option<usize>,
        #[arg(long, value_name = "N", group = "what")]
        invertible: Option<usize>,
        #[arg(long, value_name = "N", group = "what")]
        rank1: Option<usize>,
        /// Best-effort scan of intermediate ranks (not certified).
        #[arg(long, value_name = "N", group = "what")]
        middle: Option<usize>,
        /// Rank-one family with constant operator height.
        #[arg(long, value_name = "COUNT", group = "what")]
        unbounded_demo: Option<usize>,
        /// Kernel-height cap for --rank1.
        #[arg(long, default_value_t = 1.0)]
        cap: f64,
        /// Entry box for --middle.
        #[arg(long, default_value_t = 1)]
        radius: i64,
    },
    /// Seeded invariant suite; exits 1 on any failure.
    Verify {
        #[arg(long)]
        samples: Option<usize>,
        /// Only checks whose name contains this (repeatable).
        #[arg(long)]
        only: Vec<String>,
    },
    /// Non-adelic pseudo-height against the standard height at (q, 1).
    DemoRemark {
        #[arg(long, value_delimiter = ',', default_value = "2,3,101")]
        primes: Vec<u64>,
    },
    /// Height for a twisted adelic norm.
    Twist {
        #[arg(long)]
        vec: Option<String>,
        /// Global change of basis, applied at every place.
        #[arg(long)]
        global: Option<String>,
        /// PLACE=MATRIX, repeatable.
        #[arg(long)]
        local: Vec<String>,
        /// Estimate the comparison constants against the standard height
        /// on this many random vectors of dimension --dim.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Distance d_X(y) from a vector to a subspace.
    Dist {
        #[arg(long)]
        vec: String,
        #[arg(long)]
        subspace: String,
        /// Also report the empirical approximation ratio over this box (Q only).
        #[arg(long)]
        radius: Option<i64>,
    },
    /// Height and Plücker coordinates of a subspace.
    Subspace {
        #[arg(long)]
        subspace: String,
    },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    field: Option<String>,
    tol: Option<f64>,
    jmax: Option<u32>,
    bound: Option<f64>,
    seed: Option<u64>,
    workers: Option<usize>,
    format: Option<Format>,
    verify: Option<VerifyConfig>,
}

struct RunConfig {
    field: Field,
    tol: f64,
    jmax: u32,
    bound: Option<f64>,
    seed: u64,
    exec: Exec,
    format: Option<Format>,
    verify: VerifyConfig,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Invalid(_) | Error::Degenerate(_) => 2,
            Error::Resource { .. } => 3,
            Error::Numeric { .. } => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: msg.into() }
}

type Out = Result<(String, u8), Failure>;

fn load_config(g: &Global) -> Result<RunConfig, Failure> {
    let file: FileConfig = match &g.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
        None => FileConfig::default(),
    };
    let field_str = g.field.clone().or(file.field).unwrap_or_else(|| "Q".into());
    let field: Field = field_str.parse()?;
    let tol = g.tol.or(file.tol).unwrap_or(1e-9);
    if !(tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let seed = g.seed.or(file.seed).unwrap_or(42);
    let exec = match g.workers.or(file.workers) {
        Some(w) => Exec::from_workers(w),
        None => Exec::default(),
    };
    let mut verify = file.verify.unwrap_or_default();
    verify.seed = seed;
    if g.tol.is_some() {
        verify.arch_tol = tol;
    }
    Ok(RunConfig {
        field,
        tol,
        jmax: g.jmax.or(file.jmax).unwrap_or(12),
        bound: g.bound.or(file.bound),
        seed,
        exec,
        format: g.format.or(file.format),
        verify,
    })
}

fn json_line<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string(x).expect("serializable");
    s.push('\n');
    s
}

fn check_tol(h: &HeightValue, tol: f64) -> Result<(), Failure> {
    if h.rel_err > tol {
        return Err(Error::Numeric { message: "archimedean factor".into(), achieved: h.rel_err }.into());
    }
    Ok(())
}

fn height_text(h: &HeightValue) -> String {
    format!(
        "{h}\nfinite = {}\narch = {:e}\nlog = {:e}\nrelErr = {:e}\n",
        h.finite,
        h.arch(),
        h.ln(),
        h.rel_err
    )
}

fn no_csv(fmt: Format, what: &str) -> Result<(), Failure> {
    if fmt == Format::Csv {
        return Err(usage(format!("csv output is only available for {what}")));
    }
    Ok(())
}

fn render_height(cfg: &RunConfig, kind: &str, h: &HeightValue) -> Out {
    check_tol(h, cfg.tol)?;
    let fmt = cfg.format.unwrap_or(Format::Text);
    no_csv(fmt, "gelfand")?;
    Ok(match fmt {
        Format::Text => (height_text(h), 0),
        _ => (json_line(&serde_json::json!({ "kind": kind, "height": h })), 0),
    })
}

fn render_op(cfg: &RunConfig, op: &OperatorHeight) -> Out {
    let fmt = cfg.format.unwrap_or(Format::Text);
    no_csv(fmt, "gelfand")?;
    if fmt == Format::Json {
        return Ok((json_line(&serde_json::json!({ "kind": "operator", "height": op })), 0));
    }
    let text = match op {
        OperatorHeight::Exact(h) => {
            check_tol(h, cfg.tol)?;
            format!("exact\n{}", height_text(h))
        }
        OperatorHeight::Bounded { upper, lower, c_hat, empirical } => {
            let mut s = format!(
                "bounded\nupper = {upper}\nlower = {lower} (assumes C = {c_hat}; not rigorous)\n"
            );
            if let Some(e) = empirical {
                let _ = writeln!(s, "empirical lower = {} at y = {}", e.value, e.witness);
            }
            s
        }
    };
    Ok((text, 0))
}

fn render_local(cfg: &RunConfig, report: &LocalNormReport) -> Out {
    let fmt = cfg.format.unwrap_or(Format::Text);
    no_csv(fmt, "gelfand")?;
    Ok(match fmt {
        Format::Text => (format!("{} at {}\n", report.magnitude, report.place), 0),
        _ => (json_line(report), 0),
    })
}

fn cmd_height(
    cfg: &RunConfig,
    vec: Option<String>,
    mat: Option<String>,
    subspace: Option<String>,
    op: bool,
    spectral: bool,
    local: Option<String>,
) -> Out {
    let field = cfg.field;
    let place = local.map(|s| Place::parse(field, &s)).transpose()?;
    if let Some(s) = vec {
        let x = parse_vector(field, &s)?;
        if let Some(v) = place {
            let report = LocalNormReport { magnitude: vector_norm(&x, &v), place: v, kind: ReportKind::VectorNorm };
            return render_local(cfg, &report);
        }
        return render_height(cfg, "vector", &height_vector(field, &x, None)?);
    }
    if let Some(s) = mat {
        let t = parse_matrix(field, &s)?;
        if let Some(v) = place {
            let (magnitude, kind) = if spectral {
                (spectral_radius(&t, &v, cfg.tol)?, ReportKind::SpectralRadius)
            } else {
                (operator_norm(&t, &v, cfg.tol)?, ReportKind::OperatorNorm)
            };
            return render_local(cfg, &LocalNormReport { place: v, magnitude, kind });
        }
        if op {
            let opts = OperatorOptions { search_bound: cfg.bound, exec: cfg.exec, ..Default::default() };
            return render_op(cfg, &height_operator(field, &t, &opts)?);
        }
        if spectral {
            return render_height(cfg, "spectral", &height_spectral(field, &t)?);
        }
        return render_height(cfg, "matrix", &height_matrix(field, &t)?);
    }
    if let Some(s) = subspace {
        if place.is_some() {
            return Err(usage("--local applies to --vec and --mat"));
        }
        let x = parse_subspace(field, &s)?;
        return render_height(cfg, "subspace", &height_subspace(field, &x)?);
    }
    Err(usage("height needs one of --vec, --mat, --subspace"))
}

fn trace_text(tr: &ConvergenceTrace) -> String {
    let mut s = format!("target = {}\n{:>6}  {:>24}  {:>12}  exact\n", tr.target_log, "k", "log value", "residual");
    for e in &tr.entries {
        let _ = writeln!(s, "{:>6}  {:>24}  {:>12.3e}  {}", e.k, e.log_value, e.residual, e.exact_flag);
    }
    s
}

fn cmd_gelfand(cfg: &RunConfig, mat: &str, local: Option<String>) -> Out {
    let t = parse_matrix(cfg.field, mat)?;
    let tr = match local {
        Some(p) => {
            let v = Place::parse(cfg.field, &p)?;
            local_gelfand_sequence(cfg.field, &t, &v, cfg.jmax, bits_budget())?
        }
        None => gelfand_sequence(cfg.field, &t, cfg.jmax, bits_budget())?,
    };
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => tr.to_csv(),
        Format::Json => json_line(&tr),
        Format::Text => trace_text(&tr),
    };
    match &tr.truncated {
        None => Ok((body, 0)),
        Some(e) => {
            eprintln!("warning: trace truncated: {e}");
            Ok((body, Failure::from(e.clone()).code))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_enum(
    cfg: &RunConfig,
    points: Option<usize>,
    invertible: Option<usize>,
    rank1: Option<usize>,
    middle: Option<usize>,
    demo: Option<usize>,
    cap: f64,
    radius: i64,
) -> Out {
    if cfg.field != Field::Rational {
        return Err(usage("enumeration is implemented over Q only"));
    }
    let fmt = cfg.format.unwrap_or(Format::Json);
    no_csv(fmt, "gelfand")?;
    if let Some(count) = demo {
        let rows = rank1_unbounded_demo(count)?;
        return Ok(match fmt {
            Format::Text => {
                let mut s = String::new();
                for r in &rows {
                    let _ = writeln!(s, "{}  op = {}  ker = {}  H(ker) = {}", r.matrix, r.op_height, r.kernel, r.kernel_height);
                }
                (s, 0)
            }
            _ => (to_json_lines(&rows), 0),
        });
    }
    let bound = cfg.bound.ok_or_else(|| usage("enum needs --bound"))?;
    let (lines, count) = if let Some(n) = points {
        let pts = enum_projective_points(n, bound, cfg.exec);
        (to_json_lines(&pts), pts.len())
    } else {
        let classes = if let Some(n) = invertible {
            enum_invertible_endos(n, bound, cfg.exec)?
        } else if let Some(n) = rank1 {
            enum_rank1_endos(n, bound, cap, cfg.exec)
        } else if let Some(n) = middle {
            let opts = OperatorOptions { search_bound: Some(bound), exec: cfg.exec, ..Default::default() };
            scan_middle_rank(n, radius, bound, &opts)?
        } else {
            return Err(usage("enum needs one of --points, --invertible, --rank1, --middle, --unbounded-demo"));
        };
        (to_json_lines(&classes), classes.len())
    };
    Ok(match fmt {
        Format::Text => (format!("count = {count}\n{lines}"), 0),
        _ => (lines, 0),
    })
}

fn cmd_verify(cfg: &RunConfig, samples: Option<usize>, only: Vec<String>) -> Out {
    let mut vc = cfg.verify.clone();
    if let Some(s) = samples {
        vc.samples = s;
    }
    if !only.is_empty() {
        vc.only = only;
    }
    let report = run_suite(&vc, cfg.exec);
    let code = if report.passed() { 0 } else { 1 };
    let fmt = cfg.format.unwrap_or(Format::Text);
    no_csv(fmt, "gelfand")?;
    Ok(match fmt {
        Format::Text => (report.to_table(), code),
        _ => (json_line(&report), code),
    })
}

fn cmd_demo_remark(cfg: &RunConfig, primes: &[u64]) -> Out {
    let rows = primes.iter().map(|&q| remark_demo(q)).collect::<Result<Vec<_>, _>>()?;
    let fmt = cfg.format.unwrap_or(Format::Text);
    Ok(match fmt {
        Format::Json => (to_json_lines(&rows), 0),
        Format::Csv => {
            let mut s = String::from("q,pseudo_height,standard_height,ratio,sqrt_q2_plus_1\n");
            for r in &rows {
                let want = ((r.q as f64).powi(2) + 1.0).sqrt();
                let _ = writeln!(s, "{},{},{:e},{:e},{:e}", r.q, r.pseudo_height_exact, r.standard_height.value(), r.ratio, want);
            }
            (s, 0)
        }
        Format::Text => {
            let mut s = format!("{:>8}  {:>8}  {:>20}  {:>20}\n", "q", "pseudo", "ratio", "sqrt(q^2+1)");
            for r in &rows {
                let want = ((r.q as f64).powi(2) + 1.0).sqrt();
                let _ = writeln!(s, "{:>8}  {:>8}  {:>20}  {:>20}", r.q, r.pseudo_height_exact.to_string(), r.ratio, want);
            }
            (s, 0)
        }
    })
}

fn cmd_twist(
    cfg: &RunConfig,
    vec: Option<String>,
    global: Option<String>,
    local: Vec<String>,
    samples: Option<usize>,
    dim: Option<usize>,
) -> Out {
    let field = cfg.field;
    let mut twist = TwistSpec::identity();
    if let Some(g) = global {
        twist = twist.with_global(parse_matrix(field, &g)?)?;
    }
    for spec in &local {
        let (p, m) = spec.split_once('=').ok_or_else(|| usage(format!("expected PLACE=MATRIX, got '{spec}'")))?;
        twist = twist.with_local(Place::parse(field, p)?, parse_matrix(field, m)?)?;
    }
    let fmt = cfg.format.unwrap_or(Format::Text);
    no_csv(fmt, "gelfand")?;
    if let Some(s) = vec {
        let x = parse_vector(field, &s)?;
        return render_height(cfg, "twisted-vector", &height_vector(field, &x, Some(&twist))?);
    }
    let samples = samples.ok_or_else(|| usage("twist needs --vec or --samples"))?;
    let n = dim
        .or_else(|| twist.global.as_ref().map(|a| a.dim()))
        .or_else(|| twist.local.values().next().map(|a| a.dim()))
        .ok_or_else(|| usage("twist --samples needs --dim or a twist matrix"))?;
    let (lo, hi) = comparison_constant(field, n, &twist, samples, cfg.seed)?;
    Ok(match fmt {
        Format::Text => (format!("min ratio = {lo}\nmax ratio = {hi}\n"), 0),
        _ => (json_line(&serde_json::json!({ "samples": samples, "minRatio": lo, "maxRatio": hi })), 0),
    })
}

fn cmd_dist(cfg: &RunConfig, vec: &str, subspace: &str, radius: Option<i64>) -> Out {
    let field = cfg.field;
    let y = parse_vector(field, vec)?;
    let x = parse_subspace(field, subspace)?;
    let d = distance(field, &y, &x)?;
    let via = distance_via_span(field, &y, &x)?;
    check_tol(&d, cfg.tol)?;
    let ratio = match radius {
        Some(r) if field == Field::Rational => Some(approximation_ratio(&y, &x, r)?),
        Some(_) => return Err(usage("--radius is implemented over Q only")),
        None => None,
    };
    let fmt = cfg.format.unwrap_or(Format::Text);
    no_csv(fmt, "gelfand")?;
    Ok(match fmt {
        Format::Text => {
            let mut s = format!("{}viaSpan = {via}\n", height_text(&d));
            if let Some(r) = ratio {
                let _ = writeln!(s, "approximationRatio = {r}");
            }
            (s, 0)
        }
        _ => (
            json_line(&serde_json::json!({ "distance": d, "viaSpan": via, "approximationRatio": ratio })),
            0,
        ),
    })
}

fn cmd_subspace(cfg: &RunConfig, subspace: &str) -> Out {
    let x = parse_subspace(cfg.field, subspace)?;
    let h = height_subspace(cfg.field, &x)?;
    check_tol(&h, cfg.tol)?;
    let fmt = cfg.format.unwrap_or(Format::Text);
    no_csv(fmt, "gelfand")?;
    Ok(match fmt {
        Format::Text => (format!("dim = {}\nplucker = {}\n{}", x.dim(), x.plucker(), height_text(&h)), 0),
        _ => (
            json_line(&serde_json::json!({
                "ambient": x.ambient(),
                "dim": x.dim(),
                "plucker": heightlab::io::vector_to_json(&x.plucker()),
                "height": h,
            })),
            0,
        ),
    })
}

fn run(cli: Cli) -> Result<(String, u8, Option<PathBuf>), Failure> {
    let cfg = load_config(&cli.global)?;
    let (body, code) = match cli.cmd {
        Cmd::Height { vec, mat, subspace, op, spectral, local } => {
            cmd_height(&cfg, vec, mat, subspace, op, spectral, local)?
        }
        Cmd::Gelfand { mat, local } => cmd_gelfand(&cfg, &mat, local)?,
        Cmd::Enum { points, invertible, rank1, middle, unbounded_demo, cap, radius } => {
            cmd_enum(&cfg, points, invertible, rank1, middle, unbounded_demo, cap, radius)?
        }
        Cmd::Verify { samples, only } => cmd_verify(&cfg, samples, only)?,
        Cmd::DemoRemark { primes } => cmd_demo_remark(&cfg, &primes)?,
        Cmd::Twist { vec, global, local, samples, dim } => cmd_twist(&cfg, vec, global, local, samples, dim)?,
        Cmd::Dist { vec, subspace, radius } => cmd_dist(&cfg, &vec, &subspace, radius)?,
        Cmd::Subspace { subspace } => cmd_subspace(&cfg, &subspace)?,
    };
    Ok((body, code, cli.global.out))
}

fn emit(body: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, body).map_err(|e| Failure { code: 2, message: format!("{}: {e}", p.display()) }),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).and_then(|(body, code, out)| emit(&body, out.as_deref()).map(|_| code)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
