//! The `wrep` command line.
//!
//! Exit codes: 0 success (and verification pass), 1 verification fail,
//! 2 usage error, 3 numerical error. Machine-readable output is JSON on
//! stdout or in files; human summaries go to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::{self, DEFAULT_RESOLUTION};
use crate::complex::RealVec3;
use crate::expr::parse;
use crate::geometry::ParametricSurface;
use crate::mesh::{self, ParamDomain};
use crate::verification::{verify, Tolerances, VerificationReport};
use crate::weierstrass::WeierstrassData;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "wrep",
    version,
    about = "Minimal surfaces from Weierstrass data: generate meshes and verify minimality"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a surface and write a triangle mesh.
    Generate(GenerateArgs),
    /// Check every minimality identity over a sampled domain and write a JSON report.
    Verify(VerifyArgs),
    /// Print x, x_u, x_v and H at one parameter value as JSON.
    Eval(EvalArgs),
    /// List the built-in surfaces.
    Catalog,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SourceArgs {
    /// Weierstrass f(z); requires --g.
    #[arg(long = "f", value_name = "EXPR")]
    pub f: Option<String>,
    /// Weierstrass g(z); requires --f.
    #[arg(long = "g", value_name = "EXPR")]
    pub g: Option<String>,
    /// First φ component (direct-φ mode; requires --phi2 and --phi3).
    #[arg(long, value_name = "EXPR")]
    pub phi1: Option<String>,
    /// Second φ component.
    #[arg(long, value_name = "EXPR")]
    pub phi2: Option<String>,
    /// Third φ component.
    #[arg(long, value_name = "EXPR")]
    pub phi3: Option<String>,
    /// Built-in surface name (see `wrep catalog`).
    #[arg(long, value_name = "NAME")]
    pub surface: Option<String>,
    /// Basepoint of the integral, `RE,IM` (default 0,0).
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    pub basepoint: Option<String>,
    /// TOML file with defaults for any of these flags (flags take precedence).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DomainArgs {
    /// Parameter domain: `rect:U0,U1,V0,V1` or `disk:R` or `disk:R,RE,IM`.
    /// Defaults to the surface's own domain, else rect:-1,1,-1,1.
    #[arg(long, value_name = "SPEC", allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// Grid resolution `NUxNV` (default 64x64).
    #[arg(long, value_name = "NUxNV")]
    pub res: Option<String>,
    /// Skip samples within RADIUS of RE+i·IM; repeatable.
    #[arg(long, value_name = "RE,IM,RADIUS", allow_hyphen_values = true)]
    pub exclude: Vec<String>,
    /// Worker threads for grid sampling (default: all cores). Output does not depend on it.
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Ply,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Output mesh path.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Mesh format (default: from the --out extension, else obj).
    #[arg(long, value_enum)]
    pub format: Option<MeshFormat>,
    /// Omit vertex normals.
    #[arg(long)]
    pub no_normals: bool,
    /// Also verify and write the JSON report here.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Tolerance override `KEY=VALUE` (algebraic, curvature, fd, path, fd_step); repeatable.
    #[arg(long, value_name = "KEY=VALUE")]
    pub tol: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Report path (default: standard output).
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Tolerance override `KEY=VALUE` (algebraic, curvature, fd, path, fd_step); repeatable.
    #[arg(long, value_name = "KEY=VALUE")]
    pub tol: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Parameter value `RE,IM`.
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    pub at: Option<String>,
}

/// Keys accepted in a `--config` file; one per flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub f: Option<String>,
    pub g: Option<String>,
    pub phi1: Option<String>,
    pub phi2: Option<String>,
    pub phi3: Option<String>,
    pub surface: Option<String>,
    pub basepoint: Option<String>,
    pub domain: Option<String>,
    pub res: Option<String>,
    #[serde(default)]
    pub exclude: Vec<String>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<MeshFormat>,
    pub no_normals: Option<bool>,
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub tol: Vec<String>,
    pub at: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Usage { flag: String, message: String },
    Numerical(Error),
}

impl Failure {
    fn usage(flag: &str, message: impl ToString) -> Self {
        Failure::Usage {
            flag: flag.to_string(),
            message: message.to_string(),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage { .. } => EXIT_USAGE,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage { flag, message } => write!(f, "usage error: {flag}: {message}"),
            Failure::Numerical(e) => match e {
                Error::Weierstrass(w) => match w.z() {
                    Some(z) => write!(f, "numerical error at z = {z}: {e}"),
                    None => write!(f, "numerical error: {e}"),
                },
                _ => write!(f, "numerical error: {e}"),
            },
        }
    }
}

fn numerical(e: Error) -> Failure {
    match e {
        Error::InvalidDomain(msg) => Failure::usage("--domain", msg),
        Error::Parse(p) => Failure::usage("expression", p),
        e => Failure::Numerical(e),
    }
}

type CliResult<T> = Result<T, Failure>;

fn load_config(path: Option<&Path>) -> CliResult<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::usage("--config", e))?;
    toml::from_str(&text).map_err(|e| Failure::usage("--config", e))
}

/// A real number; accepts constant expressions such as `-pi` or `2*pi`.
fn parse_real(flag: &str, text: &str) -> CliResult<f64> {
    let e = parse(text.trim()).map_err(|e| Failure::usage(flag, format!("`{text}`: {e}")))?;
    let v = e
        .eval(Complex64::new(f64::NAN, f64::NAN))
        .ok()
        .filter(|v| v.im == 0.0 && v.re.is_finite())
        .ok_or_else(|| Failure::usage(flag, format!("`{text}` is not a real constant")))?;
    Ok(v.re)
}

fn parse_reals(flag: &str, text: &str, count: &[usize]) -> CliResult<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| parse_real(flag, p))
        .collect::<CliResult<_>>()?;
    if !count.contains(&parts.len()) {
        return Err(Failure::usage(
            flag,
            format!("expected {count:?} comma-separated numbers, got `{text}`"),
        ));
    }
    Ok(parts)
}

fn parse_point(flag: &str, text: &str) -> CliResult<Complex64> {
    let p = parse_reals(flag, text, &[2])?;
    Ok(Complex64::new(p[0], p[1]))
}

fn parse_resolution(text: &str) -> CliResult<(usize, usize)> {
    let bad = || Failure::usage("--res", format!("expected NUxNV, got `{text}`"));
    let (a, b) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_domain(text: &str, nu: usize, nv: usize) -> CliResult<ParamDomain> {
    let (kind, rest) = text.split_once(':').ok_or_else(|| {
        Failure::usage(
            "--domain",
            format!("expected rect:... or disk:..., got `{text}`"),
        )
    })?;
    let domain = match kind {
        "rect" => {
            let p = parse_reals("--domain", rest, &[4])?;
            ParamDomain::rectangle(p[0], p[1], p[2], p[3], nu, nv)
        }
        "disk" => {
            let p = parse_reals("--domain", rest, &[1, 3])?;
            let center = if p.len() == 3 {
                Complex64::new(p[1], p[2])
            } else {
                Complex64::new(0.0, 0.0)
            };
            ParamDomain::disk(p[0], center, nu, nv)
        }
        other => {
            return Err(Failure::usage(
                "--domain",
                format!("unknown domain kind `{other}`"),
            ))
        }
    };
    domain.map_err(|e| Failure::usage("--domain", e))
}

struct Resolved {
    data: WeierstrassData,
    default_domain: Option<ParamDomain>,
}

fn resolve_source(src: &SourceArgs, cfg: &ConfigFile) -> CliResult<Resolved> {
    let pick = |flag: &Option<String>, key: &Option<String>| flag.clone().or_else(|| key.clone());
    let f = pick(&src.f, &cfg.f);
    let g = pick(&src.g, &cfg.g);
    let phi = [
        pick(&src.phi1, &cfg.phi1),
        pick(&src.phi2, &cfg.phi2),
        pick(&src.phi3, &cfg.phi3),
    ];
    let surface = pick(&src.surface, &cfg.surface);

    let have_fg = f.is_some() || g.is_some();
    let have_phi = phi.iter().any(Option::is_some);
    let sources = [have_fg, have_phi, surface.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    if sources != 1 {
        return Err(Failure::usage(
            "--f/--g | --phi1/--phi2/--phi3 | --surface",
            "exactly one data source is required",
        ));
    }

    let expr = |flag: &str, text: &str| {
        parse(text).map_err(|e| Failure::usage(flag, format!("`{text}`: {e}")))
    };
    let mut resolved = if let Some(name) = surface {
        let entry = catalog::by_name(&name).ok_or_else(|| {
            Failure::usage(
                "--surface",
                format!(
                    "unknown surface `{name}`; known: {}",
                    catalog::names().join(", ")
                ),
            )
        })?;
        Resolved {
            data: entry.data,
            default_domain: Some(entry.default_domain),
        }
    } else if have_fg {
        let f = f.ok_or_else(|| Failure::usage("--f", "missing (required with --g)"))?;
        let g = g.ok_or_else(|| Failure::usage("--g", "missing (required with --f)"))?;
        Resolved {
            data: WeierstrassData::from_fg(expr("--f", &f)?, expr("--g", &g)?),
            default_domain: None,
        }
    } else {
        let names = ["--phi1", "--phi2", "--phi3"];
        let mut parsed = Vec::new();
        for (text, flag) in phi.iter().zip(names) {
            let text = text
                .as_deref()
                .ok_or_else(|| Failure::usage(flag, "missing (direct-φ mode needs all three)"))?;
            parsed.push(expr(flag, text)?);
        }
        let [p1, p2, p3]: [_; 3] = parsed.try_into().expect("three components");
        Resolved {
            data: WeierstrassData::from_phi(p1, p2, p3),
            default_domain: None,
        }
    };
    if let Some(bp) = pick(&src.basepoint, &cfg.basepoint) {
        resolved.data = resolved
            .data
            .with_basepoint(parse_point("--basepoint", &bp)?);
    }
    Ok(resolved)
}

fn resolve_domain(
    args: &DomainArgs,
    cfg: &ConfigFile,
    fallback: Option<ParamDomain>,
) -> CliResult<ParamDomain> {
    let res = args.res.clone().or_else(|| cfg.res.clone());
    let (nu, nv) = match &res {
        Some(r) => parse_resolution(r)?,
        None => (DEFAULT_RESOLUTION, DEFAULT_RESOLUTION),
    };
    let mut domain = match args.domain.clone().or_else(|| cfg.domain.clone()) {
        Some(spec) => parse_domain(&spec, nu, nv)?,
        None => match fallback {
            Some(d) => d
                .with_resolution(nu, nv)
                .map_err(|e| Failure::usage("--res", e))?,
            None => ParamDomain::rectangle(-1.0, 1.0, -1.0, 1.0, nu, nv)
                .map_err(|e| Failure::usage("--res", e))?,
        },
    };
    let excludes = if args.exclude.is_empty() {
        &cfg.exclude
    } else {
        &args.exclude
    };
    for spec in excludes {
        let p = parse_reals("--exclude", spec, &[3])?;
        domain = domain
            .exclude(Complex64::new(p[0], p[1]), p[2])
            .map_err(|e| Failure::usage("--exclude", e))?;
    }
    Ok(domain)
}

fn resolve_tolerances(flags: &[String], cfg: &ConfigFile) -> CliResult<Tolerances> {
    let mut tol = Tolerances::default();
    // config first so flags overwrite it
    for spec in cfg.tol.iter().chain(flags) {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| Failure::usage("--tol", format!("expected KEY=VALUE, got `{spec}`")))?;
        let value = parse_real("--tol", value)?;
        tol.set(key.trim(), value)
            .map_err(|e| Failure::usage("--tol", e))?;
    }
    Ok(tol)
}

fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> CliResult<T> {
    match threads {
        None => Ok(job()),
        Some(0) => Err(Failure::usage("--threads", "must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::usage("--threads", e))?;
            Ok(pool.install(job))
        }
    }
}

fn write_file(flag: &str, path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| Failure::usage(flag, format!("{}: {e}", path.display())))
}

fn report_summary(report: &VerificationReport, err: &mut dyn Write) {
    for line in report.summary_lines() {
        let _ = writeln!(err, "{line}");
    }
    let _ = writeln!(
        err,
        "overall: {}  (samples {}, degenerate {}, convention constant {})",
        if report.overall { "PASS" } else { "FAIL" },
        report.samples_total,
        report.samples_degenerate,
        report.convention_constant
    );
}

fn run_generate(args: &GenerateArgs, err: &mut dyn Write) -> CliResult<i32> {
    let cfg = load_config(args.source.config.as_deref())?;
    let source = resolve_source(&args.source, &cfg)?;
    let domain = resolve_domain(&args.domain, &cfg, source.default_domain)?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .ok_or_else(|| Failure::usage("--out", "required for generate"))?;
    let format = args.format.or(cfg.format).unwrap_or_else(|| {
        match out.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("ply") => MeshFormat::Ply,
            _ => MeshFormat::Obj,
        }
    });
    let no_normals = args.no_normals || cfg.no_normals.unwrap_or(false);
    let report_path = args.report.clone().or_else(|| cfg.report.clone());
    let tol = resolve_tolerances(&args.tol, &cfg)?;
    let threads = args.domain.threads.or(cfg.threads);

    let (text, report, stats) = with_threads(threads, || -> Result<_, Error> {
        let grid = mesh::sample_grid(&source.data, &domain)?;
        let mut m = mesh::triangulate(&grid)?;
        if no_normals {
            m = m.without_normals();
        }
        let text = match format {
            MeshFormat::Obj => mesh::obj_string(&m)?,
            MeshFormat::Ply => mesh::ply_string(&m)?,
        };
        let report = match report_path {
            Some(_) => Some(verify(&source.data, &domain, &tol)?),
            None => None,
        };
        let stats = format!(
            "{} vertices, {} faces, {} samples skipped",
            m.vertices.len(),
            m.faces.len(),
            m.skipped.len()
        );
        Ok((text, report, stats))
    })?
    .map_err(numerical)?;

    write_file("--out", &out, &text)?;
    let _ = writeln!(err, "wrote {}: {stats}", out.display());
    match (report, report_path) {
        (Some(report), Some(path)) => {
            write_file("--report", &path, &report.to_json())?;
            report_summary(&report, err);
            Ok(if report.overall {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAIL
            })
        }
        _ => Ok(EXIT_OK),
    }
}

fn run_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let cfg = load_config(args.source.config.as_deref())?;
    let source = resolve_source(&args.source, &cfg)?;
    let domain = resolve_domain(&args.domain, &cfg, source.default_domain)?;
    let tol = resolve_tolerances(&args.tol, &cfg)?;
    let threads = args.domain.threads.or(cfg.threads);
    let report =
        with_threads(threads, || verify(&source.data, &domain, &tol))?.map_err(numerical)?;
    match args.report.clone().or_else(|| cfg.report.clone()) {
        Some(path) => write_file("--report", &path, &report.to_json())?,
        None => {
            let _ = writeln!(out, "{}", report.to_json());
        }
    }
    report_summary(&report, err);
    Ok(if report.overall {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAIL
    })
}

#[derive(Debug, Serialize)]
struct EvalOutput {
    z: [f64; 2],
    x: RealVec3,
    x_u: RealVec3,
    x_v: RealVec3,
    normal: Option<RealVec3>,
    #[serde(rename = "H")]
    h: Option<RealVec3>,
    #[serde(rename = "H_scalar")]
    h_scalar: Option<f64>,
    degenerate: bool,
}

fn run_eval(args: &EvalArgs, out: &mut dyn Write) -> CliResult<i32> {
    let cfg = load_config(args.source.config.as_deref())?;
    let source = resolve_source(&args.source, &cfg)?;
    let at = args
        .at
        .clone()
        .or_else(|| cfg.at.clone())
        .ok_or_else(|| Failure::usage("--at", "required for eval"))?;
    let z = parse_point("--at", &at)?;
    let s = source.data.sample(z).map_err(|e| numerical(e.into()))?;
    let regular = !s.degenerate;
    let result = EvalOutput {
        z: [z.re, z.im],
        x: s.x,
        x_u: s.x_u,
        x_v: s.x_v,
        normal: regular.then_some(s.normal),
        h: regular.then_some(s.h_vec),
        h_scalar: regular.then_some(s.h_scalar),
        degenerate: s.degenerate,
    };
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&result).expect("serializable")
    );
    Ok(EXIT_OK)
}

fn run_catalog(out: &mut dyn Write) -> CliResult<i32> {
    for entry in catalog::catalog_entries() {
        let mut line = format!("{:<10} f={:<10} g={:<8}", entry.name, entry.f, entry.g);
        if let Some([p1, p2, p3]) = entry.phi {
            line.push_str(&format!(" phi=({p1}, {p2}, {p3})"));
        }
        line.push_str(&format!("  # {}", entry.note));
        let _ = writeln!(out, "{}", line.trim_end());
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => run_generate(a, err),
        Command::Verify(a) => run_verify(a, out, err),
        Command::Eval(a) => run_eval(a, out),
        Command::Catalog => run_catalog(out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "{failure}");
            failure.exit_code()
        }
    }
}
