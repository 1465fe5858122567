//! Command-line front end: `poly`, `verify`, `grid` and `approx`.
//!
//! Parameters come from flags, optionally layered over a JSON config file
//! (`--config`); flags win. Values written as integers or `p/q` keep the run
//! in exact rational arithmetic, and any decimal switches the whole run to
//! `f64` with a warning on stderr.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 cross-check
//! mismatch, 4 verification failure, 5 numerical non-convergence, 6 pole.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::hermite_pade::{
    check_hp_conditions, residual_order_check, NumeratorOptions, NumeratorState,
    DEFAULT_POLE_THRESHOLD,
};
use crate::moments::{default_max_degree, verify_orthogonality_of};
use crate::quadrature::RuleCache;
use crate::rodrigues::{jp_poly_explicit, jp_poly_operator, IndexPair, ParamSet};
use crate::scalar::{format_f64, parse_rational, Rational, Scalar};
use crate::simplex_poly::{BaryPoly, MonoPoly, WireCoeff};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;
pub const EXIT_CONVERGENCE: i32 = 5;
pub const EXIT_POLE: i32 = 6;

/// Relative agreement required between quadrature with `q` and `2q` nodes.
pub const QUAD_SELF_TOL: f64 = 1e-10;
/// Largest node count per direction tried by q-doubling.
pub const MAX_QUAD_NODES: usize = 512;

const DEFAULT_TOL: f64 = 1e-14;
const DEFAULT_QUAD_NODES: usize = 64;
const DEFAULT_FLOOR: f64 = 1.05;
const DEFAULT_GRID: (f64, f64, usize) = (2.0, 20.0, 46);

#[derive(Debug, Parser)]
#[command(
    name = "triangle-mop",
    version,
    about = "Jacobi–Piñeiro multiple orthogonal polynomials on the triangle and their Hermite–Padé approximants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the polynomial and print it in the barycentric and monomial bases.
    Poly {
        #[command(flatten)]
        common: Common,
        /// Compare against the closed-form coefficients (two measures only).
        #[arg(long)]
        check_explicit: bool,
    },
    /// Check the orthogonality and Hermite–Padé conditions.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate E_j, R_j and their errors over a rectangular grid.
    Grid {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Evaluate P, Φ_j, R_j and E_j at one point.
    Approx {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        w: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Comma-separated α_j, e.g. "0,3/2".
    #[arg(long, allow_hyphen_values = true)]
    alphas: Option<String>,
    /// Comma-separated β_j.
    #[arg(long, allow_hyphen_values = true)]
    betas: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Index pairs n:k, e.g. "2:1,2:1".
    #[arg(long)]
    pairs: Option<String>,
    /// Largest l + m checked by `verify` (default Σ n_j + 2).
    #[arg(long)]
    max_degree: Option<usize>,
    /// Starting Gauss–Jacobi node count per direction for the E_j oracle.
    #[arg(long)]
    quad_nodes: Option<usize>,
    /// ₂F₁ tolerance and floating-point zero tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (`grid`: prefix for `<out>_m<j>.<ext>`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Evaluation points need |z|, |w| above this bound.
    #[arg(long)]
    floor: Option<f64>,
    /// Relative threshold below which |P(z,w)| is treated as a pole.
    #[arg(long)]
    pole_threshold: Option<f64>,
    /// Add 1 to the barycentric coefficient l:m before checking or evaluating.
    #[arg(long)]
    perturb: Option<String>,
    /// Drop the Beta-function ratios κ_h from P^(1,0) and P^(0,1).
    #[arg(long)]
    unit_beta_ratios: bool,
    /// Normalize ψ_22 with the first measure's Γ(α_1+β_1+γ+3).
    #[arg(long)]
    psi22_first_measure: bool,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    z_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    z_max: Option<f64>,
    #[arg(long)]
    z_steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    w_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    w_max: Option<f64>,
    #[arg(long)]
    w_steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// A number given either as text ("3/2", "0.25") or as a JSON number.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum NumText {
    Text(String),
    Int(i64),
    Float(f64),
}

impl NumText {
    fn into_text(self) -> String {
        match self {
            NumText::Text(s) => s,
            NumText::Int(i) => i.to_string(),
            NumText::Float(f) => format!("{f:?}"),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    alphas: Option<Vec<NumText>>,
    betas: Option<Vec<NumText>>,
    gamma: Option<NumText>,
    pairs: Option<Vec<[usize; 2]>>,
    max_degree: Option<usize>,
    quad_nodes: Option<usize>,
    tol: Option<f64>,
    format: Option<Format>,
    floor: Option<f64>,
    pole_threshold: Option<f64>,
    grid: Option<FileGrid>,
    z: Option<f64>,
    w: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGrid {
    z_min: Option<f64>,
    z_max: Option<f64>,
    z_steps: Option<usize>,
    w_min: Option<f64>,
    w_max: Option<f64>,
    w_steps: Option<usize>,
}

/// Weight parameters in the arithmetic selected by the input.
#[derive(Debug, Clone)]
pub enum Params {
    Exact(ParamSet<Rational>),
    Float(ParamSet<f64>),
}

impl Params {
    pub fn to_f64(&self) -> ParamSet<f64> {
        match self {
            Params::Exact(p) => p.to_f64(),
            Params::Float(p) => p.clone(),
        }
    }

    pub fn r(&self) -> usize {
        match self {
            Params::Exact(p) => p.r(),
            Params::Float(p) => p.r(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub z_min: f64,
    pub z_max: f64,
    pub z_steps: usize,
    pub w_min: f64,
    pub w_max: f64,
    pub w_steps: usize,
}

impl GridSpec {
    fn axis(min: f64, max: f64, steps: usize) -> Vec<f64> {
        match steps {
            0 => Vec::new(),
            1 => vec![min],
            n => (0..n)
                .map(|i| min + (max - min) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    pub fn z_values(&self) -> Vec<f64> {
        Self::axis(self.z_min, self.z_max, self.z_steps)
    }

    pub fn w_values(&self) -> Vec<f64> {
        Self::axis(self.w_min, self.w_max, self.w_steps)
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: Params,
    pub pairs: Vec<IndexPair>,
    pub max_degree: usize,
    pub quad_nodes: usize,
    pub tol: f64,
    pub format: Option<Format>,
    pub floor: f64,
    pub pole_threshold: f64,
    pub numerator: NumeratorOptions,
    pub perturb: Option<(usize, usize)>,
    pub out: Option<PathBuf>,
    pub grid: GridSpec,
    pub point: (Option<f64>, Option<f64>),
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Pole { .. } => EXIT_POLE,
            Error::QuadratureConvergence { .. } | Error::NonConvergence { .. } => EXIT_CONVERGENCE,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the command line `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<i32> {
    match cli.command {
        Command::Poly {
            common,
            check_explicit,
        } => {
            let cfg = resolve(&common, None, None, stderr)?;
            let (text, code) = match &cfg.params {
                Params::Exact(p) => cmd_poly(p, &cfg, check_explicit)?,
                Params::Float(p) => cmd_poly(p, &cfg, check_explicit)?,
            };
            emit(&cfg.out, &text, stdout)?;
            if code == EXIT_MISMATCH {
                let _ = writeln!(stderr, "error: operator and closed-form constructions differ");
            }
            Ok(code)
        }
        Command::Verify { common } => {
            let cfg = resolve(&common, None, None, stderr)?;
            let (text, pass) = match &cfg.params {
                Params::Exact(p) => cmd_verify(p, &cfg)?,
                Params::Float(p) => cmd_verify(p, &cfg)?,
            };
            emit(&cfg.out, &text, stdout)?;
            if pass {
                Ok(EXIT_OK)
            } else {
                let _ = writeln!(stderr, "error: nonzero residual inside a condition set");
                Ok(EXIT_VERIFY)
            }
        }
        Command::Grid { common, grid } => {
            let cfg = resolve(&common, Some(&grid), None, stderr)?;
            let written = cmd_grid(&cfg)?;
            for path in written {
                let _ = writeln!(stdout, "{}", path.display());
            }
            Ok(EXIT_OK)
        }
        Command::Approx { common, z, w } => {
            let cfg = resolve(&common, None, Some((z, w)), stderr)?;
            let text = cmd_approx(&cfg)?;
            emit(&cfg.out, &text, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::io(Path::new("<stdout>"), e)),
    }
}

fn split_list(text: &str) -> Vec<String> {
    text.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_pairs(text: &str) -> CliResult<Vec<(usize, usize)>> {
    split_list(text)
        .iter()
        .map(|item| {
            let (n, k) = item
                .split_once(':')
                .ok_or_else(|| Failure::usage(format!("index pair {item:?} is not of the form n:k")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::usage(format!("bad integer in index pair {item:?}")))
            };
            Ok((parse(n)?, parse(k)?))
        })
        .collect()
}

enum Value1 {
    Exact(Rational),
    Float(f64),
}

fn parse_value(text: &str) -> CliResult<Value1> {
    if let Some(r) = parse_rational(text) {
        return Ok(Value1::Exact(r));
    }
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Value1::Float)
        .ok_or_else(|| Failure::usage(format!("cannot parse parameter value {text:?}")))
}

fn build_params(
    alphas: &[String],
    betas: &[String],
    gamma: &str,
    stderr: &mut dyn Write,
) -> CliResult<Params> {
    let parse_all = |v: &[String]| v.iter().map(|s| parse_value(s)).collect::<CliResult<Vec<_>>>();
    let (a, b, g) = (parse_all(alphas)?, parse_all(betas)?, parse_value(gamma)?);
    let exact = a
        .iter()
        .chain(&b)
        .chain(std::iter::once(&g))
        .all(|v| matches!(v, Value1::Exact(_)));
    if exact {
        let unwrap = |v: Value1| match v {
            Value1::Exact(r) => r,
            Value1::Float(_) => unreachable!("checked above"),
        };
        let params = ParamSet::new(
            a.into_iter().map(unwrap).collect(),
            b.into_iter().map(unwrap).collect(),
            unwrap(g),
        )?;
        Ok(Params::Exact(params))
    } else {
        let _ = writeln!(
            stderr,
            "warning: decimal parameter values given; running in floating-point mode"
        );
        let to_f = |v: Value1| match v {
            Value1::Exact(r) => Scalar::to_f64(&r),
            Value1::Float(f) => f,
        };
        let params = ParamSet::new(
            a.into_iter().map(to_f).collect(),
            b.into_iter().map(to_f).collect(),
            to_f(g),
        )?;
        Ok(Params::Float(params))
    }
}

fn read_config(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: invalid config: {e}", path.display())))
}

fn resolve(
    c: &Common,
    grid: Option<&GridArgs>,
    point: Option<(Option<f64>, Option<f64>)>,
    stderr: &mut dyn Write,
) -> CliResult<RunConfig> {
    let file = match &c.config {
        Some(path) => read_config(path)?,
        None => FileConfig::default(),
    };
    let texts = |flag: &Option<String>, from_file: Option<Vec<NumText>>| -> Option<Vec<String>> {
        flag.as_deref()
            .map(split_list)
            .or_else(|| from_file.map(|v| v.into_iter().map(NumText::into_text).collect()))
    };
    let alphas = texts(&c.alphas, file.alphas).ok_or_else(|| Failure::usage("missing --alphas"))?;
    let betas = texts(&c.betas, file.betas).ok_or_else(|| Failure::usage("missing --betas"))?;
    let gamma = c
        .gamma
        .clone()
        .or_else(|| file.gamma.map(NumText::into_text))
        .ok_or_else(|| Failure::usage("missing --gamma"))?;
    let raw_pairs = match &c.pairs {
        Some(text) => parse_pairs(text)?,
        None => file
            .pairs
            .map(|v| v.into_iter().map(|[n, k]| (n, k)).collect())
            .ok_or_else(|| Failure::usage("missing --pairs"))?,
    };
    let pairs = raw_pairs
        .into_iter()
        .map(|(n, k)| IndexPair::new(n, k))
        .collect::<crate::Result<Vec<_>>>()?;
    let params = build_params(&alphas, &betas, &gamma, stderr)?;
    if pairs.len() != params.r() {
        return Err(Failure::usage(format!(
            "{} index pairs given for {} measures",
            pairs.len(),
            params.r()
        )));
    }

    let tol = c.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
    let quad_nodes = c.quad_nodes.or(file.quad_nodes).unwrap_or(DEFAULT_QUAD_NODES);
    if quad_nodes == 0 {
        return Err(Failure::usage("--quad-nodes must be positive"));
    }
    let floor = c.floor.or(file.floor).unwrap_or(DEFAULT_FLOOR);
    let perturb = match &c.perturb {
        Some(text) => {
            let v = parse_pairs(text)?;
            match v.as_slice() {
                [one] => Some(*one),
                _ => return Err(Failure::usage("--perturb takes a single l:m")),
            }
        }
        None => None,
    };

    let fg = file.grid.unwrap_or_default();
    let pick = |flag: Option<f64>, from_file: Option<f64>, default: f64| flag.or(from_file).unwrap_or(default);
    let pick_n = |flag: Option<usize>, from_file: Option<usize>| flag.or(from_file).unwrap_or(DEFAULT_GRID.2);
    let g = grid;
    let grid = GridSpec {
        z_min: pick(g.and_then(|g| g.z_min), fg.z_min, DEFAULT_GRID.0),
        z_max: pick(g.and_then(|g| g.z_max), fg.z_max, DEFAULT_GRID.1),
        z_steps: pick_n(g.and_then(|g| g.z_steps), fg.z_steps),
        w_min: pick(g.and_then(|g| g.w_min), fg.w_min, DEFAULT_GRID.0),
        w_max: pick(g.and_then(|g| g.w_max), fg.w_max, DEFAULT_GRID.1),
        w_steps: pick_n(g.and_then(|g| g.w_steps), fg.w_steps),
    };
    let point = point.unwrap_or((None, None));

    Ok(RunConfig {
        max_degree: c
            .max_degree
            .or(file.max_degree)
            .unwrap_or_else(|| default_max_degree(&pairs)),
        params,
        pairs,
        quad_nodes,
        tol,
        format: c.format.or(file.format),
        floor,
        pole_threshold: c
            .pole_threshold
            .or(file.pole_threshold)
            .unwrap_or(DEFAULT_POLE_THRESHOLD),
        numerator: NumeratorOptions {
            unit_beta_ratios: c.unit_beta_ratios,
            psi22_first_measure: c.psi22_first_measure,
            tol,
        },
        perturb,
        out: c.out.clone(),
        grid,
        point: (point.0.or(file.z), point.1.or(file.w)),
    })
}

fn build_poly<S: Scalar>(params: &ParamSet<S>, cfg: &RunConfig) -> CliResult<BaryPoly<S>> {
    let mut p = jp_poly_operator(params, &cfg.pairs)?;
    if let Some((l, m)) = cfg.perturb {
        p.add_term(l, m, S::one())?;
    }
    Ok(p)
}

fn polys_agree<S: Scalar>(a: &BaryPoly<S>, b: &BaryPoly<S>, tol: f64) -> bool {
    if S::EXACT {
        return a == b;
    }
    let scale = a.terms().map(|(_, c)| c.abs_f64()).fold(0.0, f64::max).max(1.0);
    let diff = a.scale_add(b, &-S::one());
    matches!(diff, Ok(d) if d.terms().all(|(_, c)| c.abs_f64() <= tol * scale))
}

fn cmd_poly<S: WireCoeff>(params: &ParamSet<S>, cfg: &RunConfig, check_explicit: bool) -> CliResult<(String, i32)> {
    let p = build_poly(params, cfg)?;
    let mono = p.to_mono();
    let mut code = EXIT_OK;
    let mut explicit_ok = None;
    if check_explicit {
        let explicit = jp_poly_explicit(params, &cfg.pairs)?;
        let ok = polys_agree(&p, &explicit, cfg.tol.max(1e-12));
        if !ok {
            code = EXIT_MISMATCH;
        }
        explicit_ok = Some(ok);
    }
    let text = match cfg.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut s = format!("bary: {}\nmono: {}\n", p.to_expression(), mono.to_expression("z", "w"));
            if let Some(ok) = explicit_ok {
                let _ = writeln!(s, "explicit: {}", if ok { "match" } else { "MISMATCH" });
            }
            s
        }
        Format::Json => {
            let v = json!({
                "degree": p.degree(),
                "bary": p.to_expression(),
                "mono": mono.to_expression("z", "w"),
                "bary_terms": p.to_wire(),
                "mono_terms": mono.to_wire(),
                "explicit_match": explicit_ok,
            });
            pretty(&v)
        }
        Format::Csv => {
            let mut s = String::from("basis,l,m,coeff\n");
            for (&(l, m), c) in p.terms() {
                let _ = writeln!(s, "bary,{l},{m},{}", c.to_text());
            }
            for (&(a, b), c) in mono.terms() {
                let _ = writeln!(s, "mono,{a},{b},{}", c.to_text());
            }
            s
        }
    };
    Ok((text, code))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn cmd_verify<S: Scalar>(params: &ParamSet<S>, cfg: &RunConfig) -> CliResult<(String, bool)> {
    let p = build_poly(params, cfg)?;
    let mono: MonoPoly<S> = p.to_mono();
    let d = cfg.max_degree;
    let orth = verify_orthogonality_of(&p, params, &cfg.pairs, d, cfg.tol)?;
    let hp = check_hp_conditions(&mono, params, &cfg.pairs, d, cfg.tol)?;
    let order = residual_order_check(&mono, params, &cfg.pairs, d, cfg.tol)?;
    let pass = orth.pass && hp.pass;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut s = String::from("check,measure,l,m,in_set,residual\n");
            for (name, report) in [("orthogonality", &orth), ("hermite_pade", &hp)] {
                for mr in &report.measures {
                    for e in &mr.entries {
                        let _ = writeln!(s, "{name},{},{},{},{},{}", mr.measure, e.l, e.m, e.in_set, e.residual.to_text());
                    }
                }
            }
            s
        }
        _ => pretty(&json!({
            "max_degree": d,
            "exact": S::EXACT,
            "orthogonality": orth.to_json(),
            "hermite_pade": hp.to_json(),
            "order": order.iter().map(|o| o.to_json()).collect::<Vec<_>>(),
            "pass": pass,
        })),
    };
    Ok((text, pass))
}

fn mono_f64(cfg: &RunConfig) -> CliResult<MonoPoly<f64>> {
    Ok(match &cfg.params {
        Params::Exact(p) => build_poly(p, cfg)?.to_mono().to_f64(),
        Params::Float(p) => build_poly(p, cfg)?.to_mono(),
    })
}

fn check_floor(name: &str, v: f64, floor: f64) -> CliResult<()> {
    if v.is_finite() && v.abs() > floor {
        Ok(())
    } else {
        Err(Failure::usage(format!(
            "{name} = {v} must satisfy |{name}| > {floor} (see --floor)"
        )))
    }
}

fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn cmd_approx(cfg: &RunConfig) -> CliResult<String> {
    let (Some(z), Some(w)) = cfg.point else {
        return Err(Failure::usage("approx needs --z and --w"));
    };
    check_floor("z", z, cfg.floor)?;
    check_floor("w", w, cfg.floor)?;
    let a = mono_f64(cfg)?;
    let pf = cfg.params.to_f64();
    let p_value = a.evaluate(&z, &w);
    let mut fields = Map::new();
    fields.insert("z".into(), json_f64(z));
    fields.insert("w".into(), json_f64(w));
    fields.insert("P".into(), json_f64(p_value));
    let mut rows = Vec::new();
    for j in 0..pf.r() {
        let state = NumeratorState::new(a.clone(), &pf, j, cfg.numerator)?;
        let phi = state.phi(z, w)?;
        let r = state.approximant(z, w, cfg.pole_threshold)?;
        let (e, _) = RuleCache::for_measure(&pf, j).e_converged(z, w, cfg.quad_nodes, QUAD_SELF_TOL, MAX_QUAD_NODES)?;
        let abs_err = (e - r).abs();
        let rel_err = abs_err / e.abs();
        let k = j + 1;
        fields.insert(format!("Phi_{k}"), json_f64(phi));
        fields.insert(format!("R_{k}"), json_f64(r));
        fields.insert(format!("E_{k}"), json_f64(e));
        fields.insert(format!("abs_err_{k}"), json_f64(abs_err));
        fields.insert(format!("rel_err_{k}"), json_f64(rel_err));
        rows.push((k, phi, r, e, abs_err, rel_err));
    }
    Ok(match cfg.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut s = String::from("measure,z,w,P,Phi,R,E,abs_err,rel_err\n");
            for (k, phi, r, e, ae, re) in rows {
                let f = format_f64;
                let _ = writeln!(s, "{k},{},{},{},{},{},{},{},{}", f(z), f(w), f(p_value), f(phi), f(r), f(e), f(ae), f(re));
            }
            s
        }
        _ => pretty(&Value::Object(fields)),
    })
}

/// One grid cell; `approx` is `None` at poles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub z: f64,
    pub w: f64,
    pub e: f64,
    pub approx: Option<f64>,
}

impl GridRow {
    pub fn abs_err(&self) -> Option<f64> {
        self.approx.map(|r| (self.e - r).abs())
    }

    pub fn rel_err(&self) -> Option<f64> {
        self.abs_err().map(|a| a / self.e.abs())
    }
}

/// Rows of measure `j` in w-major order.
pub fn grid_rows(cfg: &RunConfig, a: &MonoPoly<f64>, j: usize) -> crate::Result<Vec<GridRow>> {
    let pf = cfg.params.to_f64();
    let state = NumeratorState::new(a.clone(), &pf, j, cfg.numerator)?;
    let mut cache = RuleCache::for_measure(&pf, j);
    let zs = cfg.grid.z_values();
    let mut rows = Vec::new();
    for w in cfg.grid.w_values() {
        for &z in &zs {
            let (e, _) = cache.e_converged(z, w, cfg.quad_nodes, QUAD_SELF_TOL, MAX_QUAD_NODES)?;
            let approx = match state.approximant(z, w, cfg.pole_threshold) {
                Ok(r) => Some(r),
                Err(Error::Pole { .. }) => None,
                Err(err) => return Err(err),
            };
            rows.push(GridRow { z, w, e, approx });
        }
    }
    Ok(rows)
}

fn cmd_grid(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    for v in cfg.grid.z_values() {
        check_floor("z", v, cfg.floor)?;
    }
    for v in cfg.grid.w_values() {
        check_floor("w", v, cfg.floor)?;
    }
    let a = mono_f64(cfg)?;
    let format = match cfg.format.unwrap_or(Format::Csv) {
        Format::Text => Format::Csv,
        f => f,
    };
    let prefix = cfg.out.clone().unwrap_or_else(|| PathBuf::from("grid"));
    let mut written = Vec::new();
    for j in 0..cfg.params.r() {
        let rows = grid_rows(cfg, &a, j)?;
        let ext = if format == Format::Json { "json" } else { "csv" };
        let mut name = prefix.clone().into_os_string();
        name.push(format!("_m{}.{ext}", j + 1));
        let path = PathBuf::from(name);
        let text = if format == Format::Json {
            let list: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let opt = |v: Option<f64>| v.map(json_f64).unwrap_or(Value::Null);
                    json!({
                        "z": json_f64(r.z),
                        "w": json_f64(r.w),
                        "E": json_f64(r.e),
                        "R": opt(r.approx),
                        "abs_err": opt(r.abs_err()),
                        "rel_err": opt(r.rel_err()),
                    })
                })
                .collect();
            pretty(&Value::Array(list))
        } else {
            let mut s = String::from("z,w,E,R,abs_err,rel_err\n");
            let opt = |v: Option<f64>| v.map(format_f64).unwrap_or_default();
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    format_f64(r.z),
                    format_f64(r.w),
                    format_f64(r.e),
                    opt(r.approx),
                    opt(r.abs_err()),
                    opt(r.rel_err())
                );
            }
            s
        };
        std::fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
